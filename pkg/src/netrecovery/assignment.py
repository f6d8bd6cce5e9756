"""Exact linear assignment.

Backed by ``scipy.optimize.linear_sum_assignment`` (a shortest augmenting
path solver of the Jonker-Volgenant family, O(n^3) worst case).  Only the
objective value is part of the contract when optima are not unique, with one
exception: a constant matrix always yields the identity.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from .errors import ConstraintError, DimensionError, DomainError
from .graph import Permutation

__all__ = ["Assignment", "solve_min", "solve_max", "solve_max_sparse", "solve_constrained"]


class Assignment(NamedTuple):
    perm: Permutation
    objective: float


def _check_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionError(f"cost matrix must be square, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise DomainError("cost matrix has non-finite entries")
    return c


def _solve(c: np.ndarray) -> np.ndarray:
    n = c.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    if c.min() == c.max():
        return np.arange(n)
    rows, cols = linear_sum_assignment(c)
    out = np.empty(n, dtype=np.int64)
    out[rows] = cols
    return out


def solve_min(cost) -> Assignment:
    """Permutation minimizing ``sum_u cost[u, pi(u)]``."""
    c = _check_cost(cost)
    images = _solve(c)
    obj = float(c[np.arange(c.shape[0]), images].sum())
    return Assignment(Permutation(images, validate=False), obj)


def solve_max(score) -> Assignment:
    """Permutation maximizing ``sum_u score[u, pi(u)]`` (solved as ``solve_min(-score)``)."""
    s = _check_cost(score)
    perm, neg = solve_min(-s)
    return Assignment(perm, -neg)


def solve_max_sparse(score: sp.spmatrix) -> Assignment:
    """``solve_max`` for a sparse score matrix; absent entries score 0."""
    if score.shape[0] != score.shape[1]:
        raise DimensionError(f"score matrix must be square, got shape {score.shape}")
    return solve_max(score.toarray())


def solve_constrained(cost, pinned: Iterable[tuple[int, int]]) -> Assignment:
    """Minimum-cost permutation containing every pinned ``(row, col)`` pair."""
    c = _check_cost(cost)
    n = c.shape[0]
    pins = sorted({(int(r), int(k)) for r, k in pinned})
    rows = [r for r, _ in pins]
    cols = [k for _, k in pins]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ConstraintError("pinned pairs share a row or a column")
    for r, k in pins:
        if not (0 <= r < n and 0 <= k < n):
            raise IndexError(f"pinned pair ({r}, {k}) out of range for n={n}")
    if not pins:
        return solve_min(c)

    free_rows = np.setdiff1d(np.arange(n), rows)
    free_cols = np.setdiff1d(np.arange(n), cols)
    images = np.empty(n, dtype=np.int64)
    images[rows] = cols
    if free_rows.size:
        sub = _solve(c[np.ix_(free_rows, free_cols)])
        images[free_rows] = free_cols[sub]
    obj = float(c[np.arange(n), images].sum())
    return Assignment(Permutation(images, validate=False), obj)
