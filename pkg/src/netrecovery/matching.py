"""Pairwise graph matching by degree profiles, seeds, and the cleanup iteration.

A matching of ``g1`` to ``g2`` is a :class:`Permutation` ``pi`` with
``pi(u) = v`` meaning node ``u`` of ``g1`` corresponds to node ``v`` of
``g2``; ``permute(g2, pi)`` is then ``g2`` aligned to ``g1``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .assignment import solve_constrained, solve_max, solve_max_sparse, solve_min
from .errors import DimensionError
from .graph import Graph, Permutation

__all__ = [
    "DegreeProfile",
    "SeedSet",
    "degree_profile",
    "tv_distance",
    "profile_matrix",
    "profile_distance_matrix",
    "stage_one",
    "match_degree_profiles",
    "extract_seeds",
    "expand_seeds",
    "common_neighbor_scores",
    "cleanup_pair",
    "default_cleanup_iterations",
]


@dataclass(frozen=True)
class DegreeProfile:
    """Histogram of the degrees of a node's neighbors."""

    histogram: Mapping[int, int]
    total: int

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeProfile":
        hist = Counter(int(d) for d in degrees)
        return cls(dict(sorted(hist.items())), sum(hist.values()))


@dataclass(frozen=True)
class SeedSet:
    """Conflict-free set of matched pairs ``(u in g_i, v in g_j)``."""

    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset((int(u), int(v)) for u, v in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lefts = [u for u, _ in pairs]
        rights = [v for _, v in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("seed set has a node matched twice")

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def inverse(self) -> "SeedSet":
        return SeedSet(frozenset((v, u) for u, v in self.pairs))


def degree_profile(g: Graph, u: int) -> DegreeProfile:
    return DegreeProfile.from_degrees(g.degrees()[g.neighbors(u)])


def tv_distance(p: DegreeProfile, q: DegreeProfile) -> float:
    """Total variation between normalized profiles.

    Two empty profiles are at distance 0; an empty and a non-empty one at 1.
    """
    if p.total == 0 or q.total == 0:
        return 0.0 if p.total == q.total else 1.0
    keys = set(p.histogram) | set(q.histogram)
    return 0.5 * sum(abs(p.histogram.get(k, 0) / p.total - q.histogram.get(k, 0) / q.total) for k in keys)


def profile_matrix(g: Graph, width: int | None = None) -> np.ndarray:
    """Row ``u`` is the normalized degree profile of ``u`` over degree values ``0..width-1``."""
    deg = g.degrees()
    if width is None:
        width = int(deg.max()) + 1
    onehot = np.zeros((g.n, width), dtype=np.float64)
    onehot[np.arange(g.n), deg] = 1.0
    counts = g.adjacency.astype(np.float64) @ onehot
    safe = np.where(deg > 0, deg, 1).astype(np.float64)
    return counts / safe[:, None]


def profile_distance_matrix(g1: Graph, g2: Graph) -> np.ndarray:
    """``Z[u, v]`` = TV distance between the profile of ``u`` in ``g1`` and ``v`` in ``g2``."""
    if g1.n != g2.n:
        raise DimensionError(f"size mismatch: {g1.n} vs {g2.n}")
    width = int(max(g1.degrees().max(), g2.degrees().max())) + 1
    z = 0.5 * cdist(profile_matrix(g1, width), profile_matrix(g2, width), metric="cityblock")
    empty1 = g1.degrees() == 0
    empty2 = g2.degrees() == 0
    z[np.ix_(empty1, ~empty2)] = 1.0
    z[np.ix_(~empty1, empty2)] = 1.0
    # summing floats can leave tiny positive residue where profiles coincide
    return np.clip(z, 0.0, 1.0)


def stage_one(z: np.ndarray) -> Permutation | None:
    """Return the permutation formed by the ``n`` smallest entries of ``z``, if any.

    Fails (returns ``None``) when those entries repeat a row or column, or
    when the ``n``-th and ``(n+1)``-th smallest values tie.
    """
    n = z.shape[0]
    flat = z.ravel()
    if n == 1:
        return Permutation([0])
    idx = np.argpartition(flat, n)[: n + 1]
    order = np.lexsort((idx, flat[idx]))
    idx = idx[order]
    if flat[idx[n - 1]] == flat[idx[n]]:
        return None
    rows, cols = np.divmod(idx[:n], n)
    if np.unique(rows).size != n or np.unique(cols).size != n:
        return None
    images = np.empty(n, dtype=np.int64)
    images[rows] = cols
    return Permutation(images, validate=False)


def match_degree_profiles(
    g1: Graph,
    g2: Graph,
    seeds: SeedSet | None = None,
    *,
    z: np.ndarray | None = None,
) -> Permutation:
    """Match ``g1`` to ``g2`` by degree profiles.

    The ``n`` smallest profile distances are used directly when they already
    form a permutation (and agree with any seeds); otherwise the linear
    assignment problem on the distance matrix is solved, with seeds pinned.
    """
    if g1.n != g2.n:
        raise DimensionError(f"size mismatch: {g1.n} vs {g2.n}")
    if z is None:
        z = profile_distance_matrix(g1, g2)
    pi = stage_one(z)
    if pi is not None and (not seeds or all(pi.images[u] == v for u, v in seeds.pairs)):
        return pi
    if seeds:
        return solve_constrained(z, seeds.pairs).perm
    return solve_min(z).perm


def extract_seeds(g1: Graph, g2: Graph, z: np.ndarray, tau: float, tau2: float, xi: float) -> SeedSet:
    """High-degree pairs with close profiles, reduced to a conflict-free set.

    Candidates are taken greedily in order of ``(Z, u, v)``; a candidate is
    dropped if either node is already used.
    """
    z = np.asarray(z)
    if z.shape != (g1.n, g2.n):
        raise DimensionError(f"Z has shape {z.shape}, graphs have {g1.n} and {g2.n} nodes")
    rows = np.flatnonzero(g1.degrees() >= tau)
    cols = np.flatnonzero(g2.degrees() >= tau2)
    if rows.size == 0 or cols.size == 0:
        return SeedSet()
    sub = z[np.ix_(rows, cols)]
    ri, ci = np.nonzero(sub <= xi)
    cand_u, cand_v = rows[ri], cols[ci]
    vals = z[cand_u, cand_v]
    order = np.lexsort((cand_v, cand_u, vals))
    used_u, used_v, pairs = set(), set(), []
    for k in order:
        u, v = int(cand_u[k]), int(cand_v[k])
        if u in used_u or v in used_v:
            continue
        used_u.add(u)
        used_v.add(v)
        pairs.append((u, v))
    return SeedSet(frozenset(pairs))


def expand_seeds(seed_sets: Mapping[tuple[int, int], SeedSet], m: int | None = None) -> dict[tuple[int, int], SeedSet]:
    """Close seed sets under composition through intermediate graphs.

    ``seed_sets`` maps graph index pairs ``(i, j)`` with ``i < j`` to seeds.
    A pair ``(u, v)`` joins ``S[i, j]`` when some ``w`` and ``k`` give
    ``(u, w) in S[i, k]`` and ``(w, v) in S[k, j]`` (with ``S[k, i]`` read as
    the inverse of ``S[i, k]``).  Existing pairs are never removed; a new
    candidate that conflicts with an accepted pair is dropped, candidates
    being visited in lexicographic order.  Iterates to a fixed point.
    """
    if m is None:
        m = max((j for _, j in seed_sets), default=0) + 1
    fwd: dict[tuple[int, int], dict[int, int]] = {}
    for i in range(m):
        for j in range(i + 1, m):
            fwd[i, j] = dict(seed_sets[i, j].pairs) if (i, j) in seed_sets else {}
    for (i, j) in seed_sets:
        if not (0 <= i < j < m):
            raise ValueError(f"seed set key {(i, j)} is not a pair i < j < {m}")

    def mapping(a: int, b: int) -> dict[int, int]:
        if a < b:
            return fwd[a, b]
        return {v: u for u, v in fwd[b, a].items()}

    changed = True
    while changed:
        changed = False
        for i in range(m):
            for j in range(i + 1, m):
                cur = fwd[i, j]
                used_v = set(cur.values())
                cands = set()
                for k in range(m):
                    if k in (i, j):
                        continue
                    f, g = mapping(i, k), mapping(k, j)
                    if not f or not g:
                        continue
                    cands.update((u, g[w]) for u, w in f.items() if w in g)
                for u, v in sorted(cands):
                    if u in cur or v in used_v:
                        continue
                    cur[u] = v
                    used_v.add(v)
                    changed = True
    return {key: SeedSet(frozenset(val.items())) for key, val in fwd.items()}


def default_cleanup_iterations(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def common_neighbor_scores(g1: Graph, g2: Graph, pi0: Permutation, *, sparse: bool | None = None):
    """Score ``S[u, x]`` = number of neighbors ``v`` of ``u`` in ``g1`` with ``pi0(v)`` adjacent to ``x`` in ``g2``.

    This is the matrix ``A1 P A2`` of the cleanup objective.  With
    ``sparse=None`` a sparse product is used when the result is expected to
    be sparse (squared mean degree well below ``n``).
    """
    if not (g1.n == g2.n == pi0.n):
        raise DimensionError("graphs and permutation must share n")
    n = g1.n
    if sparse is None:
        d1 = g1.degrees().mean()
        d2 = g2.degrees().mean()
        sparse = d1 * d2 < 0.1 * n
    a2 = g2.adjacency[pi0.images]
    if sparse:
        return sp.csr_matrix(g1.adjacency, dtype=np.float64) @ sp.csr_matrix(a2, dtype=np.float64)
    # float32 counts are exact below 2**24
    return g1.adjacency.astype(np.float32) @ a2.astype(np.float32)


def cleanup_pair(g1: Graph, g2: Graph, pi0: Permutation, T: int | None = None) -> Permutation:
    """Refine a matching by ``T`` rounds of ``pi_t = argmax <pi, A1 P(pi_{t-1}) A2>``.

    Stops early once an iteration returns its input.
    """
    if T is None:
        T = default_cleanup_iterations(g1.n)
    if T < 1:
        raise ValueError("T must be at least 1")
    pi = pi0
    for _ in range(T):
        scores = common_neighbor_scores(g1, g2, pi)
        if sp.issparse(scores):
            new = solve_max_sparse(scores).perm
        else:
            new = solve_max(scores).perm
        if new == pi:
            break
        pi = new
    return pi
