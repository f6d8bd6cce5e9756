"""Aligned averaging, thresholding, and the end-to-end recovery pipeline."""

from __future__ import annotations

import csv
import io
import math
import os
from typing import NamedTuple, Sequence

import numpy as np

from .alignment import AlignmentResult, cleanup_pairwise, multi_cleanup, sequential_match
from .errors import DegenerateInputError, DimensionError, DomainError
from .graph import Graph, permute
from .matching import SeedSet, expand_seeds, extract_seeds, profile_distance_matrix

__all__ = [
    "AverageMatrix",
    "RecoveryResult",
    "aligned_average",
    "threshold",
    "elbow_threshold",
    "default_seed_params",
    "pipeline_seeds",
    "recover",
    "format_average_csv",
    "parse_average_csv",
    "write_average_csv",
    "read_average_csv",
]


class AverageMatrix:
    """Mean of ``m`` aligned adjacency matrices.

    Stored as the integer count of samples carrying each pair, so every
    entry is exactly ``k / m``.
    """

    __slots__ = ("_counts", "m")

    def __init__(self, counts, m: int):
        c = np.array(counts, dtype=np.int64, copy=True)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionError(f"counts must be square, got {c.shape}")
        if m < 1:
            raise DomainError("m must be positive")
        if c.min(initial=0) < 0 or c.max(initial=0) > m:
            raise DomainError("counts must lie in [0, m]")
        if c.diagonal().any() or not np.array_equal(c, c.T):
            raise DomainError("counts must be symmetric with zero diagonal")
        c.setflags(write=False)
        self._counts = c
        self.m = int(m)

    @classmethod
    def from_values(cls, values, m: int) -> "AverageMatrix":
        v = np.asarray(values, dtype=np.float64)
        k = np.rint(v * m)
        if not np.allclose(k / m, v, rtol=0, atol=1e-9):
            raise DomainError(f"values are not multiples of 1/{m}")
        return cls(k.astype(np.int64), m)

    @property
    def n(self) -> int:
        return self._counts.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    @property
    def values(self) -> np.ndarray:
        return self._counts / self.m

    def as_array(self) -> np.ndarray:
        return self.values

    def upper_counts(self) -> np.ndarray:
        return self._counts[np.triu_indices(self.n, k=1)]

    def __eq__(self, other):
        if not isinstance(other, AverageMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"AverageMatrix(n={self.n}, m={self.m})"


def aligned_average(graphs: Sequence[Graph], alignment: AlignmentResult) -> AverageMatrix:
    """Average of ``graphs[i]`` realigned by ``alignment.composed[i]``."""
    if len(graphs) < 1:
        raise ValueError("need at least one graph")
    if alignment.m != len(graphs):
        raise ValueError(f"alignment covers {alignment.m} graphs, got {len(graphs)}")
    n = graphs[0].n
    counts = np.zeros((n, n), dtype=np.int64)
    for g, pi in zip(graphs, alignment.composed):
        if g.n != n:
            raise DimensionError("all graphs must have the same number of nodes")
        counts += permute(g, pi).adjacency
    return AverageMatrix(counts, len(graphs))


def threshold(avg: AverageMatrix, w: float) -> Graph:
    """Edge ``(u, v)`` iff ``avg[u, v] > w``; entries equal to ``w`` become non-edges."""
    if not (0.0 < w < 1.0):
        raise DomainError(f"threshold must lie in (0, 1), got {w}")
    # compare counts to w*m to avoid k/m rounding
    return Graph(avg.counts > w * avg.m, validate=False)


def elbow_threshold(avg: AverageMatrix) -> float:
    """Pick a threshold in the emptiest stretch of the level histogram.

    Entries live on the grid ``k / m``.  Between the lowest and highest
    occupied levels, take the levels with the smallest count, choose the
    longest consecutive run of them (ties: closest to 1/2, then lowest) and
    return the run's midpoint.  With no interior level the answer is 0.5.
    """
    m = avg.m
    hist = np.bincount(avg.upper_counts(), minlength=m + 1)
    occupied = np.flatnonzero(hist)
    lo, hi = int(occupied[0]), int(occupied[-1])
    if lo == hi:
        raise DegenerateInputError("average matrix is constant; no threshold can separate it")
    if hi - lo < 2:
        return 0.5
    interior = hist[lo + 1 : hi]
    low_mask = interior == interior.min()
    best = None
    k = 0
    while k < interior.size:
        if not low_mask[k]:
            k += 1
            continue
        start = k
        while k < interior.size and low_mask[k]:
            k += 1
        a, b = lo + 1 + start, lo + k
        mid = (a + b) / (2 * m)
        key = (-(b - a), abs(mid - 0.5), a)
        if best is None or key < best[0]:
            best = (key, mid)
    return float(best[1])


class RecoveryResult(NamedTuple):
    estimate: Graph
    average: AverageMatrix
    alignment: AlignmentResult
    threshold: float


def default_seed_params(graphs: Sequence[Graph]) -> tuple[float, float, float]:
    """Degree cut at the ``1 - log(n)/(n q)`` quantile and a profile-distance cut of 0.25."""
    n = graphs[0].n
    degs = np.concatenate([g.degrees() for g in graphs])
    mean_deg = max(float(degs.mean()), 1e-12)
    level = min(max(1.0 - math.log(n) / mean_deg, 0.0), 1.0)
    tau = float(np.quantile(degs, level))
    return tau, tau, 0.25


def pipeline_seeds(graphs: Sequence[Graph], tau=None, tau2=None, xi=None) -> dict[int, SeedSet]:
    """Seeds for every consecutive pair, enriched through all other pairs.

    Direct seeds are extracted for every pair ``i < j`` and closed under
    composition; the consecutive-pair sets are returned keyed by ``i``.
    """
    d_tau, d_tau2, d_xi = default_seed_params(graphs)
    tau = d_tau if tau is None else tau
    tau2 = d_tau2 if tau2 is None else tau2
    xi = d_xi if xi is None else xi
    m = len(graphs)
    direct = {}
    for i in range(m):
        for j in range(i + 1, m):
            z = profile_distance_matrix(graphs[i], graphs[j])
            direct[i, j] = extract_seeds(graphs[i], graphs[j], z, tau, tau2, xi)
    closed = expand_seeds(direct, m)
    return {i: closed[i, i + 1] for i in range(m - 1)}


def recover(
    graphs: Sequence[Graph],
    *,
    cleanup: bool = True,
    seeds: bool = False,
    T: int | None = None,
    w: float | str = 0.5,
    seed=0,
    max_sweeps: int | None = None,
    workers: int | None = None,
) -> RecoveryResult:
    """Estimate the parent network from ``m >= 2`` unlabeled noisy samples.

    Sequential degree-profile matching, optional cleanup (each consecutive
    matching first, then the multi-graph cleanup on the composed
    alignments), aligned averaging, then thresholding at ``w`` (``"auto"`` picks the
    elbow threshold).  ``seed`` drives the random pair draws of the cleanup.
    """
    if len(graphs) < 2:
        raise ValueError(f"need at least 2 graphs, got {len(graphs)}")
    seed_sets = pipeline_seeds(graphs) if seeds else None
    alignment = sequential_match(graphs, seed_sets, workers=workers)
    if cleanup:
        alignment = cleanup_pairwise(graphs, alignment, T=T)
        alignment = multi_cleanup(graphs, alignment, T=T, max_sweeps=max_sweeps, seed=seed)
    avg = aligned_average(graphs, alignment)
    if w == "auto":
        w_used = elbow_threshold(avg)
    else:
        w_used = float(w)
    return RecoveryResult(threshold(avg, w_used), avg, alignment, w_used)


# --- CSV of upper-triangular entries ---------------------------------------

def format_average_csv(avg: AverageMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "v", "value"])
    iu, iv = np.triu_indices(avg.n, k=1)
    vals = avg.values[iu, iv]
    for u, v, x in zip(iu.tolist(), iv.tolist(), vals.tolist()):
        writer.writerow([u, v, repr(x)])
    return buf.getvalue()


def parse_average_csv(text: str, m: int) -> AverageMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["u", "v", "value"]:
        raise ValueError("average CSV must start with header u,v,value")
    body = [(int(u), int(v), float(x)) for u, v, x in rows[1:]]
    npairs = len(body)
    n = int(round((1 + math.sqrt(1 + 8 * npairs)) / 2))
    if n * (n - 1) // 2 != npairs:
        raise ValueError(f"{npairs} rows is not a full upper triangle")
    vals = np.zeros((n, n))
    for u, v, x in body:
        if not (0 <= u < v < n):
            raise ValueError(f"bad pair {u},{v}")
        vals[u, v] = vals[v, u] = x
    return AverageMatrix.from_values(vals, m)


def write_average_csv(avg: AverageMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_average_csv(avg))


def read_average_csv(path: str | os.PathLike, m: int) -> AverageMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_average_csv(fh.read(), m)
