"""Aligning m graphs to the first one: sequential matching, multi-graph cleanup,
and a diagnostic check of the exact-recovery regime."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .errors import DimensionError
from .graph import Graph, Permutation, compose, permute
from .matching import SeedSet, cleanup_pair, match_degree_profiles
from .sampling import CorrParams, make_rng

__all__ = [
    "AlignmentResult",
    "RegimeReport",
    "compose_chain",
    "sequential_match",
    "cleanup_pairwise",
    "multi_cleanup",
    "check_regime",
    "DEFAULT_REGIME_CONSTANTS",
]

DEFAULT_REGIME_CONSTANTS = (0.1, 1.0, 1.0)


@dataclass(frozen=True)
class AlignmentResult:
    """Pairwise matchings and their compositions to the reference graph.

    ``pairwise[i]`` matches graph ``i`` to graph ``i + 1``.  ``composed[i]``
    maps reference (graph 0) nodes to graph ``i`` nodes, so
    ``permute(graphs[i], composed[i])`` is graph ``i`` aligned to graph 0;
    ``composed[0]`` is the identity.
    """

    pairwise: tuple[Permutation, ...]
    composed: tuple[Permutation, ...]

    @property
    def m(self) -> int:
        return len(self.composed)


def compose_chain(pairwise: Sequence[Permutation]) -> tuple[Permutation, ...]:
    """Compose ``pairwise`` matchings into maps from graph 0 to every graph."""
    n = pairwise[0].n
    out = [Permutation.identity(n)]
    for pi in pairwise:
        # align i+1 to i first, then i to 0
        out.append(compose(pi, out[-1]))
    return tuple(out)


def _check_graphs(graphs: Sequence[Graph]) -> int:
    if len(graphs) < 2:
        raise ValueError(f"need at least 2 graphs, got {len(graphs)}")
    n = graphs[0].n
    if any(g.n != n for g in graphs):
        raise DimensionError("all graphs must have the same number of nodes")
    return n


def sequential_match(
    graphs: Sequence[Graph],
    seeds: Mapping[int, SeedSet] | Sequence[SeedSet | None] | None = None,
    *,
    workers: int | None = None,
) -> AlignmentResult:
    """Match each consecutive pair by degree profiles and compose to graph 0.

    ``seeds[i]``, when given, pins pairs for the match of graph ``i`` to ``i + 1``.
    The ``m - 1`` matches are independent and run on a thread pool when
    ``workers > 1``.
    """
    _check_graphs(graphs)
    m = len(graphs)
    if seeds is None:
        seeds = {}
    elif not isinstance(seeds, Mapping):
        seeds = {i: s for i, s in enumerate(seeds) if s is not None}

    def one(i: int) -> Permutation:
        return match_degree_profiles(graphs[i], graphs[i + 1], seeds.get(i))

    if workers and workers > 1 and m > 2:
        with ThreadPoolExecutor(max_workers=min(workers, m - 1)) as pool:
            pairwise = list(pool.map(one, range(m - 1)))
    else:
        pairwise = [one(i) for i in range(m - 1)]
    return AlignmentResult(tuple(pairwise), compose_chain(pairwise))


def cleanup_pairwise(graphs: Sequence[Graph], initial: AlignmentResult, T: int | None = None) -> AlignmentResult:
    """Refine every consecutive matching with :func:`cleanup_pair` and recompose."""
    _check_graphs(graphs)
    pairwise = [cleanup_pair(graphs[i], graphs[i + 1], pi, T) for i, pi in enumerate(initial.pairwise)]
    return AlignmentResult(tuple(pairwise), compose_chain(pairwise))


def multi_cleanup(
    graphs: Sequence[Graph],
    initial: AlignmentResult,
    T: int | None = None,
    max_sweeps: int | None = None,
    seed=0,
) -> AlignmentResult:
    """Refine composed alignments by cleaning up randomly drawn pairs ``i < j``.

    Each draw runs the cleanup iteration on graph ``i`` (aligned with the
    current ``composed[i]``) against raw graph ``j``, starting from
    ``composed[j]``.  Stops after ``m(m-1)/2`` consecutive draws without a
    change, or after ``max_sweeps`` draws (default ``20 m``).
    """
    _check_graphs(graphs)
    m = len(graphs)
    if initial.m != m:
        raise ValueError(f"alignment covers {initial.m} graphs, got {m}")
    if max_sweeps is None:
        max_sweeps = 20 * m
    rng = make_rng(seed)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    window = len(pairs)
    composed = list(initial.composed)
    quiet = 0
    for _ in range(max_sweeps):
        if quiet >= window:
            break
        i, j = pairs[int(rng.integers(len(pairs)))]
        ref = graphs[i] if i == 0 else permute(graphs[i], composed[i])
        new = cleanup_pair(ref, graphs[j], composed[j], T)
        if new == composed[j]:
            quiet += 1
        else:
            composed[j] = new
            quiet = 0
    return replace(initial, composed=tuple(composed))


@dataclass(frozen=True)
class RegimeReport:
    sigma: float
    L: float
    checks: dict = field(default_factory=dict)
    constants: tuple[float, float, float] = DEFAULT_REGIME_CONSTANTS

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())


def check_regime(n: int, cp: CorrParams, constants=DEFAULT_REGIME_CONSTANTS) -> RegimeReport:
    """Evaluate the sufficient conditions for exact recovery by degree profiles.

    The default constants ``(sigma0, L0, C0) = (0.1, 1, 1)`` are heuristic;
    the guarantee only asks for a small enough ``sigma0`` and large enough
    ``L0, C0``.  Comparisons allow a relative slack of 1e-12 so boundary
    cases are not lost to rounding.
    """
    sigma0, L0, C0 = constants
    sigma = math.sqrt(max(0.0, 1.0 - cp.s))
    logn = math.log(n)
    eps = 1e-12
    checks = {
        "sigma_small": sigma <= sigma0 / logn * (1 + eps),
        "q_at_most_1_12": cp.q <= 1.0 / 12.0,
        "degree_large": n * cp.q >= C0 * logn**2 * (1 - eps),
    }
    return RegimeReport(sigma=sigma, L=L0 * logn, checks=checks, constants=(sigma0, L0, C0))
