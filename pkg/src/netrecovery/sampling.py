"""Random graph generation: Erdos-Renyi parents, noisy replicates, correlated pairs.

Every generator takes a 64-bit integer seed (or an existing
``numpy.random.Generator``).  Pair indicators are drawn in lexicographic
``u < v`` order from a PCG64 stream so a seed fixes the output bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import Graph, Permutation, permute

__all__ = [
    "NoiseParams",
    "CorrParams",
    "make_rng",
    "derive_seed",
    "sample_er",
    "sample_noisy",
    "to_correlated_params",
    "sample_correlated_er",
    "edge_unbiased_alpha",
]

SEED_MASK = (1 << 64) - 1


def _check_prob(name: str, x: float) -> None:
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise DomainError(f"{name} must lie in [0, 1], got {x}")


@dataclass(frozen=True)
class NoiseParams:
    """Type-I (spurious edge) rate ``alpha`` and type-II (dropped edge) rate ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        _check_prob("alpha", self.alpha)
        _check_prob("beta", self.beta)


@dataclass(frozen=True)
class CorrParams:
    """Marginal edge probability ``q`` and edge-retention correlation ``s``."""

    q: float
    s: float

    def __post_init__(self):
        _check_prob("q", self.q)
        _check_prob("s", self.s)

    @property
    def nonedge_rate(self) -> float:
        """Probability that a non-edge of the first graph is an edge of the second."""
        if self.q >= 1.0:
            return 0.0
        return self.q * (1.0 - self.s) / (1.0 - self.q)


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def derive_seed(base: int, *keys: int) -> int:
    """Mix a base seed with integer keys into a fresh 64-bit seed.

    Uses ``SeedSequence`` hashing so results are identical across platforms.
    """
    ss = np.random.SeedSequence(entropy=int(base) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _pair_uniforms(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random(n * (n - 1) // 2)


def sample_er(n: int, p: float, seed) -> Graph:
    _check_prob("p", p)
    rng = make_rng(seed)
    return Graph.from_upper(n, _pair_uniforms(n, rng) < p)


def sample_noisy(parent: Graph, noise: NoiseParams, seed) -> Graph:
    """Keep each true edge w.p. ``1 - beta``; add each non-edge w.p. ``alpha``."""
    rng = make_rng(seed)
    r = _pair_uniforms(parent.n, rng)
    a = parent.upper()
    out = np.where(a, r < 1.0 - noise.beta, r < noise.alpha)
    return Graph.from_upper(parent.n, out)


def to_correlated_params(p: float, noise: NoiseParams) -> CorrParams:
    """Map parent density and noise rates to the equivalent correlated-ER ``(q, s)``."""
    _check_prob("p", p)
    a, b = noise.alpha, noise.beta
    q = p * (1.0 - b) + (1.0 - p) * a
    if q <= 0.0:
        raise DomainError("no edges are ever observed (p(1-beta) + (1-p)alpha == 0)")
    s = (p * (1.0 - b) ** 2 + (1.0 - p) * a**2) / q
    return CorrParams(q=q, s=min(s, 1.0))


def sample_correlated_er(n: int, cp: CorrParams, seed) -> tuple[Graph, Graph, Permutation]:
    """Draw ``(g1, g2, pi)`` from the correlated Erdos-Renyi model.

    ``g1 ~ ER(n, q)``; conditionally on ``g1``, ``g2`` has edge
    ``(pi(u), pi(v))`` w.p. ``s`` when ``(u, v)`` is an edge of ``g1`` and
    w.p. ``q(1-s)/(1-q)`` otherwise.  Hence ``permute(g2, pi)`` is the copy of
    ``g2`` aligned to ``g1``.
    """
    rate = cp.nonedge_rate
    if rate > 1.0:
        raise DomainError(f"q(1-s)/(1-q) = {rate:.6g} exceeds 1 for q={cp.q}, s={cp.s}")
    rng = make_rng(seed)
    g1 = sample_er(n, cp.q, rng)
    r = _pair_uniforms(n, rng)
    aligned = Graph.from_upper(n, np.where(g1.upper(), r < cp.s, r < rate))
    pi = Permutation.random(n, rng)
    g2 = permute(aligned, pi.inverse())
    return g1, g2, pi


def edge_unbiased_alpha(parent: Graph, beta: float) -> float:
    """Type-I rate with ``alpha * |non-edges| == beta * |edges|``."""
    _check_prob("beta", beta)
    n = parent.n
    m_edges = parent.num_edges
    non_edges = n * (n - 1) // 2 - m_edges
    if non_edges == 0:
        raise DomainError("parent is complete; edge-unbiased alpha is undefined")
    return beta * m_edges / non_edges
