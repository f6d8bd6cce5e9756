"""Recovery, Frobenius and Accuracy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .graph import Graph, Permutation, frobenius_sq

__all__ = [
    "TrialMetrics",
    "recovery_fraction",
    "alignment_recovery",
    "pairwise_recovery",
    "accuracy",
    "frobenius_sq",
]


@dataclass(frozen=True)
class TrialMetrics:
    recovery: float
    frobenius: float
    accuracy: float


def recovery_fraction(estimated: Permutation, truth: Permutation) -> float:
    """Fraction of nodes mapped to their true image."""
    if estimated.n != truth.n:
        raise DimensionError(f"length mismatch: {estimated.n} vs {truth.n}")
    return float(np.mean(estimated.images == truth.images))


def alignment_recovery(composed: Sequence[Permutation], truths: Sequence[Permutation]) -> float:
    """Mean recovery over the non-reference composed alignments (index 1 onwards)."""
    if len(composed) != len(truths):
        raise ValueError(f"{len(composed)} estimated vs {len(truths)} true alignments")
    if len(composed) < 2:
        raise ValueError("need at least one non-reference alignment")
    return float(np.mean([recovery_fraction(e, t) for e, t in zip(composed[1:], truths[1:])]))


def pairwise_recovery(pairwise: Sequence[Permutation], truths: Sequence[Permutation]) -> float:
    """Mean recovery over consecutive-pair matchings."""
    if len(pairwise) != len(truths):
        raise ValueError(f"{len(pairwise)} estimated vs {len(truths)} true matchings")
    return float(np.mean([recovery_fraction(e, t) for e, t in zip(pairwise, truths)]))


def accuracy(estimate: Graph, truth: Graph) -> float:
    """Fraction of unordered node pairs classified correctly."""
    if estimate.n != truth.n:
        raise DimensionError(f"size mismatch: {estimate.n} vs {truth.n}")
    n = truth.n
    if n < 2:
        return 1.0
    wrong = int(np.count_nonzero(estimate.adjacency != truth.adjacency)) // 2
    return 1.0 - wrong / (n * (n - 1) // 2)
