import itertools

import numpy as np
import pytest

from netrecovery.graph import Graph, Permutation


def brute_force_lap(cost, maximize=False):
    """Best objective over all permutations, by enumeration."""
    cost = np.asarray(cost)
    n = cost.shape[0]
    rows = np.arange(n)
    best = None
    for perm in itertools.permutations(range(n)):
        val = cost[rows, list(perm)].sum()
        if best is None or (val > best if maximize else val < best):
            best = val
    return best


def all_optima(cost, maximize=False):
    cost = np.asarray(cost)
    n = cost.shape[0]
    target = brute_force_lap(cost, maximize)
    return [p for p in itertools.permutations(range(n)) if cost[np.arange(n), list(p)].sum() == target]


def random_graph(n, p, rng):
    upper = rng.random(n * (n - 1) // 2) < p
    return Graph.from_upper(n, upper)


def random_perm(n, rng):
    return Permutation(rng.permutation(n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def noisy_chain(n, m, x, seed):
    """Parent at density log^2 n / n and m noisy samples at sqrt(beta) log n = x.

    Sample 0 keeps the parent's labels; sample i is relabeled so that
    ``permute(observed[i], truths[i])`` is aligned with the parent.
    """
    import math

    from netrecovery.graph import permute
    from netrecovery.sampling import NoiseParams, edge_unbiased_alpha, sample_er, sample_noisy

    rng = np.random.default_rng(seed)
    beta = (x / math.log(n)) ** 2
    parent = sample_er(n, math.log(n) ** 2 / n, rng)
    noise = NoiseParams(edge_unbiased_alpha(parent, beta), beta)
    observed, truths = [], []
    for i in range(m):
        tau = Permutation.identity(n) if i == 0 else Permutation(rng.permutation(n))
        observed.append(permute(sample_noisy(parent, noise, rng), tau.inverse()))
        truths.append(tau)
    return parent, observed, truths


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
