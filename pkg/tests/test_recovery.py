import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import noisy_chain, random_graph
from netrecovery.alignment import AlignmentResult, compose_chain
from netrecovery.errors import DegenerateInputError, DimensionError, DomainError
from netrecovery.graph import Graph, Permutation, compose, frobenius_sq, permute
from netrecovery.matching import profile_distance_matrix
from netrecovery.recovery import (
    AverageMatrix,
    aligned_average,
    elbow_threshold,
    format_average_csv,
    parse_average_csv,
    read_average_csv,
    recover,
    threshold,
    write_average_csv,
)
from netrecovery.sampling import NoiseParams, edge_unbiased_alpha, sample_er, sample_noisy


def identity_alignment(n, m):
    return AlignmentResult(tuple(Permutation.identity(n) for _ in range(m - 1)), compose_chain([Permutation.identity(n)] * (m - 1)))


def levels_matrix(n, m, rng, low, high, edge_p=0.3):
    """Symmetric count matrix: edges drawn at level ``high``, non-edges at ``low``."""
    upper = rng.random(n * (n - 1) // 2) < edge_p
    counts = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    counts[iu] = np.where(upper, high, low)
    return AverageMatrix(counts + counts.T, m)


class TestAverageMatrix:
    def test_validation(self):
        with pytest.raises(DomainError):
            AverageMatrix([[0, 3], [3, 0]], 2)
        with pytest.raises(DomainError):
            AverageMatrix([[0, 1], [0, 0]], 2)
        with pytest.raises(DomainError):
            AverageMatrix([[1, 0], [0, 1]], 2)
        with pytest.raises(DimensionError):
            AverageMatrix(np.zeros((2, 3)), 2)

    def test_from_values(self):
        avg = AverageMatrix.from_values([[0, 0.25], [0.25, 0]], 4)
        assert avg.counts[0, 1] == 1
        with pytest.raises(DomainError):
            AverageMatrix.from_values([[0, 0.3], [0.3, 0]], 4)


class TestAlignedAverage:
    def test_identical_graphs(self, rng):
        g = random_graph(15, 0.3, rng)
        avg = aligned_average([g] * 3, identity_alignment(15, 3))
        assert np.array_equal(avg.values, g.as_array())

    def test_one_edge_differs(self):
        a = Graph.from_edges(4, [(0, 1), (2, 3)])
        b = Graph.from_edges(4, [(0, 1)])
        avg = aligned_average([a, b], identity_alignment(4, 2))
        assert avg.values[2, 3] == 0.5 and avg.values[0, 1] == 1.0
        assert set(np.unique(avg.values)) == {0.0, 0.5, 1.0}

    def test_uses_composed_alignment(self, rng):
        g = random_graph(12, 0.3, rng)
        tau = Permutation(rng.permutation(12))
        observed = [g, permute(g, tau.inverse())]
        avg = aligned_average(observed, AlignmentResult((tau,), (Permutation.identity(12), tau)))
        assert np.array_equal(avg.values, g.as_array())

    def test_count_mismatch(self, rng):
        g = random_graph(5, 0.3, rng)
        with pytest.raises(ValueError):
            aligned_average([g, g, g], identity_alignment(5, 2))

    def test_noisy_levels(self):
        n, m = 1000, 5
        parent = sample_er(n, math.log(n) ** 2 / n, 5)
        beta = 0.1
        noise = NoiseParams(edge_unbiased_alpha(parent, beta), beta)
        samples = [sample_noisy(parent, noise, 100 + i) for i in range(m)]
        avg = aligned_average(samples, identity_alignment(n, m))
        up = parent.upper()
        vals = avg.values[np.triu_indices(n, k=1)]
        e, ne = up.sum(), (~up).sum()
        assert abs(vals[up].mean() - (1 - beta)) <= 3 * math.sqrt(beta * (1 - beta) / (m * e))
        a = noise.alpha
        assert abs(vals[~up].mean() - a) <= 3 * math.sqrt(a * (1 - a) / (m * ne))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 20), st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_grid_symmetry_diagonal(self, n, m, seed):
        rng = np.random.default_rng(seed)
        graphs = [random_graph(n, 0.4, rng) for _ in range(m)]
        perms = [Permutation.identity(n)] + [Permutation(rng.permutation(n)) for _ in range(m - 1)]
        avg = aligned_average(graphs, AlignmentResult(tuple(perms[1:]), tuple(perms)))
        v = avg.values
        assert np.array_equal(v, v.T)
        assert not v.diagonal().any()
        assert np.array_equal(np.rint(v * m) / m, v)
        assert v.min() >= 0 and v.max() <= 1


class TestThreshold:
    def test_all_ones(self):
        avg = AverageMatrix(np.ones((4, 4), dtype=int) - np.eye(4, dtype=int), 1)
        assert threshold(avg, 0.5) == Graph.complete(4)

    def test_tie_is_non_edge(self):
        avg = AverageMatrix([[0, 1], [1, 0]], 2)
        assert threshold(avg, 0.5).num_edges == 0

    def test_two_levels(self, rng):
        avg = levels_matrix(20, 10, rng, 1, 9)
        g = threshold(avg, 0.5)
        assert np.array_equal(g.adjacency, avg.counts == 9)

    def test_domain(self):
        avg = AverageMatrix([[0, 1], [1, 0]], 2)
        for w in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(DomainError):
                threshold(avg, w)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 15), st.integers(1, 8), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(0, 2**32 - 1))
    def test_monotone_in_w(self, n, m, w1, w2, seed):
        rng = np.random.default_rng(seed)
        upper = rng.integers(0, m + 1, size=n * (n - 1) // 2)
        counts = np.zeros((n, n), dtype=np.int64)
        counts[np.triu_indices(n, k=1)] = upper
        avg = AverageMatrix(counts + counts.T, m)
        lo, hi = sorted((w1, w2))
        assert set(map(tuple, threshold(avg, hi).edges())) <= set(map(tuple, threshold(avg, lo).edges()))


class TestElbow:
    def test_zero_one(self, rng):
        for m in (1, 2, 5, 20):
            assert elbow_threshold(levels_matrix(10, m, rng, 0, m)) == 0.5

    def test_bimodal_m20(self, rng):
        # levels 1/20 and 18/20: the empty run 2..17 has midpoint 19/40
        avg = levels_matrix(30, 20, rng, 1, 18)
        assert elbow_threshold(avg) == pytest.approx(19 / 40)

    def test_no_interior_level(self):
        avg = AverageMatrix([[0, 1, 2], [1, 0, 2], [2, 2, 0]], 4)
        assert elbow_threshold(avg) == 0.5

    def test_minimal_count_run(self):
        # levels 0..4 of m=4 with counts 3,1,0,1,1 over 6 pairs: the empty level 2 wins
        counts = np.zeros((4, 4), dtype=np.int64)
        iu = np.triu_indices(4, k=1)
        counts[iu] = [0, 0, 0, 1, 3, 4]
        avg = AverageMatrix(counts + counts.T, 4)
        assert elbow_threshold(avg) == 0.5

    def test_constant(self):
        with pytest.raises(DegenerateInputError):
            elbow_threshold(AverageMatrix(np.zeros((4, 4), dtype=int), 3))

    def test_matches_half_on_simulation(self):
        n, m = 1000, 10
        _, observed, truths = noisy_chain(n, m, 0.5, 77)
        pairwise = [compose(truths[i + 1], truths[i].inverse()) for i in range(m - 1)]
        avg = aligned_average(observed, AlignmentResult(tuple(pairwise), tuple(truths)))
        w = elbow_threshold(avg)
        assert 0 < w < 1
        assert threshold(avg, w) == threshold(avg, 0.5)


class TestRecover:
    def test_noiseless_copies(self, rng):
        for _ in range(200):
            a = random_graph(12, 0.4, rng)
            if (profile_distance_matrix(a, a) + np.eye(12)).min() > 0:
                break
        result = recover([a, a])
        assert result.estimate == a
        assert result.threshold == 0.5

    def test_relabeled_copies(self, rng):
        _, observed, truths = noisy_chain(300, 3, 0.0, 4)
        result = recover(observed)
        assert result.estimate == observed[0]
        assert result.alignment.composed == tuple(truths)

    def test_auto_threshold(self):
        _, observed, _ = noisy_chain(300, 3, 0.3, 4)
        result = recover(observed, w="auto")
        assert 0 < result.threshold < 1

    def test_seeded_pipeline_runs(self):
        parent, observed, truths = noisy_chain(300, 3, 0.2, 9)
        result = recover(observed, seeds=True)
        assert result.alignment.composed == tuple(truths)

    def test_needs_two_graphs(self, rng):
        with pytest.raises(ValueError):
            recover([random_graph(5, 0.3, rng)])

    def test_frobenius_decreases_with_m(self):
        # exact alignment: each sample is already on the parent's labels
        n = 1000
        medians = []
        for m in (2, 5, 10):
            dists = []
            for t in range(5):
                parent = sample_er(n, math.log(n) ** 2 / n, 500 + t)
                beta = 0.1
                noise = NoiseParams(edge_unbiased_alpha(parent, beta), beta)
                samples = [sample_noisy(parent, noise, 10 * t + i + 1000) for i in range(m)]
                dists.append(frobenius_sq(parent, aligned_average(samples, identity_alignment(n, m))))
            medians.append(np.median(dists))
        assert medians[0] >= medians[1] >= medians[2]


class TestAverageCsv:
    def test_roundtrip(self, tmp_path, rng):
        avg = levels_matrix(9, 7, rng, 2, 5)
        text = format_average_csv(avg)
        assert text.splitlines()[0] == "u,v,value"
        assert parse_average_csv(text, 7) == avg
        path = tmp_path / "avg.csv"
        write_average_csv(avg, path)
        assert read_average_csv(path, 7) == avg

    def test_rejects_bad(self):
        with pytest.raises(ValueError):
            parse_average_csv("a,b,c\n", 2)
        with pytest.raises(ValueError):
            parse_average_csv("u,v,value\n0,1,0.5\n0,2,0.5\n", 2)
