import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import brute_force_lap
from netrecovery.assignment import solve_constrained, solve_max, solve_max_sparse, solve_min
from netrecovery.errors import ConstraintError, DimensionError, DomainError
from netrecovery.graph import Permutation


def objective(cost, perm):
    return cost[np.arange(cost.shape[0]), perm.images].sum()


class TestSolveMin:
    def test_all_ties_identity(self):
        perm, obj = solve_min(np.zeros((6, 6)))
        assert perm.is_identity() and obj == 0

    def test_constant_matrix_identity(self):
        assert solve_min(np.full((4, 4), 3.5)).perm.is_identity()

    def test_diagonal_example(self):
        perm, obj = solve_min([[1, 9, 9], [9, 1, 9], [9, 9, 1]])
        assert perm.is_identity()
        assert obj == 3

    def test_brute_force_7x7(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            c = rng.integers(0, 50, size=(7, 7))
            perm, obj = solve_min(c)
            assert obj == brute_force_lap(c)
            assert objective(c, perm) == obj

    def test_non_finite(self):
        c = np.zeros((3, 3))
        c[1, 2] = np.inf
        with pytest.raises(DomainError):
            solve_min(c)
        c[1, 2] = np.nan
        with pytest.raises(DomainError):
            solve_min(c)

    def test_not_square(self):
        with pytest.raises(DimensionError):
            solve_min(np.zeros((2, 3)))


class TestSolveMax:
    def test_identity_indicator(self):
        assert solve_max(np.eye(5)).perm.is_identity()

    def test_zeros(self):
        assert solve_max(np.zeros((5, 5))).perm.is_identity()

    def test_brute_force_7x7(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            c = rng.integers(0, 50, size=(7, 7))
            perm, obj = solve_max(c)
            assert obj == brute_force_lap(c, maximize=True)
            assert objective(c, perm) == obj

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(2)
        dense = (rng.random((30, 30)) < 0.1) * rng.integers(1, 9, size=(30, 30))
        assert solve_max_sparse(sp.csr_matrix(dense)).objective == solve_max(dense).objective


class TestSolveConstrained:
    def test_fully_pinned(self):
        rng = np.random.default_rng(3)
        c = rng.random((5, 5))
        target = [3, 0, 4, 1, 2]
        perm, _ = solve_constrained(c, list(enumerate(target)))
        assert perm == Permutation(target)

    def test_no_pins_is_solve_min(self):
        rng = np.random.default_rng(4)
        c = rng.integers(0, 20, size=(6, 6))
        assert solve_constrained(c, []) == solve_min(c)

    def test_two_pins_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            c = rng.integers(0, 30, size=(5, 5))
            pins = [(0, 3), (2, 1)]
            free_rows, free_cols = [1, 3, 4], [0, 2, 4]
            best = min(
                c[0, 3] + c[2, 1] + sum(c[r, k] for r, k in zip(free_rows, cols))
                for cols in itertools.permutations(free_cols)
            )
            perm, obj = solve_constrained(c, pins)
            assert obj == best
            assert perm(0) == 3 and perm(2) == 1

    def test_conflicting_pins(self):
        with pytest.raises(ConstraintError):
            solve_constrained(np.zeros((4, 4)), [(0, 1), (0, 2)])
        with pytest.raises(ConstraintError):
            solve_constrained(np.zeros((4, 4)), [(0, 1), (2, 1)])


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda n: arrays(np.int64, (n, n), elements=st.integers(-20, 20))))
    def test_optimal_and_bijective(self, c):
        perm, obj = solve_min(c)
        assert sorted(perm.images.tolist()) == list(range(c.shape[0]))
        assert obj == brute_force_lap(c)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda n: arrays(np.int64, (n, n), elements=st.integers(-20, 20))))
    def test_max_is_min_of_negation(self, c):
        assert solve_max(c).perm == solve_min(-c).perm
