import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kaczopt import (
    Cyclic,
    Randomized,
    cyclic_index,
    one_step_expected_factor,
    project_row,
    row_norm_distribution,
    row_normalize,
    run_solver,
)
from kaczopt.errors import DimensionMismatchError, ZeroRowError, ZeroVectorError
from kaczopt.kaczmarz import run_batch

from conftest import random_system, random_unit_rows


class TestProjection:
    def test_examples(self):
        np.testing.assert_array_equal(project_row([0, 0], [1, 0], 2), [2, 0])
        np.testing.assert_allclose(project_row([0, 0], [1, 1], 2), [1, 1])
        np.testing.assert_array_equal(project_row([2, 5], [1, 0], 2), [2, 5])

    def test_zero_row(self):
        with pytest.raises(ZeroRowError):
            project_row([1, 1], [0, 0], 1)

    def test_lands_on_hyperplane_and_is_idempotent(self, rng):
        for _ in range(50):
            a, x = rng.standard_normal(4), rng.standard_normal(4)
            beta = rng.standard_normal()
            y = project_row(x, a, beta)
            assert a @ y == pytest.approx(beta, abs=1e-12 * (1 + abs(beta)))
            np.testing.assert_allclose(project_row(y, a, beta), y, atol=1e-13)

    def test_pythagorean(self, rng):
        A, x, b = random_system(rng, 6, 4)
        for _ in range(50):
            x0 = rng.standard_normal(4)
            i = rng.integers(6)
            x1 = project_row(x0, A[i], b[i])
            lhs = np.sum((x1 - x) ** 2)
            rhs = np.sum((x0 - x) ** 2) - np.sum((x1 - x0) ** 2)
            assert lhs == pytest.approx(rhs, abs=1e-10)
            assert lhs <= np.sum((x0 - x) ** 2) + 1e-12

    def test_scale_invariance(self, rng):
        a, x = rng.standard_normal(3), rng.standard_normal(3)
        np.testing.assert_allclose(project_row(x, a, 0.7), project_row(x, 5.5 * a, 5.5 * 0.7), atol=1e-14)


def test_cyclic_index():
    assert [cyclic_index(k, 3) for k in range(7)] == [0, 1, 2, 0, 1, 2, 0]
    with pytest.raises(ValueError):
        cyclic_index(0, 0)


def test_row_norm_distribution():
    np.testing.assert_allclose(row_norm_distribution([[3, 0], [0, 4]]), [9 / 25, 16 / 25])


class TestSolver:
    def test_identity_one_sweep(self):
        rec = run_solver(np.eye(3), [1, 2, 3], steps=3, truth=[1, 2, 3])
        np.testing.assert_allclose(rec.x_final, [1, 2, 3])
        np.testing.assert_allclose(rec.squared_errors, [14, 13, 9, 0])
        np.testing.assert_array_equal(rec.selected_rows, [0, 1, 2])

    def test_zero_steps(self):
        rec = run_solver(np.eye(2), [1, 1], steps=0, x0=[3, 4], truth=[1, 1])
        np.testing.assert_array_equal(rec.x_final, [3, 4])
        assert rec.squared_errors.shape == (1,)

    def test_monotone_consistent(self, rng):
        A, x, b = random_system(rng, 30, 5)
        p = row_norm_distribution(A)
        for scheme in (Cyclic(), Randomized(p, seed=2)):
            e = run_solver(A, b, steps=300, scheme=scheme, truth=x).squared_errors
            assert np.all(np.diff(e) <= 1e-12 * e[0])
            assert e[-1] < e[0]

    def test_normalized_equals_raw(self, rng):
        A, x, b = random_system(rng, 12, 3)
        p = np.full(12, 1 / 12)
        r1 = run_solver(A, b, steps=40, scheme=Randomized(p, seed=5), truth=x)
        r2 = run_solver(row_normalize(A, b), steps=40, scheme=Randomized(p, seed=5), truth=x)
        np.testing.assert_array_equal(r1.selected_rows, r2.selected_rows)
        np.testing.assert_allclose(r1.squared_errors, r2.squared_errors, rtol=1e-9, atol=1e-14)

    def test_residual_mode(self):
        rec = run_solver(np.eye(2), [1, 1], steps=1)
        assert rec.residual_mode
        np.testing.assert_allclose(rec.squared_errors, [2, 1])

    def test_randomized_deterministic(self, rng):
        A, x, b = random_system(rng, 8, 3)
        p = np.full(8, 1 / 8)
        a = run_solver(A, b, steps=20, scheme=Randomized(p, seed=1))
        c = run_solver(A, b, steps=20, scheme=Randomized(p, seed=1))
        np.testing.assert_array_equal(a.squared_errors, c.squared_errors)

    def test_errors(self):
        with pytest.raises(DimensionMismatchError):
            run_solver(np.eye(2), [1, 2, 3], steps=1)
        with pytest.raises(DimensionMismatchError):
            run_solver(np.eye(2), [1, 2], steps=1, scheme=Randomized(np.full(3, 1 / 3)))
        with pytest.raises(ZeroRowError):
            run_solver([[0, 0], [1, 0]], [0, 1], steps=1)
        with pytest.raises(ValueError):
            run_solver(np.eye(2), [1, 2], steps=1, truth=[0, 0])

    def test_batch_rows_match_single(self, rng):
        A, x, b = random_system(rng, 7, 3)
        idx = rng.integers(0, 7, size=(4, 15))
        errs, X = run_batch(A, b, idx, truth=x)
        for t in range(4):
            xt = np.zeros(3)
            for i in idx[t]:
                xt = project_row(xt, A[i], b[i])
            np.testing.assert_allclose(X[t], xt, atol=1e-12)


class TestOneStepIdentity:
    def test_matches_enumeration(self, rng):
        for _ in range(30):
            m, n = rng.integers(3, 12), rng.integers(2, 5)
            A, x, b = random_system(rng, m, n)
            B = row_normalize(A).B
            p = rng.dirichlet(np.ones(m))
            x0 = rng.standard_normal(n)
            e0 = np.sum((x0 - x) ** 2)
            enum = sum(p[i] * np.sum((project_row(x0, A[i], b[i]) - x) ** 2) for i in range(m))
            assert enum == pytest.approx(e0 * one_step_expected_factor(B, p, x0 - x), rel=1e-12)

    def test_two_step_enumeration_bounded(self, rng):
        # two-step expectation stays within the extreme one-step factors squared
        A, x, b = random_system(rng, 5, 2)
        B = row_normalize(A).B
        p = rng.dirichlet(np.ones(5))
        M = B.T @ (p[:, None] * B)
        lo, hi = np.linalg.eigvalsh(M)[[0, -1]]
        x0 = rng.standard_normal(2)
        e0 = np.sum((x0 - x) ** 2)
        total = 0.0
        for i, j in itertools.product(range(5), repeat=2):
            x2 = project_row(project_row(x0, A[i], b[i]), A[j], b[j])
            total += p[i] * p[j] * np.sum((x2 - x) ** 2)
        assert (1 - hi) ** 2 * e0 - 1e-12 <= total <= (1 - lo) ** 2 * e0 + 1e-12

    def test_zero_direction(self):
        with pytest.raises(ZeroVectorError):
            one_step_expected_factor(np.eye(2), [0.5, 0.5], [0, 0])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**31))
    def test_factor_in_unit_interval(self, n, seed):
        r = np.random.default_rng(seed)
        B = random_unit_rows(r, n + 3, n)
        p = r.dirichlet(np.ones(n + 3))
        f = one_step_expected_factor(B, p, r.standard_normal(n))
        assert -1e-12 <= f <= 1 + 1e-12
