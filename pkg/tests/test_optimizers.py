import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kaczopt import (
    kappa,
    kappa_optimal_rescaling,
    optimize_dopt,
    optimize_lp,
    optimize_maximin,
    p_from_q,
    q_from_p,
    rate_pair,
    row_norm_distribution,
    row_normalize,
)
from kaczopt.errors import (
    ConvergenceFailure,
    InvalidDistributionError,
    NonPositiveTError,
    RankDeficientError,
    ZeroDesignError,
)
from kaczopt.optimizers import project_simplex

from conftest import random_unit_rows


def sdp_oracle(B):
    p = cp.Variable(B.shape[0], nonneg=True)
    M = B.T @ cp.diag(p) @ B
    prob = cp.Problem(cp.Maximize(cp.lambda_min(0.5 * (M + M.T))), [cp.sum(p) == 1])
    prob.solve(solver=cp.CLARABEL)
    return prob.value


class TestMaximin:
    def test_identity(self):
        r = optimize_maximin(np.eye(2))
        assert r.t_hat == pytest.approx(0.5, abs=1e-8)
        np.testing.assert_allclose(r.p_hat, [0.5, 0.5], atol=1e-8)

    def test_duplicate_rows(self):
        r = optimize_maximin([[1, 0], [1, 0], [0, 1]])
        assert r.t_hat == pytest.approx(0.5, abs=1e-7)
        assert r.p_hat[2] == pytest.approx(0.5, abs=1e-6)
        assert r.p_hat[0] + r.p_hat[1] == pytest.approx(0.5, abs=1e-6)

    def test_against_sdp(self, rng):
        for m, n in [(8, 3), (15, 4), (30, 5)]:
            B = random_unit_rows(rng, m, n)
            r = optimize_maximin(B)
            assert r.t_hat == pytest.approx(sdp_oracle(B), abs=1e-6)
            assert r.certificate_gap <= 1e-7

    def test_certificate_is_valid(self, rng):
        B = random_unit_rows(rng, 12, 3)
        r = optimize_maximin(B)
        W = r.dual
        assert np.trace(W) == pytest.approx(1.0)
        assert np.linalg.eigvalsh(W).min() >= -1e-12
        ub = np.max(np.einsum("ij,jk,ik->i", B, W, B))
        assert ub == pytest.approx(r.upper_bound)
        # no random distribution beats the certified upper bound
        for p in rng.dirichlet(np.ones(12), size=200):
            assert rate_pair(B, p).lambda_min <= ub + 1e-12

    def test_beats_uniform_and_row_norm(self, rng):
        A = rng.standard_normal((25, 4)) * rng.uniform(0.1, 3, (25, 1))
        B = row_normalize(A).B
        r = optimize_maximin(B)
        assert r.t_hat >= rate_pair(B, np.full(25, 1 / 25)).lambda_min - 1e-10
        assert r.t_hat >= rate_pair(B, row_norm_distribution(A)).lambda_min - 1e-10

    def test_permutation_invariance(self, rng):
        B = random_unit_rows(rng, 10, 3)
        perm = rng.permutation(10)
        assert optimize_maximin(B[perm]).t_hat == pytest.approx(optimize_maximin(B).t_hat, abs=1e-7)

    def test_frank_wolfe_option(self, rng):
        B = random_unit_rows(rng, 10, 3)
        try:
            r = optimize_maximin(B, tol=1e-3, method="frank-wolfe", max_iters=5000)
        except ConvergenceFailure as exc:
            r = exc.result
        assert r.t_hat == pytest.approx(optimize_maximin(B).t_hat, abs=5e-3)
        assert r.t_hat <= r.upper_bound

    def test_iteration_cap(self, rng):
        B = random_unit_rows(rng, 30, 5)
        with pytest.raises(ConvergenceFailure) as exc:
            optimize_maximin(B, tol=1e-14, max_iters=100)
        assert exc.value.result is not None
        assert exc.value.result.p_hat.sum() == pytest.approx(1.0)

    def test_input_checks(self):
        with pytest.raises(ValueError):
            optimize_maximin([[2.0, 0.0], [0.0, 1.0]])
        with pytest.raises(RankDeficientError):
            optimize_maximin([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            optimize_maximin(np.eye(2), method="newton")


class TestLP:
    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_identity(self, n):
        r = optimize_lp(np.eye(n))
        assert r.t_hat == pytest.approx(1 / n, abs=1e-12)
        np.testing.assert_allclose(r.p_hat, 1 / n, atol=1e-12)

    def test_relaxation_dominates_maximin(self, rng):
        for _ in range(10):
            B = random_unit_rows(rng, 12, 3)
            assert optimize_lp(B).t_hat >= optimize_maximin(B).t_hat - 1e-9

    def test_centered_point_optimal(self, rng):
        B = random_unit_rows(rng, 40, 5)
        r = optimize_lp(B)
        v = optimize_lp(B, center=False)
        assert r.t_hat == pytest.approx(v.t_hat, abs=1e-9)
        assert r.history["centered"]
        # centering spreads weight over more rows than the vertex
        assert np.sum(r.p_hat > 1e-9) >= np.sum(v.p_hat > 1e-9)
        assert r.p_hat.sum() == pytest.approx(1.0) and r.p_hat.min() >= 0


class TestDopt:
    def test_trivial(self):
        r = optimize_dopt([0.5, 0.5], np.eye(2), iters=1)
        np.testing.assert_array_equal(r.p_hat, [0.5, 0.5])

    def test_needs_positive_start(self):
        with pytest.raises(InvalidDistributionError):
            optimize_dopt([1.0, 0.0], np.eye(2))

    def test_converges_to_d_optimal(self, rng):
        B = random_unit_rows(rng, 10, 3)
        r = optimize_dopt(np.full(10, 0.1), B, iters=2000)
        p = cp.Variable(10, nonneg=True)
        prob = cp.Problem(cp.Maximize(cp.log_det(B.T @ cp.diag(p) @ B)), [cp.sum(p) == 1])
        prob.solve(solver=cp.CLARABEL)
        assert r.objective == pytest.approx(prob.value, abs=1e-5)
        assert r.certificate_gap <= 1e-4

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**31))
    def test_monotone_and_on_simplex(self, n, seed):
        r = np.random.default_rng(seed)
        B = random_unit_rows(r, 3 * n, n)
        res = optimize_dopt(r.dirichlet(np.ones(3 * n)), B, iters=8)
        assert np.all(np.diff(res.history["logdet"]) >= -1e-12)
        np.testing.assert_allclose(res.history["p"].sum(axis=1), 1.0, atol=1e-12)
        assert res.history["p"].min() >= 0


class TestTransforms:
    def test_round_trip(self, rng):
        p = rng.dirichlet(np.ones(7))
        q = q_from_p(p, 0.2)
        p2, t2 = p_from_q(q)
        np.testing.assert_allclose(p2, p, rtol=1e-12)
        assert t2 == pytest.approx(0.2, rel=1e-12)

    def test_examples(self):
        np.testing.assert_allclose(q_from_p([0.5, 0.5], 0.5), [1, 1])
        p, t = p_from_q([1, 1])
        np.testing.assert_allclose(p, [0.5, 0.5])
        assert t == 0.5

    def test_errors(self):
        with pytest.raises(NonPositiveTError):
            q_from_p([1.0], 0.0)
        with pytest.raises(ZeroDesignError):
            p_from_q([0.0, 0.0])

    def test_kappa_rescaling(self, rng):
        B = random_unit_rows(rng, 15, 3)
        r = optimize_maximin(B)
        A = kappa_optimal_rescaling(B, r)
        assert np.linalg.norm(A) == pytest.approx(1.0)
        assert kappa(A) == pytest.approx(1 / np.sqrt(r.t_hat), rel=1e-6)


def test_project_simplex(rng):
    for _ in range(50):
        v = rng.standard_normal(6) * 3
        p = project_simplex(v)
        assert p.sum() == pytest.approx(1.0) and p.min() >= 0
        # optimality: v - p is constant on the support and no larger off it
        s = p > 0
        shift = (v - p)[s]
        assert np.ptp(shift) <= 1e-12
        assert np.all(v[~s] <= shift[0] + 1e-12)


def test_dopt_diagonal_closed_form():
    r = optimize_dopt([0.3, 0.7], np.eye(2), iters=1)
    np.testing.assert_allclose(r.history["p"][1], [0.5, 0.5], atol=1e-15)


def test_kappa_rescaling_examples():
    for n in (2, 4):
        r = optimize_maximin(np.eye(n))
        assert kappa(kappa_optimal_rescaling(np.eye(n), r)) == pytest.approx(np.sqrt(n), rel=1e-7)
    B = np.array([[1.0, 0], [1.0, 0], [0, 1.0]])
    r = optimize_maximin(B)
    assert kappa(kappa_optimal_rescaling(B, r)) ** 2 == pytest.approx(2.0, rel=1e-6)


def test_p_from_q_example():
    p, t = p_from_q([2.0, 2.0])
    np.testing.assert_allclose(p, [0.5, 0.5])
    assert t == 0.25
    np.testing.assert_allclose(q_from_p([1.0, 0.0], 0.25), [4.0, 0.0])


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_design_value_chain(n, seed):
    # lambda_min(D-opt) <= maximin <= min(LP, 1/n), and maximin beats row-norm
    r = np.random.default_rng(seed)
    A = r.standard_normal((3 * n, n)) * r.uniform(0.2, 2, (3 * n, 1))
    B = row_normalize(A).B
    t_max = optimize_maximin(B).t_hat
    assert t_max <= 1 / n + 1e-9
    assert optimize_lp(B).t_hat >= t_max - 1e-9
    assert optimize_dopt(row_norm_distribution(A), B).t_hat <= t_max + 1e-7
    assert rate_pair(B, row_norm_distribution(A)).lambda_min <= t_max + 1e-7
