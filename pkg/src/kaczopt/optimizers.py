"""Row-selection distributions for randomized Kaczmarz.

Three designs over the probability simplex, all phrased in terms of the
unit-row matrix ``B`` and the weighted Gram matrix ``M(p) = B.T diag(p) B``:

* maximin: maximize ``lambda_min(M(p))``, which minimizes the guaranteed
  per-step contraction factor;
* lp: maximize the smallest *diagonal* entry of ``M(p)`` instead, a linear
  relaxation of the above;
* dopt: maximize ``log det M(p)`` with the multiplicative fixed-point update.

Any symmetric ``W >= 0`` with unit trace gives the bound
``lambda_min(M(p)) <= trace(W M(p)) = sum_i p_i b_i'Wb_i <= max_i b_i'Wb_i``
for every ``p`` on the simplex. The maximin solvers return such a ``W`` and
report ``max_i b_i'Wb_i - lambda_min(M(p_hat))`` as the certificate gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import smallest_singular_value
from .errors import (
    ConvergenceFailure,
    InvalidDistributionError,
    NonPositiveTError,
    ZeroDesignError,
)
from .linalg import (
    as_matrix,
    eig_extremes,
    jacobi_eigh,
    leverage_scores,
    logdet,
    quadratic_forms,
    weighted_gram,
)
from .lp import solve_matrix_game
from .sampling import as_distribution

MAXIMIN = "maximin"
LP_RELAX = "lp"
D_OPTIMAL = "dopt"
SPARSITY_THRESHOLD = 1e-5
STATIONARY_TOL = 8 * np.finfo(float).eps


@dataclass
class OptimizerResult:
    """Outcome of one design computation.

    ``t_hat`` is ``lambda_min(M(p_hat))`` for maximin and D-optimal results and
    the LP optimum for the relaxation. ``certificate_gap`` bounds how far the
    method's own objective is from optimal: the eigenvalue gap for maximin, the
    LP duality gap, and the log-determinant gap for the D-optimal iteration.
    """

    p_hat: np.ndarray
    t_hat: float
    certificate_gap: float
    iterations: int
    method: str
    upper_bound: float = np.nan
    objective: float = np.nan
    dual: np.ndarray | None = None
    history: dict = field(default_factory=dict)

    @property
    def zero_count(self) -> int:
        """Number of entries of ``p_hat`` below ``SPARSITY_THRESHOLD``."""
        return int(np.sum(self.p_hat < SPARSITY_THRESHOLD))


def _check_unit_rows(B) -> np.ndarray:
    B = as_matrix(B)
    norms = np.linalg.norm(B, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise ValueError("design matrix must have unit-norm rows; use row_normalize first")
    if B.shape[0] < B.shape[1]:
        raise ValueError("need at least as many rows as columns")
    return B


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{p : p >= 0, sum(p) = 1}``."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    r = np.flatnonzero(u * k > css)[-1]
    return np.maximum(v - css[r] / (r + 1), 0.0)


def _gram_norm(B: np.ndarray, iters: int = 100) -> float:
    """Upper estimate of the operator norm of ``p -> B.T diag(p) B``."""
    m = B.shape[0]
    # nonnegative kernel (b_i'b_j)^2: spectral radius <= max row sum
    rowsum = np.sqrt(np.max(quadratic_forms(B, B.T @ B)))
    v = np.full(m, 1.0 / np.sqrt(m))
    est = 0.0
    for _ in range(iters):
        u = quadratic_forms(B, weighted_gram(B, v))
        est = float(v @ u)
        v = u / np.linalg.norm(u)
    return min(1.1 * np.sqrt(est), rowsum)


class _Certificate:
    """Best primal point and best dual matrix seen so far."""

    def __init__(self, B):
        self.B = B
        self.lower, self.p = -np.inf, None
        self.upper, self.W = np.inf, None

    def offer_primal(self, p) -> float:
        lam = eig_extremes(weighted_gram(self.B, p))[0]
        if lam > self.lower:
            self.lower, self.p = lam, p.copy()
        return lam

    def offer_dual(self, W) -> float:
        ub = float(np.max(quadratic_forms(self.B, W)))
        if ub < self.upper:
            self.upper, self.W = ub, W.copy()
        return ub

    @property
    def gap(self) -> float:
        return max(self.upper - self.lower, 0.0)

    def result(self, iterations: int, history: dict) -> OptimizerResult:
        return OptimizerResult(
            p_hat=self.p,
            t_hat=self.lower,
            certificate_gap=self.gap,
            iterations=iterations,
            method=MAXIMIN,
            upper_bound=self.upper,
            objective=self.lower,
            dual=self.W,
            history=history,
        )


def _maximin_pdhg(B, tol, max_iters, p0, check_every=50):
    # Restarted primal-dual hybrid gradient on the saddle problem
    #   max_{p in simplex} min_{W in spectraplex} <W, M(p)>.
    m, n = B.shape
    L = _gram_norm(B)
    tau = sigma = 0.99 / L
    p = p0.copy()
    W = np.eye(n) / n
    V = np.eye(n)
    cert = _Certificate(B)
    cert.offer_primal(p)
    cert.offer_dual(W)
    gaps = [cert.gap]
    if cert.gap <= tol:
        return cert.result(0, {"gaps": gaps})

    p_avg, W_avg, count = p.copy(), W.copy(), 0
    restart_gap = cert.gap
    for it in range(1, max_iters + 1):
        p_new = project_simplex(p + tau * quadratic_forms(B, W))
        S = W - sigma * weighted_gram(B, 2.0 * p_new - p)
        w, V = jacobi_eigh(S, V0=V)
        W = (V * project_simplex(w)) @ V.T
        p = p_new
        count += 1
        p_avg += (p - p_avg) / count
        W_avg += (W - W_avg) / count

        if it % check_every:
            continue
        cur = cert.offer_dual(W) - cert.offer_primal(p)
        avg = cert.offer_dual(W_avg) - cert.offer_primal(p_avg)
        gaps.append(cert.gap)
        if cert.gap <= tol:
            return cert.result(it, {"gaps": gaps})
        # restart from the better of the two candidates once the gap halves
        if min(cur, avg) <= 0.5 * restart_gap or count >= 40 * check_every:
            if avg < cur:
                p, W = p_avg.copy(), W_avg.copy()
                V = jacobi_eigh(W, V0=V)[1]
            restart_gap = min(cur, avg)
            p_avg, W_avg, count = p.copy(), W.copy(), 0
    raise ConvergenceFailure(
        f"maximin did not reach gap {tol:g} in {max_iters} iterations (gap {cert.gap:.3e})",
        result=cert.result(max_iters, {"gaps": gaps}),
    )


def _maximin_frank_wolfe(B, tol, max_iters, p0, away_steps, cluster=1e-8):
    m, n = B.shape
    p = p0.copy()
    cert = _Certificate(B)
    gaps = []
    for k in range(max_iters + 1):
        w, V = jacobi_eigh(weighted_gram(B, p))
        if w[0] > cert.lower:
            cert.lower, cert.p = float(w[0]), p.copy()
        # average over the (near-)minimal eigenspace when lambda_min is degenerate
        U = V[:, w <= w[0] + cluster]
        W = U @ U.T / U.shape[1]
        g = quadratic_forms(B, W)
        cert.offer_dual(W)
        gaps.append(cert.gap)
        if cert.gap <= tol:
            return cert.result(k, {"gaps": gaps})
        if k == max_iters:
            break
        gamma = 2.0 / (k + 2.0)
        i_fw = int(np.argmax(g))
        d = -p.copy()
        d[i_fw] += 1.0
        if away_steps:
            support = np.flatnonzero(p > 0)
            i_aw = int(support[np.argmin(g[support])])
            if p[i_aw] < 1.0 and g[i_fw] - g @ p < g @ p - g[i_aw]:
                d = p.copy()
                d[i_aw] -= 1.0
                gamma = min(gamma, p[i_aw] / (1.0 - p[i_aw]))
        p = np.maximum(p + gamma * d, 0.0)
        p /= p.sum()
    raise ConvergenceFailure(
        f"Frank-Wolfe did not reach gap {tol:g} in {max_iters} iterations (gap {cert.gap:.3e})",
        result=cert.result(max_iters, {"gaps": gaps}),
    )


def optimize_maximin(
    B,
    tol: float = 1e-7,
    max_iters: int = 20_000,
    *,
    method: str = "pdhg",
    p0=None,
    away_steps: bool = True,
) -> OptimizerResult:
    """Row distribution maximizing ``lambda_min(B.T diag(p) B)``.

    Parameters
    ----------
    B : array_like, shape (m, n)
        Unit-row matrix of full column rank.
    tol : float
        Target certificate gap.
    max_iters : int
        Iteration cap; on overrun :class:`ConvergenceFailure` is raised with the
        best result attached as ``exc.result``.
    method : {"pdhg", "frank-wolfe"}
        ``"pdhg"`` runs a restarted primal-dual hybrid gradient method on the
        saddle formulation and reaches tight gaps quickly. ``"frank-wolfe"``
        uses open-loop steps ``2/(k+2)`` (optionally with away steps); it is
        simple but slow once ``lambda_min`` becomes degenerate.
    p0 : array_like, optional
        Starting distribution, uniform by default.
    """
    B = _check_unit_rows(B)
    smallest_singular_value(B)
    m = B.shape[0]
    p0 = np.full(m, 1.0 / m) if p0 is None else as_distribution(p0).copy()
    if method == "pdhg":
        return _maximin_pdhg(B, tol, max_iters, p0)
    if method == "frank-wolfe":
        return _maximin_frank_wolfe(B, tol, max_iters, p0, away_steps)
    raise ValueError(f"unknown maximin method {method!r}")


def _max_log_point(E, r, iters: int = 100):
    """``argmax sum(log p)`` subject to ``E @ p = r`` via Newton on the dual.

    The maximizer has the form ``p = 1 / (E.T @ lam)``. Returns ``None`` when
    the affine slice has no strictly positive point (the dual is unbounded).
    """
    k, m = E.shape
    lam = np.zeros(k)
    lam[-1] = m                                   # last row of E is all ones: p uniform

    def dual(lam):
        z = E.T @ lam
        return -np.sum(np.log(z)) + lam @ r if np.all(z > 0) else np.inf

    f = dual(lam)
    for _ in range(iters):
        p = 1.0 / (E.T @ lam)
        g = r - E @ p
        H = (E * p**2) @ E.T
        d = -np.linalg.lstsq(H, g, rcond=None)[0]
        dec = -(g @ d)
        if dec < 1e-24:
            break
        step = 1.0
        while step > 1e-12:
            f_new = dual(lam + step * d)
            if f_new <= f - 0.25 * step * dec:
                break
            step *= 0.5
        else:
            return None
        lam, f = lam + step * d, f_new
    p = 1.0 / (E.T @ lam)
    if np.max(np.abs(E @ p - r)) > 1e-10 * max(1.0, np.max(np.abs(r))):
        return None
    return p


def _lp_face_center(C, t, w, tol):
    # Optimal face of max_p min_j (C p)_j is {p in simplex : C p >= t}. Rows with
    # (C'w)_i < t are zero in every optimum, constraints with w_j > 0 are active in
    # every optimum; the remaining constraints are added as equalities on demand.
    n, m = C.shape
    keep = np.flatnonzero(C.T @ w >= t - tol)
    active = list(np.flatnonzero(w > tol))
    while True:
        E = np.vstack([C[np.ix_(active, keep)], np.ones((1, keep.size))])
        r = np.r_[np.full(len(active), t), 1.0]
        q = _max_log_point(E, r)
        if q is None:
            return None
        p = np.zeros(m)
        p[keep] = q
        slack = C @ p - t
        slack[active] = 0.0
        worst = int(np.argmin(slack))
        if slack[worst] >= -tol:
            return p
        active.append(worst)


def optimize_lp(B, tol: float = 1e-9, *, center: bool = True) -> OptimizerResult:
    """Maximize ``min_j (B.T diag(p) B)[j, j]`` over the simplex.

    Each diagonal entry is linear in ``p``, so this is the matrix game with
    payoff ``(B**2).T``, solved exactly by the simplex method. The optimum is
    rarely unique and simplex vertices have at most ``n`` nonzero weights,
    which makes for a poor Kaczmarz distribution. With ``center`` (default)
    the returned ``p_hat`` is the point of the optimal face maximizing
    ``sum(log p)`` over its support, which is what an interior-point LP solver
    converges to; the vertex is kept when centering fails.
    """
    B = _check_unit_rows(B)
    C = (B * B).T
    game = solve_matrix_game(C, tol=tol)
    p, centered = game.p, False
    if center:
        pc = _lp_face_center(C, game.value, game.w, tol)
        if pc is not None and (C @ pc).min() >= game.value - tol:
            p, centered = pc / pc.sum(), True
    value = float((C @ p).min())
    lam = eig_extremes(weighted_gram(B, p))[0]
    return OptimizerResult(
        p_hat=p,
        t_hat=value,
        certificate_gap=max(game.upper - value, 0.0),
        iterations=game.pivots,
        method=LP_RELAX,
        upper_bound=game.upper,
        objective=value,
        dual=game.w,
        history={"lambda_min": lam, "centered": centered, "vertex": game.p},
    )


def optimize_dopt(row_norm_init, B, iters: int = 10) -> OptimizerResult:
    """Multiplicative D-optimal update ``p_i <- p_i * b_i' M(p)^-1 b_i / n``.

    The update keeps ``sum(p) = 1`` (it equals ``trace(M^-1 M) / n``) and never
    decreases ``log det M(p)``. When every factor ``d_i / n`` is within a few
    ulps of 1 the design is stationary and is left untouched. Zero weights stay zero, so the starting point
    must be strictly positive. ``history`` holds every iterate, its
    log-determinant and its coordinate sum; ``certificate_gap`` is the bound
    ``n log(max_i d_i / n)`` on the remaining log-determinant improvement.
    """
    B = _check_unit_rows(B)
    p = as_distribution(row_norm_init).copy()
    if np.any(p <= 0):
        raise InvalidDistributionError("D-optimal iteration needs a strictly positive start")
    if p.size != B.shape[0]:
        raise ValueError(f"start has {p.size} entries for {B.shape[0]} rows")
    n = B.shape[1]

    ps, logdets, sums = [p.copy()], [], []
    for t in range(iters + 1):
        M = weighted_gram(B, p)
        logdets.append(logdet(M))
        sums.append(float(p.sum()))
        d = leverage_scores(B, M)
        if t == iters:
            break
        factor = d / n
        # at a D-optimal design every factor is 1; don't let rounding move it
        if np.max(np.abs(factor - 1.0)) > STATIONARY_TOL:
            p = p * factor
        ps.append(p.copy())

    lam = eig_extremes(M)[0]
    return OptimizerResult(
        p_hat=p,
        t_hat=lam,
        certificate_gap=max(n * np.log(d.max() / n), 0.0),
        iterations=iters,
        method=D_OPTIMAL,
        objective=logdets[-1],
        history={"p": np.array(ps), "logdet": np.array(logdets), "sum": np.array(sums)},
    )


def p_from_q(q) -> tuple[np.ndarray, float]:
    """Map a feasible point of ``min 1'q s.t. B' diag(q) B >= I`` to ``(p, t)``."""
    q = np.asarray(q, dtype=np.float64)
    if np.any(q < 0):
        raise ZeroDesignError("design weights must be nonnegative")
    total = q.sum()
    if not total > 0:
        raise ZeroDesignError("design has zero total weight")
    t = 1.0 / total
    return q * t, t


def q_from_p(p, t: float) -> np.ndarray:
    if not t > 0:
        raise NonPositiveTError(f"t must be positive, got {t!r}")
    return np.asarray(p, dtype=np.float64) / t


def kappa_optimal_rescaling(B, result: OptimizerResult) -> np.ndarray:
    """Rows ``sqrt(p_hat[i]) * B[i]``: the row scaling with unit Frobenius norm
    that minimizes ``kappa``, whose square is ``1 / t_hat``."""
    B = as_matrix(B)
    return np.sqrt(result.p_hat)[:, None] * B
