"""Dense linear algebra used by the solver, the rate bounds and the optimizers.

Symmetric eigenproblems are handled by a cyclic Jacobi method with a parallel
(round-robin) pair ordering, so each rotation round is a handful of vectorized
numpy operations. Positive definite factorizations go through Cholesky.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatchError,
    NotPositiveDefiniteError,
    ZeroRowError,
)

ZERO_ROW_NORM = 1e-300
RANK_TOL = 1e-10
MAX_EIG_DIM = 512


@dataclass(frozen=True)
class NormalizedSystem:
    """Unit-row form of a linear system ``A x = b``.

    ``B[i] = A[i] / row_norms[i]``; ``rhs`` is the original ``b``. The unit-row
    equation for row ``i`` is ``B[i] @ x = rhs[i] / row_norms[i]``.
    """

    B: np.ndarray
    row_norms: np.ndarray
    rhs: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.B.shape

    @property
    def unit_rhs(self) -> np.ndarray:
        return self.rhs / self.row_norms


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionMismatchError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def row_normalize(A, b=None) -> NormalizedSystem:
    """Scale every row of ``A`` to unit Euclidean norm.

    Raises :class:`ZeroRowError` for the first row whose norm is below
    ``1e-300``. ``b`` defaults to zeros when only the matrix is of interest.
    """
    A = as_matrix(A)
    m = A.shape[0]
    if b is None:
        b = np.zeros(m)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.shape[0] != m:
        raise DimensionMismatchError(f"rhs has length {b.shape[0]}, matrix has {m} rows")
    norms = np.linalg.norm(A, axis=1)
    bad = np.flatnonzero(~(norms >= ZERO_ROW_NORM))
    if bad.size:
        raise ZeroRowError(int(bad[0]))
    return NormalizedSystem(B=A / norms[:, None], row_norms=norms, rhs=b.copy())


def weighted_gram(B, p) -> np.ndarray:
    """Return ``sum_i p[i] * outer(B[i], B[i])``, i.e. ``B.T @ diag(p) @ B``."""
    B = np.asarray(B, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if B.ndim != 2 or p.shape[0] != B.shape[0]:
        raise DimensionMismatchError(
            f"weights of length {p.shape[0]} do not match {B.shape[0]} rows"
        )
    M = B.T @ (p[:, None] * B)
    return 0.5 * (M + M.T)


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pair schedule covering every (i, j), i < j, once per sweep.

    Pairs within a round are disjoint, so their rotations commute.
    """
    players = list(range(n + (n % 2)))
    N = len(players)
    rounds = []
    for _ in range(N - 1):
        P, Q = [], []
        for k in range(N // 2):
            i, j = players[k], players[N - 1 - k]
            if i < n and j < n:
                P.append(min(i, j))
                Q.append(max(i, j))
        rounds.append((np.array(P, dtype=np.intp), np.array(Q, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _check_symmetric(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
    scale = max(float(np.max(np.abs(M))), np.finfo(float).tiny) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")


def jacobi_eigh(M, tol: float = 1e-13, max_sweeps: int = 60, V0=None):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    M : array_like, shape (n, n)
        Symmetric matrix.
    tol : float
        Stop when the off-diagonal Frobenius norm is at most ``tol * ||M||_F``.
    max_sweeps : int
        Sweep cap; :class:`ConvergenceFailure` is raised when it is reached.
    V0 : array_like, optional
        Orthogonal starting basis. When ``V0`` nearly diagonalizes ``M``
        (e.g. eigenvectors of a slightly different matrix) only one or two
        sweeps are needed.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in ascending order.
    V : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns, ``M @ V ~= V * w``.
    """
    M = np.asarray(M, dtype=np.float64)
    _check_symmetric(M)
    n = M.shape[0]
    if n > MAX_EIG_DIM:
        raise DimensionMismatchError(f"dimension {n} exceeds the eigensolver cap {MAX_EIG_DIM}")
    if V0 is None:
        V = np.eye(n)
        A = 0.5 * (M + M.T)
    else:
        V = np.array(V0, dtype=np.float64)
        A = V.T @ M @ V
        A = 0.5 * (A + A.T)
    scale = np.linalg.norm(M)
    rounds = _round_robin(n)

    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            w = np.diag(A).copy()
            order = np.argsort(w, kind="stable")
            return w[order], V[:, order]
        for P, Q in rounds:
            apq = A[P, Q]
            active = apq != 0.0
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            # huge theta (tiny apq) means a negligible rotation; inf gives t = 0
            with np.errstate(over="ignore"):
                theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            rp, rq = A[P, :], A[Q, :]
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P], A[:, Q]
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            vp, vq = V[:, P], V[:, Q]
            V[:, P] = vp * c - vq * s
            V[:, Q] = vp * s + vq * c
        A = 0.5 * (A + A.T)
    raise ConvergenceFailure(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def eig_extremes(M, tol: float = 1e-13):
    """Smallest and largest eigenvalue of a symmetric matrix, plus a unit
    eigenvector for the smallest one."""
    w, V = jacobi_eigh(M, tol=tol)
    return float(w[0]), float(w[-1]), V[:, 0].copy()


def _cholesky(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    _check_symmetric(M)
    try:
        return scipy.linalg.cholesky(M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from None


def logdet(M) -> float:
    """``log det M`` for symmetric positive definite ``M`` via Cholesky."""
    L = _cholesky(M)
    return float(2.0 * np.sum(np.log(np.diag(L))))


def solve_spd(M, y) -> np.ndarray:
    L = _cholesky(M)
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != L.shape[0]:
        raise DimensionMismatchError(f"rhs length {y.shape[0]} vs matrix dimension {L.shape[0]}")
    return scipy.linalg.cho_solve((L, True), y)


def leverage_scores(B, M) -> np.ndarray:
    """``B[i] @ inv(M) @ B[i]`` for every row, via one triangular solve."""
    L = _cholesky(M)
    Z = scipy.linalg.solve_triangular(L, np.asarray(B, dtype=np.float64).T, lower=True)
    return np.einsum("ij,ij->j", Z, Z)


def quadratic_forms(B, W) -> np.ndarray:
    """``B[i] @ W @ B[i]`` for every row ``i``."""
    return np.einsum("ij,ij->i", B @ W, B)
