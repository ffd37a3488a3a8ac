"""Kaczmarz projection iterations.

Every step projects the iterate onto the hyperplane ``{x : a_i @ x = b_i}`` of
one equation. Rows are chosen cyclically or drawn from a probability vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ZeroRowError, ZeroVectorError
from .linalg import ZERO_ROW_NORM, NormalizedSystem, as_matrix, weighted_gram
from .sampling import RowSampler, as_distribution


@dataclass(frozen=True)
class Cyclic:
    """Rows taken in order 0, 1, ..., m-1, 0, ..."""


@dataclass(frozen=True)
class Randomized:
    """Rows drawn independently with probabilities ``p`` from stream ``seed``."""

    p: np.ndarray
    seed: int = 0


@dataclass
class TrajectoryRecord:
    """Per-step error of one solver run.

    ``squared_errors[j]`` is ``||x_j - x||^2`` against the supplied solution, or
    ``||A x_j - b||^2`` when ``residual_mode`` is set (no solution given).
    """

    squared_errors: np.ndarray
    selected_rows: np.ndarray
    x_final: np.ndarray
    residual_mode: bool = False

    @property
    def steps(self) -> int:
        return len(self.selected_rows)


def project_row(x, a_row, b_val: float) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``{z : a_row @ z = b_val}``."""
    x = np.asarray(x, dtype=np.float64)
    a_row = np.asarray(a_row, dtype=np.float64)
    if x.shape != a_row.shape:
        raise DimensionMismatchError(f"x has shape {x.shape}, row has shape {a_row.shape}")
    sq = float(a_row @ a_row)
    if not np.sqrt(sq) >= ZERO_ROW_NORM:
        raise ZeroRowError(0)
    return x + ((b_val - a_row @ x) / sq) * a_row


def cyclic_index(k: int, m: int) -> int:
    if m < 1 or k < 0:
        raise ValueError(f"need m >= 1 and k >= 0, got k={k}, m={m}")
    return k % m


def row_norm_distribution(A) -> np.ndarray:
    """The classical randomized Kaczmarz probabilities ``||a_i||^2 / ||A||_F^2``."""
    A = as_matrix(A)
    sq = np.einsum("ij,ij->i", A, A)
    return sq / sq.sum()


def _coerce_system(system, b):
    if isinstance(system, NormalizedSystem):
        return system.B, system.unit_rhs
    A = as_matrix(system)
    if b is None:
        raise DimensionMismatchError("a raw matrix needs a right-hand side")
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatchError(f"rhs has length {b.shape[0]}, matrix has {A.shape[0]} rows")
    norms = np.linalg.norm(A, axis=1)
    bad = np.flatnonzero(~(norms >= ZERO_ROW_NORM))
    if bad.size:
        raise ZeroRowError(int(bad[0]))
    return A, b


def run_batch(A, b, indices: np.ndarray, x0=None, truth=None) -> tuple[np.ndarray, np.ndarray]:
    """Run many independent trajectories on one system in lockstep.

    ``indices`` has shape ``(trials, steps)``; trial ``t`` projects onto row
    ``indices[t, j]`` at step ``j``. Returns the squared-error matrix of shape
    ``(trials, steps + 1)`` and the final iterates ``(trials, n)``. Errors are
    measured against ``truth`` when given, otherwise as squared residuals.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    indices = np.asarray(indices)
    trials, steps = indices.shape
    n = A.shape[1]
    row_sq = np.einsum("ij,ij->i", A, A)
    X = np.zeros((trials, n)) if x0 is None else np.tile(np.asarray(x0, dtype=np.float64), (trials, 1))

    def errors(X):
        if truth is not None:
            D = X - truth
            return np.einsum("tj,tj->t", D, D)
        R = X @ A.T - b
        return np.einsum("ti,ti->t", R, R)

    out = np.empty((trials, steps + 1))
    out[:, 0] = errors(X)
    for j in range(steps):
        i = indices[:, j]
        a = A[i]
        r = (b[i] - np.einsum("tj,tj->t", a, X)) / row_sq[i]
        X += r[:, None] * a
        out[:, j + 1] = errors(X)
    return out, X


def run_solver(system, b=None, *, steps: int, scheme=Cyclic(), x0=None, truth=None) -> TrajectoryRecord:
    """Apply ``steps`` Kaczmarz projections.

    Parameters
    ----------
    system : NormalizedSystem or array_like
        The system, either in unit-row form or as the raw matrix ``A`` with
        ``b`` passed separately. Projections are scale invariant, so both give
        the same iterates up to rounding.
    steps : int
        Number of projections.
    scheme : Cyclic or Randomized
        Row selection rule.
    x0 : array_like, optional
        Starting point; zero by default.
    truth : array_like, optional
        Known solution. Without it the record holds squared residuals.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    A, rhs = _coerce_system(system, b)
    m, n = A.shape
    if x0 is not None and np.asarray(x0).shape != (n,):
        raise DimensionMismatchError(f"x0 must have length {n}")
    if truth is not None:
        truth = np.asarray(truth, dtype=np.float64)
        if truth.shape != (n,):
            raise DimensionMismatchError(f"truth must have length {n}")
        if np.linalg.norm(A @ truth - rhs) > 1e-10 * max(1.0, np.linalg.norm(rhs)):
            raise ValueError("truth does not solve the system; only consistent systems are supported")

    if isinstance(scheme, Randomized):
        p = as_distribution(scheme.p)
        if p.size != m:
            raise DimensionMismatchError(f"distribution has {p.size} entries for {m} rows")
        rows = RowSampler(p, seed=scheme.seed).draw(steps)
    else:
        rows = np.arange(steps) % m

    sq, X = run_batch(A, rhs, rows[None, :], x0=x0, truth=truth)
    return TrajectoryRecord(
        squared_errors=sq[0],
        selected_rows=rows,
        x_final=X[0],
        residual_mode=truth is None,
    )


def one_step_expected_factor(B, p, y) -> float:
    """Expected contraction ``sum_i p_i sin^2(angle(y, b_i))`` of one random step
    from error direction ``y``, computed as ``1 - y@M@y / y@y``."""
    y = np.asarray(y, dtype=np.float64)
    yy = float(y @ y)
    if yy == 0.0:
        raise ZeroVectorError("error direction must be nonzero")
    M = weighted_gram(B, p)
    return 1.0 - float(y @ M @ y) / yy
