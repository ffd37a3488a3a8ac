"""Convergence-rate quantities for randomized Kaczmarz.

For a row distribution ``p`` and the unit-row matrix ``B``, let
``M = B.T @ diag(p) @ B``. The expected squared error after ``k`` steps lies
between ``omega2**k`` and ``omega1**k`` times the initial squared error, where
``omega1 = 1 - lambda_min(M)`` and ``omega2 = 1 - lambda_max(M)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError
from .linalg import RANK_TOL, as_matrix, eig_extremes, weighted_gram
from .sampling import as_distribution


@dataclass(frozen=True)
class RatePair:
    omega1: float
    omega2: float
    lambda_min: float
    lambda_max: float


def rate_pair(B, p) -> RatePair:
    """Upper (``omega1``) and lower (``omega2``) per-step contraction factors."""
    p = as_distribution(p)
    lo, hi, _ = eig_extremes(weighted_gram(B, p))
    return RatePair(omega1=1.0 - lo, omega2=1.0 - hi, lambda_min=lo, lambda_max=hi)


def smallest_singular_value(A) -> float:
    """``sigma_n(A)`` as the root of the smallest eigenvalue of ``A.T @ A``.

    Squares the condition number, which is acceptable for the small column
    counts this package targets.
    """
    A = as_matrix(A)
    lo, hi, _ = eig_extremes(A.T @ A)
    # the Gram route cannot resolve eigenvalue ratios below ~n * eps
    floor = max(RANK_TOL**2, 16 * A.shape[1] * np.finfo(float).eps)
    if hi <= 0.0 or lo <= floor * hi:
        raise RankDeficientError("matrix does not have full column rank")
    return float(np.sqrt(lo))


def kappa(A) -> float:
    """Scaled condition number ``||A||_F * ||pinv(A)||_2``."""
    A = as_matrix(A)
    return float(np.linalg.norm(A) / smallest_singular_value(A))


def classical_rate(A) -> float:
    """Rate ``1 - kappa(A)**-2`` of the row-norm randomized Kaczmarz method."""
    return 1.0 - kappa(A) ** -2


def envelope(initial_sq_error: float, rates: RatePair, k):
    """``(lower, upper)`` expected squared error after ``k`` steps.

    ``k`` may be an integer or an array of step counts.
    """
    k = np.asarray(k)
    if np.any(k < 0):
        raise ValueError("step count must be nonnegative")
    lower = initial_sq_error * np.power(rates.omega2, k)
    upper = initial_sq_error * np.power(rates.omega1, k)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper
