"""Seeded row sampling for the randomized solver.

Random streams come from numpy's Philox counter-based generator. A stream is
identified by a 64-bit seed and a small integer stream tag; the experiment
harness derives per-trial seeds as ``seed ^ trial``.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidDistributionError

SIMPLEX_TOL = 1e-9
ALIAS_MIN_CATEGORIES = 64
_MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream)``."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def as_distribution(p, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a point of the probability simplex and return it as floats."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise InvalidDistributionError(f"expected a 1-D weight vector, got shape {p.shape}")
    if p.size == 0:
        raise InvalidDistributionError("empty distribution")
    if not np.all(np.isfinite(p)):
        raise InvalidDistributionError("distribution has non-finite entries")
    if np.any(p < 0):
        raise InvalidDistributionError(f"negative weight {p.min()!r}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise InvalidDistributionError(f"weights sum to {total!r}, not 1")
    return p


def _alias_tables(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Vose's construction
    m = p.size
    scaled = p * (m / p.sum())
    prob = np.zeros(m)
    alias = np.arange(m)
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] -= 1.0 - scaled[s]
        (small if scaled[g] < 1.0 else large).append(g)
    fallback = int(np.argmax(p))
    for i in large + small:
        # leftovers carry mass ~1 up to rounding; never promote an empty category
        if p[i] > 0:
            prob[i] = 1.0
        else:
            prob[i] = 0.0
            alias[i] = fallback
    return prob, alias


class RowSampler:
    """Draws row indices ``i`` with probability ``p[i]``.

    Small supports use a cumulative table with binary search; from
    ``ALIAS_MIN_CATEGORIES`` categories on, an alias table gives O(1) draws.
    Categories with zero weight are never drawn.
    """

    def __init__(self, p, seed: int = 0, stream: int = 0):
        p = as_distribution(p)
        self.p = p
        self.m = p.size
        self.kind = "alias" if self.m >= ALIAS_MIN_CATEGORIES else "cumulative"
        if self.kind == "alias":
            self._prob, self._alias = _alias_tables(p)
        else:
            cdf = np.cumsum(p / p.sum())
            last = int(np.flatnonzero(p > 0)[-1])
            cdf[last:] = 1.0
            self._cdf = cdf
        self.seed = seed
        self.stream = stream
        self.rng = make_rng(seed, stream)

    def reseeded(self, seed: int, stream: int = 0) -> "RowSampler":
        """Copy sharing the tables, drawing from a fresh ``(seed, stream)``."""
        other = object.__new__(RowSampler)
        other.__dict__.update(self.__dict__)
        other.seed, other.stream = seed, stream
        other.rng = make_rng(seed, stream)
        return other

    def draw(self, size: int) -> np.ndarray:
        if self.kind == "alias":
            cols = self.rng.integers(0, self.m, size=size)
            coin = self.rng.random(size)
            return np.where(coin < self._prob[cols], cols, self._alias[cols])
        u = self.rng.random(size)
        return np.searchsorted(self._cdf, u, side="right")


def build_sampler(p, seed: int) -> RowSampler:
    return RowSampler(p, seed=seed)
