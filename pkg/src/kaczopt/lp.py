"""Dense tableau simplex for matrix games.

Solves ``max_{p in simplex} min_k (G @ p)[k]`` for a ``K x m`` payoff matrix.
After shifting ``G`` to be strictly positive the game becomes the packing LP

    max 1'y   s.t.  G'y <= 1,  y >= 0,

whose slack basis is feasible, so no phase one is needed. The row player's
strategy ``p`` is read off the optimal dual prices and the column player's
strategy ``w`` from ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure


@dataclass
class GameSolution:
    p: np.ndarray       # maximizing mixed strategy over the m columns of G
    w: np.ndarray       # minimizing mixed strategy over the K rows of G
    value: float        # min_k (G p)[k]
    upper: float        # max_i (G' w)[i]; the game value lies in [value, upper]
    pivots: int

    @property
    def gap(self) -> float:
        return max(self.upper - self.value, 0.0)


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def solve_matrix_game(G, tol: float = 1e-9, max_pivots: int = 50_000) -> GameSolution:
    """Optimal mixed strategies of the zero-sum game with payoff ``G``.

    Entering columns follow Dantzig's rule with lowest-index tie breaking and
    switch to Bland's rule after a run of degenerate pivots. The returned
    ``gap`` is an exact duality gap recomputed from both strategies.
    """
    G = np.asarray(G, dtype=np.float64)
    K, m = G.shape
    shift = 1.0 - min(float(G.min()), 0.0)
    Gs = G + shift                              # entries >= 1

    # rows: m constraints; columns: K structural, m slack, rhs
    T = np.zeros((m + 1, K + m + 1))
    T[:m, :K] = Gs.T
    T[:m, K:K + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :K] = -1.0                             # objective row holds -reduced costs
    basis = np.arange(K, K + m)

    eps = 1e-12
    degenerate_run = 0
    pivots = 0
    while True:
        red = -T[m, :-1]
        if degenerate_run > 50:
            candidates = np.flatnonzero(red > eps)
            c = int(candidates[0]) if candidates.size else -1
        else:
            c = int(np.argmax(red)) if red.max() > eps else -1
        if c < 0:
            break
        if pivots >= max_pivots:
            raise ConvergenceFailure(f"simplex exceeded {max_pivots} pivots")
        col = T[:m, c]
        rows = np.flatnonzero(col > eps)
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + eps * max(1.0, best)]
        r = int(ties[np.argmin(basis[ties])])
        degenerate_run = degenerate_run + 1 if T[r, -1] <= eps else 0
        _pivot(T, r, c)
        basis[r] = c
        pivots += 1

    # refactor from the final basis for clean values
    A_full = np.hstack([Gs.T, np.eye(m)])
    Binv = np.linalg.inv(A_full[:, basis])
    xb = Binv @ np.ones(m)
    y = np.zeros(K + m)
    y[basis] = np.maximum(xb, 0.0)
    y = y[:K]
    cb = (basis < K).astype(float)
    prices = np.maximum(cb @ Binv, 0.0)         # dual prices of the m constraints

    p = prices / prices.sum()
    w = y / y.sum()
    value = float((G @ p).min())
    upper = float((G.T @ w).max())
    if upper - value > tol:
        raise ConvergenceFailure(f"simplex finished with duality gap {upper - value:.3e}")
    return GameSolution(p=p, w=w, value=value, upper=upper, pivots=pivots)
