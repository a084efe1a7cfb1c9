"""Best responses, Nash equilibria and expected payoffs for small matrix games.

Expected values are always taken from the payoff table, never from
closed-form shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import GameShapeError, PreconditionError
from .games import NormalFormGame, is_zero_sum

SUM_TOL = 1e-12
EQ_TOL = 1e-9


def as_strategy(probs, n: int | None = None) -> np.ndarray:
    s = np.asarray(probs, dtype=float)
    if s.ndim != 1:
        raise GameShapeError("a mixed strategy is a flat probability vector")
    if n is not None and s.shape[0] != n:
        raise GameShapeError(f"strategy has {s.shape[0]} entries, game has {n} actions")
    if np.any(s < 0) or np.any(s > 1) or abs(s.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"not a probability distribution: {s}")
    return s


def point_mass(n: int, i: int) -> np.ndarray:
    s = np.zeros(n)
    s[i] = 1.0
    return s


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def expected_payoff(g: NormalFormGame, s1, s2) -> tuple[float, float]:
    s1 = as_strategy(s1, g.n_actions)
    s2 = as_strategy(s2, g.n_actions)
    return float(s1 @ g.matrix(0) @ s2), float(s1 @ g.matrix(1) @ s2)


def action_values(g: NormalFormGame, player: int, opponent_strategy) -> np.ndarray:
    """Expected payoff of each pure action of ``player`` against the opponent's mix."""
    q = as_strategy(opponent_strategy, g.n_actions)
    if player == 0:
        return g.matrix(0) @ q
    return q @ g.matrix(1)


def best_responses(g: NormalFormGame, player: int, opponent_strategy, tol: float = 1e-12) -> list[int]:
    values = action_values(g, player, opponent_strategy)
    top = values.max()
    return [i for i, v in enumerate(values) if v >= top - tol]


def pure_nash(g: NormalFormGame) -> list[tuple[int, int]]:
    n = g.n_actions
    u1, u2 = g.matrix(0), g.matrix(1)
    return [
        (a, b)
        for a in range(n)
        for b in range(n)
        if u1[a, b] >= u1[:, b].max() and u2[a, b] >= u2[a, :].max()
    ]


def verify_equilibrium(g: NormalFormGame, s1, s2, tol: float = EQ_TOL) -> bool:
    v1, v2 = expected_payoff(g, s1, s2)
    dev1 = action_values(g, 0, s2).max()
    dev2 = action_values(g, 1, s1).max()
    return bool(dev1 <= v1 + tol and dev2 <= v2 + tol)


@dataclass
class EquilibriumResult:
    pure: list[tuple[int, int]] = field(default_factory=list)
    # (row strategy, column strategy, (value_row, value_col))
    mixed: list[tuple[np.ndarray, np.ndarray, tuple[float, float]]] = field(default_factory=list)
    all_strategies: bool = False


def _indifference_mix(m: list[list[int]]) -> Fraction | None:
    """Probability on action 0 that makes the *other* player indifferent.

    ``m[i][j]`` is the indifferent player's payoff for own action ``i`` when
    the mixing player plays ``j``.
    """
    denom = (m[0][0] - m[1][0]) - (m[0][1] - m[1][1])
    if denom == 0:
        return None
    return Fraction(m[1][1] - m[0][1], denom)


def mixed_nash_2x2(g: NormalFormGame) -> EquilibriumResult:
    if g.n_actions != 2:
        raise GameShapeError("mixed_nash_2x2 needs a 2x2 game")
    if not g.is_symmetric():
        raise PreconditionError(f"{g.name} is not symmetric")

    values = {v for row in g.payoff for cell in row for v in cell}
    if len(values) == 1:
        return EquilibriumResult(pure=pure_nash(g), all_strategies=True)

    result = EquilibriumResult(pure=pure_nash(g))
    u1 = [[g.payoff[a][b][0] for b in range(2)] for a in range(2)]
    # column player's payoff seen from its own action first
    u2 = [[g.payoff[a][b][1] for a in range(2)] for b in range(2)]
    q = _indifference_mix(u1)  # column mix keeping the row player indifferent
    p = _indifference_mix(u2)
    if p is not None and q is not None and 0 < p < 1 and 0 < q < 1:
        s1 = np.array([float(p), float(1 - p)])
        s2 = np.array([float(q), float(1 - q)])
        result.mixed.append((s1, s2, expected_payoff(g, s1, s2)))
    return result


def _maximin(a: np.ndarray) -> np.ndarray:
    """Row strategy maximizing the guaranteed payoff of matrix ``a``."""
    m, n = a.shape
    # variables: x_0..x_{m-1}, v ; minimize -v
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-a.T, np.ones((n, 1))])
    b_ub = np.zeros(n)
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    bounds = [(0, None)] * m + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"LP failed: {res.message}")
    x = np.clip(res.x[:m], 0.0, None)
    return x / x.sum()


def _polish(a: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Re-solve the row strategy exactly on the supports found by the LP."""
    rows = np.flatnonzero(x > 1e-7)
    cols = np.flatnonzero(y > 1e-7)
    # x_S^T A[S, j] = v for j in cols, sum x_S = 1
    k = len(rows)
    lhs = np.zeros((len(cols) + 1, k + 1))
    lhs[: len(cols), :k] = a[np.ix_(rows, cols)].T
    lhs[: len(cols), k] = -1.0
    lhs[-1, :k] = 1.0
    rhs = np.zeros(len(cols) + 1)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if np.any(sol[:k] < -1e-12) or not np.allclose(lhs @ sol, rhs, atol=1e-12):
        return None
    out = np.zeros_like(x)
    out[rows] = np.clip(sol[:k], 0.0, None)
    return out / out.sum()


def zero_sum_mixed_nash(g: NormalFormGame) -> tuple[np.ndarray, np.ndarray, float]:
    """Minimax strategies of both players and the row player's game value."""
    if not is_zero_sum(g):
        raise PreconditionError(f"{g.name} is not zero-sum")
    u1 = g.matrix(0)
    x = _maximin(u1)
    y = _maximin(g.matrix(1).T)

    px, py = _polish(u1, x, y), _polish(g.matrix(1).T, y, x)
    if px is not None and py is not None and verify_equilibrium(g, px, py, tol=1e-12):
        x, y = px, py
    value = float(x @ u1 @ y)
    if abs(value) < 1e-12:
        value = 0.0
    return x, y, value
