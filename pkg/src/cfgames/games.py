"""Finite two-player simultaneous games and their counterfactual variants.

Payoffs are stored as exact integers in a row-major table ``payoff[a][b] =
(u1, u2)`` where ``a`` is the row player's action index and ``b`` the column
player's. Both players share one ordered action list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import GameShapeError, InvalidSpecError

Cell = tuple[int, int]
Table = tuple[tuple[Cell, ...], ...]


class Family(str, enum.Enum):
    PD = "pd"
    RPS = "rps"


@dataclass(frozen=True)
class NormalFormGame:
    name: str
    actions: tuple[str, ...]
    payoff: Table
    family: Family
    cooperative_action: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "family", Family(self.family))
        table = tuple(tuple((int(c[0]), int(c[1])) for c in row) for row in self.payoff)
        object.__setattr__(self, "payoff", table)

        n = len(self.actions)
        if n == 0:
            raise GameShapeError("a game needs at least one action")
        if any(not label for label in self.actions):
            raise GameShapeError("action labels must be non-empty")
        if len(set(self.actions)) != n:
            raise GameShapeError(f"duplicate action labels in {self.actions}")
        if len(table) != n or any(len(row) != n for row in table):
            raise GameShapeError(f"payoff table must be {n}x{n}")
        if self.family is Family.PD:
            if self.cooperative_action is None or not 0 <= self.cooperative_action < n:
                raise GameShapeError("PD-family games need a valid cooperative_action")
        elif self.cooperative_action is not None:
            raise GameShapeError("RPS-family games carry no cooperative_action")

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def index(self, label: str) -> int:
        try:
            return self.actions.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not an action of {self.name}") from None

    def label(self, index: int) -> str:
        return self.actions[index]

    def payoffs(self, a: int, b: int) -> Cell:
        return self.payoff[a][b]

    def matrix(self, player: int) -> np.ndarray:
        """Payoff matrix of ``player`` (0 = row, 1 = column), indexed ``[a, b]``."""
        return np.array([[cell[player] for cell in row] for row in self.payoff], dtype=float)

    def is_symmetric(self) -> bool:
        n = self.n_actions
        return all(self.payoff[a][b][0] == self.payoff[b][a][1] for a in range(n) for b in range(n))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "actions": list(self.actions),
            "payoff": [list(cell) for row in self.payoff for cell in row],
            "family": self.family.value,
            "cooperative_action": (
                None if self.cooperative_action is None else self.actions[self.cooperative_action]
            ),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "NormalFormGame":
        actions = tuple(doc["actions"])
        n = len(actions)
        flat = doc["payoff"]
        if len(flat) != n * n:
            raise GameShapeError(f"expected {n * n} payoff cells, got {len(flat)}")
        table = tuple(tuple(tuple(flat[a * n + b]) for b in range(n)) for a in range(n))
        coop = doc.get("cooperative_action")
        return cls(
            name=doc["name"],
            actions=actions,
            payoff=table,
            family=Family(doc["family"]),
            cooperative_action=None if coop is None else actions.index(coop),
        )


def _table(rows: Sequence[Sequence[Cell]]) -> Table:
    return tuple(tuple(cell for cell in row) for row in rows)


_PD_TABLE = _table([[(4, 4), (1, 6)], [(6, 1), (2, 2)]])
_SH_TABLE = _table([[(6, 6), (1, 4)], [(4, 1), (2, 2)]])

_RPS_TABLE = _table(
    [
        [(0, 0), (-1, 1), (1, -1)],
        [(1, -1), (0, 0), (-1, 1)],
        [(-1, 1), (1, -1), (0, 0)],
    ]
)
_RPS_WEIGHTED_TABLE = _table(
    [
        [(0, 0), (-3, 3), (1, -1)],
        [(3, -3), (0, 0), (-1, 1)],
        [(-1, 1), (1, -1), (0, 0)],
    ]
)


def make_pd_default() -> NormalFormGame:
    return NormalFormGame("pd", ("C", "D"), _PD_TABLE, Family.PD, cooperative_action=0)


def make_pd_label_cf() -> NormalFormGame:
    return NormalFormGame("pd-label", ("S", "H"), _PD_TABLE, Family.PD, cooperative_action=0)


def make_pd_payoff_cf() -> NormalFormGame:
    return NormalFormGame("pd-payoff", ("C", "D"), _SH_TABLE, Family.PD, cooperative_action=0)


def make_pd_joint_cf() -> NormalFormGame:
    return NormalFormGame("pd-joint", ("S", "H"), _SH_TABLE, Family.PD, cooperative_action=0)


def make_rps_default() -> NormalFormGame:
    return NormalFormGame("rps", ("Rock", "Paper", "Scissors"), _RPS_TABLE, Family.RPS)


def make_rps_label_cf() -> NormalFormGame:
    # Rock and Paper trade places: Scissors now beats Rock, Rock beats Paper.
    return NormalFormGame("rps-label", ("Paper", "Rock", "Scissors"), _RPS_TABLE, Family.RPS)


def make_rps_payoff_cf() -> NormalFormGame:
    return NormalFormGame("rps-payoff", ("Rock", "Paper", "Scissors"), _RPS_WEIGHTED_TABLE, Family.RPS)


def make_rps_joint_cf() -> NormalFormGame:
    return NormalFormGame("rps-joint", ("Paper", "Rock", "Scissors"), _RPS_WEIGHTED_TABLE, Family.RPS)


GAMES = {
    "pd": make_pd_default,
    "pd-label": make_pd_label_cf,
    "pd-payoff": make_pd_payoff_cf,
    "pd-joint": make_pd_joint_cf,
    "rps": make_rps_default,
    "rps-label": make_rps_label_cf,
    "rps-payoff": make_rps_payoff_cf,
    "rps-joint": make_rps_joint_cf,
}

COUNTERFACTUALS = ("default", "label", "payoff", "joint")


def get_game(name: str) -> NormalFormGame:
    try:
        return GAMES[name]()
    except KeyError:
        raise KeyError(f"unknown game {name!r}; known: {sorted(GAMES)}") from None


def game_name(family: str, counterfactual: str = "default") -> str:
    family = Family(family).value
    if counterfactual not in COUNTERFACTUALS:
        raise KeyError(f"unknown counterfactual {counterfactual!r}; known: {COUNTERFACTUALS}")
    return family if counterfactual == "default" else f"{family}-{counterfactual}"


@dataclass(frozen=True)
class CounterfactualSpec:
    """Rename actions (``relabel``: old label -> new label) and/or swap in a new payoff table.

    Relabeling keeps every action at its position, so strategic content moves
    with the action: ``payoff'(pi(a), pi(b)) == payoff(a, b)``.
    """

    relabel: Mapping[str, str] | None = None
    repay: Sequence[Sequence[Cell]] | None = None

    def __post_init__(self):
        if self.relabel is None and self.repay is None:
            raise InvalidSpecError("a counterfactual needs a relabel, a repay table, or both")


def apply_counterfactual(
    g: NormalFormGame, spec: CounterfactualSpec, name: str | None = None
) -> NormalFormGame:
    actions = g.actions
    if spec.relabel is not None:
        mapping = dict(spec.relabel)
        if set(mapping) - set(actions):
            raise InvalidSpecError(f"relabel names unknown actions {sorted(set(mapping) - set(actions))}")
        new = tuple(mapping.get(label, label) for label in actions)
        if len(set(new)) != len(new) or not all(new):
            raise InvalidSpecError(f"relabel {mapping} is not a bijection on {actions}")
        actions = new

    table = g.payoff
    if spec.repay is not None:
        n = g.n_actions
        rows = [list(row) for row in spec.repay]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InvalidSpecError(f"repay table must be {n}x{n}")
        if any(len(cell) != 2 for row in rows for cell in row):
            raise InvalidSpecError("repay cells must be (u1, u2) pairs")
        table = _table([[tuple(cell) for cell in row] for row in rows])

    return NormalFormGame(
        name=name or f"{g.name}-cf",
        actions=actions,
        payoff=table,
        family=g.family,
        cooperative_action=g.cooperative_action,
    )


def same_game(g: NormalFormGame, h: NormalFormGame) -> bool:
    """Equal actions, table, family and cooperative action; the name is ignored."""
    return (
        g.actions == h.actions
        and g.payoff == h.payoff
        and g.family == h.family
        and g.cooperative_action == h.cooperative_action
    )


@dataclass(frozen=True)
class OrderingReport:
    T: int
    R: int
    P: int
    S: int
    pd: bool
    stag_hunt: bool


def check_pd_ordering(g: NormalFormGame) -> OrderingReport:
    if g.n_actions != 2:
        raise GameShapeError(f"{g.name} is {g.n_actions}x{g.n_actions}, ordering needs 2x2")
    R = g.payoff[0][0][0]
    S = g.payoff[0][1][0]
    T = g.payoff[1][0][0]
    P = g.payoff[1][1][0]
    return OrderingReport(
        T=T, R=R, P=P, S=S,
        pd=T > R > P > S,
        stag_hunt=R > T >= P > S,
    )


def is_zero_sum(g: NormalFormGame) -> bool:
    return all(u1 + u2 == 0 for row in g.payoff for (u1, u2) in row)
