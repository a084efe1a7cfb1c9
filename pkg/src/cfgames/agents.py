"""Scripted opponents and the policy interface every player implements.

An agent is asked for one move per round and sees only completed rounds,
from its own point of view. Any "which action beats which" question is
answered from the payoff table, so every agent stays correct when labels or
payoffs are swapped out by a counterfactual.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .equilibrium import best_responses, point_mass, uniform, zero_sum_mixed_nash
from .errors import ConfigError
from .games import Family, NormalFormGame, is_zero_sum


class Turn(NamedTuple):
    own: int
    opponent: int
    own_payoff: int
    opponent_payoff: int


@dataclass
class Move:
    action: int
    tokens: int = 0  # completion tokens over every attempt
    prompt_tokens: int = 0
    attempts: int = 0  # model outputs consumed; 0 for scripted agents
    invalid_attempts: int = 0
    fallback: bool = False


class Agent:
    """Base policy. Subclasses override :meth:`act`."""

    name = "agent"
    uses_self_consistency = False

    def __init__(self, game: NormalFormGame):
        self.game = game

    def reset(self) -> None:
        pass

    def next_action(
        self,
        game: NormalFormGame,
        round_index: int,
        history: Sequence[Turn],
        rng: np.random.Generator,
    ) -> Move:
        move = self.act(round_index, history, rng)
        if isinstance(move, (int, np.integer)):
            move = Move(int(move))
        if not 0 <= move.action < game.n_actions:
            raise RuntimeError(f"{self.name} returned invalid action {move.action}")
        return move

    def act(self, round_index: int, history: Sequence[Turn], rng: np.random.Generator) -> Move | int:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"type": self.name}


def _lowest(indices) -> int:
    return min(indices)


def _most_frequent(history: Sequence[Turn]) -> int:
    counts = Counter(t.opponent for t in history)
    top = max(counts.values())
    return min(a for a, c in counts.items() if c == top)


def _best_reply_to(game: NormalFormGame, action: int) -> int:
    return _lowest(best_responses(game, 0, point_mass(game.n_actions, action)))


def dominant_action(game: NormalFormGame) -> int | None:
    """Row action strictly better than every other against every column, if any."""
    u = game.matrix(0)
    for a in range(game.n_actions):
        others = [b for b in range(game.n_actions) if b != a]
        if all((u[a] > u[b]).all() for b in others):
            return a
    return None


class ConstantAgent(Agent):
    name = "constant"

    def __init__(self, game, action: int | str = 0):
        super().__init__(game)
        self.action = resolve_action(game, action)

    def act(self, round_index, history, rng):
        return self.action

    def describe(self):
        return {"type": self.name, "action": self.game.label(self.action)}


class UniformRandomAgent(Agent):
    name = "random"

    def act(self, round_index, history, rng):
        return int(rng.integers(self.game.n_actions))


class SrepAgent(Agent):
    """Plays the single-round equilibrium action (or mix) every round."""

    name = "srep"

    def __init__(self, game, action: int | str | None = None):
        super().__init__(game)
        self.mix = None
        self.action = None
        if action is not None:
            self.action = resolve_action(game, action)
        elif game.family is Family.PD:
            self.action = dominant_action(game)
            if self.action is None:
                raise ConfigError(
                    f"{game.name} has no strictly dominant action; "
                    "srep needs an explicit 'action' to select an equilibrium"
                )
        elif is_zero_sum(game):
            self.mix, _, _ = zero_sum_mixed_nash(game)
        else:
            raise ConfigError(f"no single-round equilibrium rule for {game.name}")

    def act(self, round_index, history, rng):
        if self.action is not None:
            return self.action
        return int(rng.choice(self.game.n_actions, p=self.mix))

    def describe(self):
        d = {"type": self.name}
        if self.action is not None:
            d["action"] = self.game.label(self.action)
        else:
            d["mix"] = [float(p) for p in self.mix]
        return d


class PatternAgent(Agent):
    """Cycles through a fixed sequence of actions: round t plays cycle[(t-1) % len]."""

    name = "pp"

    def __init__(self, game, cycle: Sequence[int | str] | None = None):
        super().__init__(game)
        if cycle is None:
            cycle = default_cycle(game)
        if len(cycle) == 0:
            raise ConfigError("pattern agent needs a non-empty cycle")
        self.cycle = [resolve_action(game, a) for a in cycle]

    def act(self, round_index, history, rng):
        return self.cycle[(round_index - 1) % len(self.cycle)]

    def describe(self):
        return {"type": self.name, "cycle": [self.game.label(a) for a in self.cycle]}


def default_cycle(game: NormalFormGame) -> list[int]:
    if game.family is Family.PD:
        coop = game.cooperative_action
        other = next(a for a in range(game.n_actions) if a != coop)
        return [other, coop]
    return list(range(game.n_actions))


class MostFrequentExploiter(Agent):
    """Best response to the opponent's most frequent action so far."""

    name = "mf"

    def act(self, round_index, history, rng):
        if not history:
            return _lowest(best_responses(self.game, 0, uniform(self.game.n_actions)))
        return _best_reply_to(self.game, _most_frequent(history))


class TitForTatBestResponse(Agent):
    """Cooperates first, then best-responds to the opponent's previous action."""

    name = "tft-pd"

    def act(self, round_index, history, rng):
        if not history:
            return self.game.cooperative_action
        return _best_reply_to(self.game, history[-1].opponent)


class AdaptiveCounter(Agent):
    """Counters the opponent's most frequent action; uniform random in round 1."""

    name = "ap"

    def act(self, round_index, history, rng):
        if not history:
            return int(rng.integers(self.game.n_actions))
        return _best_reply_to(self.game, _most_frequent(history))


class TitForTatCounter(Agent):
    """Counters the opponent's previous action; uniform random in round 1."""

    name = "tft-rps"

    def act(self, round_index, history, rng):
        if not history:
            return int(rng.integers(self.game.n_actions))
        return _best_reply_to(self.game, history[-1].opponent)


def resolve_action(game: NormalFormGame, action: int | str) -> int:
    if isinstance(action, (int, np.integer)) and not isinstance(action, bool):
        if not 0 <= action < game.n_actions:
            raise ConfigError(f"action index {action} out of range for {game.name}")
        return int(action)
    try:
        return game.index(action)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


def srep_agent(game, **kw) -> SrepAgent:
    return SrepAgent(game, **kw)


def pattern_agent(game, cycle=None) -> PatternAgent:
    return PatternAgent(game, cycle)


def most_frequent_exploiter_pd(game) -> MostFrequentExploiter:
    _require(game, Family.PD, "mf")
    return MostFrequentExploiter(game)


def tft_best_response_pd(game) -> TitForTatBestResponse:
    _require(game, Family.PD, "tft-pd")
    return TitForTatBestResponse(game)


def adaptive_counter_rps(game) -> AdaptiveCounter:
    _require(game, Family.RPS, "ap")
    return AdaptiveCounter(game)


def tft_counter_rps(game) -> TitForTatCounter:
    _require(game, Family.RPS, "tft-rps")
    return TitForTatCounter(game)


def _tft(game):
    return tft_best_response_pd(game) if game.family is Family.PD else tft_counter_rps(game)


def _require(game, family, name):
    if game.family is not family:
        raise ConfigError(f"agent {name!r} is defined for {family.value}-family games, not {game.name}")


def _llm(game, **params):
    from .gateway.player import llm_agent_from_spec

    return llm_agent_from_spec(game, params)


AGENT_TYPES: dict[str, Callable[..., Agent]] = {
    "srep": srep_agent,
    "pp": pattern_agent,
    "mf": most_frequent_exploiter_pd,
    "ap": adaptive_counter_rps,
    "tft": _tft,
    "tft-pd": tft_best_response_pd,
    "tft-rps": tft_counter_rps,
    "constant": ConstantAgent,
    "random": UniformRandomAgent,
    "llm": _llm,
}

AGENT_HELP = {
    "srep": "single-round equilibrium player (dominant action or equilibrium mix)",
    "pp": "pattern player; params: cycle (labels or indices)",
    "mf": "PD: best response to the opponent's most frequent action",
    "ap": "RPS: counter the opponent's most frequent action",
    "tft": "tft-pd or tft-rps depending on the game family",
    "tft-pd": "PD: cooperate first, then best-respond to the last opponent action",
    "tft-rps": "RPS: counter the last opponent action (random first round)",
    "constant": "always the same action; params: action",
    "random": "uniform random action every round",
    "llm": "language-model player; params: model, mode, self_consistency, transport, ...",
}


def build_agent(spec: Mapping[str, Any], game: NormalFormGame, base_dir=None) -> Agent:
    """Instantiate an agent from ``{"type": ..., **params}``.

    ``base_dir`` resolves relative fixture paths of llm agents.
    """
    params = dict(spec)
    kind = params.pop("type", None)
    if kind not in AGENT_TYPES:
        raise ConfigError(f"unknown agent type {kind!r}; known: {sorted(AGENT_TYPES)}")
    if kind == "llm" and base_dir is not None:
        params["base_dir"] = str(base_dir)
    try:
        return AGENT_TYPES[kind](game, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for agent {kind!r}: {exc}") from None
