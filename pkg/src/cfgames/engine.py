"""Repeated-match runner with seeded, per-agent randomness."""

from __future__ import annotations

import json
import logging
from functools import lru_cache
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .agents import Agent, Turn, build_agent
from .equilibrium import pure_nash, zero_sum_mixed_nash
from .errors import AgentUnavailableError
from .games import Family, NormalFormGame, is_zero_sum

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_ROUNDS = {Family.PD: 16, Family.RPS: 24}
DEFAULT_REPETITIONS = 5
SC_REPETITIONS = 2


def uses_self_consistency(spec: Mapping[str, Any]) -> bool:
    return spec.get("type") == "llm" and bool(spec.get("self_consistency"))


@dataclass
class MatchConfig:
    game: NormalFormGame
    agent_a: Mapping[str, Any]
    agent_b: Mapping[str, Any]
    rounds: int | None = None
    repetitions: int | None = None
    seed: int = 0
    discount: float | None = None  # carried for provenance; play is fixed-horizon
    base_dir: Path | None = None  # resolves relative fixture paths; not serialized

    def __post_init__(self):
        if self.rounds is None:
            self.rounds = DEFAULT_ROUNDS[self.game.family]
        if self.repetitions is None:
            sc = uses_self_consistency(self.agent_a) or uses_self_consistency(self.agent_b)
            self.repetitions = SC_REPETITIONS if sc else DEFAULT_REPETITIONS
        if self.rounds < 1 or self.repetitions < 1:
            raise ValueError("rounds and repetitions must be >= 1")


@dataclass
class RoundEntry:
    round_index: int
    action_a: str
    action_b: str
    payoff_a: int
    payoff_b: int
    tokens_a: int = 0
    tokens_b: int = 0
    prompt_tokens_a: int = 0
    prompt_tokens_b: int = 0
    attempts_a: int = 0
    attempts_b: int = 0
    invalid_attempts_a: int = 0
    invalid_attempts_b: int = 0
    fallback_a: bool = False
    fallback_b: bool = False


@dataclass
class MatchRecord:
    game: NormalFormGame
    agent_a: dict
    agent_b: dict
    rounds_planned: int
    seed: int
    rounds: list[RoundEntry] = field(default_factory=list)
    complete: bool = True
    error: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    @property
    def totals(self) -> tuple[int, int]:
        return (sum(r.payoff_a for r in self.rounds), sum(r.payoff_b for r in self.rounds))

    def to_json(self) -> dict:
        total_a, total_b = self.totals
        return {
            "schema": SCHEMA_VERSION,
            **self.meta,
            "game": self.game.to_json(),
            "equilibria": game_analysis(self.game),
            "agent_a": self.agent_a,
            "agent_b": self.agent_b,
            "rounds_planned": self.rounds_planned,
            "seed": self.seed,
            "complete": self.complete,
            "error": self.error,
            "totals": [total_a, total_b],
            "rounds": [asdict(r) for r in self.rounds],
        }

    def to_jsonl(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: Mapping) -> "MatchRecord":
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported record schema {doc.get('schema')!r}")
        known = {
            "schema", "game", "equilibria", "agent_a", "agent_b", "rounds_planned",
            "seed", "complete", "error", "totals", "rounds",
        }
        return cls(
            game=NormalFormGame.from_json(doc["game"]),
            agent_a=doc["agent_a"],
            agent_b=doc["agent_b"],
            rounds_planned=doc["rounds_planned"],
            seed=doc["seed"],
            rounds=[RoundEntry(**r) for r in doc["rounds"]],
            complete=doc["complete"],
            error=doc["error"],
            meta={k: v for k, v in doc.items() if k not in known},
        )


@lru_cache(maxsize=64)
def _analysis(g: NormalFormGame) -> str:
    out: dict[str, Any] = {"pure_nash": [[g.label(a), g.label(b)] for a, b in pure_nash(g)]}
    if is_zero_sum(g):
        x, y, v = zero_sum_mixed_nash(g)
        out["zero_sum"] = {"row": [round(p, 12) for p in x], "col": [round(p, 12) for p in y], "value": v}
    return json.dumps(out)


def game_analysis(g: NormalFormGame) -> dict:
    """Equilibrium summary embedded in every record for provenance."""
    return json.loads(_analysis(g))


def agent_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent streams for the two seats; A's draws never shift B's."""
    ss_a, ss_b = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(ss_a), np.random.default_rng(ss_b)


def _describe(spec: Mapping, agent: Agent) -> dict:
    d = dict(spec) if spec else {}
    d.setdefault("type", agent.name)
    return d


def run_match(
    cfg: MatchConfig,
    *,
    seed: int | None = None,
    agents: tuple[Agent, Agent] | None = None,
) -> MatchRecord:
    game = cfg.game
    seed = cfg.seed if seed is None else seed
    if agents is None:
        agents = (
            build_agent(cfg.agent_a, game, cfg.base_dir),
            build_agent(cfg.agent_b, game, cfg.base_dir),
        )
    agent_a, agent_b = agents
    agent_a.reset()
    agent_b.reset()
    rng_a, rng_b = agent_rngs(seed)

    record = MatchRecord(
        game=game,
        agent_a=_describe(cfg.agent_a, agent_a),
        agent_b=_describe(cfg.agent_b, agent_b),
        rounds_planned=cfg.rounds,
        seed=seed,
    )
    hist_a: list[Turn] = []
    hist_b: list[Turn] = []
    for t in range(1, cfg.rounds + 1):
        try:
            move_a = agent_a.next_action(game, t, tuple(hist_a), rng_a)
            move_b = agent_b.next_action(game, t, tuple(hist_b), rng_b)
        except AgentUnavailableError as exc:
            log.warning("match aborted in round %d: %s", t, exc)
            record.complete = False
            record.error = f"round {t}: {exc}"
            break
        pa, pb = game.payoffs(move_a.action, move_b.action)
        hist_a.append(Turn(move_a.action, move_b.action, pa, pb))
        hist_b.append(Turn(move_b.action, move_a.action, pb, pa))
        record.rounds.append(
            RoundEntry(
                round_index=t,
                action_a=game.label(move_a.action),
                action_b=game.label(move_b.action),
                payoff_a=pa,
                payoff_b=pb,
                tokens_a=move_a.tokens,
                tokens_b=move_b.tokens,
                prompt_tokens_a=move_a.prompt_tokens,
                prompt_tokens_b=move_b.prompt_tokens,
                attempts_a=move_a.attempts,
                attempts_b=move_b.attempts,
                invalid_attempts_a=move_a.invalid_attempts,
                invalid_attempts_b=move_b.invalid_attempts,
                fallback_a=move_a.fallback,
                fallback_b=move_b.fallback,
            )
        )
    return record


def run_repetitions(cfg: MatchConfig, agent_factory=None) -> list[MatchRecord]:
    """``cfg.repetitions`` independent matches with seeds seed, seed+1, ...

    ``agent_factory``, if given, is called per repetition and returns the
    agent pair (used by tests that need instrumented agents).
    """
    records = []
    for k in range(cfg.repetitions):
        agents = agent_factory() if agent_factory else None
        records.append(run_match(cfg, seed=cfg.seed + k, agents=agents))
    return records
