"""Language-model players: prompt, query, extract, retry, vote."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..agents import Agent, Move
from ..errors import ConfigError
from ..games import Family, NormalFormGame
from .extract import extract_action
from .prompts import RETRY_MESSAGE, render_prompt
from .transport import Transport, transport_from_spec

SC_SAMPLES = {Family.PD: 3, Family.RPS: 5}


@dataclass
class LlmPlayerConfig:
    model: str = "mock"
    mode: str = "zs"
    temperature: float = 0.7
    top_p: float = 1.0
    max_tokens: int = 50
    self_consistency: int | None = None
    max_retries: int = 3
    extraction: str = "unique"
    require_move_tag: bool = False
    hint: str | None = None
    system_template: str | None = None
    transport: dict = field(default_factory=lambda: {"kind": "mock"})

    def __post_init__(self):
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.self_consistency is not None and self.self_consistency < 1:
            raise ConfigError("self_consistency sample count must be >= 1")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")


class LlmAgent(Agent):
    name = "llm"

    def __init__(self, game: NormalFormGame, cfg: LlmPlayerConfig, transport: Transport):
        super().__init__(game)
        self.cfg = cfg
        self.transport = transport

    def act(self, round_index, history, rng) -> Move:
        cfg = self.cfg
        messages = render_prompt(
            self.game, cfg.mode, history, template=cfg.system_template, hint=cfg.hint
        )
        move = Move(action=-1)
        for _ in range(cfg.max_retries + 1):
            out = self.transport.complete(
                messages,
                model=cfg.model,
                temperature=cfg.temperature,
                top_p=cfg.top_p,
                max_tokens=cfg.max_tokens,
            )
            move.attempts += 1
            move.tokens += out.completion_tokens
            move.prompt_tokens += out.prompt_tokens
            got = extract_action(
                out.text, self.game, rule=cfg.extraction, require_move_tag=cfg.require_move_tag
            )
            if got.ok:
                move.action = got.action
                return move
            move.invalid_attempts += 1
            messages = messages + [
                {"role": "assistant", "content": out.text},
                {"role": "user", "content": RETRY_MESSAGE.format(actions=", ".join(self.game.actions))},
            ]
        move.action = int(rng.integers(self.game.n_actions))
        move.fallback = True
        return move


class SelfConsistentAgent(Agent):
    """Queries ``inner`` k times per round and plays the modal action."""

    name = "sc"
    uses_self_consistency = True

    def __init__(self, inner: Agent, k: int):
        super().__init__(inner.game)
        if k < 1:
            raise ConfigError("self-consistency needs k >= 1")
        self.inner = inner
        self.k = k

    def reset(self):
        self.inner.reset()

    def act(self, round_index, history, rng) -> Move:
        total = Move(action=-1)
        votes = []
        for _ in range(self.k):
            m = self.inner.next_action(self.game, round_index, history, rng)
            votes.append(m.action)
            total.tokens += m.tokens
            total.prompt_tokens += m.prompt_tokens
            total.attempts += m.attempts
            total.invalid_attempts += m.invalid_attempts
        total.action = majority_vote(votes, rng)
        return total


def majority_vote(votes, rng) -> int:
    counts = Counter(votes)
    top = max(counts.values())
    tied = sorted(a for a, c in counts.items() if c == top)
    if len(tied) == 1:
        return tied[0]
    return int(tied[rng.integers(len(tied))])


def llm_agent(game: NormalFormGame, cfg: LlmPlayerConfig, transport: Transport | None = None) -> Agent:
    transport = transport or transport_from_spec(cfg.transport)
    agent: Agent = LlmAgent(game, cfg, transport)
    if cfg.self_consistency:
        agent = SelfConsistentAgent(agent, cfg.self_consistency)
    return agent


def self_consistent(inner: Agent, k: int) -> SelfConsistentAgent:
    return SelfConsistentAgent(inner, k)


def llm_agent_from_spec(game: NormalFormGame, params: Mapping[str, Any]) -> Agent:
    params = dict(params)
    base_dir = params.pop("base_dir", None)
    sc = params.get("self_consistency")
    if sc is True:
        params["self_consistency"] = SC_SAMPLES[game.family]
    elif sc is False:
        params["self_consistency"] = None
    try:
        cfg = LlmPlayerConfig(**params)
    except TypeError as exc:
        raise ConfigError(f"bad llm agent parameters: {exc}") from None
    transport = transport_from_spec(cfg.transport, Path(base_dir) if base_dir else None)
    return llm_agent(game, cfg, transport)


def prompt_label(spec: Mapping[str, Any]) -> str:
    """Row/column label used in tables: ``zs``, ``sc-cot`` ... or the agent type."""
    if spec.get("type") != "llm":
        return str(spec.get("type"))
    mode = spec.get("mode", "zs")
    return f"sc-{mode}" if spec.get("self_consistency") else mode
