import json

import numpy as np
import pytest

from cfgames.agents import Agent, ConstantAgent, build_agent
from cfgames.engine import MatchConfig, MatchRecord, run_match, run_repetitions
from cfgames.errors import AgentUnavailableError
from cfgames.games import get_game

from oracles import trace_totals

PD, RPS = get_game("pd"), get_game("rps")


def test_defaults():
    cfg = MatchConfig(PD, {"type": "srep"}, {"type": "srep"})
    assert (cfg.rounds, cfg.repetitions) == (16, 5)
    cfg = MatchConfig(RPS, {"type": "srep"}, {"type": "llm", "self_consistency": True})
    assert (cfg.rounds, cfg.repetitions) == (24, 2)
    with pytest.raises(ValueError):
        MatchConfig(PD, {"type": "srep"}, {"type": "srep"}, rounds=0)


def test_srep_vs_srep_pd():
    rec = run_match(MatchConfig(PD, {"type": "srep"}, {"type": "srep"}))
    assert rec.totals == (32, 32)
    assert rec.n_rounds == 16


def test_all_cooperate():
    c = {"type": "constant", "action": "C"}
    assert run_match(MatchConfig(PD, c, c)).totals == (64, 64)


def test_always_defect_vs_pattern_matches_trace_oracle():
    rec = run_match(MatchConfig(PD, {"type": "constant", "action": "D"}, {"type": "pp", "cycle": ["D", "C"]}))
    d, c = PD.index("D"), PD.index("C")
    expected = trace_totals(PD.payoff, [d] * 16, [d, c] * 8)
    assert expected == (64, 24)
    assert rec.totals == expected


def test_record_invariants():
    rec = run_match(MatchConfig(RPS, {"type": "srep"}, {"type": "ap"}, seed=3))
    for r in rec.rounds:
        assert (r.payoff_a, r.payoff_b) == RPS.payoffs(RPS.index(r.action_a), RPS.index(r.action_b))
        assert r.payoff_a + r.payoff_b == 0
    assert rec.totals == (sum(r.payoff_a for r in rec.rounds), sum(r.payoff_b for r in rec.rounds))


def test_seed_determinism_and_round_trip():
    cfg = MatchConfig(RPS, {"type": "srep"}, {"type": "tft"}, seed=42)
    a, b = run_match(cfg).to_jsonl(), run_match(cfg).to_jsonl()
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == 1
    assert MatchRecord.from_json(doc).to_jsonl() == a
    assert run_match(MatchConfig(RPS, {"type": "srep"}, {"type": "tft"}, seed=43)).to_jsonl() != a


def test_randomness_streams_are_independent():
    # swapping B's agent must not change A's random draws
    one = run_match(MatchConfig(RPS, {"type": "random"}, {"type": "random"}, seed=5))
    two = run_match(MatchConfig(RPS, {"type": "random"}, {"type": "pp"}, seed=5))
    assert [r.action_a for r in one.rounds] == [r.action_a for r in two.rounds]


class Probe(Agent):
    """Records what it was shown and checks the opponent's current move is never visible."""

    name = "probe"

    def __init__(self, game, log):
        super().__init__(game)
        self.log = log

    def act(self, round_index, history, rng):
        self.log.append((round_index, len(history)))
        return int(rng.integers(self.game.n_actions))


def test_information_hygiene():
    seen_a, seen_b = [], []
    cfg = MatchConfig(RPS, {}, {}, rounds=10)
    rec = run_match(cfg, agents=(Probe(RPS, seen_a), Probe(RPS, seen_b)))
    assert seen_a == seen_b == [(t, t - 1) for t in range(1, 11)]
    assert rec.n_rounds == 10


def test_history_is_perspective_correct():
    shown = []

    class Spy(Agent):
        name = "spy"

        def act(self, t, history, rng):
            shown.append(history)
            return 0

    run_match(MatchConfig(PD, {}, {}, rounds=3), agents=(Spy(PD), ConstantAgent(PD, "D")))
    last = shown[-1]
    assert [(h.own, h.opponent, h.own_payoff, h.opponent_payoff) for h in last] == [(0, 1, 1, 6)] * 2


def test_aborted_match_is_flagged():
    class Flaky(Agent):
        name = "flaky"

        def act(self, t, history, rng):
            if t == 4:
                raise AgentUnavailableError("endpoint down")
            return 0

    rec = run_match(MatchConfig(PD, {}, {}), agents=(Flaky(PD), ConstantAgent(PD, "C")))
    assert not rec.complete
    assert rec.n_rounds == 3
    assert "endpoint down" in rec.error


def test_repetitions():
    cfg = MatchConfig(PD, {"type": "srep"}, {"type": "pp"}, repetitions=5, seed=10)
    recs = run_repetitions(cfg)
    assert len(recs) == 5
    assert [r.seed for r in recs] == [10, 11, 12, 13, 14]
    assert len({json.dumps([vars(x) for x in r.rounds]) for r in recs}) == 1
    single = run_repetitions(MatchConfig(PD, {"type": "srep"}, {"type": "pp"}, repetitions=1, seed=10))
    assert single[0].to_jsonl() == run_match(cfg).to_jsonl()


def test_repetitions_survive_a_failed_sibling():
    calls = iter(range(100))

    class SometimesDown(Agent):
        name = "down"

        def __init__(self, game, broken):
            super().__init__(game)
            self.broken = broken

        def act(self, t, history, rng):
            if self.broken:
                raise AgentUnavailableError("x")
            return 0

    def factory():
        k = next(calls)
        return SometimesDown(PD, broken=(k == 1)), ConstantAgent(PD, "C")

    recs = run_repetitions(MatchConfig(PD, {}, {}, repetitions=3), agent_factory=factory)
    assert [r.complete for r in recs] == [True, False, True]


def test_score_bounds_fuzzed():
    rng = np.random.default_rng(0)
    kinds_pd = ["srep", "pp", "mf", "tft", "random", "constant"]
    kinds_rps = ["srep", "pp", "ap", "tft", "random", "constant"]
    for i in range(400):
        a, b = rng.choice(kinds_pd, 2)
        tot = run_match(MatchConfig(PD, {"type": a}, {"type": b}, seed=i)).totals
        assert all(16 <= x <= 96 for x in tot)
        a, b = rng.choice(kinds_rps, 2)
        tot = run_match(MatchConfig(RPS, {"type": a}, {"type": b}, seed=i)).totals
        assert all(-24 <= x <= 24 for x in tot) and sum(tot) == 0
