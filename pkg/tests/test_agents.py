import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from cfgames.agents import (
    AGENT_TYPES,
    Turn,
    adaptive_counter_rps,
    build_agent,
    most_frequent_exploiter_pd,
    pattern_agent,
    srep_agent,
    tft_best_response_pd,
    tft_counter_rps,
)
from cfgames.errors import ConfigError
from cfgames.games import GAMES, get_game

PD, SH = get_game("pd"), get_game("pd-payoff")
RPS, WRPS, LRPS = get_game("rps"), get_game("rps-payoff"), get_game("rps-label")
RPS_NAMES = ["rps", "rps-label", "rps-payoff", "rps-joint"]


def history_vs(game, opp_labels, own=0):
    out = []
    for lab in opp_labels:
        b = game.index(lab)
        pa, pb = game.payoffs(own, b)
        out.append(Turn(own, b, pa, pb))
    return tuple(out)


def act(agent, game, t=1, hist=(), seed=0):
    return game.label(agent.next_action(game, t, hist, np.random.default_rng(seed)).action)


def test_srep_pd_defects():
    a = srep_agent(PD)
    for t in range(1, 6):
        assert act(a, PD, t, history_vs(PD, ["C"] * (t - 1))) == "D"
    assert act(srep_agent(get_game("pd-label")), get_game("pd-label")) == "H"


def test_srep_refuses_stag_hunt_without_override():
    with pytest.raises(ConfigError):
        srep_agent(SH)
    assert act(srep_agent(SH, action="C"), SH) == "C"


def _srep_freqs(game, n=30_000, seed=1):
    a = srep_agent(game)
    rng = np.random.default_rng(seed)
    draws = [a.next_action(game, 1, (), rng).action for _ in range(n)]
    return np.bincount(draws, minlength=game.n_actions), n


def test_srep_rps_uniform():
    counts, n = _srep_freqs(RPS)
    assert np.abs(counts / n - 1 / 3).max() < 0.02
    chi2 = stats.chisquare(counts)
    assert chi2.pvalue > 0.01


def test_srep_weighted_rps():
    counts, n = _srep_freqs(WRPS)
    assert np.abs(counts / n - np.array([0.2, 0.2, 0.6])).max() < 0.02


def test_pattern_agent():
    a = pattern_agent(PD, ["D", "C"])
    assert [act(a, PD, t) for t in range(1, 5)] == ["D", "C", "D", "C"]
    assert act(pattern_agent(RPS, ["Rock", "Paper", "Scissors"]), RPS, 5) == "Paper"
    const = pattern_agent(PD, ["C"])
    assert {act(const, PD, t) for t in range(1, 10)} == {"C"}
    with pytest.raises(ConfigError):
        pattern_agent(PD, [])


def test_pattern_agent_defaults():
    assert [act(pattern_agent(PD), PD, t) for t in (1, 2)] == ["D", "C"]
    assert [act(pattern_agent(get_game("pd-joint")), get_game("pd-joint"), t) for t in (1, 2)] == ["H", "S"]
    assert [act(pattern_agent(RPS), RPS, t) for t in (1, 2, 3)] == ["Rock", "Paper", "Scissors"]


@given(cycle=st.lists(st.integers(0, 2), min_size=1, max_size=6), t=st.integers(1, 200))
def test_pattern_agent_periodic(cycle, t):
    a = pattern_agent(RPS, cycle)
    assert act(a, RPS, t) == act(a, RPS, t + len(cycle))


def test_most_frequent_exploiter():
    mf = most_frequent_exploiter_pd(PD)
    assert act(mf, PD, 4, history_vs(PD, ["C", "C", "D"])) == "D"
    assert act(mf, PD, 1) == "D"
    mf_sh = most_frequent_exploiter_pd(SH)
    assert act(mf_sh, SH, 3, history_vs(SH, ["C", "C"])) == "C"
    # frequency tie C/D -> lowest index (C) -> best response in SH is C
    assert act(mf_sh, SH, 3, history_vs(SH, ["D", "C"])) == "C"
    with pytest.raises(ConfigError):
        most_frequent_exploiter_pd(RPS)


def test_tft_pd():
    tft = tft_best_response_pd(PD)
    assert act(tft, PD, 1) == "C"
    assert act(tft, PD, 2, history_vs(PD, ["C"])) == "D"
    assert act(tft_best_response_pd(SH), SH, 2, history_vs(SH, ["D"])) == "D"
    assert act(tft_best_response_pd(SH), SH, 2, history_vs(SH, ["C"])) == "C"


def test_adaptive_counter():
    ap = adaptive_counter_rps(RPS)
    assert act(ap, RPS, 4, history_vs(RPS, ["Rock", "Rock", "Paper"])) == "Paper"
    assert act(adaptive_counter_rps(LRPS), LRPS, 2, history_vs(LRPS, ["Rock"])) == "Scissors"
    firsts = {act(ap, RPS, 1, seed=s) for s in range(50)}
    assert firsts == set(RPS.actions)


def test_tft_counter():
    tft = tft_counter_rps(RPS)
    assert act(tft, RPS, 2, history_vs(RPS, ["Scissors"])) == "Rock"
    assert act(tft_counter_rps(WRPS), WRPS, 2, history_vs(WRPS, ["Rock"])) == "Paper"
    assert act(tft, RPS, 1, seed=7) == act(tft, RPS, 1, seed=7)


@pytest.mark.parametrize("name", RPS_NAMES)
def test_counter_consistency(name):
    g = get_game(name)
    tft = tft_counter_rps(g)
    for a in range(g.n_actions):
        c = tft.next_action(g, 2, history_vs(g, [g.label(a)]), np.random.default_rng(0)).action
        assert g.payoffs(c, a)[0] > 0


SCRIPTED = ["srep", "pp", "mf", "ap", "tft", "random", "constant"]


def _compatible(kind, game):
    if kind == "mf":
        return game.family.value == "pd"
    if kind == "ap":
        return game.family.value == "rps"
    if kind == "srep":
        return game.name not in ("pd-payoff", "pd-joint")
    return True


def test_scripted_agents_return_valid_actions_on_fuzzed_histories():
    rng = np.random.default_rng(123)
    checked = 0
    for name in GAMES:
        g = get_game(name)
        n = g.n_actions
        agents = [build_agent({"type": k}, g) for k in SCRIPTED if _compatible(k, g)]
        for _ in range(10_000 // len(GAMES)):
            length = int(rng.integers(0, 25))
            hist = tuple(
                Turn(int(o), int(p), *g.payoffs(int(o), int(p)))
                for o, p in zip(rng.integers(n, size=length), rng.integers(n, size=length))
            )
            for ag in agents:
                m = ag.next_action(g, length + 1, hist, rng)
                assert 0 <= m.action < n
                assert m.tokens == 0 and m.invalid_attempts == 0
                checked += 1
    assert checked > 10_000


def test_build_agent_errors():
    with pytest.raises(ConfigError):
        build_agent({"type": "nope"}, PD)
    with pytest.raises(ConfigError):
        build_agent({"type": "pp", "bogus": 1}, PD)
    with pytest.raises(ConfigError):
        build_agent({"type": "pp", "cycle": ["X"]}, PD)
    assert set(SCRIPTED) <= set(AGENT_TYPES)
