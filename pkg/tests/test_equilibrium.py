import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfgames.equilibrium import (
    as_strategy,
    best_responses,
    expected_payoff,
    mixed_nash_2x2,
    point_mass,
    pure_nash,
    uniform,
    verify_equilibrium,
    zero_sum_mixed_nash,
)
from cfgames.errors import GameShapeError, PreconditionError
from cfgames.games import GAMES, Family, NormalFormGame, get_game

from oracles import sh_closed_form, table_expectation, weighted_rps_indifference

PD, SH = get_game("pd"), get_game("pd-payoff")
RPS, WRPS = get_game("rps"), get_game("rps-payoff")


def mix2(p):
    return np.array([p, 1 - p])


def test_point_masses_reproduce_table():
    assert expected_payoff(PD, point_mass(2, 0), point_mass(2, 0)) == (4, 4)
    for name in GAMES:
        g = get_game(name)
        n = g.n_actions
        for a in range(n):
            for b in range(n):
                assert expected_payoff(g, point_mass(n, a), point_mass(n, b)) == g.payoffs(a, b)


def test_uniform_rps_value_zero():
    assert expected_payoff(RPS, uniform(3), uniform(3)) == pytest.approx((0, 0), abs=1e-15)


def test_stag_hunt_half_half():
    v = expected_payoff(SH, mix2(0.5), mix2(0.5))
    assert v == pytest.approx((3.25, 3.25), abs=1e-12)
    assert sh_closed_form(0.5, 0.5) == 3.25


def test_shape_errors():
    with pytest.raises(GameShapeError):
        expected_payoff(PD, uniform(3), uniform(2))
    with pytest.raises(ValueError):
        as_strategy([0.7, 0.7])


@given(st.floats(0, 1), st.floats(0, 1))
def test_expected_payoff_matches_enumeration(p, q):
    for g in (PD, SH):
        v1, v2 = expected_payoff(g, mix2(p), mix2(q))
        assert v1 == pytest.approx(table_expectation(g.payoff, mix2(p), mix2(q), 0), abs=1e-12)
        assert v2 == pytest.approx(table_expectation(g.payoff, mix2(p), mix2(q), 1), abs=1e-12)


def test_best_responses():
    assert best_responses(PD, 0, point_mass(2, 0)) == [PD.index("D")]
    assert best_responses(RPS, 0, point_mass(3, RPS.index("Rock"))) == [RPS.index("Paper")]
    assert best_responses(RPS, 0, uniform(3)) == [0, 1, 2]
    # column player view of a symmetric game mirrors the row player
    assert best_responses(PD, 1, point_mass(2, 0)) == [PD.index("D")]


def test_pure_nash():
    assert pure_nash(PD) == [(1, 1)]
    assert pure_nash(SH) == [(0, 0), (1, 1)]
    lab = get_game("pd-joint")
    assert [(lab.label(a), lab.label(b)) for a, b in pure_nash(lab)] == [("S", "S"), ("H", "H")]
    for name in ("rps", "rps-label", "rps-payoff", "rps-joint"):
        assert pure_nash(get_game(name)) == []


def test_mixed_2x2_stag_hunt():
    res = mixed_nash_2x2(SH)
    assert res.pure == [(0, 0), (1, 1)]
    (s1, s2, _), = res.mixed
    # 6q + (1-q) = 4q + 2(1-q)  ->  q = 1/3
    assert s1[0] == pytest.approx(1 / 3, abs=1e-15)
    assert s2[0] == pytest.approx(1 / 3, abs=1e-15)
    assert verify_equilibrium(SH, s1, s2, tol=1e-9)
    for a, b in res.pure:
        assert verify_equilibrium(SH, point_mass(2, a), point_mass(2, b))


def test_mixed_2x2_pd_has_no_interior():
    assert mixed_nash_2x2(PD).mixed == []


def test_mixed_2x2_coordination():
    k = 5
    g = NormalFormGame("coord", ("x", "y"), (((k, k), (0, 0)), ((0, 0), (k, k))), Family.PD, 0)
    (s1, s2, _), = mixed_nash_2x2(g).mixed
    assert s1[0] == pytest.approx(0.5) and s2[0] == pytest.approx(0.5)


def test_mixed_2x2_degenerate():
    g = NormalFormGame("flat", ("x", "y"), (((1, 1), (1, 1)), ((1, 1), (1, 1))), Family.PD, 0)
    assert mixed_nash_2x2(g).all_strategies


def test_zero_sum_default_rps():
    x, y, v = zero_sum_mixed_nash(RPS)
    assert np.abs(x - 1 / 3).max() < 1e-9 and np.abs(y - 1 / 3).max() < 1e-9
    assert abs(v) < 1e-9


def test_zero_sum_weighted_rps_matches_indifference_oracle():
    expected = np.array([float(f) for f in weighted_rps_indifference()])
    x, y, v = zero_sum_mixed_nash(WRPS)
    assert np.abs(x - expected).max() < 1e-9
    assert np.abs(y - expected).max() < 1e-9
    assert abs(v) < 1e-9
    assert verify_equilibrium(WRPS, x, y, tol=1e-9)


def test_zero_sum_matching_pennies():
    g = NormalFormGame("mp", ("h", "t"), (((1, -1), (-1, 1)), ((-1, 1), (1, -1))), Family.RPS)
    x, y, v = zero_sum_mixed_nash(g)
    assert np.allclose(x, 0.5, atol=1e-9) and np.allclose(y, 0.5, atol=1e-9) and abs(v) < 1e-9


def test_zero_sum_precondition():
    with pytest.raises(PreconditionError):
        zero_sum_mixed_nash(PD)


def test_verify_equilibrium_examples():
    assert verify_equilibrium(PD, point_mass(2, 1), point_mass(2, 1))
    assert not verify_equilibrium(PD, point_mass(2, 0), point_mass(2, 0))
    assert not verify_equilibrium(WRPS, uniform(3), uniform(3))
    # uniform is exploitable: Paper earns 3/3 - 1/3 = 2/3 against it
    assert expected_payoff(WRPS, point_mass(3, 1), uniform(3))[0] == pytest.approx(2 / 3)


@pytest.mark.parametrize("name", ["rps", "rps-label", "rps-payoff", "rps-joint"])
def test_symmetric_zero_sum_identical_strategies(name):
    g = get_game(name)
    x, y, v = zero_sum_mixed_nash(g)
    assert abs(v) < 1e-9
    assert np.abs(x - y).max() < 1e-9
    assert verify_equilibrium(g, x, y, tol=1e-9)


@settings(max_examples=25, derandomize=True)
@given(
    st.lists(st.floats(0.01, 1), min_size=3, max_size=3),
    st.lists(st.floats(0.01, 1), min_size=3, max_size=3),
)
def test_monte_carlo_agreement_small(w1, w2):
    s1 = np.array(w1) / sum(w1)
    s2 = np.array(w2) / sum(w2)
    s1 /= s1.sum()
    s2 /= s2.sum()
    v1, _ = expected_payoff(WRPS, s1, s2)
    rng = np.random.default_rng(0)
    n = 20_000
    a = rng.choice(3, size=n, p=s1)
    b = rng.choice(3, size=n, p=s2)
    draws = WRPS.matrix(0)[a, b]
    se = draws.std(ddof=1) / np.sqrt(n)
    assert abs(draws.mean() - v1) <= 4 * se + 1e-12
