"""Print the equilibrium and scripted-baseline facts for every built-in game.

    python3 scripts/baselines.py [--rounds N] [--seed S]
"""

import argparse

import numpy as np

from cfgames.cli import solve_report
from cfgames.engine import MatchConfig, run_match
from cfgames.games import GAMES, Family, get_game


def baseline_pairs(game):
    if game.family is Family.PD:
        srep = {"type": "srep", "action": 1}
        return [("srep", srep, srep), ("all-coop", {"type": "constant", "action": 0}, {"type": "constant", "action": 0}),
                ("defect vs pp", {"type": "constant", "action": 1}, {"type": "pp"})]
    return [("srep", {"type": "srep"}, {"type": "srep"}), ("ap vs pp", {"type": "ap"}, {"type": "pp"}),
            ("tft vs random", {"type": "tft"}, {"type": "random"})]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in GAMES:
        game = get_game(name)
        print(solve_report(name))
        for label, a, b in baseline_pairs(game):
            rec = run_match(MatchConfig(game, a, b, rounds=args.rounds, seed=args.seed))
            print(f"  {label:>14}: totals {rec.totals} over {rec.n_rounds} rounds")
        print()
    # closed-form check of the default PD at the corner the printed simplification gets wrong
    pd = get_game("pd")
    u = pd.matrix(0)
    p, q = 1.0, 0.0
    table = np.array([p, 1 - p]) @ u @ np.array([q, 1 - q])
    print(f"default PD u1 at (p,q)=(1,0): table {table:g}, 2-p+4q-pq {2 - p + 4 * q - p * q:g}, "
          f"2+p+4q-3pq {2 + p + 4 * q - 3 * p * q:g}")


if __name__ == "__main__":
    main()
