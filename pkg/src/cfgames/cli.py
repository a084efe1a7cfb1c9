"""Command-line entry point: ``cfgames run|aggregate|validate-config|list-agents|solve``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .agents import AGENT_HELP
from .equilibrium import mixed_nash_2x2, pure_nash, zero_sum_mixed_nash
from .errors import CfGamesError
from .games import GAMES, check_pd_ordering, get_game, is_zero_sum
from .harness import ExperimentConfig, check_agents, load_rows, render_tables, rows_to_csv, run_experiment


def _fmt_mix(game, probs) -> str:
    return ", ".join(f"{lab}={p:.6g}" for lab, p in zip(game.actions, probs))


def solve_report(name: str) -> str:
    g = get_game(name)
    lines = [f"game: {g.name} ({g.family.value}-family)", f"actions: {', '.join(g.actions)}"]
    for a, row in zip(g.actions, g.payoff):
        lines.append(f"  {a:>9}: " + "  ".join(f"({u1},{u2})" for u1, u2 in row))
    eqs = pure_nash(g)
    lines.append("pure Nash: " + (", ".join(f"({g.label(a)},{g.label(b)})" for a, b in eqs) or "none"))
    if g.n_actions == 2:
        order = check_pd_ordering(g)
        kind = "PD (T>R>P>S)" if order.pd else "Stag Hunt (R>T>=P>S)" if order.stag_hunt else "neither"
        lines.append(f"ordering: T={order.T} R={order.R} P={order.P} S={order.S} -> {kind}")
        res = mixed_nash_2x2(g)
        for s1, s2, (v1, v2) in res.mixed:
            lines.append(f"mixed Nash: [{_fmt_mix(g, s1)}] vs [{_fmt_mix(g, s2)}], values ({v1:.6g}, {v2:.6g})")
    if is_zero_sum(g):
        x, y, v = zero_sum_mixed_nash(g)
        lines.append(f"minimax: row [{_fmt_mix(g, x)}], column [{_fmt_mix(g, y)}], value {v:.6g}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    result = run_experiment(cfg, args.out, jobs=args.jobs, resume=args.resume)
    n = len(result.manifest["cells"])
    print(f"{n} cells, {len(result.failed)} failed; outputs in {result.out_dir}")
    if not args.quiet:
        print((result.out_dir / "tables.txt").read_text(), end="")
    return 1 if result.failed else 0


def cmd_aggregate(args) -> int:
    rows = load_rows(args.logs, tp=args.tp)
    text = rows_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    tables = render_tables(rows)
    if args.tables:
        Path(args.tables).write_text(tables)
    if not args.csv and not args.tables:
        sys.stdout.write(tables)
    return 0


def cmd_validate(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    cells = check_agents(cfg)
    print(f"ok: {len(cells)} matrix cells, {sum(c.repetitions for c in cells)} matches")
    return 0


def cmd_list_agents(args) -> int:
    width = max(map(len, AGENT_HELP))
    for name, text in AGENT_HELP.items():
        print(f"{name.ljust(width)}  {text}")
    return 0


def cmd_solve(args) -> int:
    print(solve_report(args.game))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfgames", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--jobs", type=int)
    r.add_argument("--resume", action="store_true")
    r.add_argument("-q", "--quiet", action="store_true")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("aggregate", help="tables from a records.jsonl log (or an aggregates CSV)")
    a.add_argument("logs")
    a.add_argument("--csv", help="write aggregate CSV here")
    a.add_argument("--tables", help="write text tables here")
    a.add_argument("--tp", type=float, default=0.9)
    a.set_defaults(func=cmd_aggregate)

    v = sub.add_parser("validate-config", help="check a config without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    la = sub.add_parser("list-agents", help="registered agent types")
    la.set_defaults(func=cmd_list_agents)

    s = sub.add_parser("solve", help="equilibrium report for a built-in game")
    s.add_argument("game", choices=sorted(GAMES))
    s.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CfGamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
