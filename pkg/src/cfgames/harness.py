"""Experiment matrix expansion, execution, logging and table emission."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import jsonschema

from . import __version__
from .agents import AGENT_TYPES, build_agent
from .engine import MatchConfig, MatchRecord, run_repetitions
from .errors import ConfigError
from .games import GAMES, game_name, get_game
from .gateway.player import prompt_label
from .metrics import Aggregate, aggregate, compute_metrics, format_mean_std

log = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
MANIFEST_FILE = "manifest.json"
CSV_FILE = "aggregates.csv"
TABLES_FILE = "tables.txt"
CSV_FIELDS = ["game", "model", "prompt", "opponent", "metric", "mean", "std", "count"]
TABLE_METRICS = [
    "total_points_a",
    "comprehension_m",
    "cooperation_rate_a",
    "efficiency_a",
    "validity_rate_a",
]

_AGENT_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"type": "string", "enum": sorted(AGENT_TYPES)}},
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["games"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer"},
        "output": {"type": "string"},
        "jobs": {"type": "integer", "minimum": 1},
        "rounds": {"type": ["integer", "null"], "minimum": 1},
        "repetitions": {"type": ["integer", "null"], "minimum": 1},
        "tp": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "games": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"type": "string", "enum": sorted(GAMES)},
                    {
                        "type": "object",
                        "required": ["family"],
                        "additionalProperties": False,
                        "properties": {
                            "family": {"enum": ["pd", "rps"]},
                            "counterfactual": {"enum": ["default", "label", "payoff", "joint"]},
                        },
                    },
                ]
            },
        },
        "pairings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b"],
                "additionalProperties": False,
                "properties": {"a": _AGENT_SCHEMA, "b": _AGENT_SCHEMA},
            },
        },
        "players": {"type": "array", "items": _AGENT_SCHEMA},
        "opponents": {"type": "array", "items": _AGENT_SCHEMA},
    },
}


@dataclass
class ExperimentConfig:
    games: list[str]
    pairings: list[tuple[dict, dict]]
    seed: int = 0
    output: str = "runs/experiment"
    jobs: int = 1
    rounds: int | None = None
    repetitions: int | None = None
    tp: float = 0.9
    base_dir: Path | None = None

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], base_dir: Path | None = None) -> "ExperimentConfig":
        validate_document(doc)
        games = []
        for g in doc["games"]:
            games.append(g if isinstance(g, str) else game_name(g["family"], g.get("counterfactual", "default")))
        pairings = [(dict(p["a"]), dict(p["b"])) for p in doc.get("pairings", [])]
        pairings += [
            (dict(a), dict(b)) for a, b in itertools.product(doc.get("players", []), doc.get("opponents", []))
        ]
        if not pairings:
            raise ConfigError("config defines no agent pairings ('pairings' or 'players' x 'opponents')")
        return cls(
            games=games,
            pairings=pairings,
            seed=doc.get("seed", 0),
            output=doc.get("output", "runs/experiment"),
            jobs=doc.get("jobs", 1),
            rounds=doc.get("rounds"),
            repetitions=doc.get("repetitions"),
            tp=doc.get("tp", 0.9),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(doc, base_dir=path.resolve().parent)


def validate_document(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{where}: {e.message}")
        raise ConfigError("invalid experiment config:\n  " + "\n  ".join(lines))


def _expand_spec(spec: dict) -> list[dict]:
    """List-valued ``mode`` / ``self_consistency`` on llm specs expand into one spec per value."""
    if spec.get("type") != "llm":
        return [spec]
    axes = {k: spec[k] for k in ("mode", "self_consistency") if isinstance(spec.get(k), list)}
    if not axes:
        return [spec]
    keys = list(axes)
    return [{**spec, **dict(zip(keys, combo))} for combo in itertools.product(*axes.values())]


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def derive_seed(base: int, coordinate: Any) -> int:
    digest = hashlib.sha256(f"{base}|{canonical(coordinate)}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


@dataclass
class Cell:
    index: int
    cell_id: str
    game: str
    agent_a: dict
    agent_b: dict
    rounds: int
    repetitions: int
    seed: int

    def match_config(self, base_dir: Path | None = None) -> MatchConfig:
        return MatchConfig(
            game=get_game(self.game),
            agent_a=self.agent_a,
            agent_b=self.agent_b,
            rounds=self.rounds,
            repetitions=self.repetitions,
            seed=self.seed,
            base_dir=base_dir,
        )

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "cell_id": self.cell_id,
            "game": self.game,
            "agent_a": self.agent_a,
            "agent_b": self.agent_b,
            "rounds": self.rounds,
            "repetitions": self.repetitions,
            "seed": self.seed,
        }


def expand_cells(cfg: ExperimentConfig) -> list[Cell]:
    cells = []
    for gname in cfg.games:
        if gname not in GAMES:
            raise ConfigError(f"unknown game {gname!r}; known: {sorted(GAMES)}")
        game = get_game(gname)
        for a_raw, b_raw in cfg.pairings:
            for a, b in itertools.product(_expand_spec(a_raw), _expand_spec(b_raw)):
                for spec in (a, b):
                    if spec.get("type") not in AGENT_TYPES:
                        raise ConfigError(f"unknown agent type {spec.get('type')!r}; known: {sorted(AGENT_TYPES)}")
                mc = MatchConfig(game, a, b, rounds=cfg.rounds, repetitions=cfg.repetitions)
                coord = {"game": gname, "a": a, "b": b}
                ident = {**coord, "rounds": mc.rounds, "repetitions": mc.repetitions}
                cells.append(
                    Cell(
                        index=len(cells),
                        cell_id=hashlib.sha256(f"{cfg.seed}|{canonical(ident)}".encode()).hexdigest()[:16],
                        game=gname,
                        agent_a=a,
                        agent_b=b,
                        rounds=mc.rounds,
                        repetitions=mc.repetitions,
                        seed=derive_seed(cfg.seed, coord),
                    )
                )
    seen: dict[str, int] = {}
    for c in cells:
        if c.cell_id in seen:
            raise ConfigError(f"matrix cells {seen[c.cell_id]} and {c.index} are identical ({c.game})")
        seen[c.cell_id] = c.index
    return cells


def expand_matrix(cfg: ExperimentConfig) -> list[MatchConfig]:
    return [c.match_config(cfg.base_dir) for c in expand_cells(cfg)]


def check_agents(cfg: ExperimentConfig) -> list[Cell]:
    """Expand the matrix and construct every agent once, surfacing config errors early."""
    cells = expand_cells(cfg)
    for c in cells:
        game = get_game(c.game)
        for spec in (c.agent_a, c.agent_b):
            build_agent(spec, game, cfg.base_dir)
    return cells


def config_hash(cells: Sequence[Cell]) -> str:
    return hashlib.sha256(canonical([c.to_json() for c in cells]).encode()).hexdigest()


@dataclass
class RunResult:
    manifest: dict
    out_dir: Path
    failed: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


def _read_records(path: Path) -> list[dict]:
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def _run_cell(cell: Cell, base_dir: Path | None) -> list[str]:
    records = run_repetitions(cell.match_config(base_dir))
    lines = []
    for k, rec in enumerate(records):
        rec.meta = {"cell_id": cell.cell_id, "repetition": k}
        lines.append(rec.to_jsonl())
    return lines


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    *,
    jobs: int | None = None,
    resume: bool = False,
) -> RunResult:
    out = Path(out_dir or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    cells = check_agents(cfg)
    manifest = {
        "artifact_version": __version__,
        "config_hash": config_hash(cells),
        "seed": cfg.seed,
        "tp": cfg.tp,
        "cells": [c.to_json() for c in cells],
    }
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n")

    records_path = out / RECORDS_FILE
    existing = _read_records(records_path) if resume else []
    done: dict[str, set[int]] = {}
    for doc in existing:
        if doc.get("complete"):
            done.setdefault(doc.get("cell_id"), set()).add(doc.get("repetition"))
    todo = [c for c in cells if done.get(c.cell_id, set()) != set(range(c.repetitions))]
    if resume:
        log.info("resume: %d of %d cells already complete", len(cells) - len(todo), len(cells))
    elif records_path.exists():
        records_path.unlink()

    failed: list[str] = []
    errors: dict[str, str] = {}
    with open(records_path, "a") as sink, ThreadPoolExecutor(max_workers=jobs or cfg.jobs) as pool:
        futures = [(c, pool.submit(_run_cell, c, cfg.base_dir)) for c in todo]
        for cell, fut in futures:
            try:
                lines = fut.result()
            except Exception as exc:  # noqa: BLE001 - one bad cell must not sink the run
                log.error("cell %s failed: %s", cell.cell_id, exc)
                errors[cell.cell_id] = f"{type(exc).__name__}: {exc}"
                continue
            for line in lines:
                sink.write(line + "\n")
            sink.flush()

    # canonical order: cell index, then repetition; the latest line for a key wins
    order = {c.cell_id: c.index for c in cells}
    latest: dict[tuple[str, int], str] = {}
    for line in records_path.read_text().splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        if doc.get("cell_id") in order:
            latest[(doc["cell_id"], doc["repetition"])] = line
    keys = sorted(latest, key=lambda k: (order[k[0]], k[1]))
    records_path.write_text("".join(latest[k] + "\n" for k in keys))

    status: dict[str, str] = {}
    for (cid, _), line in latest.items():
        if not json.loads(line)["complete"]:
            status[cid] = "incomplete"
    for cid in errors:
        status[cid] = "failed"
    for c in manifest["cells"]:
        c["status"] = status.get(c["cell_id"], "ok")
        if c["cell_id"] in errors:
            c["error"] = errors[c["cell_id"]]
    failed = [cid for cid, s in status.items() if s != "ok"]
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n")

    rows = aggregate_records(_read_records(records_path), tp=cfg.tp)
    write_outputs(rows, out)
    return RunResult(manifest=manifest, out_dir=out, failed=sorted(failed))


# ---- aggregation -----------------------------------------------------------


def group_key(doc: Mapping) -> tuple[str, str, str, str]:
    a, b = doc["agent_a"], doc["agent_b"]
    model = str(a.get("model", a["type"])) if a.get("type") == "llm" else str(a["type"])
    prompt = prompt_label(a) if a.get("type") == "llm" else "-"
    return doc["game"]["name"], model, prompt, prompt_label(b)


def aggregate_records(docs: Iterable[Mapping], tp: float = 0.9) -> list[dict]:
    groups: "OrderedDict[tuple, list]" = OrderedDict()
    for doc in docs:
        if not doc.get("complete", True):
            log.warning("skipping incomplete record (cell %s)", doc.get("cell_id"))
            continue
        rec = MatchRecord.from_json(doc)
        groups.setdefault(group_key(doc), []).append(compute_metrics(rec, tp=tp))
    rows = []
    for key, reports in groups.items():
        for metric, agg in aggregate(reports).items():
            rows.append(_row(key, metric, agg))
    return rows


def _row(key, metric: str, agg: Aggregate) -> dict:
    game, model, prompt, opponent = key
    return {
        "game": game, "model": model, "prompt": prompt, "opponent": opponent,
        "metric": metric, "mean": agg.mean, "std": agg.std, "count": agg.count,
    }


def rows_to_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({**r, "mean": repr(float(r["mean"])), "std": repr(float(r["std"]))})
    return buf.getvalue()


def rows_from_csv(text: str) -> list[dict]:
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({**r, "mean": float(r["mean"]), "std": float(r["std"]), "count": int(r["count"])})
    return rows


def render_tables(rows: Sequence[Mapping], metrics: Sequence[str] | None = None) -> str:
    """One grid per (game, metric): rows model/prompt, columns opponent, cells ``mean ± std``."""
    metrics = list(metrics or TABLE_METRICS)
    by: "OrderedDict[tuple[str, str], dict]" = OrderedDict()
    present = {r["metric"] for r in rows}
    for metric in metrics + sorted(present - set(metrics)):
        for r in rows:
            if r["metric"] == metric:
                by.setdefault((r["game"], metric), {})[(r["model"], r["prompt"], r["opponent"])] = r
    blocks = []
    for (game, metric), cells in by.items():
        row_keys = list(OrderedDict.fromkeys((m, p) for m, p, _ in cells))
        cols = list(OrderedDict.fromkeys(o for _, _, o in cells))
        header = ["model", "prompt"] + cols
        body = []
        for m, p in row_keys:
            line = [m, p]
            for o in cols:
                r = cells.get((m, p, o))
                line.append(format_mean_std(r["mean"], r["std"]) if r else "")
            body.append(line)
        widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]
        fmt = lambda xs: "  ".join(x.ljust(w) for x, w in zip(xs, widths)).rstrip()  # noqa: E731
        blocks.append("\n".join([f"[{game}] {metric}", fmt(header), fmt(["-" * w for w in widths])] + [fmt(b) for b in body]))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def write_outputs(rows: Sequence[Mapping], out_dir: Path, csv_name: str = CSV_FILE, tables_name: str = TABLES_FILE):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / csv_name).write_text(rows_to_csv(rows))
    (out_dir / tables_name).write_text(render_tables(rows))


def load_rows(path: str | Path, tp: float = 0.9) -> list[dict]:
    """Aggregate rows from a JSONL record log or from a previously written CSV."""
    path = Path(path)
    if path.is_dir():
        path = path / RECORDS_FILE
    text = path.read_text()
    if path.suffix == ".csv":
        return rows_from_csv(text)
    return aggregate_records((json.loads(l) for l in text.splitlines() if l.strip()), tp=tp)
