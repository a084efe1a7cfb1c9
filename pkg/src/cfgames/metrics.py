"""Per-match metrics and their aggregation across repetitions."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .engine import MatchRecord
from .errors import ParameterError, PartialRecordError, PreconditionError
from .games import Family, NormalFormGame

EFFICIENCY_SCALE = 1000


def _require_complete(rec: MatchRecord):
    if not rec.complete:
        raise PartialRecordError(f"record is incomplete ({rec.error})")


def total_points(rec: MatchRecord) -> tuple[int, int]:
    _require_complete(rec)
    return rec.totals


def _as_fraction(tp) -> Fraction:
    if isinstance(tp, float):
        return Fraction(repr(tp))
    return Fraction(tp)


def comprehension_round(payoffs_a: Sequence[float], payoffs_b: Sequence[float], tp=0.9) -> int:
    """Earliest round m (1-based) from which A scores >= B in at least a ``tp`` share of rounds m..N.

    Returns N + 1 when no such round exists.
    """
    frac = _as_fraction(tp)
    if not 0 < frac <= 1:
        raise ParameterError(f"tp must lie in (0, 1], got {tp}")
    n = len(payoffs_a)
    if len(payoffs_b) != n:
        raise ParameterError("payoff traces differ in length")
    num, den = frac.numerator, frac.denominator
    best = n + 1
    good = 0
    # scan suffixes from the end; smallest qualifying m wins
    for m in range(n, 0, -1):
        if payoffs_a[m - 1] >= payoffs_b[m - 1]:
            good += 1
        if good * den >= num * (n - m + 1):
            best = m
    return best


def opponent_comprehension(rec: MatchRecord, tp=0.9, player: str = "a") -> int:
    _require_complete(rec)
    pa = [r.payoff_a for r in rec.rounds]
    pb = [r.payoff_b for r in rec.rounds]
    if player == "b":
        pa, pb = pb, pa
    return comprehension_round(pa, pb, tp)


def _actions(rec: MatchRecord, player: str) -> list[str]:
    return [r.action_a if player == "a" else r.action_b for r in rec.rounds]


def cooperation_rate(rec: MatchRecord, g: NormalFormGame | None = None) -> tuple[float, float]:
    g = g or rec.game
    if g.family is not Family.PD or g.cooperative_action is None:
        raise PreconditionError(f"{g.name} has no cooperative action; use action_distribution")
    coop = g.label(g.cooperative_action)
    n = rec.n_rounds
    if n == 0:
        return (0.0, 0.0)
    return tuple(sum(a == coop for a in _actions(rec, p)) / n for p in ("a", "b"))


def action_distribution(rec: MatchRecord) -> tuple[dict[str, float], dict[str, float]]:
    labels = rec.game.actions
    n = rec.n_rounds
    out = []
    for p in ("a", "b"):
        acts = _actions(rec, p)
        out.append({lab: (acts.count(lab) / n if n else 0.0) for lab in labels})
    return out[0], out[1]


def efficiency(points: float, tokens: int, c: float = EFFICIENCY_SCALE) -> float | None:
    """Points per ``c`` generated tokens; ``None`` when nothing was generated."""
    if tokens < 0:
        raise ParameterError(f"token count cannot be negative: {tokens}")
    if tokens == 0:
        return None
    return points / tokens * c


def validity_rate(rec: MatchRecord) -> tuple[float | None, float | None]:
    """Share of attempts that produced a unique legal action, per player.

    Scripted moves (no model attempts recorded) count as one valid attempt;
    a round that fell back after exhausting retries has no valid attempt.
    """
    out = []
    for p in ("a", "b"):
        valid = invalid = 0
        for r in rec.rounds:
            bad = getattr(r, f"invalid_attempts_{p}")
            tried = getattr(r, f"attempts_{p}")
            invalid += bad
            valid += (tried - bad) if tried else (0 if getattr(r, f"fallback_{p}") else 1)
        total = valid + invalid
        out.append(valid / total if total else None)
    return out[0], out[1]


def tokens_used(rec: MatchRecord) -> tuple[int, int]:
    return sum(r.tokens_a for r in rec.rounds), sum(r.tokens_b for r in rec.rounds)


@dataclass
class MetricsReport:
    total_points_a: int
    total_points_b: int
    comprehension_round_m: int
    comprehension_round_m_b: int
    efficiency_a: float | None
    efficiency_b: float | None
    validity_rate_a: float | None
    validity_rate_b: float | None
    tokens_a: int
    tokens_b: int
    cooperation_rate_a: float | None = None
    cooperation_rate_b: float | None = None
    action_distribution_a: dict[str, float] = field(default_factory=dict)
    action_distribution_b: dict[str, float] = field(default_factory=dict)

    def scalars(self) -> dict[str, float]:
        """Flat metric name -> value map, skipping undefined entries."""
        out = {
            "total_points_a": self.total_points_a,
            "total_points_b": self.total_points_b,
            "comprehension_m": self.comprehension_round_m,
            "comprehension_m_b": self.comprehension_round_m_b,
            "efficiency_a": self.efficiency_a,
            "efficiency_b": self.efficiency_b,
            "validity_rate_a": self.validity_rate_a,
            "validity_rate_b": self.validity_rate_b,
            "cooperation_rate_a": self.cooperation_rate_a,
            "cooperation_rate_b": self.cooperation_rate_b,
        }
        for label, v in self.action_distribution_a.items():
            out[f"freq_a[{label}]"] = v
        for label, v in self.action_distribution_b.items():
            out[f"freq_b[{label}]"] = v
        return {k: v for k, v in out.items() if v is not None}


def compute_metrics(rec: MatchRecord, tp=0.9, c: float = EFFICIENCY_SCALE) -> MetricsReport:
    pa, pb = total_points(rec)
    ta, tb = tokens_used(rec)
    va, vb = validity_rate(rec)
    report = MetricsReport(
        total_points_a=pa,
        total_points_b=pb,
        comprehension_round_m=opponent_comprehension(rec, tp, "a"),
        comprehension_round_m_b=opponent_comprehension(rec, tp, "b"),
        efficiency_a=efficiency(pa, ta, c),
        efficiency_b=efficiency(pb, tb, c),
        validity_rate_a=va,
        validity_rate_b=vb,
        tokens_a=ta,
        tokens_b=tb,
    )
    if rec.game.family is Family.PD:
        report.cooperation_rate_a, report.cooperation_rate_b = cooperation_rate(rec)
    else:
        report.action_distribution_a, report.action_distribution_b = action_distribution(rec)
    return report


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float
    count: int

    @property
    def single(self) -> bool:
        """True when std is 0 only because there was one observation."""
        return self.count == 1

    def __str__(self) -> str:
        return format_mean_std(self.mean, self.std)


def format_mean_std(mean: float, std: float) -> str:
    return f"{mean:.1f} ± {std:.1f}"


def aggregate_values(values: Iterable[float]) -> Aggregate:
    vals = [float(v) for v in values]
    if not vals:
        raise ParameterError("cannot aggregate an empty list")
    # statistics works in exact rationals, so identical inputs give std exactly 0
    mean = statistics.mean(vals)
    if len(vals) == 1:
        return Aggregate(mean, 0.0, 1)
    return Aggregate(mean, statistics.stdev(vals, mean), len(vals))


def aggregate(reports: Sequence[MetricsReport | Mapping[str, float]]) -> dict[str, Aggregate]:
    """Mean and sample standard deviation of every metric over ``reports``."""
    if not reports:
        raise ParameterError("cannot aggregate zero reports")
    columns: dict[str, list[float]] = {}
    for rep in reports:
        scalars = rep.scalars() if isinstance(rep, MetricsReport) else rep
        for k, v in scalars.items():
            columns.setdefault(k, []).append(v)
    return {k: aggregate_values(v) for k, v in columns.items()}
