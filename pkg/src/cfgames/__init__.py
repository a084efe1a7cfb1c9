"""Repeated-game harness for default and counterfactual PD / RPS games."""

from .games import (
    CounterfactualSpec,
    Family,
    NormalFormGame,
    apply_counterfactual,
    check_pd_ordering,
    get_game,
    is_zero_sum,
)
from .engine import MatchConfig, MatchRecord, run_match, run_repetitions
from .metrics import aggregate, compute_metrics

__version__ = "0.1.0"

__all__ = [
    "CounterfactualSpec",
    "Family",
    "MatchConfig",
    "MatchRecord",
    "NormalFormGame",
    "aggregate",
    "apply_counterfactual",
    "check_pd_ordering",
    "compute_metrics",
    "get_game",
    "is_zero_sum",
    "run_match",
    "run_repetitions",
]
