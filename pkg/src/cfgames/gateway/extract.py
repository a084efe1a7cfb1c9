"""Pull a single legal action out of free-form model output."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from ..games import NormalFormGame

_TAG = re.compile(r"\[(move|hint)\]", re.IGNORECASE)


class Rejection(str, enum.Enum):
    NO_ACTION = "no-action"
    AMBIGUOUS = "ambiguous"
    FORMAT = "format"


@dataclass(frozen=True)
class Extraction:
    action: int | None
    reason: Rejection | None = None

    @property
    def ok(self) -> bool:
        return self.action is not None


def _pattern(label: str) -> re.Pattern:
    # standalone token: no letters, digits, underscore or apostrophe on either side
    return re.compile(rf"(?<![\w']){re.escape(label)}(?![\w'])", re.IGNORECASE)


def extract_action(
    raw: str,
    game: NormalFormGame,
    *,
    rule: str = "unique",
    require_move_tag: bool = False,
) -> Extraction:
    """Map ``raw`` to an action index or a rejection.

    ``rule="unique"`` rejects output naming more than one distinct action;
    ``rule="last"`` takes the last action mentioned. When a ``[move]`` tag is
    present only the text after the last tag is scanned.
    """
    if rule not in ("unique", "last"):
        raise ValueError(f"unknown extraction rule {rule!r}")
    if raw is None or not raw.strip():
        return Extraction(None, Rejection.FORMAT)

    tags = list(_TAG.finditer(raw))
    moves = [m for m in tags if m.group(1).lower() == "move"]
    if moves:
        text = raw[moves[-1].end():]
    elif require_move_tag:
        return Extraction(None, Rejection.FORMAT)
    else:
        text = raw
    text = _TAG.sub(" ", text)

    hits: list[tuple[int, int]] = []  # (position, action)
    for idx, label in enumerate(game.actions):
        hits.extend((m.start(), idx) for m in _pattern(label).finditer(text))
    if not hits:
        return Extraction(None, Rejection.NO_ACTION)
    distinct = {a for _, a in hits}
    if len(distinct) == 1:
        return Extraction(distinct.pop())
    if rule == "last":
        return Extraction(max(hits)[1])
    return Extraction(None, Rejection.AMBIGUOUS)
