"""System prompts and per-round user messages for language-model players."""

from __future__ import annotations

import string
from typing import Mapping, Sequence

from ..agents import Turn
from ..errors import TemplateError
from ..games import Family, NormalFormGame

_COMMON_TAIL = """\
In each round of the game you play against one other player. You and the other player each make a move privately. The moves are compared and you and the other player get your reward/penalty based on the moves made.

Message Formats:
Move messages are sent when you want to make a move.
Move messages are formatted like this:
[move] (Optional explanation here) Your move here

Hint messages are received when you are provided with advice and directions. These messages are important and you should pay attention to them.
Hint messages are formatted like this:
[hint] Hint message here

Objective:
Maximize your points and/or minimize your penalties.

Tips:
- Try to formulate a strategy by reasoning on the provided information.
- Pay attention to the payoff matrix of the game moves.
- You should only send move messages. Hint messages will only be provided to you.
- Pay attention to hints when provided.
- Do not use markdown formatting in your messages (e.g., bold text, italic text, etc.)."""

PD_SYSTEM = """\
You are playing a game against other player(s). The game is based on strategic moves.

Game Description:
There are two possible moves: {a} and {b}.
- if both players choose {a}, both get {aa} points.
- if both players choose {b}, both get {bb} points.
- if you choose {a} and the other player chooses {b}, you get {ab} points and the other player gets {ba} points.
- if you choose {b} and the other player chooses {a}, you get {ba} points and the other player gets {ab} points.

""" + _COMMON_TAIL

RPS_SYSTEM = """\
You are playing a game against other player(s). The game is based on making moves.

Game Description:
There are three possible moves: {a}, {b}, and {c}.
- {a} beats {c} giving the winner {ac} points and the loser -{ac} points.
- {b} beats {a} giving the winner {ba} points and the loser -{ba} points.
- {c} beats {b} giving the winner {cb} points and the loser -{cb} points.
- If both players make the same move, the game is a tie and no points are awarded.

""" + _COMMON_TAIL

MODES = {
    "zs": (
        "You are playing a repeated game. At each round, choose one of the available actions. "
        "The history of previous rounds is provided below. Based on this, select your next move. "
        "Output only your final action."
    ),
    "cot": (
        "You are playing a repeated game. Analyze the opponent's behavior and think step by step "
        "before deciding your move. Then output your final action."
    ),
    "spp": (
        "You are playing a repeated game. Consider multiple possible strategies and perspectives "
        "before deciding your next move. Reflect briefly on the opponent's behavior and select "
        "the best action."
    ),
}

USER_TEMPLATE = """\
{instruction}

History: {history}

Available actions: {actions}

Reply with a move message: [move] (Optional explanation here) Your move here"""

RETRY_MESSAGE = (
    "Your reply did not contain exactly one valid action. "
    "Available actions: {actions}. Reply again with a move message naming a single action."
)


def template_fields(template: str) -> set[str]:
    return {name for _, name, _, _ in string.Formatter().parse(template) if name}


def fill(template: str, values: Mapping[str, object]) -> str:
    missing = template_fields(template) - set(values)
    if missing:
        raise TemplateError(f"unbound template placeholders: {sorted(missing)}")
    return template.format(**values)


def game_placeholders(game: NormalFormGame) -> dict[str, object]:
    """Labels and payoff entries keyed the way the system templates expect."""
    u = lambda i, j: game.payoffs(i, j)[0]  # noqa: E731
    if game.family is Family.PD:
        if game.n_actions != 2:
            raise TemplateError("the PD description needs exactly two actions")
        a, b = game.actions
        return {"a": a, "b": b, "aa": u(0, 0), "ab": u(0, 1), "ba": u(1, 0), "bb": u(1, 1)}
    if game.n_actions != 3:
        raise TemplateError("the RPS description needs exactly three actions")
    # template reads: a beats c, b beats a, c beats b
    if not (u(0, 2) > 0 and u(1, 0) > 0 and u(2, 1) > 0):
        raise TemplateError(f"{game.name} does not follow the a>c, b>a, c>b cycle the template describes")
    a, b, c = game.actions
    return {"a": a, "b": b, "c": c, "ac": u(0, 2), "ba": u(1, 0), "cb": u(2, 1)}


def system_template(game: NormalFormGame) -> str:
    return PD_SYSTEM if game.family is Family.PD else RPS_SYSTEM


def render_history(game: NormalFormGame, history: Sequence[Turn]) -> str:
    if not history:
        return "No rounds have been played yet."
    lines = []
    for i, t in enumerate(history, 1):
        lines.append(
            f"Round {i}: you played {game.label(t.own)}, the other player played "
            f"{game.label(t.opponent)}; you got {t.own_payoff} points, "
            f"the other player got {t.opponent_payoff} points."
        )
    last = history[-1]
    lines.append(f"The other player's last move was {game.label(last.opponent)}.")
    return "\n" + "\n".join(lines)


def render_prompt(
    game: NormalFormGame,
    mode: str,
    history: Sequence[Turn],
    *,
    template: str | None = None,
    hint: str | None = None,
) -> list[dict[str, str]]:
    if mode not in MODES:
        raise TemplateError(f"unknown prompting mode {mode!r}; known: {sorted(MODES)}")
    system = fill(template or system_template(game), game_placeholders(game))
    user = USER_TEMPLATE.format(
        instruction=MODES[mode],
        history=render_history(game, history),
        actions=", ".join(game.actions),
    )
    messages = [{"role": "system", "content": system}, {"role": "user", "content": user}]
    if hint:
        messages.append({"role": "user", "content": f"[hint] {hint}"})
    return messages
