"""Write the scripted mock-transport fixtures used by the gateway tests and demo config.

Every response carries 250 prompt tokens. Layout (R = round):

pd_zs.jsonl   R1-4 "[move] C" (5 tok); R5 four unparseable replies (7 tok each,
              retries exhausted); R6-16 "[move] I will play D" (8 tok).
pd_sc.jsonl   three samples per round (6 tok each): odd R -> C,C,D; even R -> D,C,D.
rps_cot.jsonl one reply per round cycling Rock/Paper/Scissors (9 tok); R10 opens
              with an ambiguous reply (9 tok) before "[move] Rock"; R20 is four
              unparseable replies (11 tok each).
rps_sc.jsonl  five samples per round (7 tok each); rounds with R % 4 == 1 contain
              one unparseable sample that is retried once; R % 4 == 0 ends in a
              Rock/Paper tie.

Expected per-match totals (completion tokens, validity = valid / all attempts):
pd_zs 136, 15/19; pd_sc 288, 1.0; rps_cot 260, 23/28; rps_sc 882, 120/126.
"""

import json
import sys
from pathlib import Path

RPS = ["Rock", "Paper", "Scissors"]


def line(text, completion):
    return {"text": text, "prompt_tokens": 250, "completion_tokens": completion}


def pd_zs():
    out = [line("[move] C", 5) for _ in range(4)]
    out += [line("Let me think about this.", 7) for _ in range(4)]
    out += [line("[move] I will play D", 8) for _ in range(11)]
    return out


def pd_sc():
    out = []
    for r in range(1, 17):
        votes = ["C", "C", "D"] if r % 2 else ["D", "C", "D"]
        out += [line(f"[move] {v}", 6) for v in votes]
    return out


def rps_cot():
    out = []
    for r in range(1, 25):
        label = RPS[(r - 1) % 3]
        if r == 10:
            out.append(line("[move] Paper beats Rock, so Paper", 9))
        if r == 20:
            out += [line("I am not sure what to do here.", 11) for _ in range(4)]
            continue
        out.append(line(f"[move] {label}", 9))
    return out


def rps_sc():
    out = []
    for r in range(1, 25):
        if r % 4 == 0:
            votes = ["Rock", "Paper", "Scissors", "Rock", "Paper"]
        else:
            votes = ["Scissors", "Scissors", "Rock", "Paper", "Scissors"]
        for i, v in enumerate(votes):
            if r % 4 == 1 and i == 2:
                out.append(line("hmm", 7))
            out.append(line(f"[move] {v}", 7))
    return out


def main(target="tests/fixtures"):
    d = Path(target)
    d.mkdir(parents=True, exist_ok=True)
    for name, rows in [("pd_zs", pd_zs()), ("pd_sc", pd_sc()), ("rps_cot", rps_cot()), ("rps_sc", rps_sc())]:
        (d / f"{name}.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))
        print(f"{name}.jsonl: {len(rows)} responses")


if __name__ == "__main__":
    main(*sys.argv[1:])
