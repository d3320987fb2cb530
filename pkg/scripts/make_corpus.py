#!/usr/bin/env python3
"""Generate a synthetic test corpus with planted failure triggers.

Writes one text per line. A configurable fraction of texts carry one word
from the trigger list; configure a simulated target recognizer with the
same trigger_tokens and exactly those texts become failed cases, which
gives experiments known ground truth.
"""

import argparse
import random
import sys

FILLERS = (
    "the quick brown fox jumps over lazy dog river stone morning light "
    "garden window music paper bottle candle wonder travel secret little "
    "yellow silver winter summer spoken gentle broken golden hollow narrow "
    "simple sudden harbor meadow velvet marble copper timber amber cradle "
    "whisper thunder blossom lantern ribbon saddle tunnel valley willow"
).split()

TRIGGERS = ("zygomatic", "quixotic", "fjordland", "xylophone", "kvetching",
            "bazooka", "jacuzzi", "puzzling", "vortexes", "zeppelin")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=200)
    parser.add_argument("--trigger-rate", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-", help="output file (default stdout)")
    parser.add_argument("--print-triggers", action="store_true",
                        help="list the trigger words on stderr")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    slots = set(rng.sample(range(args.size), round(args.size * args.trigger_rate)))
    seen = set()
    lines = []
    for i in range(args.size):
        while True:
            words = rng.sample(FILLERS, rng.randint(4, 7))
            if i in slots:
                words[rng.randrange(len(words))] = rng.choice(TRIGGERS)
            text = " ".join(words)
            if text not in seen:
                seen.add(text)
                lines.append(text)
                break

    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    out.write("\n".join(lines) + "\n")
    if args.out != "-":
        out.close()
    if args.print_triggers:
        print("triggers:", " ".join(TRIGGERS), file=sys.stderr)


if __name__ == "__main__":
    main()
