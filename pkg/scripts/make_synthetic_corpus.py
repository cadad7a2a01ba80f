#!/usr/bin/env python3
"""Generate a synthetic mined corpus plus validation labels.

The corpus reproduces the occurrence shapes the classifier is designed
around: heavily used correct pairs, a handful of rare-but-common-partner
bug pairs, an imprecise callback-parameter path, a correct pair that is
rare on both sides (false-positive bait), and a diffuse custom test event
(522 occurrences of 'doge' spread over 520 paths).

Writes pairs.jsonl and labels.csv into --out (default: ./synthetic).

Usage:
    python scripts/make_synthetic_corpus.py [--out DIR]
"""

import argparse
from pathlib import Path

from deadlistener.corpus import write_occurrences
from deadlistener.evaluation import LabelKind, LabeledPair, write_labels
from deadlistener.miner import PairOccurrence
from deadlistener.paths import parse_path

RES = "require(http).request(1)(0)"
REQ = "require(http).request()"

# (package, path, event, occurrences, label or None)
CORPUS = [
    ("http", RES, "data", 996, "correct"),
    ("http", RES, "end", 898, "correct"),
    ("http", RES, "timeout", 1, "incorrect"),
    ("http", REQ, "timeout", 215, "correct"),
    ("http", REQ, "error", 300, "correct"),
    ("http", "require(http).createServer()", "listening", 400, "correct"),
    ("http", "require(http).createServer()", "end", 3, "incorrect"),
    ("http", "require(http).get()", "response", 350, "correct"),
    ("http", "require(http).get()", "data", 3, "incorrect"),
    ("http", "require(http).request().on(1)(0)", "response", 150, "imprecise"),
    ("http", "require(http).globalAgent", "free", 120, "correct"),
    ("http", "require(http).Agent[new]()", "free", 2, "correct"),
    ("http", "require(http).Agent[new]()", "timeout", 8, "correct"),
    ("net", "require(net).connect()", "connect", 500, "correct"),
    ("net", "require(net).connect()", "data", 450, "correct"),
    ("net", "require(net).connect()", "end", 300, "correct"),
    ("net", "require(net).connect()", "secureConnect", 2, "incorrect"),
    ("net", "require(net).createServer()", "connection", 700, "correct"),
    ("net", "require(net).createServer()", "end", 3, "incorrect"),
    ("net", "require(net).Socket[new]()", "secureConnect", 25, "correct"),
]


def build():
    occurrences = []
    labels = []
    serial = 0
    for pkg, path_text, event, count, label in CORPUS:
        path = parse_path(path_text)
        for _ in range(count):
            occurrences.append(
                PairOccurrence(
                    path=path,
                    event=event,
                    root_package=pkg,
                    project_id=f"proj{serial % 23}",
                    file=f"src/file{serial % 11}.js",
                    line=1 + serial % 80,
                )
            )
            serial += 1
        if label is not None:
            labels.append(LabeledPair(pkg, path, event, LabelKind(label)))
    # diffuse custom event: 519 one-off paths plus one path seen 3 times
    for i in range(519):
        path = parse_path(f"require(socket.io-client).connect().p{i}")
        occurrences.append(
            PairOccurrence(path, "doge", "socket.io-client", f"proj{i % 23}", "test/app.js", 7)
        )
    path = parse_path("require(socket.io-client).connect()")
    for i in range(3):
        occurrences.append(
            PairOccurrence(path, "doge", "socket.io-client", f"proj{i}", "test/app.js", 9)
        )
    return occurrences, labels


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="synthetic", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    occurrences, labels = build()
    count = write_occurrences(out / "pairs.jsonl", occurrences)
    write_labels(out / "labels.csv", labels)
    print(f"wrote {count} occurrences to {out / 'pairs.jsonl'}")
    print(f"wrote {len(labels)} labels to {out / 'labels.csv'}")


if __name__ == "__main__":
    main()
