"""Shared fixture corpora and helpers.

The synthetic http corpus gives the running example its canonical counts:
996 data / 898 end / 1 timeout on the response-object path, plus 215
timeout occurrences on the request-object path so the timeout event totals
216. The doge corpus reproduces the diffuse custom-event shape: 522
occurrences of one event over 520 unique paths, 519 of which occur once.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from deadlistener import PairOccurrence, aggregate, parse_path
from deadlistener.corpus import CountsIndex

FIXTURES = Path(__file__).parent / "fixtures"

RES_PATH = "require(http).request(1)(0)"
REQ_PATH = "require(http).request()"


def make_occurrences(spec, project="proj0", spread_projects=False):
    """spec: iterable of (pkg, serialized path, event, count)."""
    out = []
    serial = 0
    for pkg, path_text, event, count in spec:
        path = parse_path(path_text)
        for _ in range(count):
            pid = f"proj{serial % 7}" if spread_projects else project
            out.append(
                PairOccurrence(
                    path=path,
                    event=event,
                    root_package=pkg,
                    project_id=pid,
                    file="lib/main.js",
                    line=1 + serial % 40,
                )
            )
            serial += 1
    return out


HTTP_CORPUS_SPEC = [
    ("http", RES_PATH, "data", 996),
    ("http", RES_PATH, "end", 898),
    ("http", RES_PATH, "timeout", 1),
    ("http", REQ_PATH, "timeout", 215),
]


def http_corpus_occurrences(spread_projects=True):
    return make_occurrences(HTTP_CORPUS_SPEC, spread_projects=spread_projects)


def doge_corpus_spec():
    spec = [
        ("socket.io-client", f"require(socket.io-client).connect().p{i}", "doge", 1)
        for i in range(519)
    ]
    spec.append(("socket.io-client", "require(socket.io-client).connect()", "doge", 3))
    return spec


def doge_index() -> CountsIndex:
    return aggregate(make_occurrences(doge_corpus_spec(), spread_projects=True))


# Labeled corpus for evaluation tests: five incorrect pairs of varying
# catchability, one imprecise callback-parameter path, and a correct pair
# rare on both sides (Agent free) that only degenerate confidence-1 configs
# flag, giving sweeps a real precision/recall trade-off.
EVAL_CORPUS_SPEC = [
    ("http", RES_PATH, "data", 996),
    ("http", RES_PATH, "end", 898),
    ("http", RES_PATH, "timeout", 1),
    ("http", REQ_PATH, "timeout", 215),
    ("http", REQ_PATH, "error", 300),
    ("http", "require(http).createServer()", "listening", 400),
    ("http", "require(http).createServer()", "end", 3),
    ("http", "require(http).get()", "response", 350),
    ("http", "require(http).get()", "data", 3),
    ("http", "require(http).request().on(1)(0)", "response", 150),
    ("http", "require(http).globalAgent", "free", 120),
    ("http", "require(http).Agent[new]()", "free", 2),
    ("http", "require(http).Agent[new]()", "timeout", 8),
    ("net", "require(net).connect()", "connect", 500),
    ("net", "require(net).connect()", "data", 450),
    ("net", "require(net).connect()", "end", 300),
    ("net", "require(net).connect()", "secureConnect", 2),
    ("net", "require(net).createServer()", "connection", 700),
    ("net", "require(net).createServer()", "end", 3),
    ("net", "require(net).Socket[new]()", "secureConnect", 25),
]

EVAL_LABELS_SPEC = [
    ("http", RES_PATH, "data", "correct"),
    ("http", RES_PATH, "end", "correct"),
    ("http", RES_PATH, "timeout", "incorrect"),
    ("http", REQ_PATH, "timeout", "correct"),
    ("http", REQ_PATH, "error", "correct"),
    ("http", "require(http).createServer()", "listening", "correct"),
    ("http", "require(http).createServer()", "end", "incorrect"),
    ("http", "require(http).get()", "response", "correct"),
    ("http", "require(http).get()", "data", "incorrect"),
    ("http", "require(http).request().on(1)(0)", "response", "imprecise"),
    ("http", "require(http).globalAgent", "free", "correct"),
    ("http", "require(http).Agent[new]()", "free", "correct"),
    ("http", "require(http).Agent[new]()", "timeout", "correct"),
    ("net", "require(net).connect()", "connect", "correct"),
    ("net", "require(net).connect()", "data", "correct"),
    ("net", "require(net).connect()", "end", "correct"),
    ("net", "require(net).connect()", "secureConnect", "incorrect"),
    ("net", "require(net).createServer()", "connection", "correct"),
    ("net", "require(net).createServer()", "end", "incorrect"),
    ("net", "require(net).Socket[new]()", "secureConnect", "correct"),
]


def eval_corpus_occurrences():
    return make_occurrences(EVAL_CORPUS_SPEC, spread_projects=True)


def eval_labels():
    from deadlistener.evaluation import LabeledPair, LabelKind

    return [
        LabeledPair(pkg, parse_path(path), event, LabelKind(label))
        for pkg, path, event, label in EVAL_LABELS_SPEC
    ]


@pytest.fixture
def http_index() -> CountsIndex:
    return aggregate(http_corpus_occurrences())


@pytest.fixture
def eval_index() -> CountsIndex:
    return aggregate(eval_corpus_occurrences())


@pytest.fixture
def fig2_project() -> Path:
    return FIXTURES / "fig2"


@pytest.fixture
def fig2_chained_project() -> Path:
    return FIXTURES / "fig2_chained"
