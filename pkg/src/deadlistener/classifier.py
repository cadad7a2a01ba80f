"""Statistical classification of listener-registration pairs.

A pair (path, event) is flagged anomalous when the event is rare for the
path AND the path is rare for the event, each judged by a one-sided
binomial test: with ``n`` the total occurrences of the partner and ``k``
the refined pair count, ``BinomialCDF(k, n, rarity)`` below the confidence
threshold means the true co-occurrence rate is confidently below the
rarity threshold. The mirrored survival test marks confidently *common*
pairs as expected; everything else stays unclassified.

The refined count is cumulative: it includes every partner co-occurring no
more often than this pair does. That keeps diffuse noise (e.g. one-off
custom test events spread over hundreds of paths) from looking rare, at
the cost of extra false negatives.

The CDF itself is delegated to scipy's regularized incomplete beta
implementation; the test suite holds an exact direct-summation oracle
against which it is validated to 1e-9 absolute error.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from scipy.stats import binom

from .corpus import CountsIndex, PairStats
from .paths import AccessPath, parse_path, serialize_path

RARITY_GRID_DEFAULT = (0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.25)
CONFIDENCE_GRID_DEFAULT = (0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 1.0)

# Reference thresholds: highest recall observed at >= 90% precision.
OPTIMAL_CONFIG_VALUES = (0.1, 0.1, 0.03, 0.01)


class DomainError(ValueError):
    """A statistical routine was called outside its domain."""


@dataclass(frozen=True, order=True)
class Config:
    """The four classification thresholds, each a probability in (0, 1].

    Field order (path_rarity, event_rarity, path_confidence,
    event_confidence) is the canonical tuple order used by config strings,
    sort order and reports.
    """

    path_rarity: float
    event_rarity: float
    path_confidence: float
    event_confidence: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise DomainError(f"{name} must be a number, got {value!r}")
            if not 0.0 < value <= 1.0:
                raise DomainError(f"{name} must be in (0, 1], got {value}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.path_rarity, self.event_rarity, self.path_confidence, self.event_confidence)

    def as_dict(self) -> dict[str, float]:
        return {
            "p_a": self.path_rarity,
            "p_e": self.event_rarity,
            "p_ca": self.path_confidence,
            "p_ce": self.event_confidence,
        }

    @classmethod
    def from_values(cls, values) -> "Config":
        values = tuple(values)
        if len(values) != 4:
            raise DomainError(f"expected 4 threshold values, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def from_string(cls, text: str) -> "Config":
        parts = [p.strip() for p in text.split(",")]
        try:
            numbers = [float(p) for p in parts]
        except ValueError as exc:
            raise DomainError(f"bad config string {text!r}: {exc}") from None
        return cls.from_values(numbers)

    def __str__(self) -> str:
        return "({}, {}, {}, {})".format(*(_trim(v) for v in self.as_tuple()))


def _trim(value: float) -> str:
    text = f"{value:g}"
    return text


class Verdict(enum.Enum):
    ANOMALOUS = "anomalous"
    EXPECTED = "expected"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    rare_path_score: float  # CDF of the cumulative path count vs path rarity
    rare_event_score: float  # CDF of the cumulative event count vs event rarity
    common_path_score: float  # survival counterparts
    common_event_score: float


def binomial_cdf(successes: int, trials: int, probability: float) -> float:
    """P(X <= successes) for X ~ Binomial(trials, probability)."""
    _check_domain(successes, trials, probability)
    return _cdf_cached(successes, trials, probability)


def binomial_sf(successes: int, trials: int, probability: float) -> float:
    """P(X >= successes); the upper-tail mirror of :func:`binomial_cdf`."""
    _check_domain(successes, trials, probability)
    return _sf_cached(successes, trials, probability)


def _check_domain(successes: int, trials: int, probability: float) -> None:
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise DomainError(f"successes must be in [0, {trials}], got {successes}")
    if math.isnan(probability) or not 0.0 <= probability <= 1.0:
        raise DomainError(f"probability must be in [0, 1], got {probability}")


@lru_cache(maxsize=None)
def _cdf_cached(k: int, n: int, p: float) -> float:
    return float(binom.cdf(k, n, p))


@lru_cache(maxsize=None)
def _sf_cached(k: int, n: int, p: float) -> float:
    # P(X >= k) = 1 - P(X <= k - 1); scipy's sf is exclusive, so shift.
    if k <= 0:
        return 1.0
    return float(binom.sf(k - 1, n, p))


def _confidently_rare(k: int, n: int, rarity: float, confidence: float) -> tuple[bool, float]:
    score = _cdf_cached(k, n, rarity)
    if confidence >= 1.0:
        # Exact semantics at the degenerate threshold: CDF < 1 iff the
        # upper tail is non-empty. float64 rounds tiny tails to exactly 1.0,
        # which would silently disable the "ignore this side" behaviour.
        return (k < n and rarity > 0.0), score
    return score < confidence, score


def _confidently_common(k: int, n: int, rarity: float, confidence: float) -> tuple[bool, float]:
    score = _sf_cached(k, n, rarity)
    if confidence >= 1.0:
        return (k > 0 and rarity < 1.0), score
    return score < confidence, score


def classify_stats(stats: PairStats, config: Config, refined: bool = True) -> Classification:
    """Three-way verdict for one pair from its count statistics.

    ``refined=False`` uses the raw pair count instead of the cumulative
    counts on both sides; the refined anomalous set is always a subset of
    the raw one (cumulative counts dominate raw counts and the CDF is
    nondecreasing in the count).
    """
    path_k = stats.cumulative_path_count if refined else stats.count
    event_k = stats.cumulative_event_count if refined else stats.count
    rare_path, rare_path_score = _confidently_rare(
        path_k, stats.event_total, config.path_rarity, config.path_confidence
    )
    rare_event, rare_event_score = _confidently_rare(
        event_k, stats.path_total, config.event_rarity, config.event_confidence
    )
    common_path, common_path_score = _confidently_common(
        path_k, stats.event_total, config.path_rarity, config.path_confidence
    )
    common_event, common_event_score = _confidently_common(
        event_k, stats.path_total, config.event_rarity, config.event_confidence
    )
    anomalous = rare_path and rare_event
    expected = common_path and common_event
    if anomalous and expected:
        # Both one-sided tests cannot fire below 0.5: CDF + SF >= 1.
        assert config.path_confidence >= 0.5 or config.event_confidence >= 0.5, (
            "rarity and commonness both confident with strict thresholds"
        )
    verdict = (
        Verdict.ANOMALOUS if anomalous else Verdict.EXPECTED if expected else Verdict.UNCLASSIFIED
    )
    return Classification(
        verdict=verdict,
        rare_path_score=rare_path_score,
        rare_event_score=rare_event_score,
        common_path_score=common_path_score,
        common_event_score=common_event_score,
    )


def classify_pair(
    index: CountsIndex, path: AccessPath, event: str, config: Config, refined: bool = True
) -> Classification:
    """Classify one pair present in the index; raises MissingPair otherwise."""
    stats = index.stats_for(path.root_package, path, event)
    return classify_stats(stats, config, refined=refined)


@dataclass(frozen=True)
class PairRecord:
    """One classified pair as persisted in a model file."""

    path: AccessPath
    event: str
    count: int
    path_total: int
    event_total: int
    cumulative_path_count: int
    cumulative_event_count: int
    rare_path_score: float
    rare_event_score: float

    def sort_key(self) -> tuple[str, str]:
        return (serialize_path(self.path), self.event)


@dataclass
class PackageModel:
    anomalous: tuple[PairRecord, ...] = ()
    expected: tuple[PairRecord, ...] = ()
    unclassified: tuple[PairRecord, ...] = ()

    def groups(self) -> Iterator[tuple[Verdict, tuple[PairRecord, ...]]]:
        yield Verdict.ANOMALOUS, self.anomalous
        yield Verdict.EXPECTED, self.expected
        yield Verdict.UNCLASSIFIED, self.unclassified


@dataclass
class Model:
    """Per-package anomalous / expected / unclassified pair sets."""

    config: Config
    packages: dict[str, PackageModel]

    def verdict_of(self, pkg: str, path: AccessPath, event: str) -> Verdict | None:
        package = self.packages.get(pkg)
        if package is None:
            return None
        for verdict, records in package.groups():
            for record in records:
                if record.path == path and record.event == event:
                    return verdict
        return None

    def record_of(self, pkg: str, path: AccessPath, event: str) -> tuple[Verdict, PairRecord] | None:
        package = self.packages.get(pkg)
        if package is None:
            return None
        for verdict, records in package.groups():
            for record in records:
                if record.path == path and record.event == event:
                    return verdict, record
        return None

    def anomalous_lookup(self) -> dict[tuple[str, str, str], PairRecord]:
        out: dict[tuple[str, str, str], PairRecord] = {}
        for pkg, package in self.packages.items():
            for record in package.anomalous:
                out[(pkg, serialize_path(record.path), record.event)] = record
        return out

    def pair_count(self) -> int:
        return sum(
            len(p.anomalous) + len(p.expected) + len(p.unclassified)
            for p in self.packages.values()
        )


def classify_corpus(index: CountsIndex, config: Config, refined: bool = True) -> Model:
    """Classify every pair in the index. Pure and deterministic."""
    grouped: dict[str, dict[Verdict, list[PairRecord]]] = {}
    for pkg, path, event, stats in index.pair_statistics():
        classification = classify_stats(stats, config, refined=refined)
        record = PairRecord(
            path=path,
            event=event,
            count=stats.count,
            path_total=stats.path_total,
            event_total=stats.event_total,
            cumulative_path_count=stats.cumulative_path_count,
            cumulative_event_count=stats.cumulative_event_count,
            rare_path_score=classification.rare_path_score,
            rare_event_score=classification.rare_event_score,
        )
        grouped.setdefault(pkg, {v: [] for v in Verdict})[classification.verdict].append(record)
    packages = {}
    for pkg in sorted(grouped):
        buckets = grouped[pkg]
        packages[pkg] = PackageModel(
            anomalous=tuple(sorted(buckets[Verdict.ANOMALOUS], key=PairRecord.sort_key)),
            expected=tuple(sorted(buckets[Verdict.EXPECTED], key=PairRecord.sort_key)),
            unclassified=tuple(sorted(buckets[Verdict.UNCLASSIFIED], key=PairRecord.sort_key)),
        )
    return Model(config=config, packages=packages)


# ---------------------------------------------------------------------------
# Model JSON


def _record_to_json(record: PairRecord) -> dict:
    return {
        "path": serialize_path(record.path),
        "event": record.event,
        "k": record.count,
        "n_a": record.path_total,
        "n_e": record.event_total,
        "k_cum_path": record.cumulative_path_count,
        "k_cum_event": record.cumulative_event_count,
        "bcdf_path": record.rare_path_score,
        "bcdf_event": record.rare_event_score,
    }


def _record_from_json(data: dict) -> PairRecord:
    return PairRecord(
        path=parse_path(data["path"]),
        event=data["event"],
        count=int(data["k"]),
        path_total=int(data["n_a"]),
        event_total=int(data["n_e"]),
        cumulative_path_count=int(data["k_cum_path"]),
        cumulative_event_count=int(data["k_cum_event"]),
        rare_path_score=float(data["bcdf_path"]),
        rare_event_score=float(data["bcdf_event"]),
    )


def model_to_json(model: Model) -> str:
    payload = {
        "config": model.config.as_dict(),
        "packages": {
            pkg: {
                "anomalous": [_record_to_json(r) for r in package.anomalous],
                "expected": [_record_to_json(r) for r in package.expected],
                "unclassified": [_record_to_json(r) for r in package.unclassified],
            }
            for pkg, package in sorted(model.packages.items())
        },
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_model(target: str | Path, model: Model) -> None:
    Path(target).write_text(model_to_json(model), encoding="utf-8", newline="\n")


def load_model(source: str | Path) -> Model:
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    config = Config(
        float(data["config"]["p_a"]),
        float(data["config"]["p_e"]),
        float(data["config"]["p_ca"]),
        float(data["config"]["p_ce"]),
    )
    packages = {}
    for pkg, groups in data.get("packages", {}).items():
        packages[pkg] = PackageModel(
            anomalous=tuple(_record_from_json(r) for r in groups.get("anomalous", [])),
            expected=tuple(_record_from_json(r) for r in groups.get("expected", [])),
            unclassified=tuple(_record_from_json(r) for r in groups.get("unclassified", [])),
        )
    return Model(config=config, packages=packages)


__all__ = [
    "CONFIDENCE_GRID_DEFAULT",
    "Classification",
    "Config",
    "DomainError",
    "Model",
    "OPTIMAL_CONFIG_VALUES",
    "PackageModel",
    "PairRecord",
    "RARITY_GRID_DEFAULT",
    "Verdict",
    "binomial_cdf",
    "binomial_sf",
    "classify_corpus",
    "classify_pair",
    "classify_stats",
    "load_model",
    "model_to_json",
    "write_model",
]
