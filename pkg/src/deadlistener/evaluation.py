"""Scoring against a labeled validation set and the experiment drivers.

The validation set labels pairs as correct, incorrect, or imprecise (the
access path conflates several runtime types). Scoring follows the
pessimistic convention: an anomalous pair labeled correct OR imprecise is
a false positive; an incorrect pair left expected or unclassified is a
false negative. Precision is the percentage of true positives among
flagged-and-labeled pairs, recall the percentage of incorrect labels
flagged.

Experiment drivers:

* ``sweep``        - score every threshold configuration on a grid;
* ``pareto_front`` - configurations not dominated on (precision, recall);
* ``select_optimal`` - highest recall at a minimum precision (default 90%);
* ``cross_validate`` - k-fold: pick the optimal config on the training
  folds' labels, score it on the held-out fold (classification always runs
  over the full index; only the scoring labels are partitioned);
* ``subset_experiment`` - resample a percentage of occurrence records,
  pick the optimal config on the subset, score it on the full data.

Randomized experiments draw from a seeded numpy PCG64 generator and are
bitwise reproducible; report writers emit no timestamps so identical
inputs and seed give byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import (
    CONFIDENCE_GRID_DEFAULT,
    RARITY_GRID_DEFAULT,
    Config,
    Model,
    Verdict,
    classify_stats,
)
from .corpus import CountsIndex, PairStats
from .paths import AccessPath, PathSyntaxError, parse_path, serialize_path

RNG_NAME = "numpy-PCG64"

LABELS_CSV_HEADER = ["pkg", "path", "event", "label"]

DEFAULT_MIN_PRECISION = 90.0
DEFAULT_FOLDS = 10
DEFAULT_PERCENTAGES = (2.0, 5.0, 10.0, 25.0, 50.0)
DEFAULT_ITERATIONS = 10


class LabelSyntaxError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"labels row {row}: {message}")
        self.row = row


class DuplicateLabel(ValueError):
    pass


class LabelNotInCorpus(KeyError):
    pass


class NoQualifyingConfig(LookupError):
    pass


class EmptySubset(ValueError):
    pass


class LabelKind(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    IMPRECISE = "imprecise"


@dataclass(frozen=True)
class LabeledPair:
    root_package: str
    path: AccessPath
    event: str
    label: LabelKind

    def key(self) -> tuple[str, str, str]:
        return (self.root_package, serialize_path(self.path), self.event)


def load_labels(source: str | Path) -> list[LabeledPair]:
    """Parse and validate a labels CSV (header ``pkg,path,event,label``)."""
    with open(source, "r", encoding="utf-8", newline="") as handle:
        return parse_labels(handle)


def parse_labels(lines: Iterable[str]) -> list[LabeledPair]:
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != LABELS_CSV_HEADER:
        raise LabelSyntaxError(1, f"expected header {LABELS_CSV_HEADER!r}, got {header!r}")
    out: list[LabeledPair] = []
    seen: set[tuple[str, str, str]] = set()
    for row_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise LabelSyntaxError(row_number, f"expected 4 columns, got {len(row)}")
        pkg, path_text, event, label_text = (cell.strip() for cell in row)
        try:
            path = parse_path(path_text)
        except PathSyntaxError as exc:
            raise LabelSyntaxError(row_number, str(exc)) from None
        if path.root_package != pkg:
            raise LabelSyntaxError(
                row_number, f"pkg column {pkg!r} does not match path root {path.root_package!r}"
            )
        if not event:
            raise LabelSyntaxError(row_number, "empty event name")
        try:
            label = LabelKind(label_text.lower())
        except ValueError:
            raise LabelSyntaxError(row_number, f"unknown label {label_text!r}") from None
        pair = LabeledPair(pkg, path, event, label)
        if pair.key() in seen:
            raise DuplicateLabel(f"labels row {row_number}: duplicate pair {pair.key()}")
        seen.add(pair.key())
        out.append(pair)
    return out


def write_labels(target: str | Path, labels: Sequence[LabeledPair]) -> None:
    with open(target, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(LABELS_CSV_HEADER)
        for pair in labels:
            writer.writerow(
                [pair.root_package, serialize_path(pair.path), pair.event, pair.label.value]
            )


# ---------------------------------------------------------------------------
# Scoring


@dataclass(frozen=True)
class ScoreReport:
    true_positives: int
    false_positives: int
    unclassified_incorrect: int
    precision: float | None  # percent; None when nothing labeled was flagged
    recall: float | None  # percent; None when the set has no incorrect labels
    tp_occurrence_count: int
    tp_project_count: int | None  # None when project data is unavailable


@dataclass(frozen=True)
class ConfigResult:
    config: Config
    report: ScoreReport


def _make_report(
    tally: dict[str, int],
    incorrect_total: int,
    tp_occurrences: int,
    tp_projects: frozenset[str] | None,
) -> ScoreReport:
    tp = tally["tp"]
    fp = tally["fp"]
    flagged = tp + fp
    precision = 100.0 * tp / flagged if flagged else None
    recall = 100.0 * tp / incorrect_total if incorrect_total else None
    return ScoreReport(
        true_positives=tp,
        false_positives=fp,
        unclassified_incorrect=tally["up"],
        precision=precision,
        recall=recall,
        tp_occurrence_count=tp_occurrences,
        tp_project_count=None if tp_projects is None else len(tp_projects),
    )


def score(model: Model, labels: Sequence[LabeledPair], index: CountsIndex | None = None) -> ScoreReport:
    """Score a classified model against validation labels.

    Every label must be present in the model's pair universe
    (LabelNotInCorpus otherwise). Occurrence counts of true positives come
    from the model records; distinct-project counts need an ``index``
    aggregated from occurrence records.
    """
    lookup = {}
    for pkg, package in model.packages.items():
        for verdict, records in package.groups():
            for record in records:
                lookup[(pkg, serialize_path(record.path), record.event)] = (verdict, record)
    tally = {"tp": 0, "fp": 0, "up": 0}
    tp_occurrences = 0
    track_projects = index is not None and index.has_project_data()
    tp_projects: set[str] = set()
    for pair in labels:
        found = lookup.get(pair.key())
        if found is None:
            raise LabelNotInCorpus(f"labeled pair not in model universe: {pair.key()}")
        verdict, record = found
        if verdict is Verdict.ANOMALOUS:
            if pair.label is LabelKind.INCORRECT:
                tally["tp"] += 1
                tp_occurrences += record.count
                if track_projects:
                    assert index is not None
                    projects = index.projects_of(pair.root_package, pair.path, pair.event)
                    tp_projects.update(projects or ())
            else:
                tally["fp"] += 1
        elif pair.label is LabelKind.INCORRECT and verdict is Verdict.UNCLASSIFIED:
            tally["up"] += 1
    incorrect_total = sum(1 for pair in labels if pair.label is LabelKind.INCORRECT)
    return _make_report(
        tally, incorrect_total, tp_occurrences, frozenset(tp_projects) if track_projects else None
    )


# ---------------------------------------------------------------------------
# Grid sweep


@dataclass(frozen=True)
class _LabeledStats:
    pair: LabeledPair
    stats: PairStats
    projects: frozenset[str] | None


def _prepare_labeled_stats(index: CountsIndex, labels: Sequence[LabeledPair]) -> list[_LabeledStats]:
    ordered = sorted(labels, key=LabeledPair.key)
    out = []
    for pair in ordered:
        if not index.has_pair(pair.root_package, pair.path, pair.event):
            raise LabelNotInCorpus(f"labeled pair not in index: {pair.key()}")
        stats = index.stats_for(pair.root_package, pair.path, pair.event)
        projects = index.projects_of(pair.root_package, pair.path, pair.event)
        out.append(_LabeledStats(pair, stats, projects))
    return out


def _score_labeled_stats(prepared: Sequence[_LabeledStats], config: Config) -> ScoreReport:
    tally = {"tp": 0, "fp": 0, "up": 0}
    tp_occurrences = 0
    have_projects = all(item.projects is not None for item in prepared)
    tp_projects: set[str] = set()
    incorrect_total = 0
    for item in prepared:
        if item.pair.label is LabelKind.INCORRECT:
            incorrect_total += 1
        verdict = classify_stats(item.stats, config).verdict
        if verdict is Verdict.ANOMALOUS:
            if item.pair.label is LabelKind.INCORRECT:
                tally["tp"] += 1
                tp_occurrences += item.stats.count
                if have_projects:
                    tp_projects.update(item.projects or ())
            else:
                tally["fp"] += 1
        elif item.pair.label is LabelKind.INCORRECT and verdict is Verdict.UNCLASSIFIED:
            tally["up"] += 1
    return _make_report(
        tally, incorrect_total, tp_occurrences, frozenset(tp_projects) if have_projects else None
    )


def score_config(index: CountsIndex, labels: Sequence[LabeledPair], config: Config) -> ScoreReport:
    """Equivalent to ``score(classify_corpus(index, config), labels, index)``
    without classifying unlabeled pairs (only labeled pairs affect scores)."""
    return _score_labeled_stats(_prepare_labeled_stats(index, labels), config)


def grid_configs(
    rarity_values: Sequence[float] | None = None,
    confidence_values: Sequence[float] | None = None,
) -> list[Config]:
    rarity = sorted(rarity_values if rarity_values is not None else RARITY_GRID_DEFAULT)
    confidence = sorted(
        confidence_values if confidence_values is not None else CONFIDENCE_GRID_DEFAULT
    )
    if not rarity or not confidence:
        raise ValueError("grid value sets must be non-empty")
    return [
        Config(pa, pe, pca, pce)
        for pa, pe, pca, pce in itertools.product(rarity, rarity, confidence, confidence)
    ]


def sweep(
    index: CountsIndex,
    labels: Sequence[LabeledPair],
    rarity_values: Sequence[float] | None = None,
    confidence_values: Sequence[float] | None = None,
) -> list[ConfigResult]:
    """One ConfigResult per grid configuration, in lexicographic config order."""
    prepared = _prepare_labeled_stats(index, labels)
    return [
        ConfigResult(config, _score_labeled_stats(prepared, config))
        for config in grid_configs(rarity_values, confidence_values)
    ]


# ---------------------------------------------------------------------------
# Front and optimum


def _comparable(result: ConfigResult) -> bool:
    return result.report.precision is not None and result.report.recall is not None


def _dominates(a: ScoreReport, b: ScoreReport) -> bool:
    assert a.precision is not None and b.precision is not None
    assert a.recall is not None and b.recall is not None
    if a.precision < b.precision or a.recall < b.recall:
        return False
    return a.precision > b.precision or a.recall > b.recall


def pareto_front(results: Sequence[ConfigResult]) -> list[ConfigResult]:
    """Results not dominated on (precision, recall), precision-descending.

    Results with undefined precision or recall are excluded (callers can
    count them as len(results) - len(comparable))."""
    comparable = [r for r in results if _comparable(r)]
    front = [
        r
        for r in comparable
        if not any(_dominates(other.report, r.report) for other in comparable)
    ]
    front.sort(
        key=lambda r: (-(r.report.precision or 0.0), -(r.report.recall or 0.0), r.config.as_tuple())
    )
    return front


def select_optimal(
    results: Sequence[ConfigResult], min_precision: float = DEFAULT_MIN_PRECISION
) -> ConfigResult:
    """Highest recall among results with precision >= min_precision.

    Ties break to higher precision, then lexicographically smaller config.
    """
    qualifying = [
        r for r in results if _comparable(r) and (r.report.precision or 0.0) >= min_precision
    ]
    if not qualifying:
        raise NoQualifyingConfig(f"no configuration reaches {min_precision}% precision")
    qualifying.sort(
        key=lambda r: (-(r.report.recall or 0.0), -(r.report.precision or 0.0), r.config.as_tuple())
    )
    return qualifying[0]


# ---------------------------------------------------------------------------
# Cross-validation


@dataclass(frozen=True)
class FoldResult:
    fold: int
    config: Config
    train: ScoreReport
    validation: ScoreReport


def cross_validate(
    index: CountsIndex,
    labels: Sequence[LabeledPair],
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    rarity_values: Sequence[float] | None = None,
    confidence_values: Sequence[float] | None = None,
    min_precision: float = DEFAULT_MIN_PRECISION,
) -> list[FoldResult]:
    """Unstratified k-fold cross-validation over the label set.

    Labels are shuffled with the seeded generator and split into near-equal
    folds; each round selects the optimal configuration on the other folds
    and scores it on the held-out fold. Classification always runs over the
    full index.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if folds > len(labels):
        raise ValueError(f"cannot split {len(labels)} labels into {folds} folds")
    ordered = sorted(labels, key=LabeledPair.key)
    rng = np.random.default_rng(seed)
    permutation = rng.permutation(len(ordered))
    parts = np.array_split(permutation, folds)
    results: list[FoldResult] = []
    for fold_number, part in enumerate(parts):
        held_out = set(int(i) for i in part)
        validation = [ordered[i] for i in sorted(held_out)]
        training = [pair for i, pair in enumerate(ordered) if i not in held_out]
        best = select_optimal(
            sweep(index, training, rarity_values, confidence_values), min_precision
        )
        val_report = score_config(index, validation, best.config)
        results.append(
            FoldResult(
                fold=fold_number, config=best.config, train=best.report, validation=val_report
            )
        )
    return results


# ---------------------------------------------------------------------------
# Training-set-size experiment


@dataclass(frozen=True)
class SubsetResult:
    percentage: float
    iteration: int  # 1-based
    config: Config
    subset: ScoreReport
    whole: ScoreReport


@dataclass(frozen=True)
class SubsetExperiment:
    rows: tuple[SubsetResult, ...]
    # percentage -> (harmonic-mean whole-set precision, recall)
    summaries: dict[float, tuple[float | None, float | None]]


def harmonic_mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    if any(v == 0 for v in values):
        return 0.0
    return len(values) / sum(1.0 / v for v in values)


def _sample_index(index: CountsIndex, percentage: float, rng: np.random.Generator) -> CountsIndex:
    keys: list[tuple[str, AccessPath, str]] = []
    counts: list[int] = []
    for pkg in index.packages():
        for path, event in index.pairs(pkg):
            keys.append((pkg, path, event))
            counts.append(index.count(pkg, path, event))
    total = sum(counts)
    n_sample = int(round(total * percentage / 100.0))
    sampled = CountsIndex()
    if total == 0 or n_sample <= 0:
        return sampled
    n_sample = min(n_sample, total)
    drawn = rng.multivariate_hypergeometric(counts, n_sample)
    for (pkg, path, event), count in zip(keys, drawn):
        if count > 0:
            sampled._add(pkg, path, event, int(count), None)
    return sampled


def subset_experiment(
    index: CountsIndex,
    labels: Sequence[LabeledPair],
    percentages: Sequence[float] = DEFAULT_PERCENTAGES,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    rarity_values: Sequence[float] | None = None,
    confidence_values: Sequence[float] | None = None,
    min_precision: float = DEFAULT_MIN_PRECISION,
) -> SubsetExperiment:
    """Resample occurrence records (not unique pairs) at each percentage,
    select the optimal configuration on the subset, then score that
    configuration over the full data."""
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    for percentage in percentages:
        if not 0.0 < percentage <= 100.0:
            raise ValueError(f"percentage must be in (0, 100], got {percentage}")
    rng = np.random.default_rng(seed)
    rows: list[SubsetResult] = []
    summaries: dict[float, tuple[float | None, float | None]] = {}
    for percentage in sorted(set(percentages)):
        whole_reports: list[ScoreReport] = []
        for iteration in range(1, iterations + 1):
            sampled = _sample_index(index, percentage, rng)
            retained = [
                pair
                for pair in labels
                if sampled.has_pair(pair.root_package, pair.path, pair.event)
            ]
            if not retained:
                raise EmptySubset(
                    f"{percentage}% sample (iteration {iteration}) contains no labeled pairs"
                )
            best = select_optimal(
                sweep(sampled, retained, rarity_values, confidence_values), min_precision
            )
            whole_report = score_config(index, labels, best.config)
            whole_reports.append(whole_report)
            rows.append(
                SubsetResult(
                    percentage=percentage,
                    iteration=iteration,
                    config=best.config,
                    subset=best.report,
                    whole=whole_report,
                )
            )
        precisions = [r.precision for r in whole_reports if r.precision is not None]
        recalls = [r.recall for r in whole_reports if r.recall is not None]
        summaries[percentage] = (harmonic_mean(precisions), harmonic_mean(recalls))
    return SubsetExperiment(rows=tuple(rows), summaries=summaries)


# ---------------------------------------------------------------------------
# Report CSVs (layouts mirror the experiment tables; headers carry the
# run parameters so reports are self-describing and reproducible)


def _fmt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.1f}"


def _fmt_opt_int(value: int | None) -> str:
    return "" if value is None else str(value)


def _meta_lines(meta: dict[str, object]) -> str:
    return "".join(f"# {key}={value}\n" for key, value in meta.items())


def _config_cells(config: Config) -> list[str]:
    return [f"{v:g}" for v in config.as_tuple()]


def results_csv_text(results: Sequence[ConfigResult], meta: dict[str, object]) -> str:
    buffer = io.StringIO()
    buffer.write(_meta_lines(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["p_a", "p_e", "p_ca", "p_ce", "precision", "recall", "tp", "fp", "up", "occ_tp", "projects"]
    )
    for result in results:
        report = result.report
        writer.writerow(
            _config_cells(result.config)
            + [
                _fmt_pct(report.precision),
                _fmt_pct(report.recall),
                report.true_positives,
                report.false_positives,
                report.unclassified_incorrect,
                report.tp_occurrence_count,
                _fmt_opt_int(report.tp_project_count),
            ]
        )
    return buffer.getvalue()


def cv_csv_text(results: Sequence[FoldResult], meta: dict[str, object]) -> str:
    buffer = io.StringIO()
    buffer.write(_meta_lines(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "round",
            "p_a",
            "p_e",
            "p_ca",
            "p_ce",
            "train_precision",
            "train_recall",
            "train_tp",
            "val_precision",
            "val_recall",
            "val_tp",
        ]
    )
    for fold in results:
        writer.writerow(
            [fold.fold]
            + _config_cells(fold.config)
            + [
                _fmt_pct(fold.train.precision),
                _fmt_pct(fold.train.recall),
                fold.train.true_positives,
                _fmt_pct(fold.validation.precision),
                _fmt_pct(fold.validation.recall),
                fold.validation.true_positives,
            ]
        )
    return buffer.getvalue()


def subset_csv_text(experiment: SubsetExperiment, meta: dict[str, object]) -> str:
    buffer = io.StringIO()
    buffer.write(_meta_lines(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "percent",
            "iteration",
            "p_a",
            "p_e",
            "p_ca",
            "p_ce",
            "subset_precision",
            "subset_recall",
            "whole_precision",
            "whole_recall",
        ]
    )
    current: float | None = None
    for row in experiment.rows:
        if current is not None and row.percentage != current:
            _write_summary_row(writer, current, experiment.summaries[current])
        current = row.percentage
        writer.writerow(
            [f"{row.percentage:g}", row.iteration]
            + _config_cells(row.config)
            + [
                _fmt_pct(row.subset.precision),
                _fmt_pct(row.subset.recall),
                _fmt_pct(row.whole.precision),
                _fmt_pct(row.whole.recall),
            ]
        )
    if current is not None:
        _write_summary_row(writer, current, experiment.summaries[current])
    return buffer.getvalue()


def _write_summary_row(writer, percentage: float, summary: tuple[float | None, float | None]) -> None:
    hm_precision, hm_recall = summary
    writer.writerow(
        [f"{percentage:g}", "harmean", "", "", "", "", "", "", _fmt_pct(hm_precision), _fmt_pct(hm_recall)]
    )
