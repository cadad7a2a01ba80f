#!/usr/bin/env python3
"""Run the full evaluation battery over a mined corpus.

Given occurrence JSONL and a labels CSV (e.g. from
make_synthetic_corpus.py), this drives the four experiment modes and the
per-project pipeline end to end:

  1. grid sweep over all rarity x confidence configurations,
  2. Pareto front of the sweep,
  3. seeded k-fold cross-validation,
  4. seeded training-set-size subsampling,
  5. classify at the sweep optimum and print the anomalous pairs.

Usage:
    python scripts/make_synthetic_corpus.py --out synthetic
    python scripts/run_experiments.py --pairs synthetic/pairs.jsonl \
        --labels synthetic/labels.csv --out synthetic/reports --seed 7
"""

import argparse
from pathlib import Path

from deadlistener.classifier import classify_corpus
from deadlistener.corpus import aggregate, read_occurrences
from deadlistener.evaluation import (
    EmptySubset,
    NoQualifyingConfig,
    SubsetExperiment,
    cross_validate,
    cv_csv_text,
    load_labels,
    pareto_front,
    results_csv_text,
    select_optimal,
    subset_csv_text,
    subset_experiment,
    sweep,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", required=True, help="occurrences JSONL")
    parser.add_argument("--labels", required=True, help="labels CSV")
    parser.add_argument("--out", default="reports", help="report directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--folds", type=int, default=10)
    parser.add_argument(
        "--percentages", default="10,25,50", help="sampling percentages for the subset experiment"
    )
    parser.add_argument("--iterations", type=int, default=5)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = aggregate(read_occurrences(args.pairs))
    labels = load_labels(args.labels)
    print(f"index: {index.summary()}, labels: {len(labels)}")

    meta_base = {"tool": "deadlistener experiments", "seed": args.seed, "labels": len(labels)}

    results = sweep(index, labels)
    (out / "sweep.csv").write_text(
        results_csv_text(results, {**meta_base, "mode": "sweep"}), newline="\n"
    )
    print(f"sweep: {len(results)} configurations -> {out / 'sweep.csv'}")

    front = pareto_front(results)
    (out / "pareto.csv").write_text(
        results_csv_text(front, {**meta_base, "mode": "pareto"}), newline="\n"
    )
    print(f"pareto front: {len(front)} configurations -> {out / 'pareto.csv'}")

    best = select_optimal(results)
    report = best.report
    print(
        f"optimal config {best.config}: precision={report.precision:.1f}% "
        f"recall={report.recall:.1f}% (tp={report.true_positives}, fp={report.false_positives})"
    )

    folds = cross_validate(index, labels, folds=args.folds, seed=args.seed)
    (out / "cv.csv").write_text(
        cv_csv_text(folds, {**meta_base, "mode": "cv", "folds": args.folds}), newline="\n"
    )
    print(f"cross-validation: {len(folds)} rounds -> {out / 'cv.csv'}")

    # Small corpora can produce samples with no (or only unflaggable)
    # labeled pairs; run each percentage separately so one failing
    # percentage does not lose the others.
    percentages = [float(p) for p in args.percentages.split(",") if p.strip()]
    rows: list = []
    summaries: dict = {}
    for percentage in sorted(percentages):
        try:
            part = subset_experiment(
                index, labels, percentages=[percentage], iterations=args.iterations, seed=args.seed
            )
        except (EmptySubset, NoQualifyingConfig) as exc:
            print(f"  {percentage:g}% sample skipped: {exc}")
            continue
        rows.extend(part.rows)
        summaries.update(part.summaries)
    experiment = SubsetExperiment(rows=tuple(rows), summaries=summaries)
    (out / "subset.csv").write_text(
        subset_csv_text(
            experiment,
            {**meta_base, "mode": "subset", "percentages": args.percentages,
             "iterations": args.iterations},
        ),
        newline="\n",
    )
    print(f"subset experiment: {len(experiment.rows)} rows -> {out / 'subset.csv'}")
    for percentage, (hm_precision, hm_recall) in sorted(experiment.summaries.items()):
        precision_text = "-" if hm_precision is None else f"{hm_precision:.1f}%"
        recall_text = "-" if hm_recall is None else f"{hm_recall:.1f}%"
        print(f"  {percentage:g}% sample: harmonic-mean precision {precision_text}, recall {recall_text}")

    model = classify_corpus(index, best.config)
    print("anomalous pairs at the optimum:")
    for pkg in sorted(model.packages):
        for record in model.packages[pkg].anomalous:
            print(
                f"  {pkg}: {record.path} x '{record.event}' "
                f"(k={record.count}, n_a={record.path_total}, n_e={record.event_total})"
            )


if __name__ == "__main__":
    main()
