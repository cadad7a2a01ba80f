"""Command-line frontend wiring the pipeline stages together.

Subcommands::

    deadlistener mine <project>... --out pairs.jsonl
    deadlistener classify <pairs.jsonl|index.csv> --config 0.1,0.1,0.03,0.01 --out model.json
    deadlistener check <project> --model model.json [--suppress file] [--format text|json]
    deadlistener eval <pairs.jsonl|index.csv> <labels.csv> --mode sweep --out report.csv

Exit codes: 0 success (and no findings), 1 findings exist (check only),
2 operational error. Every file-producing command also writes
``<out>.manifest.json`` recording the inputs, parameters, seed, tool
version, timestamps and diagnostics needed to reproduce the run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .classifier import (
    CONFIDENCE_GRID_DEFAULT,
    Config,
    DomainError,
    OPTIMAL_CONFIG_VALUES,
    RARITY_GRID_DEFAULT,
    classify_corpus,
    load_model,
    write_model,
)
from .corpus import load_counts, write_occurrences
from .evaluation import (
    DEFAULT_FOLDS,
    DEFAULT_ITERATIONS,
    DEFAULT_MIN_PRECISION,
    DEFAULT_PERCENTAGES,
    RNG_NAME,
    DuplicateLabel,
    EmptySubset,
    LabelNotInCorpus,
    LabelSyntaxError,
    NoQualifyingConfig,
    cross_validate,
    cv_csv_text,
    load_labels,
    pareto_front,
    results_csv_text,
    score,
    ConfigResult,
    subset_csv_text,
    subset_experiment,
    sweep,
)
from .miner import MiningDiagnostics, mine_project
from .paths import PathSyntaxError, serialize_path

# Findings on paths at least this long get a low-confidence note: long
# paths are impractical to triage by hand.
LONG_PATH_STEPS = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deadlistener",
        description="Learn event-listener registration models from JavaScript "
        "corpora and flag likely dead listeners.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    mine = sub.add_parser("mine", help="mine listener registrations from project trees")
    mine.add_argument("projects", nargs="+", help="project root directories")
    mine.add_argument("--out", required=True, help="output occurrences JSONL")
    mine.add_argument(
        "--ext",
        default="js",
        help="comma-separated source extensions (default: js; also jsx,mjs,cjs)",
    )

    classify = sub.add_parser("classify", help="build a model from mined pairs")
    classify.add_argument("input", help="occurrences JSONL or aggregated index CSV")
    classify.add_argument(
        "--config",
        default=",".join(str(v) for v in OPTIMAL_CONFIG_VALUES),
        help="thresholds p_a,p_e,p_ca,p_ce (default: the reference optimum)",
    )
    classify.add_argument("--out", required=True, help="output model JSON")

    check = sub.add_parser("check", help="check one project against a model")
    check.add_argument("project", help="project root directory")
    check.add_argument("--model", required=True, help="model JSON from 'classify'")
    check.add_argument("--suppress", help="suppression file (pkg,path,event per line)")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--out", help="write findings to this file instead of stdout")
    check.add_argument("--ext", default="js", help="comma-separated source extensions")

    evaluate = sub.add_parser("eval", help="score models against a labeled validation set")
    evaluate.add_argument("input", help="occurrences JSONL or aggregated index CSV")
    evaluate.add_argument("labels", help="labels CSV (pkg,path,event,label)")
    evaluate.add_argument(
        "--mode", choices=("score", "sweep", "pareto", "cv", "subset"), required=True
    )
    evaluate.add_argument("--out", required=True, help="output report CSV")
    evaluate.add_argument("--config", help="thresholds for --mode score")
    evaluate.add_argument("--grid", help="JSON file with 'rarity' and 'confidence' value lists")
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    evaluate.add_argument(
        "--percentages",
        default=",".join(f"{p:g}" for p in DEFAULT_PERCENTAGES),
        help="comma-separated sampling percentages for --mode subset",
    )
    evaluate.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    evaluate.add_argument("--min-precision", type=float, default=DEFAULT_MIN_PRECISION)
    return parser


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class _ManifestWriter:
    def __init__(self, command: str, argv: list[str], out: str | None):
        self.data: dict = {
            "tool": "deadlistener",
            "version": __version__,
            "command": command,
            "argv": argv,
            "started_utc": _utc_now(),
        }
        self.out = out
        self._t0 = time.perf_counter()

    def finish(self, **extra) -> None:
        self.data.update(extra)
        self.data["finished_utc"] = _utc_now()
        self.data["duration_seconds"] = round(time.perf_counter() - self._t0, 3)
        if self.out:
            target = Path(str(self.out) + ".manifest.json")
            target.write_text(
                json.dumps(self.data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )


def _extensions(spec: str) -> tuple[str, ...]:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    return tuple(p if p.startswith(".") else f".{p}" for p in parts) or (".js",)


def _project_id(root: Path, used: set[str]) -> str:
    name = root.name or str(root)
    if name in used:
        name = str(root.resolve())
    used.add(name)
    return name


def cmd_mine(args, argv: list[str]) -> int:
    manifest = _ManifestWriter("mine", argv, args.out)
    extensions = _extensions(args.ext)
    diagnostics = MiningDiagnostics()
    occurrences = []
    used_ids: set[str] = set()
    for project in args.projects:
        root = Path(project)
        project_occurrences, project_diagnostics = mine_project(
            root, _project_id(root, used_ids), extensions
        )
        occurrences.extend(project_occurrences)
        diagnostics.merge(project_diagnostics)
    count = write_occurrences(args.out, occurrences)
    manifest.finish(
        inputs=[str(Path(p).resolve()) for p in args.projects],
        out=str(Path(args.out).resolve()),
        extensions=list(extensions),
        occurrences=count,
        diagnostics=diagnostics.summary(),
    )
    print(f"mined {count} occurrences from {len(args.projects)} project(s)")
    if diagnostics.parse_errors:
        print(f"note: {len(diagnostics.parse_errors)} file(s) skipped with parse errors", file=sys.stderr)
    return 0


def cmd_classify(args, argv: list[str]) -> int:
    manifest = _ManifestWriter("classify", argv, args.out)
    config = Config.from_string(args.config)
    index = load_counts(args.input)
    model = classify_corpus(index, config)
    write_model(args.out, model)
    anomalous = sum(len(p.anomalous) for p in model.packages.values())
    manifest.finish(
        inputs=[str(Path(args.input).resolve())],
        out=str(Path(args.out).resolve()),
        config=config.as_dict(),
        index=index.summary(),
        anomalous_pairs=anomalous,
    )
    print(f"classified {model.pair_count()} pairs; {anomalous} anomalous")
    return 0


def _load_suppressions(source: str) -> set[tuple[str, str, str]]:
    out: set[tuple[str, str, str]] = set()
    for raw in Path(source).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line == "pkg,path,event":
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ValueError(f"bad suppression line: {raw!r}")
        out.add((parts[0], parts[1], parts[2]))
    return out


def cmd_check(args, argv: list[str]) -> int:
    manifest = _ManifestWriter("check", argv, args.out)
    model = load_model(args.model)
    anomalous = model.anomalous_lookup()
    suppressions = _load_suppressions(args.suppress) if args.suppress else set()
    occurrences, diagnostics = mine_project(args.project, extensions=_extensions(args.ext))
    findings = []
    for occ in occurrences:
        key = (occ.root_package, serialize_path(occ.path), occ.event)
        if key not in anomalous or key in suppressions:
            continue
        record = anomalous[key]
        findings.append(
            {
                "file": occ.file,
                "line": occ.line,
                "pkg": occ.root_package,
                "path": key[1],
                "event": occ.event,
                "k": record.count,
                "n_a": record.path_total,
                "n_e": record.event_total,
                "low_confidence_long_path": len(occ.path.steps) >= LONG_PATH_STEPS,
            }
        )
    findings.sort(key=lambda f: (f["file"], f["line"], f["path"], f["event"]))
    if args.format == "json":
        text = json.dumps({"project": args.project, "findings": findings}, indent=2) + "\n"
    else:
        lines = []
        for f in findings:
            note = "  [low-confidence: long path]" if f["low_confidence_long_path"] else ""
            lines.append(
                f"{f['file']}:{f['line']}: listener for '{f['event']}' on {f['path']} "
                f"is anomalous (k={f['k']}, n_a={f['n_a']}, n_e={f['n_e']}){note}"
            )
        lines.append(f"{len(findings)} finding(s)")
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    manifest.finish(
        inputs=[str(Path(args.project).resolve()), str(Path(args.model).resolve())],
        out=str(Path(args.out).resolve()) if args.out else None,
        findings=len(findings),
        suppressed=len(suppressions),
        diagnostics=diagnostics.summary(),
    )
    return 1 if findings else 0


def _load_grid(source: str | None) -> tuple[list[float] | None, list[float] | None]:
    if source is None:
        return None, None
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    rarity = data.get("rarity")
    confidence = data.get("confidence")
    if not isinstance(rarity, list) or not isinstance(confidence, list):
        raise ValueError("grid file must contain 'rarity' and 'confidence' lists")
    return [float(v) for v in rarity], [float(v) for v in confidence]


def cmd_eval(args, argv: list[str]) -> int:
    manifest = _ManifestWriter("eval", argv, args.out)
    index = load_counts(args.input)
    labels = load_labels(args.labels)
    rarity, confidence = _load_grid(args.grid)
    meta: dict[str, object] = {
        "tool": f"deadlistener {__version__}",
        "mode": args.mode,
        "labels": len(labels),
        "rng": RNG_NAME,
        "seed": args.seed,
        "rarity_grid": ",".join(f"{v:g}" for v in (rarity or RARITY_GRID_DEFAULT)),
        "confidence_grid": ",".join(f"{v:g}" for v in (confidence or CONFIDENCE_GRID_DEFAULT)),
        "min_precision": f"{args.min_precision:g}",
    }
    if args.mode == "score":
        if not args.config:
            raise DomainError("--mode score requires --config")
        config = Config.from_string(args.config)
        report = score(classify_corpus(index, config), labels, index)
        text = results_csv_text([ConfigResult(config, report)], meta)
    elif args.mode == "sweep":
        text = results_csv_text(sweep(index, labels, rarity, confidence), meta)
    elif args.mode == "pareto":
        results = sweep(index, labels, rarity, confidence)
        front = pareto_front(results)
        meta["swept_configs"] = len(results)
        meta["excluded_undefined_precision"] = sum(
            1 for r in results if r.report.precision is None or r.report.recall is None
        )
        text = results_csv_text(front, meta)
    elif args.mode == "cv":
        meta["folds"] = args.folds
        folds = cross_validate(
            index, labels, args.folds, args.seed, rarity, confidence, args.min_precision
        )
        text = cv_csv_text(folds, meta)
    else:  # subset
        percentages = [float(p) for p in args.percentages.split(",") if p.strip()]
        meta["percentages"] = ",".join(f"{p:g}" for p in percentages)
        meta["iterations"] = args.iterations
        experiment = subset_experiment(
            index,
            labels,
            percentages,
            args.iterations,
            args.seed,
            rarity,
            confidence,
            args.min_precision,
        )
        text = subset_csv_text(experiment, meta)
    Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    manifest.finish(
        inputs=[str(Path(args.input).resolve()), str(Path(args.labels).resolve())],
        out=str(Path(args.out).resolve()),
        mode=args.mode,
        seed=args.seed,
        index=index.summary(),
    )
    print(f"wrote {args.out}")
    return 0


_OPERATIONAL_ERRORS = (
    DomainError,
    PathSyntaxError,
    LabelSyntaxError,
    DuplicateLabel,
    LabelNotInCorpus,
    NoQualifyingConfig,
    EmptySubset,
    OSError,
    ValueError,
    json.JSONDecodeError,
)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "mine": cmd_mine,
        "classify": cmd_classify,
        "check": cmd_check,
        "eval": cmd_eval,
    }
    try:
        return handlers[args.command](args, argv)
    except _OPERATIONAL_ERRORS as exc:
        print(f"deadlistener {args.command}: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
