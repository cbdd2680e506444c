"""Command-line entry point.

Subcommands::

    quest evaluate FILE [--baseline]     score one file (11 completions, or 1)
    quest optimize FILE                  run the improvement loop on one file
    quest proxy FILE                     pylint/radon/bandit scores (Python)
    quest batch MANIFEST --mode MODE     process a corpus manifest
    quest analyze RUNS_DIR               deltas CSV, correlations, summary

Global flags (before the subcommand) select the completion backend and
override config values; precedence is flag > config file > default.
Reports go next to the input file unless ``--out`` says otherwise.

Exit codes: 0 success, 1 batch finished with per-entry failures, 2 failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    DeltaRow,
    correlation_report,
    delta_series,
    summarize_runs,
    trajectory,
    write_delta_csv,
)
from .catalog import StatementCatalog, default_catalog, load_statement_catalog
from .config import QuestConfig, apply_overrides, load_config
from .corpus import load_manifest, run_batch
from .errors import QuestError, UnsupportedLanguage
from .evaluator import Evaluator
from .gateway import LlmGateway
from .models import JAVASCRIPT, PYTHON, CodeUnit, OptimizationRun, IterationStatus
from .optimizer import OptimizationAborted, Optimizer
from .proxies import proxy_report
from .reports import (
    assessment_document,
    baseline_document,
    load_json,
    proxy_document,
    render_score,
    run_document,
    run_from_document,
    write_json_atomic,
    write_text_atomic,
)

_LANG_BY_EXT = {".py": PYTHON, ".js": JAVASCRIPT}
_EXT_BY_LANG = {PYTHON: ".py", JAVASCRIPT: ".js"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quest",
        description="Chat-model code quality scoring and iterative improvement.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="PATH", help="INI config file")
    parser.add_argument(
        "--backend",
        choices=("http", "record", "replay"),
        default="http",
        help="completion backend (default: http)",
    )
    parser.add_argument("--transcript", metavar="PATH", help="JSONL transcript for record/replay")
    parser.add_argument("--parallelism", type=int, metavar="N", help="concurrent dimension queries")
    parser.add_argument(
        "--self-consistency", type=int, metavar="K", help="verdict draws per dimension"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="assess one code file")
    evaluate.add_argument("file", metavar="FILE")
    evaluate.add_argument("--language", choices=sorted(_LANG_BY_EXT.values()))
    evaluate.add_argument(
        "--baseline", action="store_true", help="single-prompt assessment instead of ten dimensions"
    )
    evaluate.add_argument("--catalog", metavar="PATH", help="custom statement catalog (JSON)")
    evaluate.add_argument("--out", metavar="PATH", help="report path")

    optimize = sub.add_parser("optimize", help="iteratively improve one code file")
    optimize.add_argument("file", metavar="FILE")
    optimize.add_argument("--language", choices=sorted(_LANG_BY_EXT.values()))
    optimize.add_argument("--max-iters", type=int, metavar="N")
    optimize.add_argument("--target-score", type=float, metavar="X")
    optimize.add_argument(
        "--tests", metavar="CMD", help="functional test command; {code} expands to the candidate path"
    )
    optimize.add_argument("--catalog", metavar="PATH")
    optimize.add_argument("--out", metavar="PATH", help="run report path")

    proxy = sub.add_parser("proxy", help="rule-based tool scores for one Python file")
    proxy.add_argument("file", metavar="FILE")
    proxy.add_argument("--out", metavar="PATH")

    batch = sub.add_parser("batch", help="process every entry of a corpus manifest")
    batch.add_argument("manifest", metavar="MANIFEST")
    batch.add_argument("--mode", choices=("evaluate", "optimize", "proxy"), required=True)
    batch.add_argument("--out-dir", metavar="DIR", required=True)
    batch.add_argument("--max-iters", type=int, metavar="N")
    batch.add_argument("--target-score", type=float, metavar="X")
    batch.add_argument("--catalog", metavar="PATH")

    analyze = sub.add_parser("analyze", help="post-process run reports in a directory")
    analyze.add_argument("runs_dir", metavar="RUNS_DIR")
    analyze.add_argument("--out", metavar="DIR", help="output directory (default: RUNS_DIR/analysis)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except QuestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace) -> int:
    config = apply_overrides(
        load_config(args.config),
        self_consistency=args.self_consistency,
        parallelism=args.parallelism,
    )
    handler = {
        "evaluate": _cmd_evaluate,
        "optimize": _cmd_optimize,
        "proxy": _cmd_proxy,
        "batch": _cmd_batch,
        "analyze": _cmd_analyze,
    }[args.command]
    return handler(args, config)


# -- shared wiring ------------------------------------------------------


def _make_evaluator(args: argparse.Namespace, config: QuestConfig) -> Evaluator:
    gateway = LlmGateway(mode=args.backend, transcript=args.transcript, http=config.http)
    return Evaluator(
        gateway,
        config.model,
        self_consistency=config.self_consistency,
        parallelism=config.parallelism,
    )


def _load_catalog(args: argparse.Namespace) -> StatementCatalog:
    if getattr(args, "catalog", None):
        return load_statement_catalog(args.catalog)
    return default_catalog()


def _load_unit(args: argparse.Namespace) -> CodeUnit:
    path = Path(args.file)
    if not path.is_file():
        raise QuestError(f"no such file: {path}")
    language = getattr(args, "language", None) or _LANG_BY_EXT.get(path.suffix)
    if language is None:
        raise UnsupportedLanguage(
            f"cannot infer language from {path.suffix!r}; pass --language"
        )
    return CodeUnit(
        id=path.name,
        language=language,
        source=path.read_text(encoding="utf-8"),
        test_command=getattr(args, "tests", None),
    )


def _out_path(args: argparse.Namespace, suffix: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(args.file).with_suffix("").with_name(Path(args.file).stem + suffix)


# -- commands -----------------------------------------------------------


def _cmd_evaluate(args: argparse.Namespace, config: QuestConfig) -> int:
    unit = _load_unit(args)
    evaluator = _make_evaluator(args, config)
    if args.baseline:
        reply = evaluator.evaluate_baseline(unit)
        out = _out_path(args, ".baseline.json")
        write_json_atomic(out, baseline_document(unit, reply))
        print(f"baseline score: {render_score(reply.score)}")
        print(f"report: {out}")
        return 0
    assessment = evaluator.evaluate(unit, _load_catalog(args))
    out = _out_path(args, ".assessment.json")
    write_json_atomic(out, assessment_document(unit, assessment))
    for dim in assessment.dimensions:
        print(f"{dim.dimension:<16} {render_score(dim.score):>5}")
    print(f"{'Overall':<16} {render_score(assessment.overall):>5}")
    print(f"report: {out}")
    return 0


_STATUS_LINE = {
    IterationStatus.ACCEPTED: "accepted",
    IterationStatus.REJECTED_VALIDATION: "rejected (validation)",
    IterationStatus.REJECTED_SCORE: "rejected (score)",
    IterationStatus.REJECTED_PARSE: "rejected (unparseable reply)",
}


def _print_run(run: OptimizationRun) -> None:
    for attempt in run.attempts:
        line = f"iteration {attempt.index}: {_STATUS_LINE[attempt.status]}"
        if attempt.assessment is not None:
            line += f", overall {render_score(attempt.assessment.overall)}"
        print(line)
    print(
        f"overall: {render_score(run.initial_assessment.overall)} -> "
        f"{render_score(run.final_assessment.overall)} "
        f"({len(run.accepted)} accepted of {len(run.attempts)} attempts)"
    )


def _improved_path(report_path: Path, extension: str) -> Path:
    name = report_path.name
    for suffix in (".run.json", ".json"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
            break
    return report_path.with_name(name + ".improved" + extension)


def _write_run(args: argparse.Namespace, run: OptimizationRun) -> None:
    out = _out_path(args, ".run.json")
    write_json_atomic(out, run_document(run))
    improved = _improved_path(out, _EXT_BY_LANG[run.final_code.language])
    write_text_atomic(improved, run.final_code.source)
    print(f"report: {out}")
    print(f"improved code: {improved}")


def _cmd_optimize(args: argparse.Namespace, config: QuestConfig) -> int:
    unit = _load_unit(args)
    optimizer_config = config.optimizer
    if args.max_iters is not None:
        optimizer_config = _replace_optimizer(optimizer_config, max_iterations=args.max_iters)
    if args.target_score is not None:
        optimizer_config = _replace_optimizer(optimizer_config, target_score=args.target_score)
    if args.tests:
        optimizer_config = _replace_optimizer(optimizer_config, run_tests=True)
    optimizer = Optimizer(_make_evaluator(args, config), config.validation)
    try:
        run = optimizer.optimize(unit, optimizer_config, _load_catalog(args))
    except OptimizationAborted as exc:
        _print_run(exc.partial_run)
        _write_run(args, exc.partial_run)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_run(run)
    _write_run(args, run)
    return 0


def _replace_optimizer(config, **changes):
    from dataclasses import replace

    return replace(config, **changes)


def _cmd_proxy(args: argparse.Namespace, config: QuestConfig) -> int:
    path = Path(args.file)
    if not path.is_file():
        raise QuestError(f"no such file: {path}")
    unit = CodeUnit(id=path.name, language=PYTHON, source=path.read_text(encoding="utf-8"))
    report = proxy_report(unit.source, unit.language, config.proxy)
    out = _out_path(args, ".proxy.json")
    write_json_atomic(out, proxy_document(unit, report))
    print(f"pylint   {report.pylint:.2f}")
    print(f"radon MI {report.radon_mi:.2f}")
    print(f"bandit   {report.bandit:.2f}")
    print(f"overall  {report.overall:.2f}")
    print(f"report: {out}")
    return 0


def _cmd_batch(args: argparse.Namespace, config: QuestConfig) -> int:
    manifest = load_manifest(args.manifest)
    catalog = _load_catalog(args)
    optimizer_config = config.optimizer
    if args.max_iters is not None:
        optimizer_config = _replace_optimizer(optimizer_config, max_iterations=args.max_iters)
    if args.target_score is not None:
        optimizer_config = _replace_optimizer(optimizer_config, target_score=args.target_score)

    evaluator = optimizer = None
    if args.mode in ("evaluate", "optimize"):
        evaluator = _make_evaluator(args, config)
    if args.mode == "optimize":
        optimizer = Optimizer(evaluator, config.validation)

    summary = run_batch(
        manifest,
        args.mode,
        args.out_dir,
        evaluator=evaluator,
        optimizer=optimizer,
        optimizer_config=optimizer_config,
        proxy_settings=config.proxy,
        catalog=catalog,
    )
    for entry_id in summary.succeeded:
        print(f"ok   {entry_id}")
    for entry_id, message in summary.failed.items():
        print(f"FAIL {entry_id}: {message}")
    print(f"{len(summary.succeeded)} succeeded, {len(summary.failed)} failed")
    return 0 if summary.all_ok else 1


def _companion_scores(path: Path) -> dict[str, float]:
    if not path.is_file():
        return {}
    data = load_json(path)
    scores = data.get("scores")
    if not isinstance(scores, dict):
        raise QuestError(f"{path}: expected an object with a 'scores' mapping")
    return {str(label): float(value) for label, value in scores.items()}


def _cmd_analyze(args: argparse.Namespace, config: QuestConfig) -> int:
    runs_dir = Path(args.runs_dir)
    run_paths = sorted(runs_dir.glob("*.run.json"))
    if not run_paths:
        print(f"error: no *.run.json reports in {runs_dir}", file=sys.stderr)
        return 2
    out_dir = Path(args.out) if args.out else runs_dir / "analysis"
    out_dir.mkdir(parents=True, exist_ok=True)

    runs = []
    rows: list[DeltaRow] = []
    for path in run_paths:
        run = run_from_document(load_json(path))
        runs.append(run)
        stem = path.name[: -len(".run.json")]
        points = trajectory(run)
        labels = [p.label for p in points]
        quest_deltas = delta_series(
            run.initial_code.id, "codequest", [p.score for p in points]
        ).deltas

        method_deltas: dict[str, list[float | None]] = {}
        for method, companion in (
            ("baseline", path.with_name(f"{stem}.baseline.json")),
            ("proxy", path.with_name(f"{stem}.proxy.json")),
        ):
            scores = _companion_scores(companion)
            deltas: list[float | None] = []
            for prev_label, label in zip(labels, labels[1:]):
                if prev_label in scores and label in scores:
                    deltas.append(scores[label] - scores[prev_label])
                else:
                    deltas.append(None)
            method_deltas[method] = deltas

        for i in range(1, len(points)):
            rows.append(
                DeltaRow(
                    example_id=run.initial_code.id,
                    iteration=i,
                    codequest=quest_deltas[i - 1],
                    baseline=method_deltas["baseline"][i - 1],
                    proxy=method_deltas["proxy"][i - 1],
                )
            )

    csv_path = out_dir / "deltas.csv"
    write_delta_csv(rows, csv_path)

    correlations = {}
    for name, pick in (
        ("proxy_vs_codequest", lambda r: (r.proxy, r.codequest)),
        ("proxy_vs_baseline", lambda r: (r.proxy, r.baseline)),
    ):
        pairs = [(x, y) for x, y in map(pick, rows) if x is not None and y is not None]
        if len(pairs) < 3:
            correlations[name] = {"error": f"needs at least 3 paired deltas, have {len(pairs)}"}
            continue
        try:
            result = correlation_report([p[0] for p in pairs], [p[1] for p in pairs])
        except ValueError as exc:
            correlations[name] = {"error": str(exc)}
            continue
        correlations[name] = result.to_dict()
    correlations_path = out_dir / "correlations.json"
    write_json_atomic(correlations_path, correlations)

    summary_path = out_dir / "summary.json"
    write_json_atomic(summary_path, summarize_runs(runs).to_dict())

    print(f"{len(runs)} runs, {len(rows)} delta rows")
    for path in (csv_path, correlations_path, summary_path):
        print(f"wrote: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
