"""`tp` command line: run | mutate | correlate | predict | report.

Exit codes: 0 success, 2 input error, 3 red test suite, 4 internal error.
All randomness flows from --seed; repeated invocations with the same inputs
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from . import lang, metrics, mutation, pipeline, report, stats
from .interp import run_suite, write_tests_csv, write_traces_csv
from .learn import SingleProjectError, write_importance_csv
from .metrics import write_dataset_csv


def _out_dir(args, *parts):
    d = Path(args.out).joinpath(*parts)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load_project(args):
    directory = pipeline.resolve_project(args.project)
    return lang.load_project(directory)


def cmd_run(args):
    program = _load_project(args)
    out = _out_dir(args, program.project_id)
    log = run_suite(program)
    write_traces_csv(log, out / "traces.csv")
    write_tests_csv(log, out / "tests.csv")
    if not program.tests:
        print(f"warning: project {program.project_id} has no tests", file=sys.stderr)
    failing = [o.test_id for o in log.outcomes if o.status != "Pass"]
    if failing:
        print(f"error: red test suite: {', '.join(failing)}", file=sys.stderr)
        return 3
    print(f"{program.project_id}: {len(log.traces)} trace rows, "
          f"{len(log.outcomes)} tests -> {out}")
    return 0


def cmd_mutate(args):
    program = _load_project(args)
    out = _out_dir(args, program.project_id)
    log = run_suite(program)
    matrix = mutation.evaluate_matrix(program, log, args.mode,
                                      step_budget=args.step_budget,
                                      workers=args.workers)
    mutation.write_matrix_csv(matrix, out / "matrix.csv")
    if args.mode == mutation.MODE_FULL:
        verdicts = mutation.classify_methods(matrix)
        mutation.write_verdicts_csv(verdicts, out / "verdicts.csv")
    timing = pipeline.timing_phases(program, step_budget=args.step_budget)
    with open(out / "timing.json", "w", encoding="utf-8") as fh:
        json.dump(timing, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{program.project_id}: {len(matrix.rows)} matrix rows ({args.mode})")
    for phase in ("plain_run_s", "recorded_run_s", "early_abort_s", "full_matrix_s"):
        print(f"  {phase:<15} {timing[phase]:.4f}")
    return 0


def _write_project_artifacts(art, out_root):
    out = out_root / art.project_id
    out.mkdir(parents=True, exist_ok=True)
    write_traces_csv(art.log, out / "traces.csv")
    write_tests_csv(art.log, out / "tests.csv")
    mutation.write_matrix_csv(art.matrix, out / "matrix.csv")
    mutation.write_verdicts_csv(art.verdicts, out / "verdicts.csv")
    write_dataset_csv(art.method_rows, out / "dataset_method.csv")
    write_dataset_csv(art.pair_rows, out / "dataset_pair.csv")
    if art.method_rows:
        buckets = stats.distance_bucket_report(art.method_rows)
        stats.write_buckets_csv(buckets, out / "buckets.csv")


def cmd_correlate(args):
    manifest = pipeline.load_corpus(args.corpus)
    out_root = _out_dir(args)
    artifacts = pipeline.run_corpus(manifest, workers=args.workers)
    rows = []
    for art in artifacts:
        _write_project_artifacts(art, out_root)
        rows.extend(pipeline.project_correlations(art))
    stats.write_correlation_csv(rows, out_root / "correlation.csv")
    degenerate = sum(1 for _, _, r, _ in rows if r is None)
    print(f"correlation.csv: {len(rows)} rows over "
          f"{len(artifacts)} projects ({degenerate} degenerate)")
    return 0


def cmd_predict(args):
    manifest = pipeline.load_corpus(args.corpus)
    config = manifest.config
    if args.seed is not None:
        config.seed = args.seed
    out_root = _out_dir(args)
    artifacts = pipeline.run_corpus(manifest, workers=args.workers)
    dataset = pipeline.corpus_dataset(artifacts, args.granularity)
    use_smote = args.smote == "on"
    rep = pipeline.run_scenario(dataset, args.scope, use_smote, args.target,
                                config, workers=args.workers)
    rep.scenario["granularity"] = args.granularity
    with open(out_root / "eval_report.json", "w", encoding="utf-8") as fh:
        fh.write(rep.to_json())
    importance = pipeline.scenario_importance(dataset, use_smote, config,
                                              workers=args.workers)
    write_importance_csv(importance, out_root / "importance.csv")
    h = rep.headline
    print(f"{args.granularity}/{args.scope}/smote={args.smote}: "
          f"precision {h['precision']:.3f} recall {h['recall']:.3f} "
          f"f_score {h['f_score']:.3f} "
          f"(folds {rep.folds_evaluated} evaluated, {rep.folds_skipped} skipped)")
    return 0


def cmd_report(args):
    manifest = pipeline.load_corpus(args.corpus)
    config = manifest.config
    if args.seed is not None:
        config.seed = args.seed
    out_root = _out_dir(args)
    artifacts = pipeline.run_corpus(manifest, workers=args.workers)
    rows = []
    for art in artifacts:
        _write_project_artifacts(art, out_root)
        rows.extend(pipeline.project_correlations(art))
    stats.write_correlation_csv(rows, out_root / "correlation.csv")
    dataset = pipeline.corpus_dataset(artifacts, metrics.GRANULARITY_METHOD)
    importance = pipeline.scenario_importance(dataset, False, config)
    write_importance_csv(importance, out_root / "importance.csv")
    text = report.summary_text(artifacts, rows)
    (out_root / "report.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    if not args.no_figures:
        written = report.render_figures(artifacts, importance, out_root)
        print(f"figures: {', '.join(str(p) for p in written)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tp",
        description="Stack-distance recording, extreme mutation analysis, "
                    "and mutation-outcome prediction for .tl projects.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, corpus=False):
        p.add_argument("--out", default="tp_out", help="output directory")
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes for mutant/tree evaluation")
        if corpus:
            p.add_argument("--corpus", default=None,
                           help="corpus directory or corpus.json "
                                "(default: bundled corpus)")

    p = sub.add_parser("run", help="run a project's tests with recording")
    p.add_argument("--project", required=True,
                   help="project directory, project.json, or bundled name")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mutate", help="evaluate the mutation matrix")
    p.add_argument("--project", required=True)
    p.add_argument("--mode", choices=[mutation.MODE_FULL, mutation.MODE_EARLY_ABORT],
                   default=mutation.MODE_FULL)
    p.add_argument("--step-budget", type=int, default=mutation.DEFAULT_STEP_BUDGET)
    common(p)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("correlate", help="distance/outcome correlation per project")
    common(p, corpus=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("predict", help="train and evaluate the classifier")
    p.add_argument("--granularity", choices=["method", "pair"], default="method")
    p.add_argument("--scope", choices=["within", "cross"], default="within")
    p.add_argument("--smote", choices=["on", "off"], default="off")
    p.add_argument("--target", choices=["weighted", "ineffective"],
                   default="weighted")
    p.add_argument("--seed", type=int, default=None,
                   help="override the corpus seed")
    common(p, corpus=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="combined summary tables and figures")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-figures", action="store_true")
    common(p, corpus=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except mutation.RedTestSuiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (lang.SourceError, FileNotFoundError, ValueError,
            json.JSONDecodeError, mutation.WrongModeError,
            SingleProjectError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
