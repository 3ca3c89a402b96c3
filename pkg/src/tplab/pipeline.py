"""Corpus-level orchestration: load projects, run the record/mutate/measure
pipeline per project, assemble corpus datasets, correlations, and prediction
scenarios. The CLI and the acceptance suite both drive this module.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import lang, metrics, mutation, stats
from .interp import run_suite
from .learn import (
    ForestConfig, cross_project_eval, from_feature_vectors, train_forest,
    variable_importance_report, within_corpus_eval,
)
from .learn.smote import smote
from .metrics import GRANULARITY_METHOD


def bundled_corpus_path():
    return Path(__file__).parent / "corpus"


@dataclass
class CorpusConfig:
    step_budget: int = mutation.DEFAULT_STEP_BUDGET
    seed: int = 7
    n_trees: int = 100
    cv_folds: int = 10
    cv_repeats: int = 3
    smote_k: int = 5
    smote_ratio: float = 1.0

    def forest_config(self):
        return ForestConfig(n_trees=self.n_trees)


@dataclass
class CorpusManifest:
    projects: list  # [(project_id, directory Path), ...]
    config: CorpusConfig


def load_corpus(path=None):
    """Load a corpus manifest; defaults to the bundled corpus."""
    base = Path(path) if path is not None else bundled_corpus_path()
    manifest_path = base / "corpus.json" if base.is_dir() else base
    with open(manifest_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    root = manifest_path.parent
    projects = []
    seen = set()
    for entry in raw["projects"]:
        pid = entry["project_id"]
        if pid in seen:
            raise ValueError(f"duplicate project id {pid!r} in corpus manifest")
        seen.add(pid)
        directory = root / entry["path"]
        if not directory.is_dir():
            raise FileNotFoundError(f"project directory missing: {directory}")
        projects.append((pid, directory))
    config = CorpusConfig(**raw.get("config", {}))
    return CorpusManifest(projects, config)


def resolve_project(spec):
    """A --project argument: a path, or the name of a bundled project."""
    p = Path(spec)
    if p.exists():
        return p
    candidate = bundled_corpus_path() / spec
    if candidate.is_dir():
        return candidate
    raise FileNotFoundError(f"no such project: {spec}")


@dataclass
class ProjectArtifacts:
    project_id: str
    program: object
    methods: list
    log: object
    matrix: object  # full-matrix mode
    verdicts: list
    method_rows: list = field(default_factory=list)
    pair_rows: list = field(default_factory=list)


def run_project(program, step_budget=mutation.DEFAULT_STEP_BUDGET, workers=1):
    """Record a suite run, evaluate the full matrix, build both datasets."""
    log = run_suite(program)
    matrix = mutation.evaluate_matrix(program, log, mutation.MODE_FULL,
                                      step_budget=step_budget, workers=workers)
    verdicts = mutation.classify_methods(matrix)
    methods = lang.enumerate_methods(program)
    method_rows = metrics.build_method_dataset(log, matrix, methods)
    pair_rows = metrics.build_pair_dataset(log, matrix, methods)
    return ProjectArtifacts(program.project_id, program, methods, log, matrix,
                            verdicts, method_rows, pair_rows)


def run_corpus(manifest, workers=1):
    """ProjectArtifacts for every project, in manifest order."""
    out = []
    for pid, directory in manifest.projects:
        program = lang.load_project(directory)
        out.append(run_project(program, manifest.config.step_budget, workers))
    return out


def timing_phases(program, step_budget=mutation.DEFAULT_STEP_BUDGET):
    """Wall-clock seconds for the four pipeline phases of one project."""
    t0 = time.perf_counter()
    run_suite(program, record=False)
    t1 = time.perf_counter()
    log = run_suite(program)
    t2 = time.perf_counter()
    mutation.evaluate_matrix(program, log, mutation.MODE_EARLY_ABORT,
                             step_budget=step_budget)
    t3 = time.perf_counter()
    mutation.evaluate_matrix(program, log, mutation.MODE_FULL,
                             step_budget=step_budget)
    t4 = time.perf_counter()
    return {
        "plain_run_s": t1 - t0,
        "recorded_run_s": t2 - t1,
        "early_abort_s": t3 - t2,
        "full_matrix_s": t4 - t3,
    }


# ---------------------------------------------------------------------------
# Correlation

def project_correlations(artifacts):
    """(project_id, method, CorrelationResult | None, n) rows for one project;
    a None result flags a degenerate input."""
    xs = [float(r.min_stack_distance) for r in artifacts.method_rows]
    ys = [1.0 if r.label == metrics.LABEL_INEFFECTIVE else 0.0
          for r in artifacts.method_rows]
    rows = []
    for method, fn in ((stats.METHOD_SPEARMAN, stats.spearman),
                       (stats.METHOD_KENDALL, stats.kendall_tau_b)):
        try:
            rows.append((artifacts.project_id, method, fn(xs, ys), len(xs)))
        except (stats.DegenerateInputError, ValueError):
            rows.append((artifacts.project_id, method, None, len(xs)))
    return rows


# ---------------------------------------------------------------------------
# Prediction scenarios

def corpus_dataset(all_artifacts, granularity):
    rows = []
    project_ids = []
    for art in all_artifacts:
        source = art.method_rows if granularity == GRANULARITY_METHOD \
            else art.pair_rows
        rows.extend(source)
        project_ids.extend([art.project_id] * len(source))
    return from_feature_vectors(rows, project_ids)


def run_scenario(dataset, scope, use_smote, target, config: CorpusConfig,
                 workers=1):
    """One appendix-grid scenario over a corpus dataset."""
    scenario = {"scope": scope, "smote": "on" if use_smote else "off",
                "target": target}
    if scope == "within":
        return within_corpus_eval(
            dataset, config.forest_config(), k=config.cv_folds,
            repeats=config.cv_repeats, use_smote=use_smote,
            smote_ratio=config.smote_ratio, smote_k=config.smote_k,
            seed=config.seed, scenario=scenario, workers=workers)
    return cross_project_eval(
        dataset, config.forest_config(), use_smote=use_smote,
        smote_ratio=config.smote_ratio, smote_k=config.smote_k,
        seed=config.seed, scenario=scenario, workers=workers)


def scenario_importance(dataset, use_smote, config: CorpusConfig, workers=1):
    """Importance report from one model trained on the whole scenario
    dataset (max scaled to 1)."""
    train = dataset
    if use_smote:
        train = smote(dataset, k=config.smote_k,
                      target_ratio=config.smote_ratio,
                      seed=config.seed)
    model = train_forest(train, config.forest_config(), seed=config.seed,
                         workers=workers)
    return variable_importance_report(model)


def full_grid(all_artifacts, config: CorpusConfig, workers=1):
    """All eight scenario combinations (granularity x scope x smote)."""
    reports = []
    for granularity in ("method", "pair"):
        dataset = corpus_dataset(all_artifacts, granularity)
        for scope in ("within", "cross"):
            for use_smote in (False, True):
                report = run_scenario(dataset, scope, use_smote, "weighted",
                                      config, workers)
                report.scenario["granularity"] = granularity
                reports.append(report)
    return reports
