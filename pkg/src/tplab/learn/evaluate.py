"""Evaluation harness: repeated stratified k-fold cross-validation,
leave-one-project-out evaluation, and weighted/per-class metrics.

Confusion counts are micro-aggregated over all folds and repeats before any
metric is computed (flagged as "aggregation": "micro" in reports). Weighted
metrics average the per-class values with class-support weights:
sum(metric_c * support_c) / total. Folds whose test part does not contain
both classes, or whose training part cannot be trained or oversampled, are
skipped and counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import CLASS_LABELS
from .forest import ForestConfig, SingleClassDatasetError, predict, train_forest
from .smote import TooFewMinoritySamplesError, smote

TARGET_WEIGHTED = "weighted"
TARGET_INEFFECTIVE = "ineffective"


class SingleProjectError(Exception):
    pass


@dataclass
class EvalReport:
    scenario: dict
    headline: dict
    weighted: dict
    per_class: dict
    confusion: list  # rows = actual, cols = predicted, order CLASS_LABELS
    class_order: tuple
    n_rows: int
    folds_evaluated: int
    folds_skipped: int
    synthetic_in_test_folds: int
    config: dict
    per_project: list | None = None

    def to_json(self):
        payload = {
            "scenario": self.scenario,
            "headline": self.headline,
            "weighted": self.weighted,
            "per_class": self.per_class,
            "confusion": self.confusion,
            "class_order": list(self.class_order),
            "n_rows": self.n_rows,
            "folds_evaluated": self.folds_evaluated,
            "folds_skipped": self.folds_skipped,
            "synthetic_in_test_folds": self.synthetic_in_test_folds,
            "config": self.config,
            "per_project": self.per_project,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def derive_seed(*parts):
    """Stable child seed from integer parts (documented stream scheme)."""
    return int(np.random.SeedSequence(tuple(int(p) for p in parts))
               .generate_state(1, np.uint64)[0])


def confusion_matrix(y_true, y_pred):
    cm = np.zeros((2, 2), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[int(t), int(p)] += 1
    return cm


def metrics_from_confusion(cm):
    """(per_class, weighted) dicts; 0/0 ratios are reported as 0.0."""
    cm = np.asarray(cm)
    total = int(cm.sum())
    per_class = {}
    for c, label in enumerate(CLASS_LABELS):
        tp = int(cm[c, c])
        fp = int(cm[:, c].sum()) - tp
        fn = int(cm[c, :].sum()) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f_score = 2 * precision * recall / (precision + recall) \
            if precision + recall else 0.0
        per_class[label] = {"precision": precision, "recall": recall,
                            "f_score": f_score, "support": tp + fn}
    weighted = {}
    for metric in ("precision", "recall", "f_score"):
        if total:
            weighted[metric] = sum(
                per_class[label][metric] * per_class[label]["support"]
                for label in CLASS_LABELS) / total
        else:
            weighted[metric] = 0.0
    return per_class, weighted


def stratified_folds(y, k, rng):
    """k folds of test indices, class ratios preserved by round-robin deal."""
    folds = [[] for _ in range(k)]
    for c in range(len(CLASS_LABELS)):
        idx = np.nonzero(y == c)[0]
        perm = rng.permutation(idx)
        for pos, row in enumerate(perm):
            folds[pos % k].append(int(row))
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def _config_dict(config, k, repeats, use_smote, smote_ratio, smote_k, seed):
    return {
        "n_trees": config.n_trees,
        "max_features": config.max_features,
        "min_leaf": config.min_leaf,
        "bootstrap": config.bootstrap,
        "k_folds": k,
        "repeats": repeats,
        "smote": bool(use_smote),
        "smote_ratio": smote_ratio,
        "smote_k": smote_k,
        "seed": seed,
        "aggregation": "micro",
    }


def _cv_counts(dataset, config, k, repeats, use_smote, smote_ratio, smote_k,
               seed, workers):
    """Micro-aggregated confusion over all folds of all repeats."""
    cm = np.zeros((2, 2), dtype=np.int64)
    evaluated = skipped = leaks = 0
    for rep in range(repeats):
        rng = np.random.default_rng(np.random.SeedSequence((seed, rep)))
        folds = stratified_folds(dataset.y, k, rng)
        all_idx = np.arange(dataset.n_rows)
        for f_idx, test_idx in enumerate(folds):
            if test_idx.size == 0 or np.unique(dataset.y[test_idx]).size < 2:
                skipped += 1
                continue
            leaks += int(dataset.synthetic[test_idx].sum())
            train_idx = np.setdiff1d(all_idx, test_idx)
            if np.unique(dataset.y[train_idx]).size < 2:
                skipped += 1
                continue
            train = dataset.subset(train_idx)
            if use_smote:
                try:
                    train = smote(train, k=smote_k, target_ratio=smote_ratio,
                                  seed=derive_seed(seed, rep, f_idx, 7))
                except TooFewMinoritySamplesError:
                    skipped += 1
                    continue
            model = train_forest(train, config,
                                 seed=derive_seed(seed, rep, f_idx, 11),
                                 workers=workers)
            labels, _ = predict(model, dataset.x[test_idx])
            cm += confusion_matrix(dataset.y[test_idx], labels)
            evaluated += 1
    return cm, evaluated, skipped, leaks


def _assemble(scenario, cm, evaluated, skipped, leaks, n_rows, config_dict,
              per_project=None):
    per_class, weighted = metrics_from_confusion(cm)
    target = scenario.get("target", TARGET_WEIGHTED)
    headline = weighted if target == TARGET_WEIGHTED \
        else {m: per_class[TARGET_INEFFECTIVE][m]
              for m in ("precision", "recall", "f_score")}
    return EvalReport(
        scenario=scenario,
        headline=headline,
        weighted=weighted,
        per_class=per_class,
        confusion=[[int(v) for v in row] for row in cm],
        class_order=CLASS_LABELS,
        n_rows=n_rows,
        folds_evaluated=evaluated,
        folds_skipped=skipped,
        synthetic_in_test_folds=leaks,
        config=config_dict,
        per_project=per_project,
    )


def cross_validate(dataset, config=ForestConfig(), k=10, repeats=3,
                   use_smote=False, smote_ratio=1.0, smote_k=5, seed=0,
                   scenario=None, workers=1):
    """Repeated stratified k-fold CV on one dataset."""
    scenario = dict(scenario or {})
    scenario.setdefault("scope", "within")
    scenario.setdefault("smote", "on" if use_smote else "off")
    cm, evaluated, skipped, leaks = _cv_counts(
        dataset, config, k, repeats, use_smote, smote_ratio, smote_k, seed, workers)
    return _assemble(scenario, cm, evaluated, skipped, leaks, dataset.n_rows,
                     _config_dict(config, k, repeats, use_smote, smote_ratio,
                                  smote_k, seed))


def _unique_groups(groups):
    seen = []
    for g in groups:
        if g not in seen:
            seen.append(g)
    return seen


def within_corpus_eval(dataset, config=ForestConfig(), k=10, repeats=3,
                       use_smote=False, smote_ratio=1.0, smote_k=5, seed=0,
                       scenario=None, workers=1):
    """Per-project repeated CV, micro-pooled into one corpus report."""
    scenario = dict(scenario or {})
    scenario.setdefault("scope", "within")
    scenario.setdefault("smote", "on" if use_smote else "off")
    groups = _unique_groups(dataset.groups)
    cm = np.zeros((2, 2), dtype=np.int64)
    evaluated = skipped = leaks = 0
    per_project = []
    for gi, g in enumerate(groups):
        idx = np.array([i for i, gg in enumerate(dataset.groups) if gg == g])
        sub = dataset.subset(idx)
        g_cm, g_eval, g_skip, g_leaks = _cv_counts(
            sub, config, k, repeats, use_smote, smote_ratio, smote_k,
            derive_seed(seed, gi), workers)
        g_per_class, g_weighted = metrics_from_confusion(g_cm)
        per_project.append({
            "project_id": g, "n": int(idx.size),
            "weighted": g_weighted, "per_class": g_per_class,
            "confusion": [[int(v) for v in row] for row in g_cm],
            "folds_evaluated": g_eval, "folds_skipped": g_skip,
        })
        cm += g_cm
        evaluated += g_eval
        skipped += g_skip
        leaks += g_leaks
    return _assemble(scenario, cm, evaluated, skipped, leaks, dataset.n_rows,
                     _config_dict(config, k, repeats, use_smote, smote_ratio,
                                  smote_k, seed), per_project)


def cross_project_eval(dataset, config=ForestConfig(), use_smote=False,
                       smote_ratio=1.0, smote_k=5, seed=0, scenario=None,
                       workers=1):
    """Leave-one-project-out: test each project with a model trained on the
    remaining projects."""
    scenario = dict(scenario or {})
    scenario.setdefault("scope", "cross")
    scenario.setdefault("smote", "on" if use_smote else "off")
    groups = _unique_groups(dataset.groups)
    if len(groups) < 2:
        raise SingleProjectError("cross-project evaluation needs >= 2 projects")
    cm = np.zeros((2, 2), dtype=np.int64)
    evaluated = skipped = leaks = 0
    per_project = []
    for gi, g in enumerate(groups):
        test_idx = np.array([i for i, gg in enumerate(dataset.groups) if gg == g])
        train_idx = np.array([i for i, gg in enumerate(dataset.groups) if gg != g])
        leaks += int(dataset.synthetic[test_idx].sum())
        train = dataset.subset(train_idx)
        try:
            if use_smote:
                train = smote(train, k=smote_k, target_ratio=smote_ratio,
                              seed=derive_seed(seed, gi, 7))
            model = train_forest(train, config, seed=derive_seed(seed, gi, 11),
                                 workers=workers)
        except (SingleClassDatasetError, TooFewMinoritySamplesError) as exc:
            per_project.append({"project_id": g, "n": int(test_idx.size),
                                "skipped": str(exc)})
            skipped += 1
            continue
        labels, _ = predict(model, dataset.x[test_idx])
        g_cm = confusion_matrix(dataset.y[test_idx], labels)
        g_per_class, g_weighted = metrics_from_confusion(g_cm)
        per_project.append({
            "project_id": g, "n": int(test_idx.size),
            "weighted": g_weighted, "per_class": g_per_class,
            "confusion": [[int(v) for v in row] for row in g_cm],
        })
        cm += g_cm
        evaluated += 1
    config_dict = _config_dict(config, 0, 0, use_smote, smote_ratio, smote_k, seed)
    config_dict["k_folds"] = None
    config_dict["repeats"] = None
    return _assemble(scenario, cm, evaluated, skipped, leaks, dataset.n_rows,
                     config_dict, per_project)
