import json

import numpy as np
import pytest

from tplab import pipeline
from tplab.learn import (
    CLASS_LABELS, Dataset, ForestConfig, SingleProjectError, confusion_matrix,
    cross_project_eval, cross_validate, metrics_from_confusion,
    stratified_folds, within_corpus_eval,
)


def make_dataset(x, y, groups=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    groups = tuple(groups or ["p"] * len(y))
    names = tuple(f"f{i}" for i in range(x.shape[1]))
    return Dataset(x, y, groups, names,
                   categorical_mask=np.zeros(x.shape[1], dtype=bool))


def separable(n, seed=0, group="p"):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 3))
    y = (x[:, 0] > 0).astype(np.int64)
    x[:, 0] += (y * 2 - 1) * 4.0
    return make_dataset(x, y, [group] * n)


def test_metrics_from_confusion_arithmetic():
    cm = np.array([[90, 0], [10, 0]])  # majority-only predictor on 90/10
    per_class, weighted = metrics_from_confusion(cm)
    assert per_class["effective"]["recall"] == 1.0
    assert per_class["ineffective"]["recall"] == 0.0
    assert weighted["recall"] == 0.9
    assert per_class["ineffective"]["precision"] == 0.0  # 0/0 convention


def test_weighted_identity_is_exact_for_random_confusions():
    rng = np.random.default_rng(1)
    for _ in range(100):
        cm = rng.integers(0, 40, size=(2, 2))
        per_class, weighted = metrics_from_confusion(cm)
        total = int(cm.sum())
        if total == 0:
            assert weighted["precision"] == 0.0
            continue
        for metric in ("precision", "recall", "f_score"):
            expected = sum(per_class[label][metric] * per_class[label]["support"]
                           for label in CLASS_LABELS) / total
            assert weighted[metric] == expected  # bit-exact


def test_confusion_matrix_layout():
    cm = confusion_matrix([0, 0, 1, 1], [0, 1, 1, 1])
    assert cm.tolist() == [[1, 1], [0, 2]]


def test_stratified_folds_preserve_ratios():
    y = np.array([0] * 40 + [1] * 10)
    rng = np.random.default_rng(3)
    folds = stratified_folds(y, 10, rng)
    assert sorted(i for f in folds for i in f) == list(range(50))
    for f in folds:
        assert (y[f] == 0).sum() == 4
        assert (y[f] == 1).sum() == 1


def test_perfect_classifier_on_separable_data():
    d = separable(200, seed=2)
    rep = cross_validate(d, ForestConfig(n_trees=15), k=10, repeats=1, seed=4)
    assert rep.weighted["precision"] == 1.0
    assert rep.weighted["recall"] == 1.0
    assert rep.folds_evaluated == 10
    assert rep.folds_skipped == 0


def test_fold_skipping_reported_not_fatal():
    # 3 minority rows over 10 folds: most test folds lack the minority class
    d = separable(60, seed=5)
    d.y[:] = 0
    d.y[:3] = 1
    rep = cross_validate(d, ForestConfig(n_trees=5), k=10, repeats=1, seed=6)
    assert rep.folds_skipped > 0
    assert rep.folds_evaluated + rep.folds_skipped == 10


def test_smote_only_touches_training_folds():
    d = separable(120, seed=7)
    rep = cross_validate(d, ForestConfig(n_trees=8), k=10, repeats=2,
                         use_smote=True, seed=8)
    assert rep.synthetic_in_test_folds == 0
    assert rep.scenario["smote"] == "on"
    assert rep.config["smote"] is True


def test_report_json_is_canonical_and_deterministic():
    d = separable(100, seed=9)
    a = cross_validate(d, ForestConfig(n_trees=6), k=5, repeats=2, seed=10)
    b = cross_validate(d, ForestConfig(n_trees=6), k=5, repeats=2, seed=10)
    assert a.to_json() == b.to_json()
    parsed = json.loads(a.to_json())
    assert parsed["config"]["aggregation"] == "micro"
    assert parsed["class_order"] == ["effective", "ineffective"]


def test_single_project_cross_eval_rejected():
    d = separable(50, seed=11)
    with pytest.raises(SingleProjectError):
        cross_project_eval(d, ForestConfig(n_trees=4), seed=12)


def test_two_identical_projects_cross_matches_within():
    a = separable(120, seed=13, group="a")
    b = separable(120, seed=13, group="b")
    merged = make_dataset(np.vstack([a.x, b.x]),
                          np.concatenate([a.y, b.y]),
                          ["a"] * 120 + ["b"] * 120)
    cross = cross_project_eval(merged, ForestConfig(n_trees=20), seed=14)
    within = within_corpus_eval(merged, ForestConfig(n_trees=20), k=10,
                                repeats=1, seed=14)
    assert len(cross.per_project) == 2
    assert abs(cross.weighted["f_score"] - within.weighted["f_score"]) <= 0.05


def test_cross_report_has_one_entry_per_held_out_project():
    rng = np.random.default_rng(15)
    chunks = []
    for gi, g in enumerate(("p1", "p2", "p3")):
        d = separable(60, seed=20 + gi, group=g)
        chunks.append(d)
    merged = make_dataset(np.vstack([c.x for c in chunks]),
                          np.concatenate([c.y for c in chunks]),
                          ["p1"] * 60 + ["p2"] * 60 + ["p3"] * 60)
    rep = cross_project_eval(merged, ForestConfig(n_trees=10), seed=16)
    assert [e["project_id"] for e in rep.per_project] == ["p1", "p2", "p3"]
    assert rep.scenario["scope"] == "cross"


def test_within_corpus_f_score_on_monotone(manifest, corpus_artifacts):
    dataset = pipeline.corpus_dataset([corpus_artifacts["monotone"]], "method")
    rep = cross_validate(dataset, ForestConfig(n_trees=60), k=10, repeats=2,
                         seed=manifest.config.seed)
    assert rep.weighted["f_score"] >= 0.8


def test_distribution_shifted_project_degrades_cross_recall(manifest,
                                                            corpus_artifacts):
    """shift_b inverts the distance and size signals, so a model trained on
    the other projects misses its ineffective methods; its own CV does not."""
    config = manifest.config
    arts = list(corpus_artifacts.values())
    dataset = pipeline.corpus_dataset(arts, "method")
    cross = pipeline.run_scenario(dataset, "cross", False, "ineffective", config)
    entry = next(e for e in cross.per_project if e["project_id"] == "shift_b")
    cross_recall = entry["per_class"]["ineffective"]["recall"]

    own = pipeline.corpus_dataset([corpus_artifacts["shift_b"]], "method")
    within = cross_validate(own, config.forest_config(), k=config.cv_folds,
                            repeats=config.cv_repeats, seed=config.seed)
    within_recall = within.per_class["ineffective"]["recall"]
    assert cross_recall < within_recall
    assert within_recall >= 0.8


def test_headline_follows_target():
    d = separable(100, seed=17)
    rep = cross_validate(d, ForestConfig(n_trees=5), k=5, repeats=1, seed=18,
                         scenario={"target": "ineffective"})
    assert rep.headline == {m: rep.per_class["ineffective"][m]
                            for m in ("precision", "recall", "f_score")}
