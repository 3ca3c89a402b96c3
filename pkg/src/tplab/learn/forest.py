"""Random forest of CART trees, built from scratch.

Growth rule per node: among the candidate features, pick the (feature,
threshold) pair minimizing the weighted Gini impurity of the two sides,
requiring a strict decrease; thresholds are midpoints between consecutive
distinct sorted values. Ties prefer the lowest feature index, then the lowest
threshold. Rows with value <= threshold go left. Depth is unlimited.

Per-tree RNG streams are keyed by (seed, tree index), never by row order or
worker scheduling, so training is deterministic and parallelizable.
Feature importance is the total Gini decrease accumulated per feature.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import CLASS_LABELS


class SingleClassDatasetError(Exception):
    pass


class SchemaMismatchError(Exception):
    pass


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_features: object = "sqrt"  # "sqrt" | int | None (= all)
    min_leaf: int = 1
    bootstrap: bool = True

    def resolve_max_features(self, p):
        if self.max_features is None:
            return p
        if self.max_features == "sqrt":
            return max(1, int(math.isqrt(p)))
        return min(int(self.max_features), p)


@dataclass
class Leaf:
    counts: tuple  # class counts at the leaf


@dataclass
class Split:
    feature: int
    threshold: float
    left: object
    right: object


@dataclass
class ForestModel:
    trees: list
    config: ForestConfig
    seed: int
    feature_names: tuple
    class_labels: tuple
    train_counts: tuple
    minority_class: int
    importances: np.ndarray = field(repr=False)


def _gini(c0, c1, m):
    return 1.0 - (c0 / m) ** 2 - (c1 / m) ** 2


def _best_split(x, y, idx, features, min_leaf):
    """Best (score, feature, threshold) over the candidate features, or None."""
    n = idx.shape[0]
    ysub = y[idx]
    total1 = int(ysub.sum())
    best = None
    for f in features:
        v = x[idx, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        sy = ysub[order]
        cut = np.nonzero(sv[:-1] != sv[1:])[0]
        if cut.size == 0:
            continue
        n_left = cut + 1
        keep = (n_left >= min_leaf) & (n - n_left >= min_leaf)
        cut = cut[keep]
        if cut.size == 0:
            continue
        n_left = n_left[keep].astype(np.float64)
        c1_left = np.cumsum(sy)[cut].astype(np.float64)
        c0_left = n_left - c1_left
        n_right = n - n_left
        c1_right = total1 - c1_left
        c0_right = n_right - c1_right
        gini_left = 1.0 - (c0_left / n_left) ** 2 - (c1_left / n_left) ** 2
        gini_right = 1.0 - (c0_right / n_right) ** 2 - (c1_right / n_right) ** 2
        weighted = (n_left * gini_left + n_right * gini_right) / n
        k = int(np.argmin(weighted))
        score = float(weighted[k])
        if best is None or score < best[0]:
            pos = cut[k]
            threshold = float((sv[pos] + sv[pos + 1]) / 2.0)
            best = (score, int(f), threshold)
    return best


def _grow(x, y, idx, rng, max_feat, min_leaf, p, n_total, importances):
    counts = np.bincount(y[idx], minlength=2)
    c0, c1 = int(counts[0]), int(counts[1])
    m = idx.shape[0]
    if c0 == 0 or c1 == 0 or m < 2 * min_leaf:
        return Leaf((c0, c1))
    if max_feat < p:
        features = np.sort(rng.choice(p, size=max_feat, replace=False))
    else:
        features = np.arange(p)
    node_gini = _gini(c0, c1, m)
    best = _best_split(x, y, idx, features, min_leaf)
    if best is None or not best[0] < node_gini:
        return Leaf((c0, c1))
    score, f, threshold = best
    importances[f] += (m / n_total) * (node_gini - score)
    mask = x[idx, f] <= threshold
    left = _grow(x, y, idx[mask], rng, max_feat, min_leaf, p, n_total, importances)
    right = _grow(x, y, idx[~mask], rng, max_feat, min_leaf, p, n_total, importances)
    return Split(f, threshold, left, right)


def _train_tree(x, y, config, seed, tree_index):
    n, p = x.shape
    rng = np.random.default_rng(np.random.SeedSequence((seed, tree_index)))
    if config.bootstrap:
        idx = rng.integers(0, n, size=n)
    else:
        idx = np.arange(n)
    importances = np.zeros(p, dtype=np.float64)
    root = _grow(x, y, idx, rng, config.resolve_max_features(p),
                 config.min_leaf, p, idx.shape[0], importances)
    return root, importances


_POOL_STATE = {}


def _pool_init(x, y, config, seed):
    _POOL_STATE.update(x=x, y=y, config=config, seed=seed)

def _pool_task(tree_index):
    s = _POOL_STATE
    return _train_tree(s["x"], s["y"], s["config"], s["seed"], tree_index)


def train_forest(dataset, config=ForestConfig(), seed=0, workers=1):
    """Train a forest; deterministic given (dataset, config, seed)."""
    counts = dataset.class_counts()
    if int((counts > 0).sum()) < 2:
        raise SingleClassDatasetError("training data has a single class")
    x, y = dataset.x, dataset.y
    if workers > 1 and config.n_trees > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                                 initargs=(x, y, config, seed)) as pool:
            results = list(pool.map(_pool_task, range(config.n_trees), chunksize=4))
    else:
        results = [_train_tree(x, y, config, seed, t) for t in range(config.n_trees)]
    trees = [r[0] for r in results]
    importances = np.sum([r[1] for r in results], axis=0)
    minority = 1 if counts[1] <= counts[0] else 0
    return ForestModel(trees, config, seed, dataset.feature_names, CLASS_LABELS,
                       (int(counts[0]), int(counts[1])), minority, importances)


def _leaf_vote(counts, minority):
    c0, c1 = counts
    if c0 == c1:
        return minority
    return 0 if c0 > c1 else 1


def _route(node, row, minority):
    while isinstance(node, Split):
        node = node.left if row[node.feature] <= node.threshold else node.right
    return _leaf_vote(node.counts, minority)


def predict(model, x):
    """Majority vote over trees; ties go to the minority training class.

    Returns (labels, vote fractions per class).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != len(model.feature_names):
        raise SchemaMismatchError(
            f"expected {len(model.feature_names)} features, got {x.shape}")
    if not model.trees:
        raise SchemaMismatchError("model has no trees")
    n = x.shape[0]
    votes = np.zeros((n, 2), dtype=np.float64)
    for tree in model.trees:
        for i in range(n):
            votes[i, _route(tree, x[i], model.minority_class)] += 1.0
    votes /= len(model.trees)
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if votes[i, 0] == votes[i, 1]:
            labels[i] = model.minority_class
        else:
            labels[i] = 0 if votes[i, 0] > votes[i, 1] else 1
    return labels, votes


def variable_importance_report(model):
    """(feature, importance) pairs, nonnegative, max scaled to 1, descending."""
    raw = model.importances
    top = float(raw.max())
    scaled = raw / top if top > 0.0 else raw
    order = np.argsort(-scaled, kind="stable")
    return [(model.feature_names[i], float(scaled[i])) for i in order]


def write_importance_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "importance"])
        for feature, importance in report:
            w.writerow([feature, repr(importance)])


def _node_jsonable(node):
    if isinstance(node, Leaf):
        return {"counts": list(node.counts)}
    return {"feature": node.feature, "threshold": node.threshold,
            "left": _node_jsonable(node.left), "right": _node_jsonable(node.right)}


def model_to_json(model):
    """Canonical JSON rendering (used for determinism checks)."""
    payload = {
        "config": {"n_trees": model.config.n_trees,
                   "max_features": model.config.max_features,
                   "min_leaf": model.config.min_leaf,
                   "bootstrap": model.config.bootstrap},
        "seed": model.seed,
        "feature_names": list(model.feature_names),
        "class_labels": list(model.class_labels),
        "train_counts": list(model.train_counts),
        "minority_class": model.minority_class,
        "importances": [repr(v) for v in model.importances],
        "trees": [_node_jsonable(t) for t in model.trees],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
