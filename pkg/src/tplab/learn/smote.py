"""Synthetic minority oversampling.

Each synthetic row interpolates between a minority row x and one of its k
nearest minority neighbors: x + u * (x_nn - x) with one u drawn uniformly
from [0, 1] per row, applied to the numeric columns only; one-hot categorical
columns are copied from the seed row. Neighbors use Euclidean distance over
the numeric columns. Oversampling continues until the minority count reaches
ceil(target_ratio * majority count) exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .data import Dataset


class TooFewMinoritySamplesError(Exception):
    pass


def smote(dataset, k=5, target_ratio=1.0, seed=0):
    """Return a new Dataset with synthetic minority rows appended."""
    counts = dataset.class_counts()
    minority = 1 if counts[1] <= counts[0] else 0
    m = int(counts[minority])
    majority_count = int(counts[1 - minority])
    if m < 2:
        raise TooFewMinoritySamplesError(
            f"minority class has {m} row(s); need at least 2")
    target = math.ceil(target_ratio * majority_count)
    n_new = target - m
    if n_new <= 0:
        return dataset.subset(np.arange(dataset.n_rows))
    k = min(k, m - 1)
    min_idx = np.nonzero(dataset.y == minority)[0]
    numeric = ~dataset.categorical_mask
    pts = dataset.x[min_idx][:, numeric]
    # pairwise Euclidean distances among minority rows, self excluded
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]
    rng = np.random.default_rng(seed)
    new_x = np.zeros((n_new, dataset.x.shape[1]), dtype=np.float64)
    new_groups = []
    for i in range(n_new):
        s = int(rng.integers(m))
        nn = int(neighbors[s, int(rng.integers(k))])
        u = float(rng.random())
        row = dataset.x[min_idx[s]].copy()
        row[numeric] = row[numeric] + u * (pts[nn] - pts[s])
        new_x[i] = row
        new_groups.append(dataset.groups[min_idx[s]])
    x = np.vstack([dataset.x, new_x])
    y = np.concatenate([dataset.y, np.full(n_new, minority, dtype=np.int64)])
    groups = dataset.groups + tuple(new_groups)
    synthetic = np.concatenate([dataset.synthetic, np.ones(n_new, dtype=bool)])
    return Dataset(x, y, groups, dataset.feature_names,
                   dataset.categorical_mask, synthetic)
