"""Numeric dataset container for the learner.

Feature vectors become a float matrix: the eight numeric measures followed by
a one-hot encoding of the return category. Labels are indexes into
CLASS_LABELS; every row carries its project id (for cross-project splits) and
a synthetic flag (False unless the row was created by oversampling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NUMERIC_FEATURES = (
    "line_count", "branch_count", "line_coverage", "branch_coverage",
    "covering_test_count", "test_scope", "max_invocation_count",
    "min_stack_distance",
)

RETURN_CATEGORIES = ("void", "boolean", "numeric", "string", "array", "reference")

FEATURE_NAMES = NUMERIC_FEATURES + tuple(
    f"return_category={c}" for c in RETURN_CATEGORIES
)

CLASS_LABELS = ("effective", "ineffective")  # y encodes 0 / 1


@dataclass
class Dataset:
    x: np.ndarray  # (n, p) float64
    y: np.ndarray  # (n,) int64 into CLASS_LABELS
    groups: tuple  # project id per row
    feature_names: tuple = FEATURE_NAMES
    categorical_mask: np.ndarray = None
    synthetic: np.ndarray = None

    def __post_init__(self):
        n, p = self.x.shape
        if self.categorical_mask is None:
            mask = np.zeros(p, dtype=bool)
            mask[len(NUMERIC_FEATURES):] = True
            self.categorical_mask = mask
        if self.synthetic is None:
            self.synthetic = np.zeros(n, dtype=bool)

    @property
    def n_rows(self):
        return self.x.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx)
        return Dataset(self.x[idx], self.y[idx],
                       tuple(self.groups[i] for i in idx),
                       self.feature_names, self.categorical_mask,
                       self.synthetic[idx])

    def class_counts(self):
        return np.bincount(self.y, minlength=len(CLASS_LABELS))


def from_feature_vectors(rows, project_ids):
    """Build a Dataset from FeatureVector rows.

    project_ids is either one id for all rows or a per-row sequence.
    """
    if isinstance(project_ids, str):
        project_ids = [project_ids] * len(rows)
    n = len(rows)
    p = len(FEATURE_NAMES)
    x = np.zeros((n, p), dtype=np.float64)
    y = np.zeros(n, dtype=np.int64)
    for i, r in enumerate(rows):
        x[i, 0] = r.line_count
        x[i, 1] = r.branch_count
        x[i, 2] = r.line_coverage
        x[i, 3] = r.branch_coverage
        x[i, 4] = r.covering_test_count
        x[i, 5] = r.test_scope
        x[i, 6] = r.max_invocation_count
        x[i, 7] = r.min_stack_distance
        x[i, 8 + RETURN_CATEGORIES.index(r.return_category)] = 1.0
        y[i] = CLASS_LABELS.index(r.label)
    return Dataset(x, y, tuple(project_ids))
