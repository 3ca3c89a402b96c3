"""Labeled feature datasets built from an execution log and a full mutation
matrix, at method granularity and at (method, test) pair granularity.

Method rows aggregate over all covering tests (coverage is the union over the
suite); pair rows restrict every measure to the single covering test. Only
covered, mutation-eligible methods appear.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from . import lang, mutation

GRANULARITY_METHOD = "method"
GRANULARITY_PAIR = "pair"

LABEL_EFFECTIVE = "effective"
LABEL_INEFFECTIVE = "ineffective"


@dataclass(frozen=True)
class FeatureVector:
    granularity: str
    method_id: str
    test_id: str | None
    line_count: int
    branch_count: int
    line_coverage: float
    branch_coverage: float
    covering_test_count: int
    test_scope: int
    max_invocation_count: int
    min_stack_distance: int
    return_category: str
    label: str


def _coverage(covered_lines, line_count, covered_dirs, branch_count):
    line_cov = len(covered_lines) / line_count if line_count else 1.0
    branch_cov = len(covered_dirs) / branch_count if branch_count else 1.0
    return line_cov, branch_cov


def build_method_dataset(log, matrix, methods):
    """One row per covered, eligible method, labeled by its verdict."""
    verdicts = {v.method_id: v for v in mutation.classify_methods(matrix)}
    rows = []
    for m in methods:
        verdict = verdicts.get(m.method_id)
        if verdict is None:
            continue
        covering = log.covering_tests(m.method_id)
        recs = [log.trace_map[(m.method_id, t)] for t in covering]
        lines = frozenset().union(*(r.covered_lines for r in recs))
        dirs = frozenset().union(*(r.covered_branch_dirs for r in recs))
        line_cov, branch_cov = _coverage(lines, m.statement_count,
                                         dirs, m.branch_count)
        rows.append(FeatureVector(
            granularity=GRANULARITY_METHOD,
            method_id=m.method_id,
            test_id=None,
            line_count=m.statement_count,
            branch_count=m.branch_count,
            line_coverage=line_cov,
            branch_coverage=branch_cov,
            covering_test_count=len(covering),
            test_scope=min(len(log.covered_by_test[t]) for t in covering),
            max_invocation_count=max(r.invocation_count for r in recs),
            min_stack_distance=min(r.min_stack_distance for r in recs),
            return_category=m.return_category,
            label=(LABEL_INEFFECTIVE
                   if verdict.verdict == mutation.VERDICT_INEFFECTIVE
                   else LABEL_EFFECTIVE),
        ))
    return rows


def build_pair_dataset(log, matrix, methods):
    """One row per covering (method, test) pair of an eligible method."""
    verdicts = {v.method_id: v for v in mutation.classify_methods(matrix)}
    rows = []
    for m in methods:
        verdict = verdicts.get(m.method_id)
        if verdict is None:
            continue
        covering = log.covering_tests(m.method_id)
        for t in covering:
            rec = log.trace_map[(m.method_id, t)]
            line_cov, branch_cov = _coverage(rec.covered_lines, m.statement_count,
                                             rec.covered_branch_dirs, m.branch_count)
            rows.append(FeatureVector(
                granularity=GRANULARITY_PAIR,
                method_id=m.method_id,
                test_id=t,
                line_count=m.statement_count,
                branch_count=m.branch_count,
                line_coverage=line_cov,
                branch_coverage=branch_cov,
                covering_test_count=len(covering),
                test_scope=len(log.covered_by_test[t]),
                max_invocation_count=rec.invocation_count,
                min_stack_distance=rec.min_stack_distance,
                return_category=m.return_category,
                label=(LABEL_INEFFECTIVE
                       if verdict.pair_verdicts[t] == mutation.VERDICT_INEFFECTIVE
                       else LABEL_EFFECTIVE),
            ))
    return rows


def build_datasets(log, matrix, program):
    methods = lang.enumerate_methods(program)
    return (build_method_dataset(log, matrix, methods),
            build_pair_dataset(log, matrix, methods))


def write_dataset_csv(rows, path):
    pair = bool(rows) and rows[0].granularity == GRANULARITY_PAIR
    header = ["granularity", "method_id"]
    if pair:
        header.append("test_id")
    header += ["line_count", "branch_count", "line_coverage", "branch_coverage",
               "covering_test_count", "test_scope", "max_invocation_count",
               "min_stack_distance", "return_category", "label"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            rec = [r.granularity, r.method_id]
            if pair:
                rec.append(r.test_id)
            rec += [r.line_count, r.branch_count, repr(r.line_coverage),
                    repr(r.branch_coverage), r.covering_test_count, r.test_scope,
                    r.max_invocation_count, r.min_stack_distance,
                    r.return_category, r.label]
            w.writerow(rec)
