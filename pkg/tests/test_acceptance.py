"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.
"""

import random
import time

import numpy as np

from oracles import (
    CallGraphProbe, oracle_build_tree, oracle_kendall_tau_b,
    oracle_kills_by_test, oracle_spearman, oracle_spearman_permutation_p,
    oracle_tree_predict,
)
from tplab import lang, pipeline, stats
from tplab.interp import aggregate_method_distance, run_suite
from tplab.learn import (
    Dataset, ForestConfig, cross_validate, metrics_from_confusion, predict,
    smote, train_forest,
)
from tplab.metrics import LABEL_INEFFECTIVE
from tplab.mutation import (
    MODE_EARLY_ABORT, MODE_FULL, OUTCOME_KILLED, classify_methods,
    evaluate_matrix, generate_mutants, mutant_kill_status,
)

CORPUS_BUDGET = 150_000


def _verdict(name, passed, detail=""):
    line = f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert passed, line


def test_stack_distance_oracle_equivalence(corpus_programs):
    """Recorded minimal stack distance equals BFS shortest path over the
    observed dynamic call graph for 100% of (method, test) pairs."""
    checked = 0
    mismatches = []
    for pid, program in corpus_programs.items():
        probe = CallGraphProbe()
        log = run_suite(program, hooks=(probe,))
        for rec in log.traces:
            expected = probe.bfs_distances(rec.test_id)[rec.method_id]
            if rec.min_stack_distance != expected:
                mismatches.append((pid, rec.method_id, rec.test_id,
                                   rec.min_stack_distance, expected))
            checked += 1
        # the recorder and the probe agree on what was covered at all
        for test_id, methods in log.covered_by_test.items():
            assert set(probe.bfs_distances(test_id)) == set(methods)
    _verdict("stack-distance-oracle", not mismatches and checked > 200,
             f"{checked} pairs, {len(mismatches)} mismatches")


def test_figure1_reproduction(corpus_programs):
    log = run_suite(corpus_programs["figure1"])
    d = aggregate_method_distance(log, "M8")
    per_test = sorted((r.test_id, r.min_stack_distance)
                      for r in log.traces if r.method_id == "M8")
    _verdict("figure1-distance", d == 3 and per_test ==
             [("T1", 3), ("T2", 3)], f"d(M8)={d}")


def test_mutant_cardinality_and_values(corpus_programs):
    expected_values = {
        "bool": [False, True],
        "int": [0, 1],
        "float": [0.0, 0.1],
        "str": ["", "A"],
        "arr": [()],
        "ref": [None],
    }
    checked = 0
    ok = True
    for program in corpus_programs.values():
        for method in lang.enumerate_methods(program):
            if not lang.mutation_eligible(method):
                continue
            mutants = generate_mutants(method)
            checked += 1
            if method.declared_type == "void":
                ok &= len(mutants) == 1 and \
                    mutants[0].replacement.kind == "empty_body"
                continue
            values = [m.replacement.value for m in mutants]
            ok &= values == expected_values[method.declared_type]
            two = method.declared_type in ("bool", "int", "float", "str")
            ok &= len(mutants) == (2 if two else 1)
    _verdict("table1-mutants", ok and checked > 100, f"{checked} methods")


def test_pseudo_tested_oracle_equivalence(corpus_programs, corpus_sources):
    """classify_methods agrees with the textual body-replacement re-run
    oracle on every corpus method; method verdict is the conjunction of the
    pair verdicts."""
    checked = 0
    ok = True
    for pid, program in corpus_programs.items():
        log = run_suite(program)
        matrix = evaluate_matrix(program, log, step_budget=CORPUS_BUDGET)
        for v in classify_methods(matrix):
            kills = oracle_kills_by_test(corpus_sources[pid], pid,
                                         v.method_id,
                                         step_budget=CORPUS_BUDGET)
            covering = log.covering_tests(v.method_id)
            oracle_verdict = "effective" if any(kills[t] for t in covering) \
                else "ineffective"
            ok &= v.verdict == oracle_verdict
            for t in covering:
                ok &= (v.pair_verdicts[t] == "effective") == kills[t]
            ok &= (v.verdict == "ineffective") == all(
                pv == "ineffective" for pv in v.pair_verdicts.values())
            checked += 1
    _verdict("pseudo-tested-oracle", ok and checked > 200,
             f"{checked} methods")


def test_mode_agreement(corpus_programs):
    ok = True
    for pid, program in corpus_programs.items():
        log = run_suite(program)
        full = evaluate_matrix(program, log, MODE_FULL,
                               step_budget=CORPUS_BUDGET)
        early = evaluate_matrix(program, log, MODE_EARLY_ABORT,
                                step_budget=CORPUS_BUDGET)
        ok &= mutant_kill_status(full) == mutant_kill_status(early)
        ok &= len(full.rows) >= len(early.rows)
        full_verdicts = {v.method_id: v.verdict for v in classify_methods(full)}
        early_verdicts = {
            m: ("effective" if any(
                r.outcome == OUTCOME_KILLED for r in early.rows
                if r.method_id == m) else "ineffective")
            for m in {r.method_id for r in early.rows}}
        ok &= full_verdicts == early_verdicts
    _verdict("mode-agreement", ok)


def test_correlation_correctness(corpus_artifacts):
    rng = random.Random(2024)
    ok = True
    checked = 0
    while checked < 200:
        n = rng.randint(5, 40)
        if rng.random() < 0.5:
            x = [rng.randint(0, 6) for _ in range(n)]
            y = [rng.randint(0, 3) for _ in range(n)]
        else:
            x = [rng.uniform(-9, 9) for _ in range(n)]
            y = [rng.uniform(-9, 9) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        checked += 1
        ok &= abs(stats.spearman(x, y).coefficient
                  - oracle_spearman(x, y)) <= 1e-9
        ok &= abs(stats.kendall_tau_b(x, y).coefficient
                  - oracle_kendall_tau_b(x, y)) <= 1e-9
    perm_checked = 0
    while perm_checked < 25:
        n = rng.choice((7, 8))
        x = [rng.uniform(-5, 5) for _ in range(n)]
        y = [rng.uniform(-5, 5) for _ in range(n)]
        perm_checked += 1
        ok &= abs(stats.spearman(x, y).p_value
                  - oracle_spearman_permutation_p(x, y)) <= 0.02
    rows = corpus_artifacts["monotone"].method_rows
    xs = [float(r.min_stack_distance) for r in rows]
    ys = [1.0 if r.label == LABEL_INEFFECTIVE else 0.0 for r in rows]
    sp = stats.spearman(xs, ys)
    ok &= sp.coefficient >= 0.5 and sp.p_value < 0.05
    _verdict("correlation-oracles", ok,
             f"200 vectors, {perm_checked} permutation checks, "
             f"monotone r={sp.coefficient:+.2f} p={sp.p_value:.1e}")


def _separable(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 4))
    y = (x[:, 0] > 0).astype(np.int64)
    x[:, 0] += (y * 2 - 1) * 3.0
    return Dataset(x, y, tuple(["p"] * n), tuple(f"f{i}" for i in range(4)),
                   categorical_mask=np.zeros(4, dtype=bool))


def test_learner_sanity(manifest, corpus_artifacts):
    ok = True
    # 10-fold CV on separable data
    rep = cross_validate(_separable(200, 31), ForestConfig(n_trees=30),
                         k=10, repeats=1, seed=5)
    ok &= rep.weighted["f_score"] >= 0.95
    # single-tree mode equals the greedy CART oracle on <= 200 rows
    for n, seed in ((120, 1), (200, 2)):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(n, 5))
        y = ((x[:, 1] - x[:, 3] + rng.normal(scale=0.5, size=n)) > 0)
        d = Dataset(x, y.astype(np.int64), tuple(["p"] * n),
                    tuple(f"f{i}" for i in range(5)),
                    categorical_mask=np.zeros(5, dtype=bool))
        model = train_forest(d, ForestConfig(n_trees=1, max_features=None,
                                             bootstrap=False), seed=0)
        tree = oracle_build_tree([list(r) for r in x], list(d.y),
                                 list(range(n)))
        probe = rng.normal(size=(150, 5))
        got, _ = predict(model, probe)
        want = [oracle_tree_predict(tree, r, model.minority_class)
                for r in probe]
        ok &= list(got) == want
    # fixed seed: bit-identical eval_report.json across runs and workers
    dataset = pipeline.corpus_dataset(
        [corpus_artifacts["monotone"], corpus_artifacts["shift_a"]], "method")
    config = manifest.config
    a = pipeline.run_scenario(dataset, "cross", False, "weighted", config,
                              workers=1).to_json()
    b = pipeline.run_scenario(dataset, "cross", False, "weighted", config,
                              workers=1).to_json()
    c = pipeline.run_scenario(dataset, "cross", False, "weighted", config,
                              workers=2).to_json()
    ok &= a == b == c
    _verdict("learner-sanity", ok,
             f"separable wF={rep.weighted['f_score']:.3f}")


def test_smote_contract():
    ok = True
    rng = np.random.default_rng(8)
    x_min = rng.normal(loc=4.0, size=(10, 3))
    x_maj = rng.normal(loc=-4.0, size=(40, 3))
    d = Dataset(np.vstack([x_min, x_maj]),
                np.concatenate([np.ones(10, dtype=np.int64),
                                np.zeros(40, dtype=np.int64)]),
                tuple(["p"] * 50), ("a", "b", "c"),
                categorical_mask=np.zeros(3, dtype=bool))
    out = smote(d, k=5, target_ratio=1.0, seed=3)
    ok &= int(out.class_counts()[1]) == 40  # exact target
    ok &= int(out.synthetic.sum()) == 30
    # convexity: every synthetic row lies on a segment between two minority rows
    parents = d.x[d.y == 1]
    for row, is_syn in zip(out.x, out.synthetic):
        if not is_syn:
            continue
        found = False
        for i in range(len(parents)):
            for j in range(len(parents)):
                a, b = parents[i], parents[j]
                span = b - a
                offs = row - a
                mask = np.abs(span) > 1e-12
                if np.any(~mask & (np.abs(offs) > 1e-9)):
                    continue
                if not mask.any():
                    found = True
                    break
                us = offs[mask] / span[mask]
                if np.all(np.abs(us - us[0]) <= 1e-6) and \
                        -1e-9 <= us[0] <= 1 + 1e-9:
                    found = True
                    break
            if found:
                break
        ok &= found
    # no synthetic rows reach test folds during CV
    big = Dataset(np.vstack([rng.normal(loc=3.0, size=(30, 3)),
                             rng.normal(loc=-3.0, size=(90, 3))]),
                  np.concatenate([np.ones(30, dtype=np.int64),
                                  np.zeros(90, dtype=np.int64)]),
                  tuple(["p"] * 120), ("a", "b", "c"),
                  categorical_mask=np.zeros(3, dtype=bool))
    rep = cross_validate(big, ForestConfig(n_trees=10), k=10, repeats=2,
                         use_smote=True, seed=4)
    ok &= rep.synthetic_in_test_folds == 0
    _verdict("smote-contract", ok)


def test_metric_identity(manifest, corpus_artifacts):
    """Weighted metrics in every emitted report equal confusion-matrix
    arithmetic exactly."""
    reports = pipeline.full_grid(list(corpus_artifacts.values()),
                                 manifest.config)
    ok = len(reports) == 8
    for rep in reports:
        per_class, weighted = metrics_from_confusion(np.array(rep.confusion))
        ok &= weighted == rep.weighted
        ok &= per_class == rep.per_class
        total = int(np.array(rep.confusion).sum())
        for metric in ("precision", "recall", "f_score"):
            expected = sum(
                rep.per_class[label][metric] * rep.per_class[label]["support"]
                for label in rep.class_order) / total
            ok &= rep.weighted[metric] == expected
        for entry in rep.per_project or []:
            if "skipped" in entry:
                continue
            pc, w = metrics_from_confusion(np.array(entry["confusion"]))
            ok &= w == entry["weighted"] and pc == entry["per_class"]
    _verdict("metric-identity", ok, f"{len(reports)} scenario reports")


def test_cost_ordering(manifest, corpus_programs):
    totals = {"plain_run_s": 0.0, "recorded_run_s": 0.0,
              "early_abort_s": 0.0, "full_matrix_s": 0.0}
    for pid, program in corpus_programs.items():
        timing = pipeline.timing_phases(program, step_budget=CORPUS_BUDGET)
        for k, v in timing.items():
            totals[k] += v
    jitter = 1.1
    ok = (totals["plain_run_s"] <= totals["recorded_run_s"] * jitter
          and totals["recorded_run_s"] <= totals["early_abort_s"] * jitter
          and totals["early_abort_s"] <= totals["full_matrix_s"] * jitter)
    _verdict("cost-ordering", ok,
             " <= ".join(f"{totals[k]:.3f}s" for k in
                         ("plain_run_s", "recorded_run_s", "early_abort_s",
                          "full_matrix_s")))


def test_end_to_end_budget():
    start = time.perf_counter()
    manifest = pipeline.load_corpus()
    artifacts = pipeline.run_corpus(manifest)
    rows = []
    for art in artifacts:
        rows.extend(pipeline.project_correlations(art))
    reports = pipeline.full_grid(artifacts, manifest.config)
    elapsed = time.perf_counter() - start
    ok = elapsed < 60.0 and len(reports) == 8 and len(rows) == 14
    _verdict("end-to-end-budget", ok, f"{elapsed:.1f}s for run + full matrix "
             "+ correlate + 8 prediction scenarios")
