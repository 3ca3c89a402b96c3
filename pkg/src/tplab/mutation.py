"""Extreme mutation: whole-body replacement mutants, mutation matrix
evaluation against covering tests, method verdicts, and kill-event reports.

Each eligible method gets one or two mutants that replace its entire body
with a trivial return (or an empty body for void methods). A mutant runs
only against tests that covered the method in the original run; it is killed
by a test iff that test no longer passes. Mutant executions that exhaust the
step budget or call depth count as killed by an exception, mirroring how
mutation tools bucket runaway mutants.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace as dc_replace

from . import lang
from .interp import (
    FAULT_ASSERTION, STATUS_PASS, run_single_test,
)

MODE_FULL = "full"
MODE_EARLY_ABORT = "early-abort"

OUTCOME_KILLED = "Killed"
OUTCOME_SURVIVED = "Survived"

EVENT_ASSERTION = "Assertion"
EVENT_EXCEPTION = "Exception"

VERDICT_EFFECTIVE = "effective"
VERDICT_INEFFECTIVE = "ineffective"

DEFAULT_STEP_BUDGET = 10_000_000


class IneligibleMethodError(Exception):
    pass


class RedTestSuiteError(Exception):
    def __init__(self, failing):
        self.failing = list(failing)
        super().__init__(f"test suite is red: {', '.join(self.failing)}")


class WrongModeError(Exception):
    pass


@dataclass(frozen=True)
class Replacement:
    tag: str
    kind: str  # "empty_body" | "return_value"
    value: object = None


# declared type -> replacement list (one or two mutants)
REPLACEMENT_TABLE = {
    "void": (Replacement("empty_body", "empty_body"),),
    "bool": (Replacement("return_false", "return_value", False),
             Replacement("return_true", "return_value", True)),
    "int": (Replacement("return_0", "return_value", 0),
            Replacement("return_1", "return_value", 1)),
    "float": (Replacement("return_0.0", "return_value", 0.0),
              Replacement("return_0.1", "return_value", 0.1)),
    "str": (Replacement("return_str_empty", "return_value", ""),
            Replacement("return_str_A", "return_value", "A")),
    "arr": (Replacement("return_arr_empty", "return_value", ()),),
    "ref": (Replacement("return_null", "return_value", None),),
}


@dataclass(frozen=True)
class Mutant:
    mutant_id: str
    method_id: str
    replacement: Replacement


@dataclass(frozen=True)
class MatrixRow:
    method_id: str
    test_id: str
    mutant_id: str
    replacement: str
    outcome: str
    kill_event: str | None = None


@dataclass(frozen=True)
class MutationMatrix:
    rows: tuple
    mode: str


@dataclass(frozen=True)
class MethodVerdict:
    method_id: str
    verdict: str
    pair_verdicts: dict  # test_id -> verdict


@dataclass(frozen=True)
class KillEventBreakdown:
    killed_count: int
    exclusively_assertion: float
    exclusively_exception: float
    mixed: float


@dataclass(frozen=True)
class KillEventReport:
    method_level: KillEventBreakdown
    pair_level: KillEventBreakdown


def generate_mutants(method):
    """Mutants for one eligible MethodInfo, in table order."""
    if not lang.mutation_eligible(method):
        raise IneligibleMethodError(method.method_id)
    out = []
    for k, repl in enumerate(REPLACEMENT_TABLE[method.declared_type]):
        out.append(Mutant(f"{method.method_id}:{k}", method.method_id, repl))
    return out


def _mutant_body(replacement):
    if replacement.kind == "empty_body":
        return []
    v = replacement.value
    if v is None:
        expr = lang.NullLit()
    elif type(v) is bool:
        expr = lang.BoolLit(v)
    elif type(v) is int:
        expr = lang.IntLit(v)
    elif type(v) is float:
        expr = lang.FloatLit(v)
    elif type(v) is str:
        expr = lang.StrLit(v)
    else:  # empty array
        expr = lang.ArrLit([])
    return [lang.ReturnStmt(expr)]


def build_mutated_program(program, mutant):
    """New Program with the mutant body swapped in; originals are shared."""
    original = program.fn_map[mutant.method_id]
    mutated_fn = dc_replace(original, body=_mutant_body(mutant.replacement))
    functions = [mutated_fn if f.name == mutant.method_id else f
                 for f in program.functions]
    mutated = lang.Program(program.project_id, functions, program.tests)
    mutated.fn_map = {f.name: f for f in functions}
    mutated.test_map = program.test_map
    lang.analyze_function(mutated_fn, mutated)
    return mutated


def _run_mutant(program, mutant, covering_tests, mode, step_budget):
    """Rows for one mutant over its covering tests (suite order)."""
    mutated = build_mutated_program(program, mutant)
    rows = []
    for test_id in covering_tests:
        status, fault = run_single_test(mutated, test_id, step_budget=step_budget)
        if status == STATUS_PASS:
            rows.append(MatrixRow(mutant.method_id, test_id, mutant.mutant_id,
                                  mutant.replacement.tag, OUTCOME_SURVIVED))
            continue
        event = EVENT_ASSERTION if fault is not None \
            and fault.kind == FAULT_ASSERTION else EVENT_EXCEPTION
        rows.append(MatrixRow(mutant.method_id, test_id, mutant.mutant_id,
                              mutant.replacement.tag, OUTCOME_KILLED, event))
        if mode == MODE_EARLY_ABORT:
            break
    return rows


_WORKER_STATE = {}


def _init_worker(program, mode, step_budget):
    _WORKER_STATE["program"] = program
    _WORKER_STATE["mode"] = mode
    _WORKER_STATE["step_budget"] = step_budget


def _worker_task(arg):
    mutant, covering_tests = arg
    return _run_mutant(_WORKER_STATE["program"], mutant, covering_tests,
                       _WORKER_STATE["mode"], _WORKER_STATE["step_budget"])


def evaluate_matrix(program, log, mode=MODE_FULL,
                    step_budget=DEFAULT_STEP_BUDGET, workers=1):
    """Evaluate every mutant of every covered, eligible method.

    Requires a green original suite. Results are merged in stable
    (method, mutant, test) order, so the worker count never changes output.
    """
    if mode not in (MODE_FULL, MODE_EARLY_ABORT):
        raise ValueError(f"unknown mode {mode!r}")
    failing = [o.test_id for o in log.outcomes if o.status != STATUS_PASS]
    if failing:
        raise RedTestSuiteError(failing)
    units = []
    for method in lang.enumerate_methods(program):
        if not lang.mutation_eligible(method):
            continue
        covering = log.covering_tests(method.method_id)
        if not covering:
            continue
        for mutant in generate_mutants(method):
            units.append((mutant, covering))
    if workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(program, mode, step_budget)) as pool:
            per_unit = list(pool.map(_worker_task, units, chunksize=8))
    else:
        per_unit = [_run_mutant(program, mutant, covering, mode, step_budget)
                    for mutant, covering in units]
    rows = [row for unit_rows in per_unit for row in unit_rows]
    return MutationMatrix(tuple(rows), mode)


def mutant_kill_status(matrix):
    """mutant_id -> Killed/Survived (well-defined in both modes)."""
    status = {}
    for row in matrix.rows:
        if row.outcome == OUTCOME_KILLED:
            status[row.mutant_id] = OUTCOME_KILLED
        else:
            status.setdefault(row.mutant_id, OUTCOME_SURVIVED)
    return status


def classify_methods(matrix):
    """Per-method and per-pair verdicts from a full matrix.

    A pair is ineffective iff the test kills none of the method's mutants;
    a method is ineffectively tested iff every pair is.
    """
    if matrix.mode != MODE_FULL:
        raise WrongModeError("classification needs a full matrix")
    by_method = {}
    for row in matrix.rows:
        by_method.setdefault(row.method_id, []).append(row)
    out = []
    for method_id, rows in by_method.items():
        pair_killed = {}
        for row in rows:
            pair_killed.setdefault(row.test_id, False)
            if row.outcome == OUTCOME_KILLED:
                pair_killed[row.test_id] = True
        pair_verdicts = {t: (VERDICT_EFFECTIVE if k else VERDICT_INEFFECTIVE)
                         for t, k in pair_killed.items()}
        verdict = VERDICT_INEFFECTIVE if all(
            v == VERDICT_INEFFECTIVE for v in pair_verdicts.values()
        ) else VERDICT_EFFECTIVE
        out.append(MethodVerdict(method_id, verdict, pair_verdicts))
    return out


def _breakdown(event_sets):
    killed = len(event_sets)
    if killed == 0:
        return KillEventBreakdown(0, 0.0, 0.0, 0.0)
    excl_a = sum(1 for ev in event_sets if ev == {EVENT_ASSERTION})
    excl_e = sum(1 for ev in event_sets if ev == {EVENT_EXCEPTION})
    mixed = killed - excl_a - excl_e
    return KillEventBreakdown(killed, excl_a / killed, excl_e / killed,
                              mixed / killed)


def kill_event_report(matrix):
    """Proportions of killed methods/pairs by the kind of event that killed
    them: exclusively assertion, exclusively exception, or mixed."""
    if matrix.mode != MODE_FULL:
        raise WrongModeError("kill-event report needs a full matrix")
    method_events = {}
    pair_events = {}
    for row in matrix.rows:
        if row.outcome != OUTCOME_KILLED:
            continue
        method_events.setdefault(row.method_id, set()).add(row.kill_event)
        pair_events.setdefault((row.method_id, row.test_id), set()).add(row.kill_event)
    return KillEventReport(_breakdown(list(method_events.values())),
                           _breakdown(list(pair_events.values())))


def write_matrix_csv(matrix, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method_id", "test_id", "mutant_id", "replacement",
                    "outcome", "kill_event"])
        for row in matrix.rows:
            w.writerow([row.method_id, row.test_id, row.mutant_id,
                        row.replacement, row.outcome, row.kill_event or ""])


def write_verdicts_csv(verdicts, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method_id", "verdict"])
        for v in verdicts:
            w.writerow([v.method_id, v.verdict])
