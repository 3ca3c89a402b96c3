"""Tree-walking interpreter with enter/exit instrumentation.

Runs a Program's test suite while recording, per (method, test) pair, the
minimal stack distance, invocation count, and line/branch coverage. The test
body sits at stack depth 0, so a directly invoked function has distance 1.
`spawn` runs its target deterministically to completion at the spawn point on
a logical thread whose root frame is one deeper than the spawn site. Builtins
create no frame and contribute no distance, so recorded distances are a lower
bound with respect to work done inside them.

Every frame fires an enter event before the body and an exit event on every
leave path, including fault propagation.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass

from .lang import (
    ArrLit, AssertStmt, AssignStmt, BinaryExpr, BoolLit, BoxExpr, CallExpr,
    CallStmt, FloatLit, IfStmt, IntLit, LetStmt, NullLit, ReturnStmt,
    SpawnStmt, StrLit, UnaryExpr, VarExpr, WhileStmt,
)

FAULT_ASSERTION = "AssertionError"
FAULT_ARITHMETIC = "ArithmeticError"
FAULT_INDEX = "IndexError"
FAULT_NULL_REF = "NullRefError"

STATUS_PASS = "Pass"
STATUS_FAIL = "Fail"
STATUS_EXHAUSTED = "Exhausted"  # step budget or call depth ran out

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

DEFAULT_DEPTH_LIMIT = 400


class UncoveredMethodError(Exception):
    pass


class ResourceExhausted(Exception):
    """Step budget or call depth exceeded; not a language-level fault."""

    def __init__(self, reason, method_id):
        self.reason = reason
        self.method_id = method_id
        super().__init__(f"{reason} in {method_id}")


@dataclass(frozen=True)
class Fault:
    kind: str
    message: str
    method_id: str  # method (or test) on top of the stack when raised


@dataclass(frozen=True)
class TestOutcome:
    test_id: str
    status: str
    error: Fault | None = None


@dataclass(frozen=True)
class TraceRecord:
    method_id: str
    test_id: str
    min_stack_distance: int
    invocation_count: int
    covered_lines: frozenset
    covered_branch_dirs: frozenset


@dataclass(frozen=True, eq=False)
class ExecutionLog:
    outcomes: tuple
    traces: tuple
    trace_map: dict  # (method_id, test_id) -> TraceRecord
    covered_by_test: dict  # test_id -> frozenset of method_ids

    def all_pass(self):
        return all(o.status == STATUS_PASS for o in self.outcomes)

    def covering_tests(self, method_id):
        """Test ids covering the method, in suite order."""
        return [t for t, methods in self.covered_by_test.items() if method_id in methods]


class FaultSignal(Exception):
    def __init__(self, fault):
        self.fault = fault
        super().__init__(fault.message)


class Ref:
    """Boxed value; the only inhabitant of the ref type besides null."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"box({self.value!r})"


class Hooks:
    """Optional observer for frame and test boundaries (no-op base)."""

    def test_start(self, test_id):
        pass

    def test_end(self, test_id, fault):
        pass

    def enter(self, method_id):
        pass

    def exit(self, method_id):
        pass


class _Run:
    __slots__ = ("fns", "hooks", "record", "budget", "depth_limit", "steps",
                 "depth", "test_id", "cur_method", "cur_trace", "traces", "covered")

    def __init__(self, program, hooks, record, step_budget, depth_limit, traces, covered):
        self.fns = program.fn_map
        self.hooks = tuple(hooks)
        self.record = record
        self.budget = step_budget if step_budget is not None else sys.maxsize
        self.depth_limit = depth_limit
        self.steps = 0
        self.depth = 0
        self.test_id = ""
        self.cur_method = ""
        self.cur_trace = None
        self.traces = traces
        self.covered = covered


def _fault(rt, kind, message):
    raise FaultSignal(Fault(kind, message, rt.cur_method))


def _require_bool(v, rt, what):
    if v is True or v is False:
        return v
    if v is None:
        _fault(rt, FAULT_NULL_REF, f"{what} is null")
    _fault(rt, FAULT_ARITHMETIC, f"{what} is not a bool")


def values_equal(a, b):
    """Structural equality; total over all runtime values."""
    if a is None or b is None:
        return a is b
    ta, tb = type(a), type(b)
    if ta is bool or tb is bool:
        return ta is tb and a == b
    if ta in (int, float) and tb in (int, float):
        return a == b
    if ta is not tb:
        return False
    if ta is tuple:
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if ta is Ref:
        return values_equal(a.value, b.value)
    return a == b  # str


def _check_int(rt, v):
    if v < INT_MIN or v > INT_MAX:
        _fault(rt, FAULT_ARITHMETIC, "int overflow")
    return v


def _num_fault(rt, op, l, r):
    if l is None or r is None:
        _fault(rt, FAULT_NULL_REF, f"null operand of {op}")
    _fault(rt, FAULT_ARITHMETIC, f"non-numeric operand of {op}")


# ---------------------------------------------------------------------------
# Expression evaluation

def _eval(e, env, rt):
    return _EVAL[type(e)](e, env, rt)


def _eval_int(e, env, rt):
    return e.value


def _eval_float(e, env, rt):
    return e.value


def _eval_str(e, env, rt):
    return e.value


def _eval_bool(e, env, rt):
    return e.value


def _eval_null(e, env, rt):
    return None


def _eval_arr(e, env, rt):
    return tuple(_EVAL[type(x)](x, env, rt) for x in e.items)


def _eval_box(e, env, rt):
    return Ref(_EVAL[type(e.value)](e.value, env, rt))


def _eval_var(e, env, rt):
    return env[e.name]


def _eval_call(e, env, rt):
    fn = rt.fns.get(e.name)
    args = [_EVAL[type(a)](a, env, rt) for a in e.args]
    if fn is None:
        return _call_builtin(e.name, args, rt)
    return _call_function(rt, fn, args)


def _eval_unary(e, env, rt):
    v = _EVAL[type(e.operand)](e.operand, env, rt)
    if e.op == "!":
        return not _require_bool(v, rt, "operand of !")
    t = type(v)
    if t is int:
        return _check_int(rt, -v)
    if t is float:
        return -v
    if v is None:
        _fault(rt, FAULT_NULL_REF, "null operand of unary -")
    _fault(rt, FAULT_ARITHMETIC, "non-numeric operand of unary -")


def _trunc_div(l, r):
    q = l // r
    if q < 0 and q * r != l:
        q += 1
    return q


def _eval_binary(e, env, rt):
    op = e.op
    if op == "&&":
        l = _EVAL[type(e.left)](e.left, env, rt)
        if not _require_bool(l, rt, "operand of &&"):
            return False
        return _require_bool(_EVAL[type(e.right)](e.right, env, rt), rt, "operand of &&")
    if op == "||":
        l = _EVAL[type(e.left)](e.left, env, rt)
        if _require_bool(l, rt, "operand of ||"):
            return True
        return _require_bool(_EVAL[type(e.right)](e.right, env, rt), rt, "operand of ||")
    l = _EVAL[type(e.left)](e.left, env, rt)
    r = _EVAL[type(e.right)](e.right, env, rt)
    if op == "==":
        return values_equal(l, r)
    if op == "!=":
        return not values_equal(l, r)
    tl, tr = type(l), type(r)
    both_int = tl is int and tr is int
    if not both_int:
        if tl not in (int, float) or tr not in (int, float):
            _num_fault(rt, op, l, r)
    if op == "+":
        return _check_int(rt, l + r) if both_int else float(l) + float(r)
    if op == "-":
        return _check_int(rt, l - r) if both_int else float(l) - float(r)
    if op == "*":
        return _check_int(rt, l * r) if both_int else float(l) * float(r)
    if op == "/":
        if both_int:
            if r == 0:
                _fault(rt, FAULT_ARITHMETIC, "division by zero")
            return _check_int(rt, _trunc_div(l, r))
        lf, rf = float(l), float(r)
        if rf == 0.0:
            if lf == 0.0 or math.isnan(lf):
                return math.nan
            return math.copysign(math.inf, rf) * math.copysign(1.0, lf)
        return lf / rf
    if op == "%":
        if both_int:
            if r == 0:
                _fault(rt, FAULT_ARITHMETIC, "modulo by zero")
            return l - _trunc_div(l, r) * r
        lf, rf = float(l), float(r)
        if rf == 0.0:
            return math.nan
        return math.fmod(lf, rf)
    # comparisons
    if op == "<":
        return l < r
    if op == "<=":
        return l <= r
    if op == ">":
        return l > r
    return l >= r


_EVAL = {
    IntLit: _eval_int,
    FloatLit: _eval_float,
    StrLit: _eval_str,
    BoolLit: _eval_bool,
    NullLit: _eval_null,
    ArrLit: _eval_arr,
    BoxExpr: _eval_box,
    VarExpr: _eval_var,
    CallExpr: _eval_call,
    BinaryExpr: _eval_binary,
    UnaryExpr: _eval_unary,
}


def _call_builtin(name, args, rt):
    if name == "len":
        a = args[0]
        if type(a) is tuple:
            return len(a)
        if a is None:
            _fault(rt, FAULT_NULL_REF, "len of null")
        _fault(rt, FAULT_INDEX, "len of non-array")
    if name == "get":
        a, i = args
        if a is None:
            _fault(rt, FAULT_NULL_REF, "get from null")
        if type(a) is not tuple:
            _fault(rt, FAULT_INDEX, "get from non-array")
        if type(i) is not int:
            _fault(rt, FAULT_INDEX, "array index is not an int")
        if i < 0 or i >= len(a):
            _fault(rt, FAULT_INDEX, f"index {i} out of range for length {len(a)}")
        return a[i]
    if name == "deref":
        r = args[0]
        if type(r) is Ref:
            return r.value
        if r is None:
            _fault(rt, FAULT_NULL_REF, "deref of null")
        _fault(rt, FAULT_NULL_REF, "deref of non-ref")
    # str_cat
    a, b = args
    if type(a) is str and type(b) is str:
        return a + b
    if a is None or b is None:
        _fault(rt, FAULT_NULL_REF, "null operand of str_cat")
    _fault(rt, FAULT_ARITHMETIC, "non-string operand of str_cat")


# ---------------------------------------------------------------------------
# Statement execution

_FALLTHROUGH = object()


def _tick(rt):
    rt.steps += 1
    if rt.steps > rt.budget:
        raise ResourceExhausted("step budget exceeded", rt.cur_method)


def _exec_block(stmts, env, rt):
    for stmt in stmts:
        out = _EXEC[type(stmt)](stmt, env, rt)
        if out is not _FALLTHROUGH:
            return out
    return _FALLTHROUGH


def _exec_let(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    env[s.name] = _EVAL[type(s.expr)](s.expr, env, rt)
    return _FALLTHROUGH


def _exec_assign(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    env[s.name] = _EVAL[type(s.expr)](s.expr, env, rt)
    return _FALLTHROUGH


def _exec_if(s, env, rt):
    _tick(rt)
    tr = rt.cur_trace
    if tr is not None:
        tr[2].add(s.index)
    c = _require_bool(_EVAL[type(s.cond)](s.cond, env, rt), rt, "if condition")
    if tr is not None:
        tr[3].add((s.branch_id, c))
    if c:
        return _exec_block(s.then, env, rt)
    if s.orelse is not None:
        return _exec_block(s.orelse, env, rt)
    return _FALLTHROUGH


def _exec_while(s, env, rt):
    tr = rt.cur_trace
    if tr is not None:
        tr[2].add(s.index)
    cond = s.cond
    body = s.body
    while True:
        _tick(rt)  # one step per condition evaluation
        c = _require_bool(_EVAL[type(cond)](cond, env, rt), rt, "while condition")
        if tr is not None:
            tr[3].add((s.branch_id, c))
        if not c:
            return _FALLTHROUGH
        out = _exec_block(body, env, rt)
        if out is not _FALLTHROUGH:
            return out


def _exec_return(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    if s.expr is None:
        return None
    return _EVAL[type(s.expr)](s.expr, env, rt)


def _exec_assert(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    v = _EVAL[type(s.expr)](s.expr, env, rt)
    if v is not True:
        _fault(rt, FAULT_ASSERTION, "assertion failed")
    return _FALLTHROUGH


def _exec_spawn(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    args = [_EVAL[type(a)](a, env, rt) for a in s.args]
    # Deterministic logical thread: runs to completion here, on its own
    # stack whose root frame is one deeper than the spawn site.
    _call_function(rt, rt.fns[s.target], args)
    return _FALLTHROUGH


def _exec_call(s, env, rt):
    _tick(rt)
    if rt.cur_trace is not None:
        rt.cur_trace[2].add(s.index)
    _eval_call(s.call, env, rt)
    return _FALLTHROUGH


_EXEC = {
    LetStmt: _exec_let,
    AssignStmt: _exec_assign,
    IfStmt: _exec_if,
    WhileStmt: _exec_while,
    ReturnStmt: _exec_return,
    AssertStmt: _exec_assert,
    SpawnStmt: _exec_spawn,
    CallStmt: _exec_call,
}


def _call_function(rt, fn, args):
    depth = rt.depth + 1
    if depth > rt.depth_limit:
        raise ResourceExhausted("call depth exceeded", fn.name)
    rt.depth = depth
    new_trace = None
    if rt.record:
        key = (fn.name, rt.test_id)
        new_trace = rt.traces.get(key)
        if new_trace is None:
            new_trace = [depth, 1, set(), set()]
            rt.traces[key] = new_trace
            rt.covered[rt.test_id].add(fn.name)
        else:
            if depth < new_trace[0]:
                new_trace[0] = depth
            new_trace[1] += 1
    for h in rt.hooks:
        h.enter(fn.name)
    prev_method = rt.cur_method
    prev_trace = rt.cur_trace
    rt.cur_method = fn.name
    rt.cur_trace = new_trace
    try:
        env = {}
        for (pname, _), a in zip(fn.params, args):
            env[pname] = a
        out = _exec_block(fn.body, env, rt)
        return None if out is _FALLTHROUGH else out
    finally:
        rt.cur_method = prev_method
        rt.cur_trace = prev_trace
        rt.depth -= 1
        for h in rt.hooks:
            h.exit(fn.name)


def _ensure_recursion_headroom(depth_limit):
    # each mini-language frame costs a handful of Python frames
    needed = depth_limit * 12 + 2000
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)


def _execute_test(program, test, hooks, record, step_budget, depth_limit, traces, covered):
    """Run one test body at depth 0; faults become outcomes, resource
    exhaustion propagates as ResourceExhausted."""
    _ensure_recursion_headroom(depth_limit)
    rt = _Run(program, hooks, record, step_budget, depth_limit, traces, covered)
    rt.test_id = test.name
    rt.cur_method = test.name
    if record:
        covered.setdefault(test.name, set())
    for h in rt.hooks:
        h.test_start(test.name)
    fault = None
    try:
        _exec_block(test.body, {}, rt)
    except FaultSignal as sig:
        fault = sig.fault
    finally:
        for h in rt.hooks:
            h.test_end(test.name, fault)
    if fault is None:
        return TestOutcome(test.name, STATUS_PASS)
    return TestOutcome(test.name, STATUS_FAIL, fault)


def run_suite(program, hooks=(), record=True, step_budget=None,
              depth_limit=DEFAULT_DEPTH_LIMIT):
    """Execute every test in program order and return the ExecutionLog.

    Test failures are data, not exceptions. With record=False only outcomes
    are produced (used for plain timing runs and mutant execution).
    """
    traces = {}
    covered = {}
    outcomes = []
    for test in program.tests:
        outcomes.append(_execute_test(program, test, hooks, record,
                                      step_budget, depth_limit, traces, covered))
    records = []
    trace_map = {}
    test_order = [t.name for t in program.tests]
    for f in program.functions:
        for t in test_order:
            raw = traces.get((f.name, t))
            if raw is None:
                continue
            rec = TraceRecord(f.name, t, raw[0], raw[1],
                              frozenset(raw[2]), frozenset(raw[3]))
            records.append(rec)
            trace_map[(f.name, t)] = rec
    covered_frozen = {t: frozenset(covered.get(t, ())) for t in test_order}
    return ExecutionLog(tuple(outcomes), tuple(records), trace_map, covered_frozen)


def run_single_test(program, test_id, step_budget=None,
                    depth_limit=DEFAULT_DEPTH_LIMIT):
    """Run one test without recording; returns (status, fault).

    Status is Exhausted when the step budget or depth limit ran out.
    """
    test = program.test_map[test_id]
    try:
        outcome = _execute_test(program, test, (), False, step_budget,
                                depth_limit, {}, {})
    except ResourceExhausted:
        return STATUS_EXHAUSTED, None
    return outcome.status, outcome.error


def aggregate_method_distance(log, method_id):
    """Minimal stack distance of a method over all covering tests."""
    best = None
    for rec in log.traces:
        if rec.method_id == method_id:
            if best is None or rec.min_stack_distance < best:
                best = rec.min_stack_distance
    if best is None:
        raise UncoveredMethodError(method_id)
    return best


def write_traces_csv(log, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method_id", "test_id", "min_stack_distance",
                    "invocation_count", "covered_line_count",
                    "covered_branch_dir_count"])
        for rec in log.traces:
            w.writerow([rec.method_id, rec.test_id, rec.min_stack_distance,
                        rec.invocation_count, len(rec.covered_lines),
                        len(rec.covered_branch_dirs)])


def write_tests_csv(log, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["test_id", "status", "error_kind"])
        for o in log.outcomes:
            w.writerow([o.test_id, o.status, o.error.kind if o.error else ""])
