"""tplab: a desk-scale test-effectiveness laboratory.

Parses a small imperative language, runs test suites under enter/exit
instrumentation to record minimal stack distances and per-test coverage,
evaluates extreme-mutation matrices to find pseudo-tested methods, correlates
distance with mutation outcome, and predicts mutation results with a
from-scratch random forest.
"""

from .lang import (
    MethodInfo, Program, enumerate_methods, format_program, load_project,
    mutation_eligible, parse_project,
)
from .interp import (
    ExecutionLog, Fault, TestOutcome, TraceRecord, aggregate_method_distance,
    run_suite,
)
from .mutation import (
    MutationMatrix, classify_methods, evaluate_matrix, generate_mutants,
    kill_event_report,
)
from .metrics import FeatureVector, build_method_dataset, build_pair_dataset
from .stats import (
    CorrelationResult, distance_bucket_report, kendall_tau_b, spearman,
)

__version__ = "0.1.0"

__all__ = [
    "MethodInfo", "Program", "enumerate_methods", "format_program",
    "load_project", "mutation_eligible", "parse_project",
    "ExecutionLog", "Fault", "TestOutcome", "TraceRecord",
    "aggregate_method_distance", "run_suite",
    "MutationMatrix", "classify_methods", "evaluate_matrix",
    "generate_mutants", "kill_event_report",
    "FeatureVector", "build_method_dataset", "build_pair_dataset",
    "CorrelationResult", "distance_bucket_report", "kendall_tau_b", "spearman",
    "__version__",
]
