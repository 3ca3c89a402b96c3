"""Rank correlation between minimal stack distance and mutation outcome,
plus distance-bucket summaries.

Coefficients use mid-ranks (average ranks for ties). The Spearman p-value
comes from the t statistic t = r*sqrt((n-2)/(1-r^2)) against a Student t
distribution with n-2 degrees of freedom; Kendall tau-b uses the
tie-corrected normal approximation of the tau statistic. The t CDF is
computed here via the regularized incomplete beta function so the package
needs no statistics dependency.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .metrics import LABEL_INEFFECTIVE

METHOD_SPEARMAN = "spearman"
METHOD_KENDALL = "kendall_tau_b"


class DegenerateInputError(Exception):
    """A correlation input vector is constant; the coefficient is undefined."""


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    coefficient: float
    p_value: float
    n: int


@dataclass(frozen=True)
class DistanceBucket:
    distance: int
    method_proportion: float
    ineffective_proportion: float


# ---------------------------------------------------------------------------
# Regularized incomplete beta (continued fraction, Lentz's method)

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            break
    return h


def regularized_incomplete_beta(a, b, x):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (a * math.log(x) + b * math.log1p(-x)
                - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t, df):
    """P(T > t) for Student's t with df degrees of freedom."""
    if t < 0.0:
        return 1.0 - student_t_sf(-t, df)
    x = df / (df + t * t)
    return 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)


def normal_sf(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Rank correlation

def _check_inputs(x, y):
    if len(x) != len(y):
        raise ValueError("input vectors differ in length")
    if len(x) < 3:
        raise ValueError("need at least 3 observations")
    if all(v == x[0] for v in x):
        raise DegenerateInputError("first vector is constant")
    if all(v == y[0] for v in y):
        raise DegenerateInputError("second vector is constant")


def midranks(values):
    """Ranks starting at 1; tied values share the average of their ranks."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(a, b):
    n = len(a)
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    cov = sxx = syy = 0.0
    for u, v in zip(a, b):
        du = u - mean_a
        dv = v - mean_b
        cov += du * dv
        sxx += du * du
        syy += dv * dv
    return cov / math.sqrt(sxx * syy)


def spearman(x, y):
    """Spearman rank correlation with a two-sided t-approximation p-value."""
    _check_inputs(x, y)
    n = len(x)
    r = _pearson(midranks(x), midranks(y))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = min(1.0, 2.0 * student_t_sf(abs(t), n - 2))
    return CorrelationResult(METHOD_SPEARMAN, r, p, n)


def _merge_count(arr):
    """Inversions counted by merge sort; arr is modified."""
    n = len(arr)
    if n < 2:
        return 0
    mid = n // 2
    left = arr[:mid]
    right = arr[mid:]
    count = _merge_count(left) + _merge_count(right)
    i = j = k = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            arr[k] = left[i]
            i += 1
        else:
            arr[k] = right[j]
            j += 1
            count += len(left) - i
        k += 1
    while i < len(left):
        arr[k] = left[i]
        i += 1
        k += 1
    while j < len(right):
        arr[k] = right[j]
        j += 1
        k += 1
    return count


def _tie_stats(values):
    """(sum t(t-1)/2, sum t(t-1)(t-2), sum t(t-1)(2t+5)) over tie groups."""
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    t1 = t2 = t3 = 0
    for t in counts.values():
        t1 += t * (t - 1) // 2
        t2 += t * (t - 1) * (t - 2)
        t3 += t * (t - 1) * (2 * t + 5)
    return t1, t2, t3


def kendall_tau_b(x, y):
    """Tie-corrected Kendall tau-b with a normal-approximation p-value."""
    _check_inputs(x, y)
    n = len(x)
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    xs = [x[i] for i in order]
    ys = [y[i] for i in order]
    # pairs tied in x, in y, and jointly
    xtie, x0, x1 = _tie_stats(xs)
    ytie, y0, y1 = _tie_stats(ys)
    joint = {}
    for xv, yv in zip(xs, ys):
        joint[(xv, yv)] = joint.get((xv, yv), 0) + 1
    xytie = sum(t * (t - 1) // 2 for t in joint.values())
    # discordant pairs = inversions of y once sorted by (x, y)
    dis = _merge_count(ys[:])
    tot = n * (n - 1) // 2
    con_minus_dis = tot - xtie - ytie + xytie - 2 * dis
    denom = math.sqrt(float(tot - xtie)) * math.sqrt(float(tot - ytie))
    tau = con_minus_dis / denom
    tau = max(-1.0, min(1.0, tau))
    m = n * (n - 1)
    var = ((m * (2 * n + 5) - x1 - y1) / 18.0
           + (2.0 * xtie * ytie) / m
           + x0 * y0 / (9.0 * m * (n - 2)))
    if var <= 0.0:
        p = 1.0
    else:
        z = con_minus_dis / math.sqrt(var)
        p = min(1.0, 2.0 * normal_sf(abs(z)))
    return CorrelationResult(METHOD_KENDALL, tau, p, n)


# ---------------------------------------------------------------------------
# Distance buckets

def distance_bucket_report(method_rows, min_proportion=0.005):
    """Per-distance (proportion of methods, proportion ineffective), in
    ascending distance order, truncated after the first bucket whose method
    proportion drops below min_proportion."""
    if not method_rows:
        raise ValueError("empty dataset")
    total = len(method_rows)
    by_distance = {}
    for r in method_rows:
        bucket = by_distance.setdefault(r.min_stack_distance, [0, 0])
        bucket[0] += 1
        if r.label == LABEL_INEFFECTIVE:
            bucket[1] += 1
    out = []
    for d in sorted(by_distance):
        count, ineff = by_distance[d]
        out.append(DistanceBucket(d, count / total, ineff / count))
        if count / total < min_proportion:
            break
    return out


# ---------------------------------------------------------------------------
# Exports

def write_correlation_csv(rows, path):
    """rows: iterable of (project_id, CorrelationResult | None); None rows
    are degenerate inputs, flagged with a NaN coefficient."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["project_id", "method", "coefficient", "p_value", "n"])
        for project_id, method, result, n in rows:
            if result is None:
                w.writerow([project_id, method, "nan", "", n])
            else:
                w.writerow([project_id, result.method, repr(result.coefficient),
                            repr(result.p_value), result.n])


def write_buckets_csv(buckets, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["distance", "method_proportion", "ineffective_proportion"])
        for b in buckets:
            w.writerow([b.distance, repr(b.method_proportion),
                        repr(b.ineffective_proportion)])
