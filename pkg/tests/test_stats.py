import math
import random

import pytest
from scipy import stats as scipy_stats

from oracles import (
    oracle_kendall_tau_b, oracle_spearman, oracle_spearman_permutation_p,
)
from tplab.metrics import FeatureVector
from tplab.stats import (
    DegenerateInputError, distance_bucket_report, kendall_tau_b, midranks,
    normal_sf, regularized_incomplete_beta, spearman, student_t_sf,
)


def method_row(distance, label):
    return FeatureVector("method", "m", None, 1, 0, 1.0, 1.0, 1, 1, 1,
                         distance, "numeric", label)


def random_vectors(seed, count, sizes, tie_prone=True):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice(sizes)
        if tie_prone and rng.random() < 0.5:
            x = [rng.randint(0, 5) for _ in range(n)]
            y = [rng.randint(0, 3) for _ in range(n)]
        else:
            x = [rng.uniform(-10, 10) for _ in range(n)]
            y = [rng.uniform(-10, 10) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        out.append((x, y))
    return out


def test_trivial_monotone_examples():
    assert spearman([1, 2, 3], [1, 2, 3]).coefficient == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]).coefficient == pytest.approx(-1.0)
    assert spearman([1, 2, 3], [1, 2, 3]).p_value == 0.0


def test_kendall_trivial_and_tied_examples():
    assert kendall_tau_b([1, 2, 3, 4], [2, 4, 6, 8]).coefficient == \
        pytest.approx(1.0)
    assert kendall_tau_b([1, 1, 2, 2], [0, 0, 1, 1]).coefficient == \
        pytest.approx(1.0)


def test_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateInputError):
        kendall_tau_b([1, 2, 3], [7, 7, 7])
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2])
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])


def test_midranks_average_ties():
    assert midranks([10, 20, 20, 30]) == [1.0, 2.5, 2.5, 4.0]


def test_coefficients_match_brute_force_oracles():
    vectors = random_vectors(seed=101, count=200, sizes=range(5, 40))
    assert len(vectors) >= 190
    for x, y in vectors:
        assert spearman(x, y).coefficient == \
            pytest.approx(oracle_spearman(x, y), abs=1e-9)
        assert kendall_tau_b(x, y).coefficient == \
            pytest.approx(oracle_kendall_tau_b(x, y), abs=1e-9)


def test_coefficients_match_scipy():
    for x, y in random_vectors(seed=77, count=60, sizes=range(6, 30)):
        sp = spearman(x, y)
        ref = scipy_stats.spearmanr(x, y)
        assert sp.coefficient == pytest.approx(ref.statistic, abs=1e-12)
        assert sp.p_value == pytest.approx(ref.pvalue, abs=1e-9)
        kd = kendall_tau_b(x, y)
        ref_k = scipy_stats.kendalltau(x, y, method="asymptotic")
        assert kd.coefficient == pytest.approx(ref_k.statistic, abs=1e-12)
        assert kd.p_value == pytest.approx(ref_k.pvalue, abs=1e-9)


def test_p_value_matches_exact_permutation_for_small_n():
    # tie-free vectors: with heavy ties at n <= 8 the discrete null is too
    # coarse for the t approximation to land within 0.02 of any enumeration
    vectors = random_vectors(seed=42, count=40, sizes=(7, 8), tie_prone=False)
    assert len(vectors) >= 30
    for x, y in vectors[:30]:
        p_approx = spearman(x, y).p_value
        p_exact = oracle_spearman_permutation_p(x, y)
        assert abs(p_approx - p_exact) <= 0.02, (x, y, p_approx, p_exact)


def test_rank_invariance_under_increasing_transforms():
    rng = random.Random(5)
    transforms = [lambda v: 3.0 * v + 7.0, math.exp,
                  lambda v: v ** 3, lambda v: math.atan(v) * 2.0]
    for _ in range(25):
        n = rng.randint(5, 20)
        x = [rng.uniform(-3, 3) for _ in range(n)]
        y = [rng.uniform(-3, 3) for _ in range(n)]
        base_s = spearman(x, y).coefficient
        base_k = kendall_tau_b(x, y).coefficient
        f = rng.choice(transforms)
        tx = [f(v) for v in x]
        assert spearman(tx, y).coefficient == pytest.approx(base_s, abs=1e-12)
        assert kendall_tau_b(tx, y).coefficient == \
            pytest.approx(base_k, abs=1e-12)


def test_symmetry_and_label_negation():
    x = [1, 4, 2, 8, 5, 7]
    y = [0, 1, 0, 1, 1, 0]
    assert spearman(x, y).coefficient == \
        pytest.approx(spearman(y, x).coefficient, abs=1e-12)
    flipped = [1 - v for v in y]
    assert spearman(x, flipped).coefficient == \
        pytest.approx(-spearman(x, y).coefficient, abs=1e-12)
    assert kendall_tau_b(x, flipped).coefficient == \
        pytest.approx(-kendall_tau_b(x, y).coefficient, abs=1e-12)


def test_classical_formula_on_tie_free_data():
    rng = random.Random(9)
    for _ in range(20):
        n = rng.randint(4, 25)
        x = rng.sample(range(1000), n)
        y = rng.sample(range(1000), n)
        rx = midranks(x)
        ry = midranks(y)
        d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
        classical = 1.0 - 6.0 * d2 / (n * (n * n - 1))
        assert spearman(x, y).coefficient == pytest.approx(classical, abs=1e-12)


def test_t_cdf_against_scipy():
    for df in (1, 2, 5, 10, 30, 100):
        for t in (0.0, 0.3, 1.0, 2.5, 7.0, 20.0):
            mine = student_t_sf(t, df)
            ref = scipy_stats.t.sf(t, df)
            assert mine == pytest.approx(ref, rel=1e-10, abs=1e-300)
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0


def test_normal_sf_against_scipy():
    for z in (0.0, 0.5, 1.96, 3.2, 6.0):
        assert normal_sf(z) == pytest.approx(scipy_stats.norm.sf(z), rel=1e-12)


def test_bucket_single_distance():
    rows = [method_row(1, "effective") for _ in range(4)]
    buckets = distance_bucket_report(rows)
    assert len(buckets) == 1
    assert buckets[0].distance == 1
    assert buckets[0].method_proportion == 1.0
    assert buckets[0].ineffective_proportion == 0.0


def test_bucket_proportions_partition_before_cropping():
    rows = ([method_row(1, "effective")] * 5
            + [method_row(2, "ineffective")] * 3
            + [method_row(3, "ineffective")] * 2)
    buckets = distance_bucket_report(rows, min_proportion=0.0)
    assert sum(b.method_proportion for b in buckets) == pytest.approx(1.0)
    assert [b.distance for b in buckets] == [1, 2, 3]


def test_bucket_cropping_rule():
    rows = ([method_row(1, "effective")] * 98
            + [method_row(2, "ineffective")]
            + [method_row(3, "ineffective")] * 1)
    # distance-2 bucket has proportion 0.01; with a 5% threshold the report
    # includes it and stops there
    buckets = distance_bucket_report(rows, min_proportion=0.05)
    assert [b.distance for b in buckets] == [1, 2]


def test_bucket_empty_dataset_rejected():
    with pytest.raises(ValueError):
        distance_bucket_report([])


def test_monotone_corpus_bucket_trend(corpus_artifacts):
    rows = corpus_artifacts["monotone"].method_rows
    buckets = distance_bucket_report(rows)
    props = [b.ineffective_proportion for b in buckets]
    assert props == sorted(props)
    assert props[0] == 0.0 and props[-1] == 1.0
