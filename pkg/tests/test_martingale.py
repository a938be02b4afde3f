import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randlab.bits import strings_up_to
from randlab.errors import NotMonotoneError
from randlab.example import trigger_example
from randlab.martingale import (
    ApproximationScheme,
    Log2,
    ProbBoundCertificate,
    TableG,
    check_bounded_in_probability,
    check_effective_approximation,
    check_submartingale,
    classify,
    doob_check,
    equivalence_certificate,
    likelihood_ratio,
    ratio_process,
    reciprocal_bound,
    table_f,
    table_process,
)
from randlab.measures import bernoulli, marginals, point_mass, table_measure, uniform, uniform_product
from randlab.rational import INF

THIRD = F(1, 3)


def test_likelihood_ratio_examples():
    assert likelihood_ratio(uniform(), uniform(), "0101") == 1
    assert likelihood_ratio(uniform(), bernoulli(THIRD), "11") == F(4, 9)
    p = table_measure({"0": F(0), "1": F(1)})
    assert likelihood_ratio(p, uniform(), "0") == INF


def test_submartingale_examples():
    rep = check_submartingale(uniform(), ratio_process(uniform(), uniform()), 6)
    assert rep.passed and rep.data["martingale"]
    rep = check_submartingale(uniform(), ratio_process(uniform(), bernoulli(THIRD)), 6)
    assert rep.passed and rep.data["martingale"]
    rep = check_submartingale(uniform(), table_process(lambda x: F(len(x))), 4)
    assert rep.passed and rep.data["strict_everywhere"] and not rep.data["martingale"]


def test_decreasing_process_is_not_submartingale():
    rep = check_submartingale(uniform(), table_process(lambda x: F(-len(x))), 3)
    assert not rep.passed


def test_doob_worked_example():
    rep = doob_check(uniform(), ratio_process(uniform(), point_mass("0")), 2, [2])
    (rec,) = rep.records
    assert (rec.lhs, rec.relation, rec.rhs, rec.passed) == (F(1, 4), "<=", F(1, 2), True)


def test_doob_identical_measures():
    rep = doob_check(uniform(), ratio_process(uniform(), uniform()), 5, [1])
    assert rep.passed and rep.records[0].lhs == 0 and rep.records[0].rhs == 1


def test_doob_bernoulli_brute_force():
    p, q = uniform(), bernoulli(THIRD)
    rep = doob_check(p, ratio_process(p, q), 6, [1, 2, 4])
    assert rep.passed
    for m in (1, 2, 4):
        oracle = sum(
            (p(x) for x in strings_up_to(6) if len(x) == 6
             and max(q(x[:i]) / p(x[:i]) for i in range(1, 7)) > m),
            F(0),
        )
        assert rep.data[f"P(M_{m})"] == oracle


def zeros_scheme(c=1, shift=0):
    def f(x, n):
        return F(n + shift) if x == "0" * n else -INF
    return ApproximationScheme(f, c)


def test_approximation_examples():
    same = ApproximationScheme(lambda x, n: F(0), 1)
    assert check_effective_approximation(ratio_process(uniform(), uniform()), same, 5).passed
    proc = ratio_process(uniform(), point_mass("0"))
    rep = check_effective_approximation(proc, zeros_scheme(), 6)
    assert rep.passed and rep.data["tightest_c"] == 0
    rep = check_effective_approximation(proc, zeros_scheme(c=0, shift=1), 6)
    assert not rep.passed
    assert ["0", 1] in rep.data["lower_violations"]


def test_table_g_monotonicity():
    proc = table_process({"0": F(1), "1": F(2)}, 1)
    g = TableG({1: 5, 2: 3})
    scheme = ApproximationScheme(table_f({("0", 1): F(5), ("1", 1): F(3)}), 1, g, name="table")
    with pytest.raises(NotMonotoneError):
        check_effective_approximation(proc, scheme, 1)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=F(1, 1000), max_value=1000), st.fractions(min_value=-12, max_value=12))
def test_log2_order_matches_floats(r, q):
    exact = math.log2(r)
    if abs(exact - float(q)) > 1e-9:
        assert (Log2(r) < q) == (exact < float(q))


def test_log2_exact_and_floor():
    assert Log2(F(8)).exact() == 3
    assert Log2(F(1, 4)).exact() == -2
    assert Log2(F(3)).exact() is None
    assert Log2(F(3)).floor() == 1
    assert Log2(F(1, 3)).floor() == -2


def test_bounded_in_probability():
    assert check_bounded_in_probability(uniform(), uniform(), reciprocal_bound(), 5, [1, 2, 4]).passed
    rep = check_bounded_in_probability(uniform(), bernoulli(THIRD), reciprocal_bound(), 6, [2, 4, 8])
    for k in (2, 4, 8):
        oracle = sum((F(1, 64) for x in strings_up_to(6) if len(x) == 6
                      and F(1, 64) / bernoulli(THIRD)(x) > k), F(0))
        assert rep.data[f"mass_k={k}"] == oracle
    rep = check_bounded_in_probability(uniform(), point_mass("0"), reciprocal_bound(), 2, [2])
    assert not rep.passed and rep.data["mass_k=2"] == F(3, 4)


def test_increasing_certificate_flagged():
    cert = ProbBoundCertificate(lambda k: F(k), "k")
    assert not check_bounded_in_probability(uniform(), uniform(), cert, 3, [1, 2]).passed


def test_classify_examples():
    r = classify(uniform(), uniform(), "0110")
    assert r.ratios == [1] * 5 and r.running_min[-1] == 1 and r.regime == "bounded"
    r = classify(uniform(), bernoulli(THIRD), "010101")
    assert [r.running_min[2 * k] for k in range(4)] == [F(8, 9) ** k for k in range(4)]
    r = classify(uniform(), bernoulli(THIRD), "000000")
    assert r.ratios == [F(4, 3) ** n for n in range(7)]
    assert r.running_min[-1] == 1 and r.regime == "bounded"


def test_classify_decay_regime():
    r = classify(uniform(), bernoulli(THIRD), "11111111", threshold=F(1, 10))
    assert r.regime == "decayed"


def test_equivalence_examples():
    mx, _ = marginals(trigger_example(F(1, 2), {1: "1"}))
    assert equivalence_certificate(mx, uniform(), F(1, 2), 2, 6).passed
    rep = equivalence_certificate(uniform_product(), trigger_example(F(1, 2), {1: "1"}), THIRD, 3, 4)
    assert rep.passed
    assert (rep.data["min_ratio"], rep.data["max_ratio"]) == (F(1, 2), F(3, 2))
    rep = equivalence_certificate(uniform(), bernoulli(THIRD), F(1, 2), 2, 4)
    assert not rep.passed
    assert rep.data["argmax"] == "0000" and rep.data["max_ratio"] == F(256, 81)
