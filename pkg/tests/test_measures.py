from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randlab.bits import strings_of_length, strings_up_to
from randlab.errors import DepthExceededError, ZeroConditionError
from randlab.example import trigger_example
from randlab.measures import (
    bernoulli,
    check_consistency,
    conditional,
    conditional_trace,
    eval_measure,
    joint_eval,
    joint_table,
    marginals,
    nonoverlapping_cover,
    perturb_leaf,
    point_mass,
    prefix_set_measure,
    rect_disjoint,
    rect_leaves,
    table_measure,
    uniform,
    uniform_product,
)


def trig1():
    return trigger_example(F(1, 2), {1: "1"})


# -- evaluation ------------------------------------------------------------

def test_uniform_values():
    assert eval_measure(uniform(), "0110") == F(1, 16)
    assert eval_measure(uniform(), "") == 1


def test_bernoulli_is_probability_of_one():
    assert eval_measure(bernoulli(F(1, 3)), "01") == F(2, 9)
    assert bernoulli(F(1, 3))("1") == F(1, 3)


def test_depth_cap_enforced():
    with pytest.raises(DepthExceededError):
        uniform(4)("00000")


def test_joint_eval_product():
    assert joint_eval(uniform_product(), "0", "1") == F(1, 4)
    assert joint_eval(uniform_product(), "", "") == 1


def test_joint_eval_example_value():
    assert joint_eval(trig1(), "0", "11") == F(3, 16)


# -- marginals and conditionals -------------------------------------------

def test_product_marginals_are_uniform():
    mx, my = marginals(uniform_product())
    for s in strings_up_to(4):
        assert mx(s) == my(s) == F(1, 2 ** len(s))


def test_example_x_marginal_uniform():
    mx, _ = marginals(trig1())
    assert all(mx(s) == F(1, 2 ** len(s)) for s in strings_up_to(6))


def test_example_y_marginal_is_not_uniform():
    # recorded deviation: the additive recursion shifts mass along y
    _, my = marginals(trig1())
    assert my("11") == F(5, 16)
    assert my("10") == F(3, 16)


def test_table_joint_marginals():
    mx, my = marginals(joint_table({("0", "1"): F(1)}))
    px = table_measure({"0": F(1), "1": F(0)})
    py = table_measure({"0": F(0), "1": F(1)})
    for s in strings_up_to(4):
        assert mx(s) == px(s)
        assert my(s) == py(s)


def test_conditional_examples():
    assert conditional(uniform_product(), "01", "110") == F(1, 4)
    assert conditional(joint_table({("0", "1"): F(1)}), "0", "1") == 1


def test_example_conditional_vs_recursion_kernel():
    p = trig1()
    assert p.kernel("0", "11") == F(3, 4)
    assert p.kernel("0", "10") == F(1, 4)
    # true conditional divides by the actual y-marginal
    assert conditional(p, "0", "11") == F(3, 5)


def test_conditional_zero_marginal():
    with pytest.raises(ZeroConditionError):
        conditional(joint_table({("0", "1"): F(1)}), "0", "0")


def test_conditional_traces():
    assert conditional_trace(uniform_product(), "0", "111") == [F(1, 2)] * 4
    assert conditional_trace(trig1(), "0", "000") == [F(1, 2)] * 4
    assert conditional_trace(trig1(), "0", "111") == [F(1, 2), F(1, 2), F(3, 5), F(3, 5)]


def test_consistency_hand_identity():
    p = trig1()
    assert p("0", "1") == p("0", "10") + p("0", "11") == F(1, 4)


# -- consistency -----------------------------------------------------------

def test_uniform_consistent():
    assert check_consistency(uniform(), 10).passed


def test_perturbed_leaf_single_violation_at_parent():
    m = table_measure({s: F(1, 8) for s in strings_of_length(3)})
    r = check_consistency(perturb_leaf(m, "010", F(1, 100)), 3)
    assert [(v.node, v.identity) for v in r.violations] == [("01", "split")]
    assert r.violations[0].rhs - r.violations[0].lhs == F(1, 100)


def test_example_consistent():
    assert check_consistency(trig1(), 8).passed


def test_consistency_depth_cap():
    with pytest.raises(DepthExceededError):
        check_consistency(uniform(3), 4)


@st.composite
def leaf_tables(draw, max_depth=5):
    d = draw(st.integers(1, max_depth))
    weights = draw(st.lists(st.integers(0, 20), min_size=2 ** d, max_size=2 ** d))
    if sum(weights) == 0:
        weights[0] = 1
    total = sum(weights)
    return {s: F(w, total) for s, w in zip(strings_of_length(d), weights)}


@settings(max_examples=40, deadline=None)
@given(leaf_tables())
def test_random_tables_consistent(leaves):
    assert check_consistency(table_measure(leaves), 7).passed


@settings(max_examples=40, deadline=None)
@given(leaf_tables(), st.sampled_from(list(strings_up_to(3))))
def test_marginal_of_product_rows_sum(leaves, x):
    m = table_measure(leaves)
    assert sum(m(x + t) for t in strings_of_length(2)) == m(x)


# -- prefix sets and covers ------------------------------------------------

def test_prefix_set_measure_examples():
    assert prefix_set_measure(uniform(), ["0", "00"]) == F(1, 2)
    assert prefix_set_measure(uniform(), ["00", "01", "1"]) == 1
    assert prefix_set_measure(bernoulli(F(1, 3)), ["01", "10"]) == F(4, 9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(list(strings_up_to(4))), max_size=6))
def test_prefix_set_measure_matches_leaf_count(a):
    leaves = {s for s in strings_of_length(4) if any(s.startswith(p) for p in a)}
    assert prefix_set_measure(uniform(), a) == F(len(leaves), 16)


def test_nonoverlapping_cover_examples():
    assert nonoverlapping_cover([("0", ""), ("00", "")]) == [("0", "")]
    assert sorted(nonoverlapping_cover([("0", "0"), ("1", "1")])) == [("0", "0"), ("1", "1")]
    assert nonoverlapping_cover([("0", ""), ("", "0")]) == [("0", ""), ("1", "0")]


rects = st.tuples(st.sampled_from(list(strings_up_to(3))), st.sampled_from(list(strings_up_to(3))))


@settings(max_examples=80, deadline=None)
@given(st.lists(rects, max_size=6))
def test_nonoverlapping_cover_properties(t):
    cover = nonoverlapping_cover(t)
    for i, r in enumerate(cover):
        for s in cover[i + 1:]:
            assert rect_disjoint(r, s)
    assert rect_leaves(cover, 3, 3) == rect_leaves(t, 3, 3)
