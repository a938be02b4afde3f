import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randlab.bits import strings_up_to
from randlab.errors import NoValidIndexError, NonOverlappingError, PreconditionError
from randlab.example import trigger_example
from randlab.measures import bernoulli, nonoverlapping_cover, uniform, uniform_product
from randlab.testlab import (
    ExpansionInstance,
    LemmaAInstance,
    RelativizedTest,
    TestFamily,
    build_lemma_a_family,
    compute_f_epsilon,
    expand_via_lemma_a,
    list_bound,
    tail_mass,
    thmain_expand,
    thmain_probe,
    verify_blind_test,
    verify_lemma_a,
    verify_solovay,
)

U2 = uniform_product()


# -- blind and Solovay tests ---------------------------------------------

def test_blind_test_even_zeros_passes():
    fam = TestFamily([["0" * (2 * n)] for n in range(1, 6)])
    rep = verify_blind_test(uniform(), fam)
    assert rep.passed
    assert rep.data["masses"] == [F(1, 4 ** n) for n in range(1, 6)]


def test_blind_test_whole_space_fails():
    assert not verify_blind_test(uniform(), TestFamily([[""]])).passed


def test_blind_test_bernoulli_ones():
    fam = TestFamily([["1" * n] for n in range(1, 7)], list_bound([F(1, 2 ** n) for n in range(1, 7)]))
    assert verify_blind_test(bernoulli(F(1, 3)), fam).passed


def test_blind_test_nesting_failure():
    assert not verify_blind_test(uniform(), TestFamily([["00"], ["1111"]])).passed


def test_solovay_examples():
    rep = verify_solovay(uniform(), TestFamily([["0" * n] for n in range(1, 11)]), 10)
    assert rep.data["sum"] == 1 - F(1, 1024)
    rep = verify_solovay(uniform(), TestFamily([[""]] * 5), 5, lambda n: F(1, 2 ** n))
    assert rep.data["sum"] == 5 and not rep.passed
    assert verify_solovay(uniform(), TestFamily([[]] * 4), 4).data["sum"] == 0


# -- partition levels ----------------------------------------------------

def test_partition_levels_single_pair():
    inst = build_lemma_a_family([("0", "1")], F(3, 4), U2, 2)
    assert [sorted(u) for u in inst.family] == [[("0", "1")]]
    rep = verify_lemma_a(inst, "1")
    assert rep.passed and rep.data["liminf_section"] == ["0"]
    assert rep.data["section_check"] == "applied"


def test_partition_levels_small_epsilon_empty():
    inst = build_lemma_a_family([("0", "1")], F(1, 4), U2, 2)
    assert [set(u) for u in inst.family] == [set()]


def test_partition_levels_empty_w():
    inst = build_lemma_a_family([], F(1, 2), U2, 3)
    assert inst.family == []
    assert verify_lemma_a(inst, "").passed


def test_partition_levels_rejects_overlap():
    with pytest.raises(NonOverlappingError):
        build_lemma_a_family([("0", ""), ("", "0")], F(1, 2), U2, 2)


def test_f_epsilon_examples():
    same = LemmaAInstance([], F(1, 2), U2, 2, [frozenset({("0", "")})] * 3)
    assert compute_f_epsilon(same, F(1, 100)) == 1
    single = build_lemma_a_family([("0", "1")], F(3, 4), U2, 2)
    assert compute_f_epsilon(single, F(1)) == 1
    two = LemmaAInstance([], F(1, 2), U2, 2, [frozenset({("0", "0")}), frozenset()])
    assert tail_mass(two, 1) == F(1, 4) and tail_mass(two, 2) == 0
    assert compute_f_epsilon(two, F(1, 8)) == 2
    with pytest.raises(NoValidIndexError):
        compute_f_epsilon(two, F(0))


def random_w(rng, size):
    rects = [("".join(rng.choice("01") for _ in range(rng.randint(0, 4))),
              "".join(rng.choice("01") for _ in range(rng.randint(0, 4)))) for _ in range(size)]
    return nonoverlapping_cover(rects)[:8]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 8), st.fractions(min_value=F(1, 16), max_value=1))
def test_partition_levels_random(seed, size, eps):
    rng = random.Random(seed)
    W = random_w(rng, size)
    inst = build_lemma_a_family(W, eps, U2, 4)
    y = "".join(rng.choice("01") for _ in range(rng.randint(0, 4)))
    assert verify_lemma_a(inst, y).passed
    n = compute_f_epsilon(inst, eps)
    assert tail_mass(inst, n) < eps


# -- expansion ------------------------------------------------------------

def test_expand_empty_and_single():
    empty = RelativizedTest.from_stages([("", [])])
    rep = expand_via_lemma_a(empty, U2, "1", F(1, 2), depth=2)
    assert rep.passed and rep.records[0].lhs == 0
    single = RelativizedTest.from_stages([("1", ["0"])])
    rep = expand_via_lemma_a(single, U2, "1", F(3, 4))
    assert rep.passed and rep.data["conditional_mass"] == F(1, 2)
    assert rep.records[0].lhs < F(3, 2)


def test_expand_precondition():
    single = RelativizedTest.from_stages([("1", ["0"])])
    with pytest.raises(PreconditionError):
        expand_via_lemma_a(single, U2, "1", F(1, 4))


def test_thmain_probe_examples():
    f2 = {s: F(2) for s in strings_up_to(3)}
    rep = thmain_probe(U2, U2, "010", "1", f2)
    assert rep.passed and rep.data["c1"] == F(1, 2) and rep.data["c2"] == 3
    ex = trigger_example(F(1, 2), {1: "1"})
    rep = thmain_probe(ex, U2, "00", "11", {s: F(3) for s in strings_up_to(2)})
    assert rep.passed
    # true conditional P(0|"11") is 3/5, so Q/P = 5/6 on the perturbed prefixes
    assert rep.data["ratios"] == [1, F(5, 6), F(5, 6)]


def test_thmain_probe_zero_conditional():
    from randlab.measures import joint_table
    p = joint_table({("1", ""): F(1)})
    rep = thmain_probe(p, U2, "0", "", {"0": F(2)})
    assert "prefixes with P(x'|y) = 0" in {r.name for r in rep.failures}


def test_thmain_expand_empty():
    rep = thmain_expand(ExpansionInstance(U2, U2, "1", [], {}, F(1, 2), F(2), 1), 4)
    assert rep.passed and rep.data["V"] == rep.data["V_prime"] == rep.data["W_prime"] == []


def test_thmain_expand_uniform():
    f1 = {s: F(1) for s in strings_up_to(4)}
    rep = thmain_expand(ExpansionInstance(U2, U2, "1", ["000"], f1, F(1, 2), F(2), 1), 4)
    assert rep.passed
    assert rep.data["V"] == ["000"]
    vals = {r.name: (r.lhs, r.rhs) for r in rep.records}
    assert vals["Q(V'|y) < c2 P(U|y)"] == (F(1, 8), F(1, 4))
    assert vals["c2 P(U|y) < 2^-n"] == (F(1, 4), F(1, 2))


def test_thmain_expand_example_keeps_all_of_w():
    ex = trigger_example(F(1, 2), {1: "1"})
    f1 = {s: F(1) for s in strings_up_to(4)}
    rep = thmain_expand(ExpansionInstance(ex, U2, "1", ["000"], f1, F(1, 3), F(3), 1), 4)
    assert rep.passed
    assert rep.data["W_prime"] == rep.data["W"]


def test_thmain_expand_precondition():
    f1 = {s: F(1) for s in strings_up_to(4)}
    with pytest.raises(PreconditionError):
        thmain_expand(ExpansionInstance(U2, U2, "1", ["0"], f1, F(1, 2), F(2), 1), 4)
