"""From a conditional test to a global one.

A relativized test enumerates x-strings while reading the oracle.  Its
rectangles are made non-overlapping, the partition levels U_n are built and
the global cover from index f(eps) on is shown to have mass below 2 eps.
"""
from fractions import Fraction

from randlab.measures import nonoverlapping_cover, uniform_product
from randlab.testlab import RelativizedTest, build_lemma_a_family, compute_f_epsilon, expand_via_lemma_a, verify_lemma_a

joint = uniform_product()
A = RelativizedTest.from_stages([("1", ["00"]), ("10", ["010"]), ("11", ["0110"])])
eps = Fraction(1, 2)

W = nonoverlapping_cover(A.rectangles())
inst = build_lemma_a_family(W, eps, joint, 4)
for n, level in enumerate(inst.family, 1):
    print(f"U_{n}: {sorted(level)}")
print("decomposition checks at y=10:", verify_lemma_a(inst, "10").passed)
print("f(eps) =", compute_f_epsilon(inst, eps))

rep = expand_via_lemma_a(A, joint, "10", eps)
print("global cover mass", rep.records[0].lhs, "<", rep.records[0].rhs, "->", rep.passed)
