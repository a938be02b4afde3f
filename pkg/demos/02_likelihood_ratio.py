"""Likelihood ratios Q/P as a martingale under P.

Uniform P against Bernoulli(1/3) Q: the ratio process satisfies the tower
property exactly, Doob's maximal inequality holds with room to spare, and the
running ratio separates a "typical" Q-path from one that Q dislikes.
"""
from fractions import Fraction

from randlab.martingale import check_submartingale, classify, doob_check, ratio_process
from randlab.measures import bernoulli, uniform

p, q = uniform(), bernoulli(Fraction(1, 3))
r = ratio_process(p, q)

print("martingale at depth 8:", check_submartingale(p, r, 8).data["martingale"])
for rec in doob_check(p, r, 8, [1, 2, 4, 8]).records:
    print(f"  {rec.name}: P(max > m) = {rec.lhs}  <=  E r_n / m = {rec.rhs}")

for x in ["0" * 10, "01" * 5, "1" * 10]:
    c = classify(p, q, x, threshold=Fraction(1, 20))
    print(f"{x}: final Q/P = {c.ratios[-1]}, running min = {c.running_min[-1]}, regime = {c.regime}")
