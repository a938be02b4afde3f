"""A joint measure whose conditionals react to a halting table.

Machine 1 "halts" once the oracle has read the prefix "1".  Cell C_1 = cyl(0)
keeps conditional mass 1/2 until then; one step later it moves to 1/4 or 3/4
depending on the next oracle bit.  Against the uniform product the density
stays inside [1 - eps, 1 + eps].
"""
from fractions import Fraction

from randlab.example import conditional_deviation, trigger_example, verify_ratio_bounds
from randlab.measures import check_consistency, conditional_trace, marginals

eps = Fraction(1, 2)
p = trigger_example(eps, {1: "1"})

for y in ["000", "100", "111"]:
    dev, trace = conditional_deviation(p, 1, y)
    print(f"cell mass of machine 1 along y={y}: {[str(v) for v in trace]}  deviates={dev}")

rep = verify_ratio_bounds(p, eps, 6)
print("density range on depth 6:", rep.data["min_ratio"], "to", rep.data["max_ratio"])
print("additive up to rectangle level 8:", check_consistency(p, 8).passed)

# The additive recursion moves mass along y, so P(0 | y) uses the real marginal.
_, py = marginals(p)
print("P_Y('11') =", py("11"), "  P(0 | y) along 111:", [str(v) for v in conditional_trace(p, "0", "111")])
