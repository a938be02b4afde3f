"""Expanding a conditional test through a dominating measure Q.

P is the halting-table measure, Q the uniform product.  The probe suggests
constants c1, c2; the expansion then checks every inequality of the chain
from Q(V | y) up to the bound on P(W').
"""
from fractions import Fraction

from randlab.bits import strings_up_to
from randlab.example import trigger_example
from randlab.measures import conditional_measure, uniform_product
from randlab.testlab import ExpansionInstance, thmain_expand, thmain_probe

P, Q = trigger_example(Fraction(1, 2), {1: "1"}), uniform_product()
y = "11"
pc, qc = conditional_measure(P, y), conditional_measure(Q, y)
f_y = {x: qc(x) / pc(x) + Fraction(1, 4) for x in strings_up_to(4)}

probe = thmain_probe(P, Q, "000", y, f_y)
print("probe ok:", probe.passed, " c1 =", probe.data["c1"], " c2 =", probe.data["c2"])

inst = ExpansionInstance(P, Q, y, ["0000"], f_y, probe.data["c1"], probe.data["c2"], 1)
rep = thmain_expand(inst, 4)
for rec in rep.records:
    print(f"  {rec.name}: {rec.lhs} {rec.relation} {rec.rhs}  {'ok' if rec.passed else 'FAIL'}")
