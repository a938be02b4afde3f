"""Blind and Solovay test checks, the partition-level decomposition, and the
test-expansion chain that turns a conditional test into a global one.

Open subsets of the product space are handled as finite rectangle lists;
every set identity is verified on the leaf rectangles of a fixed depth,
which is exact because all rectangles involved are no finer than that depth.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Iterable, Mapping, Sequence

from .bits import check_bits, covered, minimal_elements, prefixes, strings_up_to
from .errors import (
    DepthExceededError,
    NonOverlappingError,
    NoValidIndexError,
    PreconditionError,
    ZeroConditionError,
)
from .measures import (
    JointMeasure,
    Measure,
    Rect,
    conditional,
    conditional_measure,
    leaf_mass,
    nonoverlapping_cover,
    prefix_set_measure,
    rect_disjoint,
    rect_leaves,
    rect_set_measure,
    rect_within,
)
from .rational import pow2, ratio
from .reports import Report

ELEVEN_HALVES = Fraction(11, 2)


def default_bound(n: int) -> Fraction:
    return pow2(-n)


@dataclass
class TestFamily:
    """Levels ``U_1, U_2, ...`` (index 1 first) with a decreasing bound."""

    __test__ = False

    levels: list
    bound: Callable[[int], Fraction] = default_bound

    def level(self, n: int):
        return self.levels[n - 1]


def list_bound(values: Sequence) -> Callable[[int], Fraction]:
    vals = [Fraction(v) for v in values]
    return lambda n: vals[n - 1]


def _is_rect_family(levels) -> bool:
    return any(isinstance(e, tuple) for lvl in levels for e in lvl)


def rect_covered(r: Rect, cover: Iterable[Rect]) -> bool:
    """Whether rectangle ``r`` lies inside the union of ``cover``."""
    rel = [s for s in cover if not rect_disjoint(r, s)]
    if any(rect_within(r, s) for s in rel):
        return True
    if not rel:
        return False
    s = rel[0]
    x, y = r
    if len(s[0]) > len(x):
        halves = [(x + "0", y), (x + "1", y)]
    else:
        halves = [(x, y + "0"), (x, y + "1")]
    return all(rect_covered(h, rel) for h in halves)


def _mass(m, level) -> Fraction:
    if isinstance(m, JointMeasure):
        return rect_set_measure(m, level)
    return prefix_set_measure(m, level)


def verify_blind_test(m: Measure | JointMeasure, fam: TestFamily) -> Report:
    """Nesting ``U_n >= U_{n+1}`` as open sets and ``P(U_n) < bound(n)``."""
    rect = _is_rect_family(fam.levels)
    masses = []
    rep = Report("test blind")
    for n in range(1, len(fam.levels) + 1):
        lvl = fam.level(n)
        mass = _mass(m, lvl)
        masses.append(mass)
        rep.check(f"P(U_{n}) < bound({n})", mass, "<", fam.bound(n))
        if n < len(fam.levels):
            nxt = fam.level(n + 1)
            if rect:
                nested = all(rect_covered(r, lvl) for r in nxt)
            else:
                nested = all(covered(s, lvl) for s in nxt)
            rep.flag(f"U_{n} contains U_{n + 1}", nested)
    rep.data["masses"] = masses
    return rep


def verify_solovay(m, fam: TestFamily, horizon: int, majorant: Callable[[int], Fraction] | None = None) -> Report:
    """Exact partial sums of ``P(V_n)`` up to ``horizon``.

    With a declared majorant, each level mass is compared against it.
    """
    if horizon > len(fam.levels):
        raise ValueError(f"family has only {len(fam.levels)} levels")
    masses, partial, total = [], [], Fraction(0)
    rep = Report("test solovay")
    for n in range(1, horizon + 1):
        mass = _mass(m, fam.level(n))
        masses.append(mass)
        total += mass
        partial.append(total)
        if majorant is not None:
            rep.check(f"P(V_{n}) <= majorant({n})", mass, "<=", majorant(n))
    rep.data.update({"horizon": horizon, "masses": masses, "partial_sums": partial, "sum": total})
    return rep


# -- relativized tests ----------------------------------------------------

@dataclass(frozen=True)
class RelativizedTest:
    """Oracle enumeration: ``items`` become available once the oracle prefix
    reaches ``y``; later stages never retract anything."""

    __test__ = False

    stages: tuple = ()

    @classmethod
    def from_stages(cls, stages: Iterable[tuple[str, Iterable[str]]]):
        return cls(tuple((check_bits(y), tuple(sorted(check_bits(x) for x in xs))) for y, xs in stages))

    def enumerated(self, y_prefix: str) -> list[str]:
        """Items visible with oracle prefix ``y_prefix``."""
        return minimal_elements(x for y, xs in self.stages if y_prefix.startswith(y) for x in xs)

    def rectangles(self) -> list[Rect]:
        return [(x, y) for y, xs in self.stages for x in xs]


# -- partition levels U_n ---------------------------------------------

def reduce_rects(rects: Iterable[Rect]) -> frozenset:
    """Drop rectangles contained in another member."""
    rs = sorted(set(rects), key=lambda r: (len(r[0]) + len(r[1]), r))
    kept: list[Rect] = []
    for r in rs:
        if not any(rect_within(r, k) for k in kept):
            kept.append(r)
    return frozenset(kept)


def section(rects: Iterable[Rect], y: str) -> list[str]:
    """``{x : (x, z) in rects, z a prefix of y}``."""
    return sorted({x for x, z in rects if y.startswith(z)})


def in_partition(y: str, ys: Iterable[str]) -> bool:
    """``cyl(y)`` lies inside one atom generated by the cylinders of ``ys``."""
    return not any(z.startswith(y) and z != y for z in ys)


@dataclass
class LemmaAInstance:
    W: list
    epsilon: Fraction
    joint: JointMeasure
    depth: int
    family: list = field(default_factory=list)

    def leaves(self, n: int) -> set:
        """Leaf rectangles of ``U_n``; indices past the end repeat the last."""
        if not self.family:
            return set()
        n = min(n, len(self.family))
        return rect_leaves(self.family[n - 1], self.depth, self.depth)

    def differences(self) -> list[set]:
        """``U_n \\ U_{n+1}`` for ``n = 1..N`` (the last one is empty)."""
        ls = [self.leaves(n) for n in range(1, len(self.family) + 2)]
        return [ls[i] - ls[i + 1] for i in range(len(self.family))]


def build_lemma_a_family(W: Sequence[Rect], epsilon, joint: JointMeasure, depth: int) -> LemmaAInstance:
    """Levels ``U_n`` built from the first ``n`` enumerated pairs of ``W``.

    ``U_n`` holds ``(x, y)`` for every ``y`` (up to ``depth``) inside an atom
    of the partition generated by the first ``n`` y-cylinders, and every
    ``x`` in the section of ``W_n`` at ``y``, provided that section has
    conditional mass below ``epsilon`` given ``y``.
    """
    W = [(check_bits(x), check_bits(y)) for x, y in W]
    for i, r in enumerate(W):
        if len(r[0]) > depth or len(r[1]) > depth:
            raise DepthExceededError(f"rectangle {r} is finer than depth {depth}")
        for s in W[i + 1:]:
            if not rect_disjoint(r, s):
                raise NonOverlappingError(f"rectangles {r} and {s} overlap")
    eps = Fraction(epsilon)
    inst = LemmaAInstance(W, eps, joint, depth)
    for n in range(1, len(W) + 1):
        wn = W[:n]
        ys = [z for _, z in wn]
        level = []
        for y in strings_up_to(depth):
            if not in_partition(y, ys):
                continue
            sec = section(wn, y)
            if not sec:
                continue
            if joint("", y) == 0:
                raise ZeroConditionError(f"atom {y!r} has zero marginal mass")
            total = sum((conditional(joint, x, y) for x in sec), Fraction(0))
            if total < eps:
                level.extend((x, y) for x in sec)
        inst.family.append(reduce_rects(level))
    return inst


def verify_lemma_a(inst: LemmaAInstance, y_prefix: str) -> Report:
    """The four decomposition identities on leaf rectangles.

    The lim inf of the finite family is its last level.  The section
    identity is asserted only when its hypotheses hold at ``y_prefix``: the
    prefix lies inside an atom of the final partition and the enumerated set
    has conditional mass below epsilon there.
    """
    rep = Report("test lemma-a", data={
        "depth": inst.depth, "epsilon": inst.epsilon, "size": len(inst.W),
        "def_U_reading": "x ranges over the section W_{n,y}; the sum is over the whole section",
    })
    n_lv = len(inst.family)
    diffs = inst.differences()
    liminf = inst.leaves(n_lv) if n_lv else set()
    union = set().union(*(inst.leaves(n) for n in range(1, n_lv + 1))) if n_lv else set()

    overlap = sum(1 for i in range(len(diffs)) for j in range(i + 1, len(diffs)) if diffs[i] & diffs[j])
    rep.check("difference sets pairwise disjoint (overlapping pairs)", overlap, "==", 0)
    hit = sum(1 for d in diffs if d & liminf)
    rep.check("differences disjoint from liminf (hits)", hit, "==", 0)
    rebuilt = set().union(*diffs, liminf) if diffs else set(liminf)
    rep.flag("union = differences + liminf", rebuilt == union)

    ys = [z for _, z in inst.W]
    A = section(inst.W, y_prefix)
    applicable = in_partition(y_prefix, ys) and inst.joint("", y_prefix) > 0
    cond_mass = None
    if applicable:
        pc = conditional_measure(inst.joint, y_prefix)
        cond_mass = prefix_set_measure(pc, A)
        applicable = cond_mass < inst.epsilon
    lim_sec = minimal_elements(section(inst.family[-1], y_prefix)) if n_lv else []
    rep.data.update({
        "y_prefix": y_prefix,
        "enumerated_A": minimal_elements(A),
        "liminf_section": lim_sec,
        "conditional_mass_A": cond_mass,
        "section_check": "applied" if applicable else "hypothesis not met",
    })
    if applicable:
        d = inst.depth
        a_leaves = {x + t for x in minimal_elements(A) for t in _tails(d - len(x))}
        s_leaves = {x + t for x in lim_sec for t in _tails(d - len(x))}
        rep.flag("liminf section at y_prefix = A", a_leaves == s_leaves)
    return rep


def _tails(k: int) -> list[str]:
    return ["".join(t) for t in cartesian("01", repeat=k)]


def compute_f_epsilon(inst: LemmaAInstance, eps) -> int:
    """Least ``N >= 1`` with ``P(union_{n >= N} U_n \\ U_{n+1}) < eps``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise NoValidIndexError("no index has tail mass below a non-positive bound")
    diffs = inst.differences()
    tail: set = set()
    best = len(diffs) + 1
    for idx in range(len(diffs), 0, -1):
        tail |= diffs[idx - 1]
        if leaf_mass(inst.joint, tail) < eps:
            best = idx
        else:
            break
    return max(1, min(best, len(diffs) or 1))


def tail_mass(inst: LemmaAInstance, start: int) -> Fraction:
    diffs = inst.differences()
    tail = set().union(*diffs[start - 1:]) if diffs[start - 1:] else set()
    return leaf_mass(inst.joint, tail)


def expand_via_lemma_a(
    A: RelativizedTest,
    joint: JointMeasure,
    y_prefix: str,
    eps,
    f_eps: int | None = None,
    depth: int | None = None,
) -> Report:
    """Global cover ``union_{n >= f_eps} U_n`` of a conditional test level,
    with ``P`` of the cover checked below ``2 eps``."""
    eps = Fraction(eps)
    rects = A.rectangles()
    if depth is None:
        depth = max([len(y_prefix)] + [max(len(x), len(y)) for x, y in rects])
    visible = A.enumerated(y_prefix)
    pc = conditional_measure(joint, y_prefix)
    cond = prefix_set_measure(pc, visible)
    if not cond < eps:
        raise PreconditionError(f"P(A | {y_prefix!r}) = {cond} is not below {eps}")
    W = nonoverlapping_cover(rects)
    inst = build_lemma_a_family(W, eps, joint, depth)
    if f_eps is None:
        f_eps = compute_f_epsilon(inst, eps)
    n_lv = len(inst.family)
    cover_levels = [sorted(inst.family[n - 1]) for n in range(f_eps, n_lv + 1)]
    leaves = set().union(*(inst.leaves(n) for n in range(f_eps, n_lv + 1))) if n_lv else set()
    mass = leaf_mass(joint, leaves)
    rep = Report("test expand", data={
        "depth": depth, "W": W, "f_eps": f_eps, "conditional_mass": cond,
        "tail_mass": tail_mass(inst, f_eps) if n_lv else Fraction(0),
        "liminf_mass": leaf_mass(joint, inst.leaves(n_lv)) if n_lv else Fraction(0),
        "witness_levels": cover_levels,
    })
    rep.check("P(union_{n>=f} U_n) < 2 eps", mass, "<", 2 * eps)
    return rep


# -- test expansion via a dominating computable measure --------------------

def _cond_or_raise(j: JointMeasure, y: str) -> Measure:
    if j("", y) == 0:
        raise ZeroConditionError(f"marginal of {y!r} is zero")
    return conditional_measure(j, y)


def thmain_probe(P: JointMeasure, Q: JointMeasure, x: str, y: str, f_y: Mapping[str, Fraction]) -> Report:
    """Finite-depth check of the hypotheses for expanding tests at ``(x, y)``.

    Positivity of ``P(x'|y)`` along ``x``, the sandwich
    ``Q(x'|y)/P(x'|y) < f_y(x') < inf`` where ``f_y`` is defined, and the
    running infimum of the ratio.  Suggests ``c1`` (half the infimum) and
    ``c2`` (the least integer above the supremum of ``f_y``).
    """
    for z in prefixes(y):
        if P("", z) == 0 or Q("", z) == 0:
            raise ZeroConditionError(f"marginal of {z!r} is zero")
    pc, qc = _cond_or_raise(P, y), _cond_or_raise(Q, y)
    f_y = {k: Fraction(v) for k, v in f_y.items()}
    rep = Report("test thmain-probe", data={"x": x, "y": y})
    pre = prefixes(x)
    pvals = [pc(z) for z in pre]
    zero = [z for z, v in zip(pre, pvals) if v <= 0]
    rep.check("prefixes with P(x'|y) = 0", len(zero), "==", 0)
    ratios = [ratio(qc(z), v) for z, v in zip(pre, pvals)]
    defined = [z for z in pre if z in f_y]
    rep.flag("f_y defined on some prefix", bool(defined))
    bad_iv = [z for z in defined if not ratios[pre.index(z)] < f_y[z]]
    rep.check("Q/P < f_y violations", len(bad_iv), "==", 0)
    inf_ratio = min(ratios)
    rep.check("running inf of Q/P", inf_ratio, ">", 0)
    sup_f = max((f_y[z] for z in defined), default=None)
    c1 = inf_ratio / 2 if inf_ratio > 0 else None
    c2 = Fraction(int(sup_f) + 1) if sup_f is not None else None
    rep.data.update({"ratios": ratios, "running_inf": inf_ratio, "sup_f": sup_f, "c1": c1, "c2": c2})
    return rep


@dataclass
class ExpansionInstance:
    P: JointMeasure
    Q: JointMeasure
    y: str
    U: list
    f_y: Mapping[str, Fraction]
    c1: Fraction
    c2: Fraction
    level: int


def _vacuous_or(rep, name, lhs, rel, rhs):
    if lhs == 0 and rhs == 0:
        return rep.check(name + " (vacuous)", lhs, "<=", rhs)
    return rep.check(name, lhs, rel, rhs)


def minimal_section_cover(Q: JointMeasure, V: Sequence[str], y: str, limit: int = 4096) -> tuple[list[Rect], str]:
    """Rectangles ``(v, z)`` with ``z`` a prefix of ``y`` whose y-section is
    the open set of ``V``, minimizing ``Q``-mass.

    Searches all prefix choices when there are at most ``limit`` of them;
    otherwise returns the containment-minimal choice ``z = y``.
    """
    V = list(V)
    choices = prefixes(y)
    if not V:
        return [], "empty"
    if len(choices) ** len(V) > limit:
        return [(v, y) for v in V], "containment-minimal"
    best, best_mass = None, None
    for pick in cartesian(reversed(choices), repeat=len(V)):
        rects = list(zip(V, pick))
        m = rect_set_measure(Q, rects)
        if best_mass is None or m < best_mass:
            best, best_mass = rects, m
    return best, "exhaustive"


def thmain_expand(inst: ExpansionInstance, depth: int) -> Report:
    """Build ``V``, ``V'``, the global cover ``W`` and its filtered part
    ``W'`` and check every inequality of the expansion chain exactly."""
    c1, c2 = Fraction(inst.c1), Fraction(inst.c2)
    if not (c1 > 0 and c2 > 0):
        raise PreconditionError("c1 and c2 must be positive")
    U = minimal_elements(check_bits(u) for u in inst.U)
    if any(len(u) > depth for u in U) or len(inst.y) > min(inst.P.caps[1], inst.Q.caps[1]):
        raise DepthExceededError("instance is finer than the requested depth")
    pc, qc = _cond_or_raise(inst.P, inst.y), _cond_or_raise(inst.Q, inst.y)
    f_y = {k: Fraction(v) for k, v in inst.f_y.items()}
    p_u = prefix_set_measure(pc, U)
    bound = pow2(-inst.level)
    if not p_u < bound / c2:
        raise PreconditionError(f"P(U|y) = {p_u} is not below 2^-{inst.level} / c2")

    ext = [x for x in strings_up_to(depth) if any(x.startswith(u) for u in U)]
    # hypothesis Q/P < f_y; reported, since V inside V' relies on it
    loose = [x for x in ext if x in f_y and not ratio(qc(x), pc(x)) < f_y[x]]
    V = minimal_elements(x for x in ext if x in f_y and f_y[x] < c2)
    V2 = minimal_elements(x for x in ext if ratio(qc(x), pc(x)) < c2)
    q_v, q_v2 = prefix_set_measure(qc, V), prefix_set_measure(qc, V2)

    rep = Report("test thmain-expand", data={
        "V": V, "V_prime": V2, "P(U|y)": p_u, "c1": c1, "c2": c2, "level": inst.level,
        "sandwich_violations": minimal_elements(loose),
    })
    rep.flag("V inside V'", all(covered(v, V2) for v in V))
    rep.check("Q(V|y) <= Q(V'|y)", q_v, "<=", q_v2)
    _vacuous_or(rep, "Q(V'|y) < c2 P(U|y)", q_v2, "<", c2 * p_u)
    rep.check("c2 P(U|y) < 2^-n", c2 * p_u, "<", bound)

    W, how = minimal_section_cover(inst.Q, V, inst.y)
    sec = minimal_elements(x for x, z in W if inst.y.startswith(z))
    rep.flag("section of W at y equals V", sec == V)
    q_w = rect_set_measure(inst.Q, W)
    rep.check("Q(W) < (11/2) 2^-n", q_w, "<", ELEVEN_HALVES * bound)

    W2 = [(x, z) for x, z in W if conditional(inst.P, x, z) < conditional(inst.Q, x, z) / c1]
    p_w2, q_w2 = rect_set_measure(inst.P, W2), rect_set_measure(inst.Q, W2)
    _vacuous_or(rep, "P(W') < Q(W') / c1", p_w2, "<", q_w2 / c1)
    _vacuous_or(rep, "Q(W') / c1 < (11/2) 2^-n / c1", q_w2 / c1, "<", ELEVEN_HALVES * bound / c1)
    rep.data.update({"W": W, "W_search": how, "W_prime": W2, "Q(W)": q_w, "P(W')": p_w2, "Q(W')": q_w2})
    return rep
