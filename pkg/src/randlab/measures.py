"""Exact probability measures on the binary tree and on the product tree.

A :class:`Measure` maps a bitstring ``x`` to the mass of its cylinder, a
:class:`JointMeasure` maps a pair ``(x, y)`` to the mass of the rectangle
``cyl(x) x cyl(y)``.  Values are exact :class:`~fractions.Fraction` objects and
every measure carries an explicit depth cap; evaluating past the cap raises
:class:`~randlab.errors.DepthExceededError` instead of truncating.

Prefix sets over the single tree are collections of bitstrings, prefix sets
over the product tree are collections of ``(x, y)`` rectangles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .bits import (
    check_bits,
    comparable,
    minimal_elements,
    prefixes,
    strings_of_length,
    strings_up_to,
)
from .errors import DepthExceededError, ZeroConditionError
from .rational import pow2
from .reports import Report

DEFAULT_CAP = 64

Rect = tuple[str, str]


class Measure:
    """Prefix-probability oracle on the binary tree."""

    def __init__(self, fn: Callable[[str], Fraction], depth_cap: int, kind: str, params=None):
        self._fn = lru_cache(maxsize=None)(fn)
        self.depth_cap = depth_cap
        self.kind = kind
        self.params = params or {}

    def __call__(self, x: str) -> Fraction:
        return eval_measure(self, x)

    def __repr__(self):
        return f"Measure(kind={self.kind!r}, depth_cap={self.depth_cap})"


class JointMeasure:
    """Rectangle-probability oracle on the product tree."""

    def __init__(self, fn: Callable[[str, str], Fraction], caps: tuple[int, int], kind: str, params=None):
        self._fn = lru_cache(maxsize=None)(fn)
        self.caps = tuple(caps)
        self.kind = kind
        self.params = params or {}

    def __call__(self, x: str, y: str) -> Fraction:
        return joint_eval(self, x, y)

    def __repr__(self):
        return f"JointMeasure(kind={self.kind!r}, caps={self.caps})"


def eval_measure(m: Measure, x: str) -> Fraction:
    check_bits(x)
    if len(x) > m.depth_cap:
        raise DepthExceededError(f"|{x}| = {len(x)} exceeds depth cap {m.depth_cap}")
    return m._fn(x)


def joint_eval(j: JointMeasure, x: str, y: str) -> Fraction:
    check_bits(x)
    check_bits(y)
    cx, cy = j.caps
    if len(x) > cx or len(y) > cy:
        raise DepthExceededError(f"({x!r}, {y!r}) exceeds depth caps {j.caps}")
    return j._fn(x, y)


# -- constructors ---------------------------------------------------------

def uniform(depth_cap: int = DEFAULT_CAP) -> Measure:
    return Measure(lambda x: pow2(-len(x)), depth_cap, "uniform")


def bernoulli(p, depth_cap: int = DEFAULT_CAP) -> Measure:
    """I.i.d. bits with ``P(bit = 1) = p``."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("bernoulli parameter must lie in [0, 1]")
    q = 1 - p

    def fn(x):
        ones = x.count("1")
        return p**ones * q ** (len(x) - ones)

    return Measure(fn, depth_cap, "bernoulli", {"p": p})


def point_mass(pattern: str = "0", depth_cap: int = DEFAULT_CAP) -> Measure:
    """Dirac mass on the periodic sequence ``pattern pattern ...``."""
    check_bits(pattern)
    if not pattern:
        raise ValueError("pattern must be non-empty")

    def fn(x):
        reps = (pattern * (len(x) // len(pattern) + 1))[: len(x)]
        return Fraction(1) if x == reps else Fraction(0)

    return Measure(fn, depth_cap, "point", {"pattern": pattern})


def table_measure(leaves: Mapping[str, Fraction], depth_cap: int = DEFAULT_CAP) -> Measure:
    """Measure given by its leaf values at a fixed depth ``d``.

    Internal nodes are leaf sums; below ``d`` each child receives half of its
    parent's mass.  Missing leaves have mass zero.
    """
    leaves = {check_bits(k): Fraction(v) for k, v in leaves.items()}
    depths = {len(k) for k in leaves}
    if len(depths) > 1:
        raise ValueError("all leaves must have the same length")
    d = depths.pop() if depths else 0
    if any(v < 0 for v in leaves.values()):
        raise ValueError("leaf values must be non-negative")
    if sum(leaves.values()) != 1:
        raise ValueError("leaf values must sum to 1")
    nodes: dict[str, Fraction] = {}
    for leaf, v in leaves.items():
        for p in prefixes(leaf):
            nodes[p] = nodes.get(p, Fraction(0)) + v
    return node_table_measure(nodes, d, depth_cap)


def node_table_measure(nodes: Mapping[str, Fraction], depth: int, depth_cap: int = DEFAULT_CAP) -> Measure:
    """Measure read directly from per-node values up to ``depth``.

    Nothing is validated here, which is what makes it useful for building
    deliberately inconsistent inputs.
    """
    nodes = {k: Fraction(v) for k, v in nodes.items()}

    def fn(x):
        if len(x) <= depth:
            return nodes.get(x, Fraction(0))
        return nodes.get(x[:depth], Fraction(0)) * pow2(depth - len(x))

    return Measure(fn, max(depth_cap, depth), "table", {"depth": depth, "nodes": nodes})


def perturb_leaf(m: Measure, leaf: str, delta) -> Measure:
    """Copy of a table measure with one stored node value shifted by ``delta``."""
    if m.kind != "table":
        raise ValueError("only table measures can be perturbed")
    nodes = dict(m.params["nodes"])
    nodes[leaf] = nodes.get(leaf, Fraction(0)) + Fraction(delta)
    return node_table_measure(nodes, m.params["depth"], m.depth_cap)


def product(mx: Measure, my: Measure) -> JointMeasure:
    return JointMeasure(
        lambda x, y: mx(x) * my(y),
        (mx.depth_cap, my.depth_cap),
        "product",
        {"x": mx, "y": my},
    )


def uniform_product(depth_cap: int = DEFAULT_CAP) -> JointMeasure:
    return product(uniform(depth_cap), uniform(depth_cap))


def joint_table(leaves: Mapping[Rect, Fraction], depth_cap: int = DEFAULT_CAP) -> JointMeasure:
    """Joint measure from leaf rectangles of common shape ``(dx, dy)``.

    Rectangles below the leaf shape split their mass uniformly.
    """
    leaves = {(check_bits(x), check_bits(y)): Fraction(v) for (x, y), v in leaves.items()}
    shapes = {(len(x), len(y)) for x, y in leaves}
    if len(shapes) > 1:
        raise ValueError("all leaf rectangles must share one shape")
    dx, dy = shapes.pop() if shapes else (0, 0)
    if any(v < 0 for v in leaves.values()) or sum(leaves.values()) != 1:
        raise ValueError("leaf values must be non-negative and sum to 1")
    nodes: dict[Rect, Fraction] = {}
    for (x, y), v in leaves.items():
        for px in prefixes(x):
            for py in prefixes(y):
                nodes[px, py] = nodes.get((px, py), Fraction(0)) + v

    def fn(x, y):
        ex = max(len(x) - dx, 0)
        ey = max(len(y) - dy, 0)
        return nodes.get((x[:dx], y[:dy]), Fraction(0)) * pow2(-ex - ey)

    caps = (max(depth_cap, dx), max(depth_cap, dy))
    return JointMeasure(fn, caps, "table", {"shape": (dx, dy), "leaves": leaves})


# -- derived quantities ---------------------------------------------------

def marginals(j: JointMeasure) -> tuple[Measure, Measure]:
    cx, cy = j.caps
    px = Measure(lambda x: j(x, ""), cx, "derived", {"marginal": "x", "of": j})
    py = Measure(lambda y: j("", y), cy, "derived", {"marginal": "y", "of": j})
    return px, py


def conditional(j: JointMeasure, x: str, y: str) -> Fraction:
    """``P(x | y) = P(x, y) / P_Y(y)``."""
    py = j("", y)
    if py == 0:
        raise ZeroConditionError(f"P_Y({y!r}) = 0")
    return j(x, y) / py


def conditional_trace(j: JointMeasure, x: str, y_stream: str) -> list[Fraction]:
    """Conditional of ``x`` given each prefix of ``y_stream``, shortest first."""
    return [conditional(j, x, y) for y in prefixes(y_stream)]


def conditional_measure(j: JointMeasure, y: str) -> Measure:
    """``P(. | y)`` as a measure on the first coordinate."""
    if j("", y) == 0:
        raise ZeroConditionError(f"P_Y({y!r}) = 0")
    return Measure(lambda x: conditional(j, x, y), j.caps[0], "derived", {"given": y, "of": j})


# -- consistency ----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    node: object
    identity: str
    lhs: Fraction
    rhs: Fraction


@dataclass
class ConsistencyReport:
    depth: int
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_report(self) -> Report:
        rep = Report("consistency", data={"depth": self.depth, "nodes_checked": self.checked})
        rep.check("violation_count", len(self.violations), "==", 0)
        for v in self.violations:
            rep.check(f"{v.identity}@{v.node}", v.lhs, "==", v.rhs)
        return rep


def check_consistency(m: Measure | JointMeasure, depth: int) -> ConsistencyReport:
    """Exhaustive additivity check.

    For a measure on the tree: ``m(x) == m(x0) + m(x1)`` for ``|x| < depth``
    and total mass one.  For a joint measure the depth bounds the rectangle
    level ``|x| + |y|``: both one-sided identities are checked for every
    rectangle whose children stay within the level, the four-way identity
    for every rectangle whose grandchildren do.
    """
    if isinstance(m, JointMeasure):
        return _check_joint(m, depth)
    if depth > m.depth_cap:
        raise DepthExceededError(f"depth {depth} exceeds cap {m.depth_cap}")
    rep = ConsistencyReport(depth)
    total = m("")
    if total != 1:
        rep.violations.append(Violation("", "total", total, Fraction(1)))
    for x in strings_up_to(depth - 1):
        rep.checked += 1
        lhs, rhs = m(x), m(x + "0") + m(x + "1")
        if lhs != rhs:
            rep.violations.append(Violation(x, "split", lhs, rhs))
    return rep


def _check_joint(j: JointMeasure, depth: int) -> ConsistencyReport:
    if depth > min(j.caps):
        raise DepthExceededError(f"depth {depth} exceeds caps {j.caps}")
    rep = ConsistencyReport(depth)
    total = j("", "")
    if total != 1:
        rep.violations.append(Violation(("", ""), "total", total, Fraction(1)))
    for level in range(depth):
        for i in range(level + 1):
            for x in strings_of_length(i):
                for y in strings_of_length(level - i):
                    rep.checked += 1
                    v = j(x, y)
                    sx = j(x + "0", y) + j(x + "1", y)
                    sy = j(x, y + "0") + j(x, y + "1")
                    if v != sx:
                        rep.violations.append(Violation((x, y), "split-x", v, sx))
                    if v != sy:
                        rep.violations.append(Violation((x, y), "split-y", v, sy))
                    if level + 2 <= depth:
                        s4 = sum(j(x + a, y + b) for a in "01" for b in "01")
                        if v != s4:
                            rep.violations.append(Violation((x, y), "split-xy", v, s4))
    return rep


# -- prefix sets ----------------------------------------------------------

def reduce_prefix_set(a: Iterable[str]) -> list[str]:
    return minimal_elements(a)


def prefix_set_measure(m: Measure, a: Iterable[str]) -> Fraction:
    """Mass of the open set generated by a prefix set.

    After prefix-minimal reduction the cylinders are pairwise disjoint, so the
    mass is the plain sum.
    """
    a = list(a)
    for s in a:
        check_bits(s)
        if len(s) > m.depth_cap:
            raise DepthExceededError(f"|{s}| exceeds depth cap {m.depth_cap}")
    return sum((m(s) for s in reduce_prefix_set(a)), Fraction(0))


def rect_disjoint(r: Rect, s: Rect) -> bool:
    return not (comparable(r[0], s[0]) and comparable(r[1], s[1]))


def rect_within(r: Rect, s: Rect) -> bool:
    """Rectangle ``r`` lies inside rectangle ``s``."""
    return r[0].startswith(s[0]) and r[1].startswith(s[1])


def rect_subtract(r: Rect, s: Rect) -> list[Rect]:
    """``r`` minus ``s`` as disjoint rectangles, by repeated child splitting."""
    if rect_disjoint(r, s):
        return [r]
    if rect_within(r, s):
        return []
    x, y = r
    if len(s[0]) > len(x):
        halves = [(x + "0", y), (x + "1", y)]
    else:
        halves = [(x, y + "0"), (x, y + "1")]
    out: list[Rect] = []
    for h in halves:
        out.extend(rect_subtract(h, s))
    return out


def _rect_key(r: Rect):
    return (len(r[0]) + len(r[1]), len(r[1]), r[0], r[1])


def nonoverlapping_cover(rects: Iterable[Rect]) -> list[Rect]:
    """Pairwise-disjoint rectangles with the same union as ``rects``.

    Input is processed in (total length, y-length, x, y) order; each rectangle
    contributes whatever part of it is not yet covered.  The output order is
    the enumeration order used when building partition levels.
    """
    out: list[Rect] = []
    for r in sorted(set(rects), key=_rect_key):
        check_bits(r[0])
        check_bits(r[1])
        pieces = [r]
        for w in out:
            pieces = [p for q in pieces for p in rect_subtract(q, w)]
            if not pieces:
                break
        out.extend(pieces)
    return out


def rect_leaves(rects: Iterable[Rect], dx: int, dy: int) -> set[Rect]:
    """Leaf rectangles of shape ``(dx, dy)`` inside the union of ``rects``."""
    leaves: set[Rect] = set()
    for x, y in rects:
        if len(x) > dx or len(y) > dy:
            raise DepthExceededError(f"rectangle ({x!r}, {y!r}) is finer than ({dx}, {dy})")
        for lx in strings_of_length(dx - len(x)):
            for ly in strings_of_length(dy - len(y)):
                leaves.add((x + lx, y + ly))
    return leaves


def rect_set_measure(j: JointMeasure, rects: Iterable[Rect]) -> Fraction:
    return sum((j(x, y) for x, y in nonoverlapping_cover(rects)), Fraction(0))


def leaf_mass(j: JointMeasure, leaves: Iterable[Rect]) -> Fraction:
    return sum((j(x, y) for x, y in leaves), Fraction(0))
