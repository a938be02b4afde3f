"""Likelihood-ratio processes, submartingale and Doob checks, approximation
schemes and the two-measure classification diagnostic.

A process assigns to each bitstring ``x`` the value ``r_n(x)`` with
``n = |x|``; the canonical one is ``Q(x) / P(x)`` under the ``a/0``
convention.  All checks enumerate the tree exhaustively and compare exact
values, skipping nodes of zero ``P``-mass where the statement is almost sure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .bits import prefixes, strings_of_length, strings_up_to
from .errors import DepthExceededError, NegativeValueError, NotMonotoneError
from .measures import JointMeasure, Measure
from .rational import INF, ratio
from .reports import Report


def likelihood_ratio(p: Measure, q: Measure, x: str):
    """``Q(x) / P(x)`` with ``a/0 = inf`` (``a != 0``) and ``0/0 = 0``."""
    return ratio(q(x), p(x))


def expected_ratio(p: Measure, q: Measure, n: int) -> Fraction:
    """``E_P(Q/P)`` at depth ``n``: the ``Q``-mass of ``P``-positive leaves."""
    return sum((q(x) for x in strings_of_length(n) if p(x) > 0), Fraction(0))


class Process:
    """An adapted process ``r_n``, read as ``value(x)`` with ``n = |x|``."""

    def __init__(self, fn: Callable[[str], object], depth_cap: int = 64, label: str = "process"):
        self._fn = fn
        self.depth_cap = depth_cap
        self.label = label

    def __call__(self, x: str):
        if len(x) > self.depth_cap:
            raise DepthExceededError(f"|{x}| exceeds process cap {self.depth_cap}")
        return self._fn(x)


def ratio_process(p: Measure, q: Measure) -> Process:
    proc = Process(lambda x: likelihood_ratio(p, q, x), min(p.depth_cap, q.depth_cap), "Q/P")
    proc.numerator, proc.denominator = q, p
    return proc


def table_process(values: Mapping[str, object] | Callable[[str], object], depth_cap: int = 64) -> Process:
    if callable(values):
        return Process(values, depth_cap, "explicit")
    table = {k: (v if isinstance(v, float) else Fraction(v)) for k, v in values.items()}
    return Process(lambda x: table[x], depth_cap, "explicit")


def _need(depth: int, *caps: int):
    if depth > min(caps):
        raise DepthExceededError(f"depth {depth} exceeds cap {min(caps)}")


# -- submartingale / Doob -------------------------------------------------

def check_submartingale(p: Measure, proc: Process, depth: int) -> Report:
    """``P(x0) r(x0) + P(x1) r(x1) >= P(x) r(x)`` at every ``P``-positive node
    with ``|x| < depth``; equality everywhere means a martingale."""
    _need(depth, p.depth_cap, proc.depth_cap)
    failures, strict, equal, checked = [], 0, 0, 0
    for x in strings_up_to(depth - 1):
        px = p(x)
        if px == 0:
            continue
        checked += 1
        lhs = Fraction(0)
        for b in "01":
            pc = p(x + b)
            if pc:
                lhs = lhs + pc * proc(x + b)
        rhs = px * proc(x)
        if lhs < rhs:
            failures.append((x, lhs, rhs))
        elif lhs == rhs:
            equal += 1
        else:
            strict += 1
    rep = Report("martingale submartingale", data={
        "depth": depth,
        "nodes_checked": checked,
        "martingale": not failures and equal == checked,
        "strict_everywhere": checked > 0 and strict == checked,
        "failures": [list(f) for f in failures[:20]],
    })
    rep.check("submartingale violations", len(failures), "==", 0)
    return rep


def _running_sup(values: Sequence):
    out, best = [], None
    for v in values:
        best = v if best is None or v > best else best
        out.append(best)
    return out


def doob_check(
    p: Measure,
    proc: Process,
    depth: int,
    thresholds: Iterable[int],
    scheme: "ApproximationScheme | None" = None,
) -> Report:
    """Doob's maximal inequality at horizon ``n = depth``.

    For each threshold ``m``: ``P(sup_{1<=i<=n} r_i > m) <= E|r_n| / m``,
    with both sides computed exactly by leaf enumeration.  With a scheme the
    chain ``P(V) <= P(U) = P(U') = P(M)`` over the sets built from ``f`` and
    ``g`` is checked as well.
    """
    n = depth
    _need(n, p.depth_cap, proc.depth_cap)
    leaves = []
    for x in strings_of_length(n):
        px = p(x)
        vals = [proc(x[:i]) for i in range(1, n + 1)]
        if px > 0 and any(v < 0 for v in vals):
            raise NegativeValueError(f"process is negative along {x!r}")
        leaves.append((x, px, vals))

    expectation = Fraction(0)
    for x, px, vals in leaves:
        if px == 0:
            continue
        last = abs(vals[-1]) if vals else Fraction(0)
        expectation = INF if last == INF else expectation + px * last
    rep = Report("martingale doob", data={"depth": n, "expectation": expectation,
                                         "expectation_infinite": expectation == INF})
    for m in thresholds:
        if m <= 0:
            raise ValueError("thresholds must be positive")
        mass_m = sum((px for _, px, vals in leaves if vals and max(vals) > m), Fraction(0))
        rhs = INF if expectation == INF else expectation / m
        rep.data[f"P(M_{m})"] = mass_m
        rep.check(f"doob m={m}", mass_m, "<=", rhs)
        if scheme is None:
            continue
        gm = scheme.g(Fraction(m))
        mass_v = mass_u = mass_u2 = Fraction(0)
        for x, px, vals in leaves:
            if not vals:
                continue
            fs = [scheme.f(x[:i], i) for i in range(1, n + 1)]
            if gm < max(fs):
                mass_v += px
            if gm < max(scheme.g(v) for v in vals):
                mass_u += px
            if gm < scheme.g(max(vals)):
                mass_u2 += px
        rep.check(f"P(V) <= P(U) m={m}", mass_v, "<=", mass_u)
        rep.check(f"P(U) == P(U') m={m}", mass_u, "==", mass_u2)
        rep.check(f"P(U') == P(M) m={m}", mass_u2, "==", mass_m)
    return rep


# -- approximation schemes ------------------------------------------------

def _cmp_log2(r, q) -> int:
    """Sign of ``log2(r) - q`` for ``r >= 0`` (possibly inf) and rational or
    infinite ``q``, exactly."""
    if r == INF:
        return 0 if q == INF else 1
    r = Fraction(r)
    if r == 0:
        return 0 if q == -INF else -1
    if q == INF:
        return -1
    if q == -INF:
        return 1
    q = Fraction(q)
    # float estimate decides clear cases; exact powers only for near-ties
    est = math.log2(r.numerator) - math.log2(r.denominator) - float(q)
    if abs(est) > 1e-6 * (1 + abs(float(q))):
        return 1 if est > 0 else -1
    a, b = q.numerator, q.denominator
    u, v = r.numerator ** b, r.denominator ** b
    left, right = (u, v << a) if a >= 0 else (u << -a, v)
    return (left > right) - (left < right)


class Log2:
    """The exact real ``log2(r)``, ordered against rationals and other logs."""

    __slots__ = ("arg",)

    def __init__(self, arg):
        if arg < 0:
            raise ValueError("log2 of a negative value")
        self.arg = arg if arg == INF else Fraction(arg)

    def _cmp(self, other) -> int:
        if isinstance(other, Log2):
            return (self.arg > other.arg) - (self.arg < other.arg)
        return _cmp_log2(self.arg, other)

    def __lt__(self, o): return self._cmp(o) < 0
    def __le__(self, o): return self._cmp(o) <= 0
    def __gt__(self, o): return self._cmp(o) > 0
    def __ge__(self, o): return self._cmp(o) >= 0
    def __eq__(self, o): return self._cmp(o) == 0
    def __hash__(self): return hash(("log2", self.arg))

    def exact(self):
        """The value as a rational when ``arg`` is a power of two."""
        if self.arg == 0:
            return -INF
        if self.arg == INF:
            return INF
        u, v = self.arg.numerator, self.arg.denominator
        if u & (u - 1) == 0 and v & (v - 1) == 0:
            return Fraction(u.bit_length() - v.bit_length())
        return None

    def floor(self) -> int:
        """Largest integer ``k`` with ``2^k <= arg`` (finite positive args)."""
        u, v = self.arg.numerator, self.arg.denominator
        k = u.bit_length() - v.bit_length()
        while _cmp_log2(self.arg, k) < 0:
            k -= 1
        while _cmp_log2(self.arg, k + 1) >= 0:
            k += 1
        return k

    def __repr__(self):
        return f"Log2({self.arg})"


def dyadic_log(r) -> Log2:
    return Log2(r)


class TableG:
    """``g`` given as an exact lookup table; strict monotonicity is enforced
    on every pair of points actually evaluated."""

    def __init__(self, table: Mapping):
        self.table = {Fraction(k) if k != INF else INF: Fraction(v) for k, v in table.items()}
        self.seen: dict = {}

    def __call__(self, r):
        key = r if r == INF else Fraction(r)
        if key not in self.table:
            raise KeyError(f"g is not tabulated at {r}")
        val = self.table[key]
        self.seen[key] = val
        return val

    def check_monotone(self):
        pts = sorted(self.seen.items())
        for (a, ga), (b, gb) in zip(pts, pts[1:]):
            if not ga < gb:
                raise NotMonotoneError(f"g({a}) = {ga} is not below g({b}) = {gb}")


@dataclass
class ApproximationScheme:
    """``f(x, n) <= g(r_n(x)) <= f(x, n) + c``.

    ``g_naturals``, when given, is the exact table of ``g`` on the naturals;
    its presence marks the strong variant.
    """

    f: Callable[[str, int], object]
    c: int = 1
    g: Callable = dyadic_log
    g_naturals: Mapping[int, Fraction] | None = None
    name: str = "dyadic-log"

    @property
    def strong(self) -> bool:
        return self.g_naturals is not None


def table_f(values: Mapping[tuple[str, int], object], default=None) -> Callable[[str, int], object]:
    """``f`` read from ``{(bits, n): value}``; missing points use ``default``."""
    vals = dict(values)

    def f(x, n):
        if (x, n) in vals:
            return vals[x, n]
        if default is None:
            raise KeyError(f"f is not tabulated at ({x!r}, {n})")
        return default

    return f


def _g_minus_f_ceiling(gv, fv):
    """Smallest integer ``c`` with ``g <= f + c``; ``None`` if none exists."""
    if fv == -INF:
        return 0 if gv == -INF or gv == Log2(0) else None
    if gv == INF or (isinstance(gv, Log2) and gv.arg == INF):
        return None
    if isinstance(gv, Log2):
        if gv.arg == 0:
            return -INF
        exact = gv.exact()
        if exact is not None:
            return math.ceil(exact - Fraction(fv))
        lo = gv.floor()
        for c in range(math.floor(lo - Fraction(fv)), math.ceil(lo + 1 - Fraction(fv)) + 1):
            if gv <= Fraction(fv) + c:
                return c
        raise AssertionError("log2 bracket search failed")
    return math.ceil(Fraction(gv) - Fraction(fv))


def check_effective_approximation(proc: Process, scheme: ApproximationScheme, depth: int) -> Report:
    _need(depth, proc.depth_cap)
    lower, upper, tight = [], [], -INF
    unbounded = False
    for n in range(1, depth + 1):
        for x in strings_of_length(n):
            gv = scheme.g(proc(x))
            fv = scheme.f(x, n)
            fc = fv + scheme.c if fv not in (INF, -INF) else fv
            if not fv <= gv:
                lower.append((x, n))
            if not gv <= fc:
                upper.append((x, n))
            c_here = _g_minus_f_ceiling(gv, fv)
            if c_here is None:
                unbounded = True
            elif c_here > tight:
                tight = c_here
    if isinstance(scheme.g, TableG):
        scheme.g.check_monotone()
    rep = Report("martingale approx", data={
        "depth": depth,
        "c": scheme.c,
        "tightest_c": None if unbounded else (0 if tight == -INF else tight),
        "strong": scheme.strong,
        "g": scheme.name,
        "lower_violations": [list(v) for v in lower[:20]],
        "upper_violations": [list(v) for v in upper[:20]],
    })
    rep.check("f <= g(r) violations", len(lower), "==", 0)
    rep.check("g(r) <= f + c violations", len(upper), "==", 0)
    return rep


# -- bounded in probability / classification / equivalence ---------------

@dataclass(frozen=True)
class ProbBoundCertificate:
    h: Callable[[int], Fraction]
    label: str = "h"


def reciprocal_bound() -> ProbBoundCertificate:
    return ProbBoundCertificate(lambda k: Fraction(1, k), "1/k")


def check_bounded_in_probability(
    p: Measure, q: Measure, cert: ProbBoundCertificate, depth: int, ks: Iterable[int]
) -> Report:
    """Depth-``depth`` surrogate: ``P(P/Q > k) < h(k)`` for each ``k``."""
    _need(depth, p.depth_cap, q.depth_cap)
    ks = sorted(ks)
    leaves = [(p(x), ratio(p(x), q(x))) for x in strings_of_length(depth)]
    rep = Report("martingale boundedprob", data={"depth": depth, "h": cert.label})
    hs = [cert.h(k) for k in ks]
    for (k1, h1), (k2, h2) in zip(zip(ks, hs), zip(ks[1:], hs[1:])):
        rep.check(f"h decreasing {k1}->{k2}", h1, ">=", h2)
    for k, hk in zip(ks, hs):
        mass = sum((px for px, r in leaves if r > k), Fraction(0))
        rep.data[f"mass_k={k}"] = mass
        rep.data[f"margin_k={k}"] = hk - mass
        rep.check(f"P(P/Q > {k}) < h({k})", mass, "<", hk)
    return rep


@dataclass
class ClassificationReport:
    ratios: list
    running_min: list
    running_max: list
    threshold: Fraction
    regime: str

    def to_report(self) -> Report:
        rep = Report("martingale classify", data={
            "ratios": self.ratios, "running_min": self.running_min,
            "running_max": self.running_max, "threshold": self.threshold,
            "regime": self.regime,
        })
        rep.check("running min non-increasing", all(
            a >= b for a, b in zip(self.running_min, self.running_min[1:])), "==", True)
        rep.check("running max non-decreasing", all(
            a <= b for a, b in zip(self.running_max, self.running_max[1:])), "==", True)
        return rep


def classify(p: Measure, q: Measure, x: str, threshold=Fraction(1, 100)) -> ClassificationReport:
    """Running ``Q/P`` along the prefixes of ``x``.

    The regime is ``"bounded"`` while the running minimum stays above
    ``threshold`` and ``"decayed"`` once it drops to or below it; it says
    nothing about the infinite sequence.
    """
    threshold = Fraction(threshold)
    ratios = [likelihood_ratio(p, q, z) for z in prefixes(x)]
    rmin, rmax, lo, hi = [], [], None, None
    for r in ratios:
        lo = r if lo is None or r < lo else lo
        hi = r if hi is None or r > hi else hi
        rmin.append(lo)
        rmax.append(hi)
    regime = "bounded" if rmin[-1] > threshold else "decayed"
    return ClassificationReport(ratios, rmin, rmax, threshold, regime)


def equivalence_certificate(p, q, c, c_hi, depth: int, strict: bool = False) -> Report:
    """``c <= Q/P <= c_hi`` (strict with ``strict=True``) on every cylinder or
    rectangle up to ``depth`` in each coordinate."""
    c, c_hi = Fraction(c), Fraction(c_hi)
    if not 0 < c <= c_hi:
        raise ValueError("need 0 < c <= c_hi")
    if isinstance(p, JointMeasure):
        _need(depth, *p.caps, *q.caps)
        points = [(x, y) for y in strings_up_to(depth) for x in strings_up_to(depth)]
        rat = lambda pt: ratio(q(*pt), p(*pt))
    else:
        _need(depth, p.depth_cap, q.depth_cap)
        points = list(strings_up_to(depth))
        rat = lambda pt: ratio(q(pt), p(pt))
    rel = "<" if strict else "<="
    lo = hi = None
    arg_lo = arg_hi = None
    for pt in points:
        r = rat(pt)
        if lo is None or r < lo:
            lo, arg_lo = r, pt
        if hi is None or r > hi:
            hi, arg_hi = r, pt
    rep = Report("martingale equiv", data={
        "depth": depth, "strict": strict, "min_ratio": lo, "argmin": arg_lo,
        "max_ratio": hi, "argmax": arg_hi,
    })
    rep.check("c below min ratio", c, rel, lo)
    rep.check("max ratio below c_hi", hi, rel, c_hi)
    return rep
