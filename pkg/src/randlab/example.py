"""Joint measure whose conditionals encode a (finite) halting table.

The x-axis is cut into cells ``C_1 = cyl(0)``, ``C_2 = cyl(10)``,
``C_3 = cyl(110)``, ... with ``P(C_n | empty) = 2^-n``.  Along the oracle
coordinate ``y`` the cell mass of machine ``n`` is inherited from parent to
child, except at the detection node (the first prefix of ``y`` at which
machine ``n`` is halted): there the 0-child gets factor ``1 - eps`` and the
1-child factor ``1 + eps``.  Inside a cell the mass spreads uniformly, and
``P(x, y) = P(x | y) 2^-|y|``.

Machines are not simulated.  A :class:`MachineTable` is the monotone halting
predicate, given either by trigger prefixes or by explicit entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .bits import check_bits, minimal_elements, prefixes, strings_up_to
from .errors import DepthExceededError, EpsilonRangeError, NonMonotoneTableError
from .measures import DEFAULT_CAP, JointMeasure, check_consistency
from .rational import pow2
from .reports import Report


@dataclass(frozen=True)
class MachineTable:
    """Monotone predicate ``halted(n, y)`` for machines ``1..machine_count``.

    Stored as the prefix-minimal set of halted strings per machine; machine
    ``n`` is halted at ``y`` iff one of them is a prefix of ``y``.
    """

    machine_count: int
    minimal: Mapping[int, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_triggers(cls, machine_count: int, triggers: Mapping[int, Iterable[str] | str]):
        out = {}
        for n, ps in triggers.items():
            _check_index(n, machine_count)
            ps = [ps] if isinstance(ps, str) else list(ps)
            out[n] = tuple(minimal_elements(check_bits(p) for p in ps))
        return cls(machine_count, out)

    @classmethod
    def from_entries(cls, machine_count: int, entries: Iterable[tuple[int, str, bool]]):
        """Build from explicit ``(n, y, halted)`` entries, closing upwards.

        Raises :class:`NonMonotoneTableError` when an entry says "not halted"
        below a halted entry.
        """
        entries = [(int(n), check_bits(y), bool(h)) for n, y, h in entries]
        halted: dict[int, list[str]] = {}
        for n, y, h in entries:
            _check_index(n, machine_count)
            if h:
                halted.setdefault(n, []).append(y)
        table = cls(machine_count, {n: tuple(minimal_elements(ys)) for n, ys in halted.items()})
        for n, y, h in entries:
            if not h and table.halted(n, y):
                raise NonMonotoneTableError(
                    f"machine {n} is halted below {y!r} but the entry at {y!r} says it is not"
                )
        return table

    @classmethod
    def empty(cls, machine_count: int = 0):
        return cls(machine_count, {})

    def halted(self, n: int, y: str) -> bool:
        return any(y.startswith(z) for z in self.minimal.get(n, ()))

    def detection(self, n: int, y: str) -> str | None:
        """The detection node of machine ``n`` along ``y``, if ``y`` reaches it."""
        for z in self.minimal.get(n, ()):
            if y.startswith(z):
                return z
        return None

    def halted_set(self) -> frozenset:
        return frozenset((n, z) for n, zs in self.minimal.items() for z in zs)


def _check_index(n, machine_count):
    if not 1 <= n <= machine_count:
        raise ValueError(f"machine index {n} outside 1..{machine_count}")


@dataclass(frozen=True)
class ExampleParams:
    epsilon: Fraction
    table: MachineTable
    x_cap: int = DEFAULT_CAP
    y_cap: int = DEFAULT_CAP

    def __post_init__(self):
        eps = Fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps < 1:
            raise EpsilonRangeError(f"epsilon must lie strictly between 0 and 1, got {eps}")


class ExampleMeasure(JointMeasure):
    """Joint measure produced by :func:`build_example`.

    ``cell_mass(n, y)`` and ``kernel(x, y)`` expose the construction's
    recursion values, as opposed to :func:`randlab.measures.conditional`,
    which divides by the actual second marginal.
    """

    def __init__(self, params: ExampleParams, child_factors=None):
        self.example = params
        eps = params.epsilon
        lo, hi = child_factors if child_factors else (1 - eps, 1 + eps)
        self.child_factors = (Fraction(lo), Fraction(hi))
        table = params.table
        k = table.machine_count

        @lru_cache(maxsize=None)
        def cell(n: int, y: str) -> Fraction:
            base = pow2(-n)
            z = table.detection(n, y)
            if z is None or len(z) == len(y):
                return base
            return base * (self.child_factors[0] if y[len(z)] == "0" else self.child_factors[1])

        @lru_cache(maxsize=None)
        def kernel(x: str, y: str) -> Fraction:
            i = x.find("0")
            if i >= 0:
                n = i + 1
                return pow2(n - len(x)) * cell(n, y)
            # x = 1^j covers cells j+1, j+2, ... and the null point 1^inf
            j = len(x)
            rest = sum((cell(n, y) for n in range(j + 1, k + 1)), Fraction(0))
            return rest + pow2(-max(j, k))

        self._cell = cell
        self._kernel = kernel
        super().__init__(
            lambda x, y: kernel(x, y) * pow2(-len(y)),
            (params.x_cap, params.y_cap),
            "example",
            {"epsilon": eps, "table": table},
        )

    def cell_mass(self, n: int, y: str) -> Fraction:
        check_bits(y)
        if len(y) > self.caps[1]:
            raise DepthExceededError(f"|{y}| exceeds y cap {self.caps[1]}")
        return self._cell(n, y)

    def kernel(self, x: str, y: str) -> Fraction:
        self(x, y)
        return self._kernel(x, y)


def build_example(params: ExampleParams) -> ExampleMeasure:
    return ExampleMeasure(params)


def trigger_example(epsilon, triggers: Mapping[int, str], machine_count: int | None = None, **caps):
    """Shorthand: machine ``n`` halts iff ``triggers[n]`` is a prefix of y."""
    k = machine_count if machine_count is not None else max(triggers, default=0)
    table = MachineTable.from_triggers(k, triggers)
    return build_example(ExampleParams(Fraction(epsilon), table, **caps))


def verify_ratio_bounds(p: JointMeasure, epsilon, depth: int) -> Report:
    """Check ``1 - eps <= P(x, y) / Q(x, y) <= 1 + eps`` against the uniform
    product ``Q`` for all ``|x|, |y| <= depth``."""
    eps = Fraction(epsilon)
    if depth > min(p.caps):
        raise DepthExceededError(f"depth {depth} exceeds caps {p.caps}")
    lo, hi = 1 - eps, 1 + eps
    rmin = rmax = None
    argmin = argmax = None
    bad = []
    for y in strings_up_to(depth):
        for x in strings_up_to(depth):
            r = p(x, y) * pow2(len(x) + len(y))
            if rmin is None or r < rmin:
                rmin, argmin = r, (x, y)
            if rmax is None or r > rmax:
                rmax, argmax = r, (x, y)
            if not lo <= r <= hi:
                bad.append(((x, y), r))
    rep = Report("example verify-ratio", data={
        "epsilon": eps, "depth": depth,
        "min_ratio": rmin, "argmin": list(argmin),
        "max_ratio": rmax, "argmax": list(argmax),
        "violations": [[list(k), v] for k, v in bad[:20]],
    })
    rep.check("min_ratio >= 1-eps", rmin, ">=", lo)
    rep.check("max_ratio <= 1+eps", rmax, "<=", hi)
    rep.check("violation_count", len(bad), "==", 0)
    return rep


def conditional_deviation(p: ExampleMeasure, n: int, y: str) -> tuple[bool, list[Fraction]]:
    """Whether the cell mass of machine ``n`` at ``y`` differs from ``2^-n``,
    with the cell-mass trace along the prefixes of ``y``."""
    k = p.example.table.machine_count
    if not 1 <= n <= max(k, 1):
        raise ValueError(f"cell index {n} outside 1..{k}")
    trace = [p.cell_mass(n, z) for z in prefixes(y)]
    return trace[-1] != pow2(-n), trace


def verify_example_invariants(p: ExampleMeasure, depth: int) -> Report:
    """Exhaustive structural checks of an example measure up to ``depth``.

    Additivity (rectangle level ``depth``), both marginals uniform, cell
    proportionality of conditionals, and at most one perturbation factor per
    cell along every y-branch.
    """
    if depth > min(p.caps):
        raise DepthExceededError(f"depth {depth} exceeds caps {p.caps}")
    rep = Report("example verify-invariants", data={"depth": depth})
    cons = check_consistency(p, depth)
    rep.check("additivity violations", len(cons.violations), "==", 0)
    rep.data["additivity"] = [[str(v.node), v.identity, v.lhs, v.rhs] for v in cons.violations[:20]]

    bad_x = [x for x in strings_up_to(depth) if p(x, "") != pow2(-len(x))]
    bad_y = [y for y in strings_up_to(depth) if p("", y) != pow2(-len(y))]
    rep.check("x-marginal non-uniform points", len(bad_x), "==", 0)
    rep.check("y-marginal non-uniform points", len(bad_y), "==", 0)
    rep.data["x_marginal_mismatch"] = bad_x[:20]
    rep.data["y_marginal_mismatch"] = bad_y[:20]

    bad_cell = []
    for y in strings_up_to(depth):
        py = p("", y)
        if py == 0:
            continue
        for x in strings_up_to(depth):
            i = x.find("0")
            if i < 0:
                continue
            marker = x[: i + 1]
            lhs = p(x, y) / py
            rhs = pow2(len(marker) - len(x)) * (p(marker, y) / py)
            if lhs != rhs:
                bad_cell.append((x, y))
    rep.check("cell proportionality violations", len(bad_cell), "==", 0)

    k = p.example.table.machine_count
    multi = []
    for y in strings_up_to(depth):
        if len(y) != depth:
            continue
        for n in range(1, k + 1):
            changes = sum(
                1 for a, b in zip(prefixes(y), prefixes(y)[1:]) if p.cell_mass(n, a) != p.cell_mass(n, b)
            )
            if changes > 1:
                multi.append((n, y))
    rep.check("cells perturbed more than once", len(multi), "==", 0)
    return rep
