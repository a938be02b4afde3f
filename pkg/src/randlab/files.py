"""JSON input formats.

Rationals are ``"num/den"`` strings, bitstrings are ASCII ``'0'``/``'1'``
strings with ``""`` for the empty string.  Wherever a nested object is
expected, a file path (relative to the referencing file) is accepted too.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .bits import check_bits
from .errors import FormatError
from .example import ExampleParams, MachineTable, build_example
from .martingale import ApproximationScheme, TableG, dyadic_log, ratio_process, table_f, table_process
from .measures import (
    DEFAULT_CAP,
    bernoulli,
    joint_table,
    point_mass,
    product,
    table_measure,
    uniform,
)
from .rational import INF, parse_rational
from .testlab import RelativizedTest, TestFamily, default_bound, list_bound

BUILTIN_MEASURES = {
    "uniform": {"kind": "uniform"},
    "zeros": {"kind": "point", "pattern": "0"},
    "uniform-product": {"kind": "product", "x": {"kind": "uniform"}, "y": {"kind": "uniform"}},
}


def read_json(src, base: Path | None = None):
    """Return ``(obj, base_dir)`` for a dict, a builtin name or a file path."""
    if isinstance(src, (dict, list)):
        return src, base or Path(".")
    if isinstance(src, str) and src in BUILTIN_MEASURES:
        return BUILTIN_MEASURES[src], base or Path(".")
    path = Path(src)
    if base is not None and not path.is_absolute():
        path = base / path
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text), path.parent
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def file_digest(src) -> str | None:
    if isinstance(src, str) and src not in BUILTIN_MEASURES and Path(src).is_file():
        return hashlib.sha256(Path(src).read_bytes()).hexdigest()
    return None


def _field(obj: dict, key: str, where: str):
    if key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _rat(v, where):
    try:
        return parse_rational(v)
    except FormatError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _ext(v, where):
    if v in ("inf", "-inf"):
        return INF if v == "inf" else -INF
    return _rat(v, where)


def _bits(v, where):
    try:
        return check_bits(v)
    except ValueError:
        raise FormatError(f"{where}: {v!r} is not a bitstring") from None


def load_measure(src, base: Path | None = None):
    """Measure (single tree) or JointMeasure (product tree) from JSON."""
    obj, base = read_json(src, base)
    where = str(src) if isinstance(src, str) else "measure"
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    kind = _field(obj, "kind", where)
    cap = int(obj.get("depth_cap", DEFAULT_CAP))
    if kind == "uniform":
        return uniform(cap)
    if kind == "bernoulli":
        return bernoulli(_rat(_field(obj, "p", where), where + ".p"), cap)
    if kind == "point":
        return point_mass(_bits(obj.get("pattern", "0"), where + ".pattern"), cap)
    if kind == "table":
        leaves = {_bits(k, where + ".leaves"): _rat(v, where + ".leaves") for k, v in _field(obj, "leaves", where).items()}
        if "depth" in obj and any(len(k) != int(obj["depth"]) for k in leaves):
            raise FormatError(f"{where}: leaf length differs from depth {obj['depth']}")
        try:
            return table_measure(leaves, cap)
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    if kind == "joint-table":
        leaves = {}
        for item in _field(obj, "leaves", where):
            x, y, v = item
            leaves[_bits(x, where), _bits(y, where)] = _rat(v, where)
        try:
            return joint_table(leaves, cap)
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    if kind == "product":
        return product(load_measure(_field(obj, "x", where), base), load_measure(_field(obj, "y", where), base))
    if kind == "example":
        eps = _rat(_field(obj, "epsilon", where), where + ".epsilon")
        table = load_machines(_field(obj, "machines", where), base)
        return build_example(ExampleParams(eps, table, cap, cap))
    raise FormatError(f"{where}: unknown measure kind {kind!r}")


def load_machines(src, base: Path | None = None) -> MachineTable:
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "machines"
    if "triggers" in obj:
        pairs = [(int(_field(t, "n", where)), _bits(_field(t, "prefix", where), where)) for t in obj["triggers"]]
        k = int(obj.get("machine_count", max((n for n, _ in pairs), default=0)))
        trig: dict[int, list[str]] = {}
        for n, p in pairs:
            trig.setdefault(n, []).append(p)
        try:
            return MachineTable.from_triggers(k, trig)
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    if "entries" in obj:
        ents = [(int(_field(e, "n", where)), _bits(_field(e, "y", where), where), bool(e.get("halted", True)))
                for e in obj["entries"]]
        k = int(obj.get("machine_count", max((n for n, _, _ in ents), default=0)))
        try:
            return MachineTable.from_entries(k, ents)
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    if "machine_count" in obj:
        return MachineTable.empty(int(obj["machine_count"]))
    raise FormatError(f"{where}: need 'triggers' or 'entries'")


def _level(items, where):
    out = []
    for it in items:
        if isinstance(it, list):
            out.append((_bits(it[0], where), _bits(it[1], where)))
        else:
            out.append(_bits(it, where))
    return out


def load_family(src, base: Path | None = None) -> TestFamily:
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "family"
    levels = [_level(lvl, where) for lvl in _field(obj, "levels", where)]
    bound = obj.get("bound", "2^-n")
    if bound == "2^-n":
        return TestFamily(levels, default_bound)
    if isinstance(bound, list):
        if len(bound) < len(levels):
            raise FormatError(f"{where}: bound list shorter than levels")
        return TestFamily(levels, list_bound([_rat(b, where + ".bound") for b in bound]))
    raise FormatError(f"{where}: bound must be '2^-n' or a list")


def load_relativized(src, base: Path | None = None) -> RelativizedTest:
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "relativized"
    stages = [(_bits(_field(s, "y", where), where), [_bits(x, where) for x in _field(s, "items", where)])
              for s in _field(obj, "stages", where)]
    return RelativizedTest.from_stages(stages)


def load_rects(src, base: Path | None = None) -> list:
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "rectangles"
    if not isinstance(obj, list):
        raise FormatError(f"{where}: expected a list of [x, y] pairs")
    return [(_bits(x, where), _bits(y, where)) for x, y in obj]


def load_partial_map(src, base: Path | None = None) -> dict:
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "map"
    return {_bits(k, where): _rat(v, where) for k, v in obj.items()}


def load_scheme(src, base: Path | None = None) -> ApproximationScheme:
    """``{"g": "dyadic-log" | {"table": {r: g}}, "c": k, "f": [[bits, n, v], ...],
    "default": "-inf", "g_naturals": {n: v}}``."""
    obj, _ = read_json(src, base)
    where = str(src) if isinstance(src, str) else "scheme"
    g_spec = obj.get("g", "dyadic-log")
    if g_spec == "dyadic-log":
        g, name = dyadic_log, "dyadic-log"
    elif isinstance(g_spec, dict) and "table" in g_spec:
        g = TableG({_ext(k, where): _rat(v, where) for k, v in g_spec["table"].items()})
        name = "table"
    else:
        raise FormatError(f"{where}: g must be 'dyadic-log' or a table")
    f_vals = {(_bits(x, where), int(n)): _ext(v, where) for x, n, v in _field(obj, "f", where)}
    default = _ext(obj["default"], where) if "default" in obj else None
    g_nat = obj.get("g_naturals")
    if g_nat is not None:
        g_nat = {int(k): _rat(v, where) for k, v in g_nat.items()}
    return ApproximationScheme(table_f(f_vals, default), int(obj.get("c", 1)), g, g_nat, name)


def load_process(src, base: Path | None = None):
    """Ratio process ``{"p": M, "q": M}`` or explicit ``{"values": {bits: v}}``."""
    obj, base = read_json(src, base)
    where = str(src) if isinstance(src, str) else "process"
    if "values" in obj:
        return table_process({_bits(k, where): _ext(v, where) for k, v in obj["values"].items()})
    return ratio_process(load_measure(_field(obj, "p", where), base), load_measure(_field(obj, "q", where), base))
