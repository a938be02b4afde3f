"""Verification reports with exact values.

Every check produces a :class:`Record` holding both sides of a relation as
exact values.  A :class:`Report` passes iff all of its records pass.
"""
from __future__ import annotations

import json
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .rational import format_value

RELATIONS = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
    "!=": operator.ne,
}


@dataclass(frozen=True)
class Record:
    name: str
    lhs: Any
    rhs: Any
    relation: str
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _encode(self.lhs),
            "rhs": _encode(self.rhs),
            "relation": self.relation,
            "pass": self.passed,
        }


@dataclass
class Report:
    command: str
    records: list[Record] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    timing: float | None = None

    def check(self, name: str, lhs, relation: str, rhs) -> bool:
        ok = bool(RELATIONS[relation](lhs, rhs))
        self.records.append(Record(name, lhs, rhs, relation, ok))
        return ok

    def flag(self, name: str, ok: bool, lhs=None, rhs=None, relation="==") -> bool:
        """Record a boolean outcome that is not a plain numeric relation."""
        lhs = ok if lhs is None else lhs
        rhs = True if rhs is None else rhs
        self.records.append(Record(name, lhs, rhs, relation, bool(ok)))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "pass": self.passed,
            "records": [r.to_dict() for r in self.records],
            "data": _encode(self.data),
        }
        if self.timing is not None:
            out["timing"] = round(self.timing, 6)
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=kw.pop("indent", 2), **kw)


def _encode(v):
    if isinstance(v, (Fraction, float)) and not isinstance(v, bool):
        return format_value(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, dict):
        return {str(k): _encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted((_encode(x) for x in v), key=repr)
    return v
