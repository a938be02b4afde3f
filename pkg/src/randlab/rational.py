"""Exact rationals with the ``a/0`` convention and their text encoding.

Values are :class:`fractions.Fraction`; the one extended value ``math.inf``
only ever arises from a ratio with a zero denominator.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import FormatError

INF = math.inf
Extended = Union[Fraction, float]


def ratio(a: Fraction, b: Fraction) -> Extended:
    """``a / b`` with ``a/0 = inf`` for ``a != 0`` and ``0/0 = 0``."""
    if b == 0:
        return INF if a != 0 else Fraction(0)
    return Fraction(a) / b


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"`` (or an integer literal) into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise FormatError(f"expected a 'num/den' string, got {text!r}")
    s = text.strip()
    num, _, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if den else 1
    except ValueError:
        raise FormatError(f"bad rational {text!r}") from None
    if d <= 0:
        raise FormatError(f"rational {text!r} needs a positive denominator")
    return Fraction(n, d)


def format_value(v) -> str:
    """Exact text form: ``"num/den"``, ``"inf"`` or ``"-inf"``."""
    if isinstance(v, float):
        if v == INF:
            return "inf"
        if v == -INF:
            return "-inf"
        raise TypeError(f"refusing to serialize inexact float {v!r}")
    if isinstance(v, bool):
        return str(v).lower()
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def pow2(k: int) -> Fraction:
    return Fraction(2) ** k
