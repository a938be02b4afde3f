"""Finite binary strings.

Bitstrings are plain ``str`` objects over the alphabet ``{'0', '1'}``; the
empty string is the root of the tree.  Everything here is a pure helper.
"""
from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator

EMPTY = ""


def check_bits(s: str) -> str:
    if not isinstance(s, str) or s.strip("01"):
        raise ValueError(f"not a bitstring: {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    """``a`` is a (not necessarily proper) prefix of ``b``."""
    return b.startswith(a)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def prefixes(s: str) -> list[str]:
    """All prefixes of ``s`` from the empty string up to ``s`` itself."""
    return [s[:i] for i in range(len(s) + 1)]


def strings_of_length(n: int) -> Iterator[str]:
    for t in product("01", repeat=n):
        yield "".join(t)


def strings_up_to(n: int) -> Iterator[str]:
    for k in range(n + 1):
        yield from strings_of_length(k)


def extensions(s: str, n: int) -> Iterator[str]:
    """Extensions of ``s`` of total length ``n`` (``n >= len(s)``)."""
    for t in strings_of_length(n - len(s)):
        yield s + t


def shortlex_key(s: str) -> tuple[int, str]:
    return (len(s), s)


def minimal_elements(strings: Iterable[str]) -> list[str]:
    """Prefix-minimal reduction: drop every string extending another one.

    Elements are scanned in (length, lexicographic) order, so the result is
    sorted the same way and does not depend on the input order.
    """
    kept: list[str] = []
    for s in sorted(set(strings), key=shortlex_key):
        if not any(s.startswith(k) for k in kept):
            kept.append(s)
    return kept


def covered(s: str, cover: Iterable[str]) -> bool:
    """Whether the cylinder of ``s`` lies inside the union of ``cover``."""
    cover = list(cover)
    if any(s.startswith(c) for c in cover):
        return True
    below = [c for c in cover if c.startswith(s)]
    if not below:
        return False
    return covered(s + "0", below) and covered(s + "1", below)
