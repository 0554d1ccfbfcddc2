"""Finitely supported permutations of X_n = {1..n} x N.

Permutations act on the right: ``x * (f * g) == (x * f) * g``, so a product
``f * g`` applies ``f`` first.  Only moved points are stored, which makes
structural equality coincide with equality of permutations.
"""

from __future__ import annotations

import enum
import re
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import ParityError, ParseError


class Point(NamedTuple):
    """A point (ray, pos) of X_n; tuple order gives the lexicographic order."""

    ray: int
    pos: int

    def __str__(self):
        return f"({self.ray},{self.pos})"


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):
        if not isinstance(other, Parity):
            return NotImplemented
        return Parity(self.value ^ other.value)

    def __str__(self):
        return self.name.lower()


def _check_point(x, n):
    if not isinstance(x, Point):
        x = Point(*x)
    if not (1 <= x.ray <= n) or x.pos < 1:
        raise ValueError(f"point {x} lies outside X_{n}")
    return x


class FinitePermutation:
    """A bijection of X_n moving finitely many points.

    FinitePermutation(n, mapping) -> permutation given by a finite mapping;
    keys mapped to themselves are dropped.  The mapping must be a bijection
    of its key set.
    """

    __slots__ = ("n", "_map", "_hash")

    def __init__(self, n: int, mapping: Mapping | Iterable = ()):
        if n < 1:
            raise ValueError("ambient ray count must be positive")
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        table = {}
        for x, y in items:
            x, y = _check_point(x, n), _check_point(y, n)
            if x != y:
                table[x] = y
        if set(table) != set(table.values()) or len(set(table.values())) != len(table):
            raise ValueError("mapping is not a bijection of its support")
        self.n = n
        self._map = table
        self._hash = hash((n, frozenset(table.items())))

    @classmethod
    def identity(cls, n: int) -> "FinitePermutation":
        return cls(n)

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence]) -> "FinitePermutation":
        """Build from disjoint cycles; each cycle (a b c) sends a->b->c->a."""
        table = {}
        for cycle in cycles:
            cycle = [_check_point(x, n) for x in cycle]
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if a in table:
                    raise ValueError(f"cycles are not disjoint at {a}")
                table[a] = b
        return cls(n, table)

    @classmethod
    def cycle(cls, n: int, *points) -> "FinitePermutation":
        return cls.from_cycles(n, [points])

    # mapping-like access

    def __call__(self, x) -> Point:
        x = Point(*x)
        return self._map.get(x, x)

    apply = __call__

    def items(self):
        return self._map.items()

    def support(self) -> frozenset:
        return frozenset(self._map)

    def __len__(self):
        return len(self._map)

    def __bool__(self):
        return bool(self._map)

    def is_identity(self) -> bool:
        return not self._map

    def max_pos(self, ray: int) -> int:
        """Largest moved position on ``ray`` (0 if the ray is untouched)."""
        return max((x.pos for x in self._map if x.ray == ray), default=0)

    # group operations

    def __mul__(self, other: "FinitePermutation") -> "FinitePermutation":
        if not isinstance(other, FinitePermutation):
            return NotImplemented
        return compose(self, other)

    def inverse(self) -> "FinitePermutation":
        return FinitePermutation(self.n, {y: x for x, y in self._map.items()})

    def __pow__(self, k: int) -> "FinitePermutation":
        base = self if k >= 0 else self.inverse()
        result = FinitePermutation.identity(self.n)
        for _ in range(abs(k)):
            result = result * base
        return result

    def cycles(self) -> list:
        return cycle_decomposition(self)

    def parity(self) -> Parity:
        return parity(self)

    @property
    def is_even(self) -> bool:
        return parity(self) is Parity.EVEN

    def cycle_type(self) -> tuple:
        """Sorted tuple of cycle lengths (moved points only)."""
        return tuple(sorted(len(c) for c in cycle_decomposition(self)))

    def order(self) -> int:
        from math import lcm
        return lcm(*self.cycle_type()) if self._map else 1

    def conjugate(self, c: "FinitePermutation") -> "FinitePermutation":
        """c^-1 * self * c."""
        return c.inverse() * self * c

    def relabel(self, table: Mapping) -> "FinitePermutation":
        """The permutation obtained by renaming points through ``table``."""
        return FinitePermutation(self.n, {table.get(x, x): table.get(y, y)
                                          for x, y in self._map.items()})

    def __eq__(self, other):
        if not isinstance(other, FinitePermutation):
            return NotImplemented
        return self.n == other.n and self._map == other._map

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinitePermutation({format_fperm(self)!r})"

    def __str__(self):
        return format_fperm(self)


def compose(f: FinitePermutation, g: FinitePermutation) -> FinitePermutation:
    """Product applying ``f`` first, then ``g``."""
    if f.n != g.n:
        raise ValueError(f"ambient mismatch: X_{f.n} vs X_{g.n}")
    table = {}
    for x in f.support() | g.support():
        table[x] = g(f(x))
    return FinitePermutation(f.n, table)


def cycle_decomposition(f: FinitePermutation) -> list:
    """Disjoint cycles of length >= 2, each starting at its smallest point,
    sorted by that point."""
    seen = set()
    cycles = []
    for start in sorted(f.support()):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        y = f(start)
        while y != start:
            cycle.append(y)
            seen.add(y)
            y = f(y)
        cycles.append(cycle)
    return cycles


def parity(f: FinitePermutation) -> Parity:
    # a k-cycle is a product of k-1 transpositions
    swaps = sum(len(c) - 1 for c in cycle_decomposition(f))
    return Parity(swaps % 2)


def transpositions(f: FinitePermutation) -> list:
    """Transpositions whose product (left to right) is ``f``.

    Under right actions the cycle (a1 a2 ... ak) equals
    (a1 a2)(a1 a3)...(a1 ak).
    """
    out = []
    for c in cycle_decomposition(f):
        out.extend((c[0], b) for b in c[1:])
    return out


def decompose_into_3cycles(f: FinitePermutation) -> list:
    """Write an even permutation as a product of 3-cycles.

    Transpositions are taken in consecutive pairs.  A pair sharing one point
    is already a 3-cycle; a disjoint pair (a b)(c d) is rewritten as
    (a b)(b c) * (b c)(c d).
    """
    if parity(f) is not Parity.EVEN:
        raise ParityError(f"odd permutation has no 3-cycle decomposition: {f}")
    n = f.n
    swaps = transpositions(f)
    out = []
    for (a, b), (c, d) in zip(swaps[0::2], swaps[1::2]):
        if {a, b} == {c, d}:
            continue
        if {a, b} & {c, d}:
            out.append(_swap(n, a, b) * _swap(n, c, d))
        else:
            out.append(_swap(n, a, b) * _swap(n, b, c))
            out.append(_swap(n, b, c) * _swap(n, c, d))
    return out


def _swap(n, a, b):
    return FinitePermutation(n, {a: b, b: a})


def product(perms: Iterable[FinitePermutation], n: int | None = None) -> FinitePermutation:
    result = None
    for p in perms:
        result = p if result is None else result * p
    if result is None:
        if n is None:
            raise ValueError("empty product needs an ambient n")
        return FinitePermutation.identity(n)
    return result


# text format:  fperm n=<n> cycles=((r,p) (r,p) ...)(...)

def format_fperm(f: FinitePermutation) -> str:
    cycles = cycle_decomposition(f)
    body = "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)
    return f"fperm n={f.n} cycles={body or '()'}"


_FPERM_HEAD = re.compile(r"\s*fperm\s+n=(\d+)\s+cycles=")
_CYCLE = re.compile(r"\(\s*((?:\(\s*\d+\s*,\s*\d+\s*\)\s*)*)\)")
_POINT = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_fperm(text: str, offset: int = 0) -> FinitePermutation:
    """Parse an ``fperm`` literal; errors report the 1-based column."""
    f, end = _parse_fperm_prefix(text, offset)
    if text[end:].strip():
        raise ParseError("trailing characters after fperm literal", text,
                         end + len(text[end:]) - len(text[end:].lstrip()))
    return f


def _parse_fperm_prefix(text, start=0):
    m = _FPERM_HEAD.match(text, start)
    if not m:
        raise ParseError("expected 'fperm n=<n> cycles=...'", text, start)
    n = int(m.group(1))
    if n < 1:
        raise ParseError("ray count must be positive", text, m.start(1))
    pos = m.end()
    cycles = []
    while pos < len(text) and text[pos] == "(":
        c = _CYCLE.match(text, pos)
        if not c:
            raise ParseError("malformed cycle", text, pos)
        pts = [Point(int(r), int(p)) for r, p in _POINT.findall(c.group(1))]
        if pts:
            cycles.append(pts)
        pos = c.end()
    try:
        f = FinitePermutation.from_cycles(n, cycles)
    except ValueError as exc:
        raise ParseError(str(exc), text, m.end()) from None
    return f, pos


def iter_points(n: int, max_pos: int) -> Iterator[Point]:
    """All points of the box {1..n} x {1..max_pos} in lexicographic order."""
    for ray in range(1, n + 1):
        for pos in range(1, max_pos + 1):
            yield Point(ray, pos)
