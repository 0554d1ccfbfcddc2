"""Torsion constructions by block rotations, and the action of a group on the
disjoint union of some of its finite quotients."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .brute_oracle import SmallPerm, generate, parse_small_perm
from .errors import ParseError, PreconditionError
from .structured_perm import (
    INF,
    StructuredPermutation,
    cycle_census,
    order,
    product,
    ray_block,
)


def rho_block(n: int, ray: int = 1, rays: int | None = None) -> StructuredPermutation:
    """Rotation of every consecutive block of n positions on ``ray``:
    positions 1, 2, ..., n of a block go to 2, 3, ..., n, 1.

    ``rays`` is the ambient ray count (defaults to ``ray``).
    """
    if n < 2:
        raise ValueError("block length must be at least 2")
    rays = rays or ray
    if not 1 <= ray <= rays:
        raise ValueError(f"ray {ray} outside 1..{rays}")
    return ray_block(rays, ray, list(range(1, n)) + [0])


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple

    def __post_init__(self):
        ps = tuple(self.primes)
        object.__setattr__(self, "primes", ps)
        if any(not _is_prime(p) for p in ps):
            raise ValueError(f"not all prime: {ps}")
        if list(ps) != sorted(set(ps)):
            raise ValueError("primes must be distinct and increasing")


def torsion_sum(primes: PrimeSet | Sequence[int]) -> list:
    """One block rotation per prime, the k-th on ray k.

    The ambient has one extra, untouched ray so that every generator keeps
    infinitely many fixed points.
    """
    ps = primes.primes if isinstance(primes, PrimeSet) else PrimeSet(tuple(primes)).primes
    rays = len(ps) + 1
    return [rho_block(p, k, rays) for k, p in enumerate(ps, start=1)]


def order_profile(gens: Sequence[StructuredPermutation]) -> dict:
    """Order of the product over every nonempty subset of the generators,
    keyed by the subset's index tuple."""
    out = {}
    for size in range(1, len(gens) + 1):
        for idx in combinations(range(len(gens)), size):
            out[idx] = order(product(*(gens[i] for i in idx)))
    return out


def torsion_primes(gens: Sequence[StructuredPermutation]) -> set:
    """Primes dividing the order of some generator product."""
    found = set()
    for v in order_profile(gens).values():
        if v == INF:
            continue
        found.update(p for p in range(2, v + 1) if v % p == 0 and _is_prime(p))
    return found


# finite quotients

@dataclass(frozen=True)
class Quotient:
    degree: int
    images: tuple               # one SmallPerm per abstract generator
    relations: tuple = ()       # words (tuples of signed generator indices)

    def group(self) -> frozenset:
        return generate(self.images, self.degree)


@dataclass(frozen=True)
class QuotientFamily:
    generators: int
    quotients: tuple

    def __post_init__(self):
        if not self.quotients:
            raise PreconditionError("a quotient family needs at least one quotient")
        for q in self.quotients:
            if len(q.images) != self.generators:
                raise ValueError(f"quotient of degree {q.degree} gives {len(q.images)} "
                                 f"generator images, expected {self.generators}")
            for word in q.relations:
                if evaluate(q, word) != SmallPerm.identity(q.degree):
                    raise ValueError(f"relation {word} fails in quotient of degree {q.degree}")


def evaluate(q: Quotient, word: Sequence[int]) -> SmallPerm:
    """Image of a word; letter +i is generator i, -i its inverse (1-based)."""
    g = SmallPerm.identity(q.degree)
    for letter in word:
        s = q.images[abs(letter) - 1]
        g = g * (s if letter > 0 else s.inverse())
    return g


_LINE = re.compile(r"q=(\d+)((?:\s+gen\d+=\S+)+)((?:\s+rel=\S+)*)\s*$")


def parse_quotient_family(text: str) -> QuotientFamily:
    """One quotient per line: ``q=<degree> gen1=2,1,3 gen2=... [rel=1,1,-2]``."""
    quotients = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: expected 'q=<degree> gen1=<perm> ...'", raw, 0)
        degree = int(m.group(1))
        images = []
        for k, tok in enumerate(m.group(2).split(), start=1):
            name, _, body = tok.partition("=")
            if name != f"gen{k}":
                raise ParseError(f"line {lineno}: expected gen{k}", raw, raw.find(tok))
            try:
                p = parse_small_perm(body)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}", raw, raw.find(tok)) from None
            if p.degree != degree:
                raise ParseError(f"line {lineno}: gen{k} has degree {p.degree}, not {degree}",
                                 raw, raw.find(tok))
            images.append(p)
        rels = tuple(tuple(int(v) for v in tok[4:].split(",")) for tok in m.group(3).split())
        quotients.append(Quotient(degree, tuple(images), rels))
    if not quotients:
        raise ParseError("no quotients given", text, 0)
    arities = {len(q.images) for q in quotients}
    if len(arities) > 1:
        raise ParseError(f"quotients disagree on the number of generators: {sorted(arities)}",
                         text, 0)
    try:
        return QuotientFamily(arities.pop(), tuple(quotients))
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None


@dataclass(frozen=True)
class UnionAction:
    """Permutations of the disjoint union of the quotient groups.

    ``blocks[i]`` is the (start, size) label range of quotient i; each
    generator acts on block i by right multiplication by its image.
    """

    blocks: tuple
    generators: tuple           # SmallPerm per abstract generator
    elements: tuple             # sorted element list per block

    @property
    def size(self):
        return sum(size for _, size in self.blocks)

    def block_of(self, label: int) -> int:
        for i, (start, size) in enumerate(self.blocks):
            if start <= label < start + size:
                return i
        raise ValueError(label)


def union_quotient_action(family: QuotientFamily) -> UnionAction:
    blocks, elements, start = [], [], 1
    for q in family.quotients:
        elems = tuple(sorted(q.group()))
        blocks.append((start, len(elems)))
        elements.append(elems)
        start += len(elems)
    gens = []
    for k in range(family.generators):
        images = []
        for q, elems, (first, _) in zip(family.quotients, elements, blocks):
            index = {e: first + i for i, e in enumerate(elems)}
            s = q.images[k]
            images.extend(index[e * s] for e in elems)
        gens.append(SmallPerm(images))
    return UnionAction(tuple(blocks), tuple(gens), tuple(elements))


def act(action: UnionAction, word: Sequence[int]) -> SmallPerm:
    g = SmallPerm.identity(action.size)
    for letter in word:
        s = action.generators[abs(letter) - 1]
        g = g * (s if letter > 0 else s.inverse())
    return g


def all_orbits_finite(action) -> bool:
    """Whether every orbit is finite.

    A UnionAction or a SmallPerm lives on a finite set, so the answer is
    True; a StructuredPermutation is decided by its census.
    """
    if isinstance(action, StructuredPermutation):
        return cycle_census(action).eta_inf == 0
    if isinstance(action, (UnionAction, SmallPerm)):
        return True
    return all(all_orbits_finite(a) for a in action)


def blocks_invariant(action: UnionAction) -> bool:
    """No generator moves a point to another block."""
    return all(action.block_of(s(x)) == action.block_of(x)
               for s in action.generators for x in range(1, action.size + 1))


def acts_trivially(action: UnionAction, family: QuotientFamily, word: Sequence[int]) -> tuple:
    """(word acts trivially on the union, word is trivial in every quotient)."""
    on_union = act(action, word) == SmallPerm.identity(action.size)
    in_quotients = all(evaluate(q, word) == SmallPerm.identity(q.degree)
                       for q in family.quotients)
    return on_union, in_quotients


def format_union_action(action: UnionAction) -> str:
    lines = [f"points: {action.size}"]
    for i, (start, size) in enumerate(action.blocks, start=1):
        lines.append(f"block {i}: {start}..{start + size - 1}")
    for k, s in enumerate(action.generators, start=1):
        lines.append(f"gen{k}: {s}")
    verdict = "yes" if all_orbits_finite(action) and blocks_invariant(action) else "no"
    lines.append(f"all orbits finite: {verdict}")
    return "\n".join(lines) + "\n"
