"""Exhaustive ground truth on the finite groups S_m and A_m.

Permutations here are one-line image tuples on {1..m}; products act on the
right, so ``a * b`` applies ``a`` first.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PreconditionError, ResourceError

DEFAULT_CAP = 8


@dataclass(frozen=True, order=True)
class SmallPerm:
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{len(self.images)}")

    @classmethod
    def identity(cls, m):
        return cls(range(1, m + 1))

    @classmethod
    def from_cycles(cls, m, *cycles):
        img = list(range(1, m + 1))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                img[a - 1] = b
        return cls(img)

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    def __mul__(self, other):
        return SmallPerm(tuple(other.images[a - 1] for a in self.images))

    def inverse(self):
        inv = [0] * self.degree
        for i, a in enumerate(self.images, start=1):
            inv[a - 1] = i
        return SmallPerm(inv)

    def support(self):
        return frozenset(i for i, a in enumerate(self.images, start=1) if i != a)

    def cycle_type(self):
        return cycle_type(self.images)

    @property
    def is_even(self):
        return sum(r - 1 for r in self.cycle_type()) % 2 == 0

    def __str__(self):
        return ",".join(map(str, self.images))


def parse_small_perm(text: str) -> SmallPerm:
    text = text.strip().strip("[]")
    if "," in text:
        return SmallPerm(int(v) for v in text.split(","))
    return SmallPerm(int(c) for c in text)


def cycle_type(images: Sequence[int]) -> tuple:
    """Cycle lengths of a one-line permutation (fixed points included),
    sorted decreasingly."""
    seen, out = set(), []
    for start in range(1, len(images) + 1):
        if start in seen:
            continue
        k, j = 0, start
        while j not in seen:
            seen.add(j)
            j = images[j - 1]
            k += 1
        out.append(k)
    return tuple(sorted(out, reverse=True))


class UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x != y:
            if y < x:
                x, y = y, x
            self.parent[y] = x


# 0-based tuple helpers used in the hot loops

def _mul(a, b):
    return tuple(b[i] for i in a)


def _inv(a):
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def _is_even(a):
    return sum(r - 1 for r in cycle_type([i + 1 for i in a])) % 2 == 0


def _check_degree(m, cap):
    if m > cap:
        raise ResourceError(f"degree {m} exceeds the enumeration cap {cap}")


def ambient_elements(m: int, alternating: bool = False, cap: int = DEFAULT_CAP) -> list:
    """Elements of S_m (or A_m) as 0-based tuples in lexicographic order."""
    _check_degree(m, cap)
    perms = itertools.permutations(range(m))
    return [p for p in perms if not alternating or _is_even(p)]


def _generators(m, alternating):
    if alternating:
        out = []
        for k in range(2, m):
            g = list(range(m))
            g[0], g[1], g[k] = 1, k, 0
            out.append(tuple(g))
        return out
    if m < 2:
        return []
    swap = (1, 0) + tuple(range(2, m))
    cycle = tuple(range(1, m)) + (0,)
    return [swap, cycle]


@dataclass(frozen=True)
class TwistedClassPartition:
    rho: SmallPerm
    alternating: bool
    classes: tuple

    @property
    def ambient(self):
        return f"{'A' if self.alternating else 'S'}_{self.rho.degree}"

    @property
    def count(self):
        return len(self.classes)

    def sizes(self):
        return [len(c) for c in self.classes]


def twisted_classes(rho: SmallPerm, alternating: bool = False,
                    cap: int = DEFAULT_CAP) -> TwistedClassPartition:
    """Classes of a ~ (x^-1)phi a x with phi(g) = rho^-1 g rho.

    The twisting is a group action, so its orbits are the connected
    components of the moves by a generating set.
    """
    m = rho.degree
    elems = ambient_elements(m, alternating, cap)
    index = {p: k for k, p in enumerate(elems)}
    r = tuple(i - 1 for i in rho.images)
    r_inv = _inv(r)
    uf = UnionFind(len(elems))
    for s in _generators(m, alternating):
        twist = _mul(_mul(r_inv, _inv(s)), r)
        for k, a in enumerate(elems):
            uf.union(k, index[_mul(_mul(twist, a), s)])
    groups = {}
    for k in range(len(elems)):
        groups.setdefault(uf.find(k), []).append(k)
    classes = tuple(tuple(SmallPerm(i + 1 for i in elems[k]) for k in members)
                    for _, members in sorted(groups.items()))
    return TwistedClassPartition(rho, alternating, classes)


def reidemeister_number(rho: SmallPerm, alternating: bool = False,
                        cap: int = DEFAULT_CAP) -> int:
    return twisted_classes(rho, alternating, cap).count


def _orbit_partition(elems, move):
    """Partition of ``elems`` into orbits, each orbit found by applying
    ``move(a, x)`` for every x in elems."""
    label = {}
    for a in elems:
        if a in label:
            continue
        orbit = {move(a, x) for x in elems}
        for b in orbit:
            label[b] = a
    return label


def check_reformulation(rho: SmallPerm, alternating: bool = False,
                        cap: int = DEFAULT_CAP) -> bool:
    """True iff a ~phi_rho b exactly when rho*a and rho*b are conjugate in the
    ambient group, checked by enumerating every twisting element x."""
    m = rho.degree
    elems = ambient_elements(m, alternating, cap)
    r = tuple(i - 1 for i in rho.images)
    r_inv = _inv(r)

    def twisted(a, x):
        return _mul(_mul(_mul(_mul(r_inv, _inv(x)), r), a), x)

    def conj(y, x):
        return _mul(_mul(_inv(x), y), x)

    twisted_label = _orbit_partition(elems, twisted)
    coset = [_mul(r, a) for a in elems]
    conj_label = _orbit_partition(coset, conj)
    # compare the two partitions of the ambient group
    forward, backward = {}, {}
    for a in elems:
        t, c = twisted_label[a], conj_label[_mul(r, a)]
        if forward.setdefault(t, c) != c or backward.setdefault(c, t) != t:
            return False
    return True


def conjugacy_classes(m: int, alternating: bool = False, cap: int = DEFAULT_CAP) -> list:
    elems = ambient_elements(m, alternating, cap)
    label = _orbit_partition(elems, lambda y, x: _mul(_mul(_inv(x), y), x))
    groups = {}
    for a in elems:
        groups.setdefault(label[a], []).append(SmallPerm(i + 1 for i in a))
    return [groups[k] for k in sorted(groups)]


def conjugacy_equals_cycle_type(m: int, alternating: bool = False,
                                cap: int = DEFAULT_CAP) -> bool:
    """True iff the conjugacy classes of the ambient group are exactly the
    cycle-type fibres."""
    classes = conjugacy_classes(m, alternating, cap)
    types = [{p.cycle_type() for p in c} for c in classes]
    return all(len(t) == 1 for t in types) and len({next(iter(t)) for t in types}) == len(types)


def generate(gens: Iterable[SmallPerm], m: int | None = None) -> frozenset:
    """Closure of ``gens`` under multiplication."""
    gens = list(gens)
    if m is None:
        if not gens:
            raise ValueError("degree needed for an empty generating set")
        m = gens[0].degree
    ident = SmallPerm.identity(m)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = a * s
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(seen)


def normal_core(h_gens: Sequence[SmallPerm], g_gens: Sequence[SmallPerm],
                m: int | None = None, cap: int = DEFAULT_CAP) -> frozenset:
    """Intersection of all conjugates g^-1 H g for g in G."""
    m = m or (g_gens[0].degree if g_gens else h_gens[0].degree)
    _check_degree(m, cap)
    G = generate(g_gens, m)
    H = generate(h_gens, m)
    if not H <= G:
        raise PreconditionError("H is not contained in G")
    core = set(H)
    for g in G:
        gi = g.inverse()
        core &= {gi * h * g for h in H}
    return frozenset(core)


def is_normal(N: frozenset, G: frozenset) -> bool:
    return all(g.inverse() * a * g in N for g in G for a in N)


def nesting_search(a: SmallPerm, b: SmallPerm, cap: int = DEFAULT_CAP) -> SmallPerm | None:
    """Exhaustively look for g in S_m with g^-1 a g = b."""
    m = a.degree
    for g in ambient_elements(m, cap=cap):
        g = SmallPerm(i + 1 for i in g)
        if g.inverse() * a * g == b:
            return g
    return None


def partition_profile(m: int, alternating: bool = False, cap: int = DEFAULT_CAP) -> dict:
    """Number of twisted classes for each cycle type of rho in S_m."""
    out = {}
    for p in ambient_elements(m, cap=cap):
        rho = SmallPerm(i + 1 for i in p)
        out.setdefault(rho.cycle_type(), reidemeister_number(rho, alternating, cap))
    return out


def report_rows(m: int, rho: SmallPerm | None = None, alternating: bool = False,
                cap: int = DEFAULT_CAP) -> list:
    """One row per cycle type of rho (or just ``rho``): rho, ambient,
    R(phi_rho), class sizes, reformulation check."""
    if rho is not None:
        reps = [rho]
    else:
        reps, seen = [], set()
        for p in ambient_elements(m, cap=cap):
            r = SmallPerm(i + 1 for i in p)
            if r.cycle_type() not in seen:
                seen.add(r.cycle_type())
                reps.append(r)
    rows = []
    for r in reps:
        part = twisted_classes(r, alternating, cap)
        sizes = sorted(Counter(part.sizes()).items())
        rows.append((str(r), part.ambient, part.count,
                     " ".join(f"{s}x{k}" if k > 1 else str(s) for s, k in sizes),
                     check_reformulation(r, alternating, cap)))
    return rows


def format_report(rows, fmt: str = "plain") -> str:
    header = ("rho", "ambient", "R(phi_rho)", "class sizes", "reformulation")
    body = [(r, amb, str(count), sizes, "ok" if ok else "FAILED")
            for r, amb, count, sizes, ok in rows]
    if fmt == "tsv":
        return "\n".join("\t".join(line) for line in [header, *body]) + "\n"
    widths = [max(len(line[k]) for line in [header, *body]) for k in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
             for line in [header, *body]]
    return "\n".join(lines) + "\n"
