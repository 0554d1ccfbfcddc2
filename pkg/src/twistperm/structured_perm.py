"""Finitely described permutations of X_n with infinite support.

An element is determined by a ray permutation ``pi``, one tail rule per ray
and a threshold ``M_i`` per ray.  Beyond the threshold a ray follows its
tail rule:

* ``Translation(t)``: (i, pos) -> (pi(i), pos + t)
* ``Periodic(p, block)``: the positions past M_i are cut into blocks of
  length p, each permuted by ``block`` (only on rays fixed by pi).

The core {(i, pos) : pos <= M_i} is sent bijectively onto the finite set not
covered by the tails.  The *base* map sends the k-th core point (in
lexicographic order) to the k-th uncovered point; the element is then
``correction * base`` with ``correction`` a finite permutation of the core.
Thresholds are kept minimal and periodic tails use their least period, so
two elements are equal as permutations iff their fields are equal.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .core_perm import FinitePermutation, Point, _parse_fperm_prefix, format_fperm
from .errors import NotTruncatable, ParseError, PreconditionError, UnsupportedComposition

INF = math.inf
ExtendedCount = Union[int, float]


def format_count(v) -> str:
    return "inf" if v == INF else str(v)


@dataclass(frozen=True)
class Translation:
    t: int = 0

    def __str__(self):
        return f"T({self.t:+d})" if self.t else "T(0)"


@dataclass(frozen=True)
class Periodic:
    period: int
    block: tuple

    def __post_init__(self):
        object.__setattr__(self, "block", tuple(self.block))
        if self.period < 1 or sorted(self.block) != list(range(self.period)):
            raise ValueError(f"block {self.block} is not a permutation of 0..{self.period - 1}")

    def cycle_lengths(self) -> list:
        seen, out = set(), []
        for start in range(self.period):
            if start in seen:
                continue
            k, j = 0, start
            while j not in seen:
                seen.add(j)
                j = self.block[j]
                k += 1
            out.append(k)
        return out

    def inverse(self) -> "Periodic":
        inv = [0] * self.period
        for j, b in enumerate(self.block):
            inv[b] = j
        return Periodic(self.period, tuple(inv))

    def __str__(self):
        if self.period <= 10:
            body = "".join(str(b) for b in self.block)
        else:
            body = ",".join(str(b) for b in self.block)
        return f"P({self.period}:{body})"


Tail = Union[Translation, Periodic]


@dataclass(frozen=True)
class CycleCensus:
    """Number of r-cycles for every r, plus the number of infinite orbits.

    Only nonzero entries are kept in ``counts`` (sorted by r).
    """

    counts: tuple
    eta_inf: ExtendedCount = 0

    @classmethod
    def from_mapping(cls, counts, eta_inf=0):
        return cls(tuple(sorted((r, v) for r, v in counts.items() if v)), eta_inf)

    def eta(self, r: int) -> ExtendedCount:
        return dict(self.counts).get(r, 0)

    def lengths(self) -> list:
        return [r for r, _ in self.counts]

    def infinite_lengths(self) -> list:
        return [r for r, v in self.counts if v == INF]

    def first_finite(self) -> int:
        """Least r with eta_r finite (always exists for finite descriptions)."""
        r = 1
        while self.eta(r) == INF:
            r += 1
        return r

    def __str__(self):
        parts = [f"eta({r})={format_count(v)}" for r, v in self.counts]
        parts.append(f"eta_inf={format_count(self.eta_inf)}")
        return ", ".join(parts)


@dataclass(frozen=True)
class FiniteOrbit:
    points: tuple

    is_infinite = False

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class InfiniteOrbit:
    """An orbit certified infinite: forward iterates run out along
    ``forward_ray`` and backward iterates along ``backward_ray``."""

    witness: Point
    forward_ray: int
    backward_ray: int

    is_infinite = True


Orbit = Union[FiniteOrbit, InfiniteOrbit]


@dataclass(frozen=True, eq=False)
class SupportDescriptor:
    """Exact description of the moved points of a structured permutation.

    ``core`` lists moved points at or below each ray's threshold; ``tails``
    holds, per ray, either None (nothing moved past the threshold) or a
    triple (threshold, period, moved residues).
    """

    n: int
    core: frozenset
    tails: tuple

    @property
    def rays(self) -> frozenset:
        return frozenset(i + 1 for i, t in enumerate(self.tails) if t is not None)

    def is_finite(self) -> bool:
        return not self.rays

    def _thr(self, ray):
        t = self.tails[ray - 1]
        return t[0] if t else 0

    def __contains__(self, x) -> bool:
        x = Point(*x)
        t = self.tails[x.ray - 1]
        if t is not None and x.pos > t[0]:
            m, p, residues = t
            return (x.pos - m - 1) % p in residues
        return x in self.core

    def _horizon(self, other, ray):
        a, b = self.tails[ray - 1], other.tails[ray - 1]
        top = max((x.pos for x in self.core | other.core if x.ray == ray), default=0)
        top = max(top, a[0] if a else 0, b[0] if b else 0)
        return top + math.lcm(a[1] if a else 1, b[1] if b else 1)

    def issubset(self, other: "SupportDescriptor") -> bool:
        if self.n != other.n:
            raise ValueError("ambient mismatch")
        for ray in range(1, self.n + 1):
            for pos in range(1, self._horizon(other, ray) + 1):
                x = Point(ray, pos)
                if x in self and x not in other:
                    return False
        return True

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, SupportDescriptor):
            return NotImplemented
        return self.issubset(other) and other.issubset(self)

    def __lt__(self, other):
        return self.issubset(other) and not other.issubset(self)

    __hash__ = None

    def finite_points(self) -> frozenset:
        if not self.is_finite():
            raise ValueError("support is infinite")
        return self.core

    def __str__(self):
        core = " ".join(str(x) for x in sorted(self.core))
        rays = ",".join(str(r) for r in sorted(self.rays))
        return f"core={{{core}}} rays={{{rays}}}"


@dataclass(frozen=True)
class Truncation:
    """Restriction of a finite-order element to an invariant box.

    ``cutoffs[i-1]`` is the last position of ray i inside the box.
    """

    perm: FinitePermutation
    cutoffs: tuple

    def points(self) -> list:
        return [Point(i + 1, pos) for i, k in enumerate(self.cutoffs)
                for pos in range(1, k + 1)]

    def one_line(self) -> tuple:
        """Images of the box points, labelled 1..m in lexicographic order."""
        pts = self.points()
        label = {x: k + 1 for k, x in enumerate(pts)}
        return tuple(label[self.perm(x)] for x in pts)


class StructuredPermutation:
    """A permutation of X_n that is eventually a translation or a block
    permutation on every ray.

    StructuredPermutation(n) -> identity
    StructuredPermutation(n, pi, tails, thresholds, correction) -> the element
    ``correction * base`` described in the module docstring, brought to
    normal form.  ``pi`` is the one-line image list of the rays (1-based).
    """

    __slots__ = ("n", "pi", "tails", "thresholds", "correction",
                 "_core_image", "_core_preimage", "_leftover", "_pi_inv",
                 "_hash", "_census")

    def __init__(self, n: int, pi: Sequence[int] | None = None,
                 tails: Sequence[Tail] | None = None,
                 thresholds: Sequence[int] | None = None,
                 correction: FinitePermutation | None = None):
        pi = tuple(pi) if pi is not None else tuple(range(1, n + 1))
        tails = tuple(tails) if tails is not None else (Translation(0),) * n
        thresholds = tuple(thresholds) if thresholds is not None else (0,) * n
        correction = correction if correction is not None else FinitePermutation.identity(n)
        _check_shape(n, pi, tails, thresholds)
        if correction.n != n:
            raise ValueError(f"correction lives on X_{correction.n}, not X_{n}")
        for x in correction.support():
            if x.pos > thresholds[x.ray - 1]:
                raise ValueError(f"correction moves {x}, beyond the threshold of ray {x.ray}")
        base, _ = _base_tables(n, pi, tails, thresholds)

        def raw(x):
            x = correction(x)
            if x.pos > thresholds[x.ray - 1]:
                return _tail_image(pi, tails, thresholds, x)
            return base[x]

        specs = [("P", t.period) if isinstance(t, Periodic) else ("T", t.t) for t in tails]
        self._assign(*_normalize(n, pi, specs, thresholds, raw))

    @classmethod
    def _new(cls, n, pi, tails, thresholds, core_image):
        self = object.__new__(cls)
        self._assign(n, pi, tails, thresholds, core_image)
        return self

    def _assign(self, n, pi, tails, thresholds, core_image):
        self.n = n
        self.pi = tuple(pi)
        self.tails = tuple(tails)
        self.thresholds = tuple(thresholds)
        base, leftover = _base_tables(n, self.pi, self.tails, self.thresholds)
        base_inv = {y: x for x, y in base.items()}
        if set(core_image.values()) != set(base.values()):
            raise AssertionError("core does not biject onto the uncovered set")
        self.correction = FinitePermutation(n, {x: base_inv[y] for x, y in core_image.items()})
        self._core_image = dict(core_image)
        self._core_preimage = {y: x for x, y in core_image.items()}
        self._leftover = leftover
        inv = [0] * n
        for i, j in enumerate(self.pi):
            inv[j - 1] = i + 1
        self._pi_inv = tuple(inv)
        self._hash = hash((n, self.pi, self.tails, self.thresholds, self.correction))
        self._census = None

    # construction helpers

    @classmethod
    def identity(cls, n: int) -> "StructuredPermutation":
        return cls(n)

    @property
    def is_finitary(self) -> bool:
        """True iff the element moves finitely many points."""
        return (self.pi == tuple(range(1, self.n + 1))
                and all(t == Translation(0) for t in self.tails))

    def is_identity(self) -> bool:
        return self.is_finitary and self.correction.is_identity()

    def to_finite(self) -> FinitePermutation:
        if not self.is_finitary:
            raise ValueError("element has infinite support")
        return self.correction

    # action

    def __call__(self, x) -> Point:
        x = Point(*x)
        if x.pos > self.thresholds[x.ray - 1]:
            return _tail_image(self.pi, self.tails, self.thresholds, x)
        return self._core_image[x]

    apply = __call__

    def apply_inverse(self, y) -> Point:
        y = Point(*y)
        if y.pos > self._leftover[y.ray - 1]:
            tail = self.tails[y.ray - 1]
            if isinstance(tail, Periodic):
                m = self.thresholds[y.ray - 1]
                off = y.pos - m - 1
                r = off % tail.period
                return Point(y.ray, m + 1 + off - r + tail.inverse().block[r])
            i = self._pi_inv[y.ray - 1]
            return Point(i, y.pos - self.tails[i - 1].t)
        return self._core_preimage[y]

    def __mul__(self, other):
        if not isinstance(other, StructuredPermutation):
            return NotImplemented
        return product(self, other)

    def inverse(self) -> "StructuredPermutation":
        return inverse(self)

    def __pow__(self, k: int) -> "StructuredPermutation":
        base = self if k >= 0 else self.inverse()
        return product(*([base] * abs(k))) if k else StructuredPermutation.identity(self.n)

    # invariants

    def ray_cycles(self) -> list:
        seen, out = set(), []
        for i in range(1, self.n + 1):
            if i in seen:
                continue
            c, j = [], i
            while j not in seen:
                seen.add(j)
                c.append(j)
                j = self.pi[j - 1]
            out.append(c)
        return out

    def net_translation(self, cycle) -> int:
        return sum(self.tails[i - 1].t for i in cycle
                   if isinstance(self.tails[i - 1], Translation))

    def escaping_rays(self) -> frozenset:
        """Rays lying in a pi-cycle with nonzero net translation."""
        out = set()
        for c in self.ray_cycles():
            if not isinstance(self.tails[c[0] - 1], Periodic) and self.net_translation(c):
                out.update(c)
        return frozenset(out)

    def stable_bound(self) -> int:
        """A position past which every ray behaves generically.

        Beyond it, points on zero-net-translation rays lie in rule-following
        cycles and points on escaping rays lie on infinite orbits.
        """
        spread = sum(abs(t.t) for t in self.tails if isinstance(t, Translation))
        return max(max(self.thresholds), max(self._leftover)) + spread + 1

    def __eq__(self, other):
        if not isinstance(other, StructuredPermutation):
            return NotImplemented
        return (self.n == other.n and self.pi == other.pi and self.tails == other.tails
                and self.thresholds == other.thresholds and self.correction == other.correction)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return format_sperm(self)

    def __repr__(self):
        return f"StructuredPermutation({format_sperm(self)!r})"


def _check_shape(n, pi, tails, thresholds):
    if n < 1:
        raise ValueError("ambient ray count must be positive")
    if sorted(pi) != list(range(1, n + 1)):
        raise ValueError(f"pi={list(pi)} is not a permutation of 1..{n}")
    if len(tails) != n or len(thresholds) != n:
        raise ValueError("need one tail and one threshold per ray")
    for i, (tail, m) in enumerate(zip(tails, thresholds), start=1):
        if m < 0:
            raise ValueError(f"negative threshold on ray {i}")
        if isinstance(tail, Periodic):
            if pi[i - 1] != i:
                raise ValueError(f"periodic ray {i} must be fixed by pi")
        elif m < -tail.t:
            raise ValueError(f"threshold {m} on ray {i} too small for {tail}")
    if sum(t.t for t in tails if isinstance(t, Translation)):
        raise ValueError("translations must sum to zero")


def _tail_image(pi, tails, thresholds, x):
    tail = tails[x.ray - 1]
    if isinstance(tail, Periodic):
        m = thresholds[x.ray - 1]
        off = x.pos - m - 1
        r = off % tail.period
        return Point(x.ray, m + 1 + off - r + tail.block[r])
    return Point(pi[x.ray - 1], x.pos + tail.t)


def _base_tables(n, pi, tails, thresholds):
    """Order-preserving bijection from the core onto the uncovered set,
    and the per-ray size of the uncovered set."""
    leftover = [0] * n
    for i, (tail, m) in enumerate(zip(tails, thresholds), start=1):
        if isinstance(tail, Periodic):
            leftover[i - 1] = m
        else:
            leftover[pi[i - 1] - 1] = m + tail.t
    core = [Point(i, p) for i in range(1, n + 1) for p in range(1, thresholds[i - 1] + 1)]
    left = [Point(j, p) for j in range(1, n + 1) for p in range(1, leftover[j - 1] + 1)]
    if len(core) != len(left):
        raise ValueError("core and uncovered set differ in size")
    return dict(zip(core, left)), tuple(leftover)


def _normalize(n, pi, specs, raw_thresholds, fn):
    """Minimal thresholds and canonical tails for the bijection ``fn``.

    ``specs[i]`` is ("T", t) when ray i+1 is eventually a translation by t
    onto ray pi(i+1), or ("P", L) when the displacement along the ray is
    L-periodic past ``raw_thresholds[i]``.
    """
    tails, thresholds = [], []
    for i, ((kind, val), m0) in enumerate(zip(specs, raw_thresholds), start=1):
        if kind == "P":
            tail, m = _periodic_tail(i, val, m0, fn)
        else:
            tail, m = Translation(val), m0
        if isinstance(tail, Translation):
            t, target = tail.t, pi[i - 1]
            m = max(m, 0, -t)
            while m > max(0, -t) and fn(Point(i, m)) == Point(target, m + t):
                m -= 1
        tails.append(tail)
        thresholds.append(m)
    core_image = {}
    for i, m in enumerate(thresholds, start=1):
        for pos in range(1, m + 1):
            x = Point(i, pos)
            core_image[x] = fn(x)
    return n, pi, tuple(tails), tuple(thresholds), core_image


def _periodic_tail(ray, period_bound, m0, fn):
    def disp(pos):
        y = fn(Point(ray, pos))
        return y.pos - pos if y.ray == ray else None

    L = period_bound
    window = [disp(m0 + 1 + j) for j in range(L)]
    if None in window:
        raise UnsupportedComposition(f"ray {ray} is not eventually invariant")
    q = next(q for q in range(1, L + 1)
             if L % q == 0 and all(window[j] == window[(j + q) % L] for j in range(L)))
    best = None
    for a in range(q):
        base = m0 + (a - m0) % q
        block = [base + 1 + j + disp(base + 1 + j) - (base + 1) for j in range(q)]
        if sorted(block) != list(range(q)):
            continue
        m = base
        while m - q >= 0 and all(disp(y) is not None and disp(y) == disp(y + q)
                                 for y in range(m - q + 1, m + 1)):
            m -= q
        if best is None or m < best[0]:
            best = (m, tuple(block))
    if best is None:
        raise UnsupportedComposition(
            f"ray {ray}: product is eventually periodic but not block-periodic")
    m, block = best
    if q == 1:
        return Translation(0), m
    return Periodic(q, block), m


def from_action(n: int, pi: Sequence[int], specs: Sequence[tuple],
                raw_thresholds: Sequence[int], fn: Callable) -> StructuredPermutation:
    """Normal form of the bijection ``fn`` of X_n.

    ``fn`` must follow the tail rule announced in ``specs`` on each ray past
    ``raw_thresholds``: ("T", t) for translation by t onto ray pi(i), or
    ("P", L) for an L-periodic block action on the ray itself.
    """
    return StructuredPermutation._new(*_normalize(n, tuple(pi), specs, raw_thresholds, fn))


def embed(f: FinitePermutation) -> StructuredPermutation:
    n = f.n
    return StructuredPermutation(n, thresholds=[f.max_pos(i) for i in range(1, n + 1)],
                                 correction=f)


def translation(n: int, shifts: Sequence[int], pi: Sequence[int] | None = None,
                correction: FinitePermutation | None = None) -> StructuredPermutation:
    """Element translating ray i by ``shifts[i-1]`` onto ray pi(i).

    With ``correction`` None the core is sent onto the uncovered set in order.
    """
    pi = pi or list(range(1, n + 1))
    m = [max(0, -t) for t in shifts]
    if correction is not None:
        m = [max(a, correction.max_pos(i)) for i, a in enumerate(m, start=1)]
    return StructuredPermutation(n, pi, [Translation(t) for t in shifts], m, correction)


def ray_block(n: int, ray: int, block: Sequence[int], threshold: int = 0) -> StructuredPermutation:
    """Element permuting consecutive blocks of ``ray`` past ``threshold``."""
    tails = [Translation(0)] * n
    tails[ray - 1] = Periodic(len(block), tuple(block))
    m = [0] * n
    m[ray - 1] = threshold
    return StructuredPermutation(n, tails=tails, thresholds=m)


def product(*factors: StructuredPermutation) -> StructuredPermutation:
    """Product applying the factors left to right.

    Each ray is followed through the whole word at once, so a word such as
    c^-1 a c is representable even when c^-1 a alone is not.
    """
    if not factors:
        raise ValueError("empty product")
    n = factors[0].n
    if any(f.n != n for f in factors):
        raise ValueError("ambient mismatch")
    pi, specs, raw = [], [], []
    for start in range(1, n + 1):
        ray, shift, slack, period, periodic, need = start, 0, 0, 1, False, 0
        for f in factors:
            need = max(need, f.thresholds[ray - 1] - shift + slack)
            tail = f.tails[ray - 1]
            if isinstance(tail, Periodic):
                periodic = True
                period = math.lcm(period, tail.period)
                slack += tail.period - 1
            else:
                shift += tail.t
                ray = f.pi[ray - 1]
        if periodic:
            if ray != start or shift:
                raise UnsupportedComposition(
                    f"ray {start}: block-periodic tail combined with a translation "
                    f"(ends on ray {ray}, shift {shift:+d})")
            specs.append(("P", period))
        else:
            specs.append(("T", shift))
        pi.append(ray)
        raw.append(max(need, 0, -shift))

    def fn(x):
        for f in factors:
            x = f(x)
        return x

    return from_action(n, pi, specs, raw, fn)


compose = product


def inverse(g: StructuredPermutation) -> StructuredPermutation:
    specs, raw = [None] * g.n, [0] * g.n
    for i, tail in enumerate(g.tails, start=1):
        if isinstance(tail, Periodic):
            specs[i - 1] = ("P", tail.period)
            raw[i - 1] = g.thresholds[i - 1]
        else:
            j = g.pi[i - 1]
            specs[j - 1] = ("T", -tail.t)
            raw[j - 1] = g._leftover[j - 1]
    return from_action(g.n, g._pi_inv, specs, raw, g.apply_inverse)


def conjugate(a: StructuredPermutation, c: StructuredPermutation) -> StructuredPermutation:
    """c^-1 a c."""
    return product(inverse(c), a, c)


def normalize(g: StructuredPermutation) -> StructuredPermutation:
    return StructuredPermutation(g.n, g.pi, g.tails, g.thresholds, g.correction)


def apply(g: StructuredPermutation, x) -> Point:
    return g(x)


# orbits and census

def _trace(g, x, step, stop):
    """Iterate ``step`` from x until returning to x (finite) or until
    ``stop`` accepts a point (infinite)."""
    pts = [x]
    y = step(x)
    while y != x:
        if stop(y):
            return pts, y
        pts.append(y)
        y = step(y)
    return pts, None


def orbit(g: StructuredPermutation, x) -> Orbit:
    x = Point(*x)
    k = g.stable_bound()
    signs = {}
    for c in g.ray_cycles():
        if not isinstance(g.tails[c[0] - 1], Periodic):
            t = g.net_translation(c)
            for i in c:
                signs[i] = t
    pts, out = _trace(g, x, g, lambda y: y.pos > k and signs.get(y.ray, 0) > 0)
    if out is None:
        return FiniteOrbit(tuple(pts))
    _, back = _trace(g, x, g.apply_inverse, lambda y: y.pos > k and signs.get(y.ray, 0) < 0)
    return InfiniteOrbit(x, out.ray, back.ray)


def generic_cycle_lengths(g: StructuredPermutation) -> set:
    """Cycle lengths occurring infinitely often."""
    out = set()
    for c in g.ray_cycles():
        tail = g.tails[c[0] - 1]
        if isinstance(tail, Periodic):
            out.update(tail.cycle_lengths())
        elif g.net_translation(c) == 0:
            out.add(len(c))
    return out


def cycle_census(g: StructuredPermutation) -> CycleCensus:
    if g._census is not None:
        return g._census
    eta_inf = sum(max(g.net_translation(c), 0) for c in g.ray_cycles()
                  if not isinstance(g.tails[c[0] - 1], Periodic))
    generic = generic_cycle_lengths(g)
    escaping = g.escaping_rays()
    k = g.stable_bound()
    counts = Counter()
    seen = set()
    for ray in range(1, g.n + 1):
        for pos in range(1, k + 1):
            x = Point(ray, pos)
            if x in seen:
                continue
            pts, out = _trace(g, x, g, lambda y: y.pos > k and y.ray in escaping)
            seen.update(pts)
            if out is None:
                counts[len(pts)] += 1
    for r in generic:
        counts[r] = INF
    g._census = CycleCensus.from_mapping(counts, eta_inf)
    return g._census


def order(g: StructuredPermutation) -> ExtendedCount:
    census = cycle_census(g)
    if census.eta_inf:
        return INF
    return math.lcm(*census.lengths()) if census.counts else 1


def generic_cycle_rates(g: StructuredPermutation) -> dict:
    """Generic r-cycles gained per unit of box growth along each ray."""
    rates = Counter()
    for c in g.ray_cycles():
        tail = g.tails[c[0] - 1]
        if isinstance(tail, Periodic):
            for r in tail.cycle_lengths():
                rates[r] += Fraction(1, tail.period)
        elif g.net_translation(c) == 0:
            rates[len(c)] += 1
    return dict(rates)


def support_descriptor(g: StructuredPermutation) -> SupportDescriptor:
    core = frozenset(x for x, y in g._core_image.items() if x != y)
    tails = []
    for i, tail in enumerate(g.tails, start=1):
        m = g.thresholds[i - 1]
        if isinstance(tail, Periodic):
            moved = frozenset(r for r, b in enumerate(tail.block) if b != r)
            tails.append((m, tail.period, moved))
        elif tail.t or g.pi[i - 1] != i:
            tails.append((m, 1, frozenset({0})))
        else:
            tails.append(None)
    return SupportDescriptor(g.n, core, tuple(tails))


def commutator_with_3cycle(g: StructuredPermutation, x0) -> FinitePermutation:
    """mu^-1 g mu g^-1 for mu = (x_-1 x_0 x_1), x_i = x0 g^i.

    For x0 on an infinite orbit this is the 3-cycle (x_-2 x_-1 x_1).
    """
    x0 = Point(*x0)
    if not orbit(g, x0).is_infinite:
        raise PreconditionError(f"{x0} lies on a finite orbit")
    mu = embed(FinitePermutation.cycle(g.n, g.apply_inverse(x0), x0, g(x0)))
    return product(inverse(mu), g, mu, inverse(g)).to_finite()


def truncate(g: StructuredPermutation, bound: int) -> Truncation:
    """Restrict a finite-order element to the smallest invariant box whose
    cutoffs are all at least ``bound``."""
    if g.escaping_rays():
        raise NotTruncatable("element has an infinite orbit")
    cut = [0] * g.n
    for c in g.ray_cycles():
        tail = g.tails[c[0] - 1]
        if isinstance(tail, Periodic):
            i, p = c[0], tail.period
            m = g.thresholds[i - 1]
            lo = max(bound, m)
            cut[i - 1] = lo + (m - lo) % p
            continue
        offsets, s = [], 0
        for i in c:
            offsets.append(s)
            s += g.tails[i - 1].t
        start = max(max(bound, g.thresholds[i - 1]) - o for i, o in zip(c, offsets))
        for i, o in zip(c, offsets):
            cut[i - 1] = start + o
    table = {}
    for i, k in enumerate(cut, start=1):
        for pos in range(1, k + 1):
            x = Point(i, pos)
            y = g(x)
            if y.pos > cut[y.ray - 1]:
                raise AssertionError(f"box not invariant at {x}")
            table[x] = y
    return Truncation(FinitePermutation(g.n, table), tuple(cut))


# text format:
#   sperm n=<n> pi=[..] tails=[T(+1),P(3:120),...] M=[..] corr=<fperm literal>
# Positions are (ray, pos); the coordinate written (m, n) with m the position
# corresponds to (ray=n, pos=m).

def format_sperm(g: StructuredPermutation) -> str:
    pi = ",".join(map(str, g.pi))
    tails = ",".join(map(str, g.tails))
    m = ",".join(map(str, g.thresholds))
    return f"sperm n={g.n} pi=[{pi}] tails=[{tails}] M=[{m}] corr={format_fperm(g.correction)}"


_SPERM = re.compile(
    r"\s*sperm\s+n=(?P<n>\d+)\s+pi=\[(?P<pi>[\d,\s]*)\]\s+tails=\[(?P<tails>[^\]]*)\]"
    r"\s+M=\[(?P<m>[\d,\s]*)\]\s+corr=")
_SPERM_FIELDS = [
    ("'sperm'", r"\s*sperm"),
    ("' n=<count>'", r"\s+n=\d+"),
    ("' pi=[..]'", r"\s+pi=\[[\d,\s]*\]"),
    ("' tails=[..]'", r"\s+tails=\[[^\]]*\]"),
    ("' M=[..]'", r"\s+M=\[[\d,\s]*\]"),
    ("' corr='", r"\s+corr="),
]
_TAIL = re.compile(r"\s*(?:T\((?P<t>[+-]?\d+)\)|P\((?P<p>\d+):(?P<b>[\d,]+)\))\s*(?:,|$)")


def _int_list(s):
    s = s.strip()
    return [int(v) for v in s.split(",")] if s else []


def parse_sperm(text: str) -> StructuredPermutation:
    m = _SPERM.match(text)
    if not m:
        pos = 0
        for name, pattern in _SPERM_FIELDS:
            f = re.compile(pattern).match(text, pos)
            if not f:
                raise ParseError(f"expected {name}", text, pos)
            pos = f.end()
        raise ParseError("malformed sperm literal", text, 0)
    n = int(m.group("n"))
    tails, pos, body = [], 0, m.group("tails")
    while pos < len(body):
        t = _TAIL.match(body, pos)
        if not t:
            raise ParseError("malformed tail", text, m.start("tails") + pos)
        if t.group("t") is not None:
            tails.append(Translation(int(t.group("t"))))
        else:
            p, b = int(t.group("p")), t.group("b")
            block = [int(v) for v in b.split(",")] if "," in b else [int(c) for c in b]
            try:
                tails.append(Periodic(p, tuple(block)))
            except ValueError as exc:
                raise ParseError(str(exc), text, m.start("tails") + pos) from None
        pos = t.end()
    corr, end = _parse_fperm_prefix(text, m.end())
    if text[end:].strip():
        raise ParseError("trailing characters after sperm literal", text, end)
    try:
        return StructuredPermutation(n, _int_list(m.group("pi")), tails,
                                     _int_list(m.group("m")), corr)
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None


def parse_element(text: str) -> StructuredPermutation:
    """Parse either an ``sperm`` or an ``fperm`` literal."""
    from .core_perm import parse_fperm
    if text.lstrip().startswith("fperm"):
        return embed(parse_fperm(text))
    return parse_sperm(text)
