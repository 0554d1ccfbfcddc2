"""Twisted conjugacy for phi_rho(g) = rho^-1 g rho and the witness families.

With right actions, ``a ~ b`` under phi_rho means (x^-1)phi_rho * a * x == b
for some x, which rearranges to x^-1 (rho a) x == rho b.  So twisted classes
of phi_rho are the conjugacy classes meeting the coset rho*G, and a family
a_1, a_2, ... with pairwise non-conjugate rho*a_k shows there are infinitely
many of them.  Non-conjugacy is certified in Sym(X) by the cycle census.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core_perm import FinitePermutation, Point, _parse_fperm_prefix, format_fperm
from .errors import ParseError, PreconditionError, WrongCase
from .structured_perm import (
    INF,
    CycleCensus,
    StructuredPermutation,
    conjugate,
    cycle_census,
    embed,
    format_count,
    format_sperm,
    inverse,
    orbit,
    parse_element,
    product,
    support_descriptor,
)


class Strategy(enum.Enum):
    CASE_A = "case_a"
    CASE_B = "case_b"
    CASE_C = "case_c"
    NO_INFINITE_ORBIT = "no_infinite_orbit"
    INNER_ONLY = "inner_only"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TwistedPair:
    rho: StructuredPermutation
    a: StructuredPermutation
    b: StructuredPermutation

    def __post_init__(self):
        if not (self.rho.n == self.a.n == self.b.n):
            raise ValueError("twisted pair elements live on different ambients")


def _lift(g):
    return embed(g) if isinstance(g, FinitePermutation) else g


def twist(rho, a, x) -> StructuredPermutation:
    """(x^-1)phi_rho * a * x, i.e. rho^-1 x^-1 rho a x."""
    rho, a, x = _lift(rho), _lift(a), _lift(x)
    return product(inverse(rho), inverse(x), rho, a, x)


def verify_twisted_witness(pair: TwistedPair, x) -> bool:
    """True iff x^-1 (rho a) x == rho b."""
    x = _lift(x)
    return product(inverse(x), pair.rho, pair.a, x) == product(pair.rho, pair.b)


def sym_conjugate(a, b) -> bool:
    """Conjugacy in the full symmetric group: equal cycle censuses.

    Necessary for conjugacy inside any subgroup, so False certifies
    non-conjugacy everywhere.
    """
    return cycle_census(_lift(a)) == cycle_census(_lift(b))


def select_strategy(rho: StructuredPermutation) -> Strategy:
    """Dispatch on the least s with eta_s(rho) finite and on eta_inf."""
    if rho.is_identity():
        return Strategy.INNER_ONLY
    census = cycle_census(rho)
    if census.first_finite() > 1:
        return Strategy.CASE_C
    if census.eta_inf:
        return Strategy.CASE_A
    return Strategy.CASE_B


# separators

def separator_value(rho: StructuredPermutation, a: FinitePermutation, separator: str):
    if separator == "cycle_length":
        return max(a.cycle_type(), default=1)
    if separator == "support_nesting":
        return len(a.support())
    m = re.fullmatch(r"eta_(\d+)", separator)
    if not m:
        raise ValueError(f"unknown separator {separator!r}")
    return cycle_census(product(rho, embed(a))).eta(int(m.group(1)))


@dataclass
class WitnessFamily:
    rho: StructuredPermutation
    witnesses: list
    separator: str
    values: list
    strategy: Strategy
    _products: list | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.witnesses)

    def products(self) -> list:
        """rho * a_k for every witness."""
        if self._products is None:
            self._products = [product(self.rho, embed(a)) for a in self.witnesses]
        return self._products

    def censuses(self) -> list:
        return [cycle_census(g) for g in self.products()]


def _family(rho, witnesses, separator, strategy):
    values = [separator_value(rho, a, separator) for a in witnesses]
    return WitnessFamily(rho, witnesses, separator, values, strategy)


def _wrong(case, condition, census):
    return WrongCase(f"{case} needs {condition}; census of rho is {census}")


def _check_count(count):
    if count < 1:
        raise ValueError("count must be at least 1")


def inner_witness_family(count: int, n: int = 1) -> WitnessFamily:
    """(2i+1)-cycles on ray 1 for i = 1..count, with rho = identity."""
    _check_count(count)
    witnesses = [FinitePermutation.cycle(n, *[Point(1, p) for p in range(1, 2 * i + 2)])
                 for i in range(1, count + 1)]
    return _family(StructuredPermutation.identity(n), witnesses, "cycle_length",
                   Strategy.INNER_ONLY)


def infinite_orbit_start(rho: StructuredPermutation) -> Point:
    """First point, in lexicographic order, lying on an infinite orbit."""
    k = rho.stable_bound()
    for ray in sorted(rho.escaping_rays()):
        for pos in range(1, k + 2):
            if orbit(rho, (ray, pos)).is_infinite:
                return Point(ray, pos)
    raise PreconditionError("rho has no infinite orbit")


def case_a_family(rho: StructuredPermutation, count: int) -> WitnessFamily:
    """a_m = (x_0 x_1)(x_2 x_3)...(x_{2m-2} x_{2m-1}) along an infinite orbit
    x_i = x_0 rho^i; the family keeps the even-indexed a_{2k}.

    Each transposition fixes one more point of rho*a, so
    eta_1(rho a_{2k}) = eta_1(rho) + 2k.
    """
    _check_count(count)
    census = cycle_census(rho)
    if census.eta(1) == INF:
        raise _wrong("case A", "eta_1 finite", census)
    if not census.eta_inf:
        raise _wrong("case A", "eta_inf > 0", census)
    xs = [infinite_orbit_start(rho)]
    for _ in range(4 * count - 1):
        xs.append(rho(xs[-1]))
    witnesses = []
    for k in range(1, count + 1):
        pairs = [(xs[2 * i], xs[2 * i + 1]) for i in range(2 * k)]
        witnesses.append(FinitePermutation.from_cycles(rho.n, pairs))
    return _family(rho, witnesses, "eta_1", Strategy.CASE_A)


def _generic_cycles(rho: StructuredPermutation, length: int) -> Iterator[list]:
    """Cycles of the given length past the stable box, in (ray, position)
    order of their first point, taken from the first ray that carries
    infinitely many of them."""
    k = rho.stable_bound()
    for ray in range(1, rho.n + 1):
        probe = [orbit(rho, (ray, pos)) for pos in range(k + 1, k + 1 + _window(rho))]
        if any(not o.is_infinite and len(o) == length for o in probe):
            break
    else:
        raise PreconditionError(f"no generic {length}-cycles")
    seen = set()
    pos = k
    while True:
        pos += 1
        x = Point(ray, pos)
        if x in seen:
            continue
        o = orbit(rho, x)
        if o.is_infinite or len(o) != length:
            continue
        seen.update(o.points)
        yield list(o.points)


def _window(rho):
    """Positions needed past the stable box to meet every residue class."""
    w = 1
    for tail in rho.tails:
        w = max(w, getattr(tail, "period", 1))
    return w


def case_b_family(rho: StructuredPermutation, count: int) -> WitnessFamily:
    """a_k inverts the first k generic odd cycles of rho (or the first 2k
    even ones, so that a_k stays even).  Every inverted r-cycle turns into r
    fixed points of rho*a_k."""
    _check_count(count)
    census = cycle_census(rho)
    if census.eta(1) == INF:
        raise _wrong("case B", "eta_1 finite", census)
    if census.eta_inf:
        raise _wrong("case B", "eta_inf = 0", census)
    lengths = sorted(census.infinite_lengths())
    odd = [r for r in lengths if r % 2]
    r = odd[0] if odd else lengths[0]
    per_witness = 1 if r % 2 else 2
    cycles = _generic_cycles(rho, r)
    chosen = [next(cycles) for _ in range(per_witness * count)]
    witnesses = []
    for k in range(1, count + 1):
        inv = [list(reversed(c)) for c in chosen[:per_witness * k]]
        witnesses.append(FinitePermutation.from_cycles(rho.n, inv))
    return _family(rho, witnesses, "eta_1", Strategy.CASE_B)


def fixed_points(rho: StructuredPermutation) -> Iterator[Point]:
    """Fixed points of rho past the stable box, ordered by (position, ray)."""
    k = rho.stable_bound()
    hosts = [ray for ray in range(1, rho.n + 1)
             if any(rho((ray, p)) == (ray, p) for p in range(k + 1, k + 1 + _window(rho)))]
    if not hosts:
        raise PreconditionError("rho has no generic fixed points to place witnesses on")
    pos = k
    while True:
        pos += 1
        for ray in hosts:
            x = Point(ray, pos)
            if rho(x) == x:
                yield x


def case_c_family(rho: StructuredPermutation, count: int) -> WitnessFamily:
    """a_k is 2k disjoint s-cycles on fixed points of rho, where s is the
    least length with eta_s(rho) finite; eta_s(rho a_k) = eta_s(rho) + 2k."""
    _check_count(count)
    census = cycle_census(rho)
    s = census.first_finite()
    if s == 1:
        raise _wrong("case C", "eta_1 infinite (least s with eta_s finite must exceed 1)",
                     census)
    free = fixed_points(rho)
    pts = [next(free) for _ in range(2 * count * s)]
    witnesses = []
    for k in range(1, count + 1):
        cycles = [pts[j:j + s] for j in range(0, 2 * k * s, s)]
        witnesses.append(FinitePermutation.from_cycles(rho.n, cycles))
    return _family(rho, witnesses, f"eta_{s}", Strategy.CASE_C)


def no_infinite_orbit_family(rho: StructuredPermutation, count: int) -> WitnessFamily:
    """b_k = b'_k b_{k-1}, each b'_k two fresh 2-cycles on fixed points of
    rho.  The supports of rho*b_k strictly increase with k, which rules out
    conjugacy by any element without infinite orbits."""
    _check_count(count)
    census = cycle_census(rho)
    if census.eta(1) != INF:
        raise _wrong("support nesting", "eta_1 infinite (infinitely many fixed points)",
                     census)
    free = fixed_points(rho)
    pts = [next(free) for _ in range(4 * count)]
    witnesses = []
    for k in range(1, count + 1):
        pairs = [pts[j:j + 2] for j in range(0, 4 * k, 2)]
        witnesses.append(FinitePermutation.from_cycles(rho.n, pairs))
    return _family(rho, witnesses, "support_nesting", Strategy.NO_INFINITE_ORBIT)


_BUILDERS = {
    Strategy.CASE_A: case_a_family,
    Strategy.CASE_B: case_b_family,
    Strategy.CASE_C: case_c_family,
    Strategy.NO_INFINITE_ORBIT: no_infinite_orbit_family,
}


def witness_family(rho: StructuredPermutation, count: int,
                   strategy: Strategy | str | None = None) -> WitnessFamily:
    """Build a witness family, choosing the strategy from the census unless
    one is given."""
    strategy = select_strategy(rho) if strategy is None else Strategy(str(strategy))
    if strategy is Strategy.INNER_ONLY:
        if not rho.is_identity():
            raise WrongCase(f"inner_only needs rho = identity; census of rho is "
                            f"{cycle_census(rho)}")
        return inner_witness_family(count, rho.n)
    return _BUILDERS[strategy](rho, count)


def nesting_forces_infinite_orbit_check(a: StructuredPermutation, b: StructuredPermutation,
                                        g: StructuredPermutation) -> bool:
    """For Supp(b) strictly inside Supp(a) and g^-1 a g = b, report whether
    g has an infinite orbit (it always should)."""
    a, b, g = _lift(a), _lift(b), _lift(g)
    if not support_descriptor(b) < support_descriptor(a):
        raise PreconditionError("Supp(b) is not a strict subset of Supp(a)")
    if conjugate(a, g) != b:
        raise PreconditionError("g^-1 a g differs from b")
    return cycle_census(g).eta_inf > 0


# certificates

@dataclass
class VerificationReport:
    ok: bool
    problems: list

    def __bool__(self):
        return self.ok


def verify_family(family: WitnessFamily) -> VerificationReport:
    """Recompute everything a certificate claims, from scratch."""
    problems = []
    rho, ws = family.rho, family.witnesses
    if len(ws) != len(family.values):
        problems.append("witness and value counts differ")
    for k, a in enumerate(ws, start=1):
        if a.n != rho.n:
            problems.append(f"witness {k} lives on X_{a.n}, rho on X_{rho.n}")
            return VerificationReport(False, problems)
        if not a.is_even:
            problems.append(f"witness {k} is odd")
    try:
        actual = [separator_value(rho, a, family.separator) for a in ws]
    except ValueError as exc:
        return VerificationReport(False, problems + [str(exc)])
    for k, (claimed, got) in enumerate(zip(family.values, actual), start=1):
        if claimed != got:
            problems.append(f"witness {k}: claimed {family.separator}={format_count(claimed)}, "
                            f"recomputed {format_count(got)}")
    for k in range(1, len(actual)):
        if not actual[k - 1] < actual[k]:
            problems.append(f"{family.separator} not strictly increasing at witness {k + 1}")
    prods = family.products()
    if family.separator == "support_nesting":
        sups = [support_descriptor(g) for g in prods]
        for k in range(1, len(sups)):
            if not sups[k - 1] < sups[k]:
                problems.append(f"Supp(rho a_{k}) is not strictly inside Supp(rho a_{k + 1})")
    else:
        cens = [cycle_census(g) for g in prods]
        for i in range(len(cens)):
            for j in range(i + 1, len(cens)):
                if cens[i] == cens[j]:
                    problems.append(f"rho a_{i + 1} and rho a_{j + 1} have equal census")
    return VerificationReport(not problems, problems)


CERT_HEADER = "twistperm witness certificate"


def format_certificate(family: WitnessFamily) -> str:
    lines = [CERT_HEADER,
             f"strategy: {family.strategy}",
             f"separator: {family.separator}",
             f"rho: {format_sperm(family.rho)}"]
    for k, (a, v) in enumerate(zip(family.witnesses, family.values), start=1):
        lines.append(f"witness {k}: value={format_count(v)} {format_fperm(a)}")
    return "\n".join(lines) + "\n"


_WITNESS = re.compile(r"witness (\d+): value=(\d+|inf) ")


def parse_certificate(text: str) -> WitnessFamily:
    """Inverse of format_certificate.  ParseError messages carry the line."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]

    def fail(msg, lineno, col=0):
        raise ParseError(f"line {lineno}: {msg}", lines[lineno - 1] if lineno <= len(lines) else "",
                         col)

    if not lines or lines[0].strip() != CERT_HEADER:
        fail(f"expected header {CERT_HEADER!r}", 1)
    fields = {}
    witnesses, values = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        m = _WITNESS.match(line)
        if m:
            if int(m.group(1)) != len(witnesses) + 1:
                fail("witnesses out of order", lineno)
            try:
                a, end = _parse_fperm_prefix(line, m.end())
            except ParseError as exc:
                fail(exc.message, lineno, exc.column)
            if line[end:].strip():
                fail("trailing characters", lineno, end)
            witnesses.append(a)
            values.append(INF if m.group(2) == "inf" else int(m.group(2)))
            continue
        key, sep, value = line.partition(": ")
        if not sep or key not in ("strategy", "separator", "rho"):
            fail("expected 'strategy:', 'separator:', 'rho:' or 'witness k:'", lineno)
        fields[key] = (value, lineno, len(key) + 2)
    for key in ("strategy", "separator", "rho"):
        if key not in fields:
            fail(f"missing {key!r} line", len(lines))
    value, lineno, col = fields["strategy"]
    try:
        strategy = Strategy(value.strip())
    except ValueError:
        fail(f"unknown strategy {value.strip()!r}", lineno, col)
    value, lineno, col = fields["rho"]
    try:
        rho = parse_element(value)
    except ParseError as exc:
        fail(exc.message, lineno, col + exc.column)
    if not witnesses:
        fail("certificate lists no witnesses", len(lines))
    return WitnessFamily(rho, witnesses, fields["separator"][0].strip(), values, strategy)


def census_twin(family: WitnessFamily, k: int) -> FinitePermutation:
    """rho^-1 a_k rho: a different finitary witness whose product with rho is
    conjugate (by rho) to rho*a_k, hence census-equal to it."""
    rho, a = family.rho, family.witnesses[k]
    return conjugate(embed(a), rho).to_finite()


def mutate(family: WitnessFamily, target: int, source: int) -> WitnessFamily:
    """Replace witness ``target`` by the census twin of witness ``source``,
    keeping the value column consistent with the new witness."""
    twin = census_twin(family, source)
    ws = list(family.witnesses)
    ws[target] = twin
    vals = list(family.values)
    vals[target] = separator_value(family.rho, twin, family.separator)
    return WitnessFamily(family.rho, ws, family.separator, vals, family.strategy)
