import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperm.core_perm import (
    FinitePermutation,
    Parity,
    Point,
    compose,
    cycle_decomposition,
    decompose_into_3cycles,
    format_fperm,
    parity,
    parse_fperm,
    product,
)
from twistperm.errors import ParityError, ParseError

N = 2
POOL = [Point(r, p) for r in (1, 2) for p in range(1, 11)]   # 20 points


@st.composite
def perms(draw, pool=POOL):
    pts = draw(st.lists(st.sampled_from(pool), unique=True, max_size=len(pool)))
    img = draw(st.permutations(pts))
    return FinitePermutation(N, dict(zip(pts, img)))


def P(r, p):
    return Point(r, p)


a1, a2, b1, b2 = P(1, 1), P(1, 2), P(2, 1), P(2, 2)


def test_compose_gives_product_of_two_transpositions():
    left = FinitePermutation.from_cycles(2, [(a1, a2)]) * FinitePermutation.from_cycles(2, [(a2, b1)])
    right = FinitePermutation.from_cycles(2, [(a2, b1)]) * FinitePermutation.from_cycles(2, [(b1, b2)])
    assert compose(left, right) == FinitePermutation.from_cycles(2, [(a1, a2), (b1, b2)])


def test_right_action_applies_left_factor_first():
    f = FinitePermutation.cycle(1, P(1, 1), P(1, 2))
    g = FinitePermutation.cycle(1, P(1, 2), P(1, 3))
    assert (f * g)(P(1, 1)) == g(f(P(1, 1))) == P(1, 3)


def test_involution_squared_and_inverse():
    f = FinitePermutation.cycle(1, P(1, 1), P(1, 2))
    assert (f * f).is_identity()
    g = FinitePermutation.cycle(2, a1, b2, a2)
    assert (g * g.inverse()).is_identity()


def test_fixed_points_are_not_stored():
    f = FinitePermutation(1, {P(1, 1): P(1, 1), P(1, 2): P(1, 3), P(1, 3): P(1, 2)})
    assert f.support() == {P(1, 2), P(1, 3)}
    assert f == FinitePermutation(1, {P(1, 3): P(1, 2), P(1, 2): P(1, 3)})
    assert hash(f) == hash(FinitePermutation.cycle(1, P(1, 2), P(1, 3)))


def test_rejects_non_bijection_and_bad_points():
    with pytest.raises(ValueError):
        FinitePermutation(1, {P(1, 1): P(1, 2)})
    with pytest.raises(ValueError):
        FinitePermutation(1, {P(2, 1): P(1, 1), P(1, 1): P(2, 1)})
    with pytest.raises(ValueError):
        compose(FinitePermutation(1), FinitePermutation(2))


def test_parity_examples():
    assert parity(FinitePermutation.cycle(1, P(1, 1), P(1, 2), P(1, 3))) is Parity.EVEN
    assert parity(FinitePermutation.cycle(1, P(1, 1), P(1, 2))) is Parity.ODD
    swaps = [(P(1, 2 * i + 1), P(1, 2 * i + 2)) for i in range(4)]
    assert FinitePermutation.from_cycles(1, swaps).is_even
    assert Parity.ODD + Parity.ODD is Parity.EVEN


def test_3cycle_decomposition_of_disjoint_pair():
    f = FinitePermutation.from_cycles(2, [(a1, a2), (b1, b2)])
    parts = decompose_into_3cycles(f)
    assert len(parts) == 2
    assert all(p.cycle_type() == (3,) for p in parts)
    assert product(parts) == f


def test_3cycle_decomposition_edge_cases():
    assert decompose_into_3cycles(FinitePermutation(1)) == []
    with pytest.raises(ParityError):
        decompose_into_3cycles(FinitePermutation.cycle(1, P(1, 1), P(1, 2)))


def test_cycle_decomposition_canonical():
    x = [P(1, i) for i in range(8)][1:]
    f = FinitePermutation.from_cycles(1, [(x[3], x[2]), (x[1], x[0])])
    assert cycle_decomposition(f) == [[x[0], x[1]], [x[2], x[3]]]
    a3 = FinitePermutation.from_cycles(1, [(P(1, 2 * i + 1), P(1, 2 * i + 2)) for i in range(3)])
    assert [len(c) for c in a3.cycles()] == [2, 2, 2]
    assert cycle_decomposition(FinitePermutation(1)) == []


def test_text_format_round_trip():
    f = FinitePermutation.from_cycles(2, [(a1, b2, a2)])
    text = format_fperm(f)
    assert text == "fperm n=2 cycles=((1,1) (2,2) (1,2))"
    assert parse_fperm(text) == f
    assert format_fperm(FinitePermutation(3)) == "fperm n=3 cycles=()"
    assert parse_fperm("fperm n=3 cycles=()") == FinitePermutation(3)


@pytest.mark.parametrize("text, column", [
    ("fperm n=2 cycles=((1,1) (1,2)", 18),
    ("perm n=2 cycles=()", 1),
    ("fperm n=2 cycles=() extra", 21),
    ("fperm n=1 cycles=((2,1) (1,1))", 18),
])
def test_parse_errors_report_column(text, column):
    with pytest.raises(ParseError) as info:
        parse_fperm(text)
    assert f"(column {column})" in str(info.value)


@settings(max_examples=60, deadline=None)
@given(perms(), perms(), perms())
def test_group_axioms(f, g, h):
    e = FinitePermutation.identity(N)
    assert (f * g) * h == f * (g * h)
    assert f * e == f == e * f
    assert f * f.inverse() == e == f.inverse() * f


@settings(max_examples=60, deadline=None)
@given(perms(), perms())
def test_parity_is_a_homomorphism(f, g):
    assert parity(f * g) is parity(f) + parity(g)


@settings(max_examples=60, deadline=None)
@given(perms())
def test_even_permutations_recompose_from_3cycles(f):
    if not f.is_even:
        f = f * FinitePermutation.cycle(N, P(1, 1), P(1, 2))
    parts = decompose_into_3cycles(f)
    assert all(len(p.support()) == 3 and p.is_even for p in parts)
    assert product(parts, N) == f


@settings(max_examples=60, deadline=None)
@given(perms())
def test_cycles_round_trip(f):
    assert FinitePermutation.from_cycles(N, f.cycles()) == f
    assert parse_fperm(format_fperm(f)) == f
