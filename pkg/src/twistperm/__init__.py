"""Exact arithmetic and cycle censuses for permutations of {1..n} x N,
with twisted-conjugacy witness families and a finite-group oracle."""

from .core_perm import FinitePermutation, Parity, Point, decompose_into_3cycles, parse_fperm
from .errors import (
    NotTruncatable,
    ParityError,
    ParseError,
    PreconditionError,
    ResourceError,
    UnsupportedComposition,
    WrongCase,
)
from .structured_perm import (
    INF,
    CycleCensus,
    Periodic,
    StructuredPermutation,
    Translation,
    cycle_census,
    embed,
    inverse,
    order,
    parse_element,
    product,
    translation,
)

__version__ = "0.1.0"
