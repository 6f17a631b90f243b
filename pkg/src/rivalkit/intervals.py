"""Interval values with movability flags, error intervals and Kleene booleans.

An :class:`Interval` encloses the set of extended reals between its endpoints.
Each endpoint carries a movability flag: an immovable endpoint is guaranteed
to be reproduced bit-for-bit by recomputation at any higher precision, which
is what lets the engine prove that further recomputation is futile.  Every
interval also carries an :class:`ErrorInterval` recording whether a domain
error must or may occur for some choice of points inside the inputs that
produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from . import backend
from .backend import DOWN, NEAREST, UP, Precision, TargetFormat

__all__ = [
    "BoolInterval",
    "BoolResult",
    "ErrorInterval",
    "Endpoint",
    "Interval",
    "TRUE",
    "FALSE",
    "MAYBE",
    "ERR_NONE",
    "ERR_POSSIBLE",
    "ERR_GUARANTEED",
    "bool_and",
    "bool_or",
    "bool_not",
    "make_point",
    "make_constant",
    "refines",
    "hull",
]


@dataclass(frozen=True, slots=True)
class BoolInterval:
    """Three-valued truth: [must, may] with must implying may."""

    must: bool
    may: bool

    def __post_init__(self):
        if self.must and not self.may:
            raise ValueError("illegal boolean interval [T, F]")

    @property
    def decided(self) -> bool:
        return self.must == self.may

    def __invert__(self) -> "BoolInterval":
        return BoolInterval(not self.may, not self.must)

    def __and__(self, other: "BoolInterval") -> "BoolInterval":
        return BoolInterval(self.must and other.must, self.may and other.may)

    def __or__(self, other: "BoolInterval") -> "BoolInterval":
        return BoolInterval(self.must or other.must, self.may or other.may)

    def __str__(self):
        names = {(False, False): "[F,F]", (False, True): "[F,T]", (True, True): "[T,T]"}
        return names[(self.must, self.may)]


TRUE = BoolInterval(True, True)
FALSE = BoolInterval(False, False)
MAYBE = BoolInterval(False, True)


def bool_and(a: BoolInterval, b: BoolInterval) -> BoolInterval:
    return a & b


def bool_or(a: BoolInterval, b: BoolInterval) -> BoolInterval:
    return a | b


def bool_not(a: BoolInterval) -> BoolInterval:
    return ~a


@dataclass(frozen=True, slots=True)
class ErrorInterval:
    """Whether a domain error is guaranteed / possible for the value's inputs.

    ``guaranteed`` is monotone increasing and ``possible`` monotone decreasing
    under recomputation at higher precision, so a decided error status never
    flips back to undecided.
    """

    guaranteed: bool
    possible: bool

    def __post_init__(self):
        if self.guaranteed and not self.possible:
            raise ValueError("illegal error interval: guaranteed but not possible")

    def join(self, other: "ErrorInterval") -> "ErrorInterval":
        """Sequential combination: errors from either computation propagate."""
        return ErrorInterval(
            self.guaranteed or other.guaranteed, self.possible or other.possible
        )

    def merge(self, other: "ErrorInterval") -> "ErrorInterval":
        """Union of alternatives (if-branches): guaranteed only if both are."""
        return ErrorInterval(
            self.guaranteed and other.guaranteed, self.possible or other.possible
        )

    def render(self) -> str:
        if self.guaranteed:
            return "guaranteed"
        if self.possible:
            return "possible"
        return "none"


ERR_NONE = ErrorInterval(False, False)
ERR_POSSIBLE = ErrorInterval(False, True)
ERR_GUARANTEED = ErrorInterval(True, True)


def _as_mpfr(x) -> mpfr:
    if isinstance(x, mpfr):
        return x
    if isinstance(x, float) or isinstance(x, int):
        return mpfr(x, 53) if isinstance(x, float) else mpfr(x, max(2, int(x).bit_length() + 1))
    raise TypeError(f"not an endpoint value: {x!r}")


@dataclass(frozen=True, slots=True)
class Endpoint:
    """One interval bound: a non-NaN big-float plus its movability flag."""

    value: mpfr
    fixed: bool = False  # True = immovable under recomputation

    def __post_init__(self):
        if gmpy2.is_nan(self.value):
            raise ValueError("NaN cannot be an interval endpoint")
        if self.value == 0 and gmpy2.is_signed(self.value):
            object.__setattr__(self, "value", backend.ZERO)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed extended-real interval with movability flags and error status.

    When ``err.guaranteed`` the bounds are meaningless; the canonical
    guaranteed-error value uses the inverted pair [+inf, -inf] so that any
    accidental use of the bounds trips the ordering invariant loudly.
    """

    lo: Endpoint
    hi: Endpoint
    err: ErrorInterval = ERR_NONE

    def __post_init__(self):
        if not self.err.guaranteed and self.lo.value > self.hi.value:
            raise ValueError(f"inverted interval [{self.lo.value}, {self.hi.value}]")

    @staticmethod
    def of(lo, hi, lo_fixed=False, hi_fixed=False, err=ERR_NONE) -> "Interval":
        return Interval(
            Endpoint(_as_mpfr(lo), lo_fixed), Endpoint(_as_mpfr(hi), hi_fixed), err
        )

    def contains(self, x) -> bool:
        return not self.err.guaranteed and self.lo.value <= x <= self.hi.value

    def is_point(self) -> bool:
        return not self.err.guaranteed and self.lo.value == self.hi.value

    def is_one_value(self, target: TargetFormat) -> bool:
        """True when both bounds round to the same target value: the ground
        truth is certified."""
        if self.err != ERR_NONE:
            return False
        return target.round_from_mpfr(self.lo.value, NEAREST) == target.round_from_mpfr(
            self.hi.value, NEAREST
        )

    def is_stuck(self, target: TargetFormat, strict_finite: bool = False) -> bool:
        """True when recomputation provably cannot reach a one-value interval.

        With ``strict_finite`` an immovable infinite endpoint alone is enough:
        useful when only finite outputs can ever be accepted.
        """
        if self.err.guaranteed:
            return False
        if self.is_one_value(target):
            return False
        if self.lo.fixed and self.hi.fixed:
            return True
        if strict_finite:
            if self.lo.fixed and gmpy2.is_infinite(self.lo.value):
                return True
            if self.hi.fixed and gmpy2.is_infinite(self.hi.value):
                return True
        return False

    def render(self) -> str:
        lo = f"!{self.lo.value}" if self.lo.fixed else f"{self.lo.value}"
        hi = f"{self.hi.value}!" if self.hi.fixed else f"{self.hi.value}"
        return f"[{lo}, {hi}]"

    def __str__(self):
        return f"{self.render()} err={self.err.render()}"


GUARANTEED_ERROR = Interval(
    Endpoint(backend.INF, True), Endpoint(backend.NEG_INF, True), ERR_GUARANTEED
)


@dataclass(frozen=True, slots=True)
class BoolResult:
    """A boolean interval result plus its error status and stability flags.

    ``must_fixed`` / ``may_fixed`` assert that the corresponding truth bound
    provably keeps its current value under recomputation at any higher
    precision (and for any refinement of the inputs).  They are what lets
    input search prove a validity test permanently indeterminate.
    """

    value: BoolInterval
    err: ErrorInterval = ERR_NONE
    must_fixed: bool = False
    may_fixed: bool = False

    @property
    def stuck(self) -> bool:
        """Permanently indeterminate: no precision will ever decide it."""
        return (not self.value.decided) and self.must_fixed and self.may_fixed


def make_point(x, fixed: bool = True) -> Interval:
    """Exact point interval for a target-format value (NaN rejected).

    Program inputs are drawn from the target format, are exactly
    representable at every working precision, and so get immovable endpoints.
    """
    v = _as_mpfr(x)
    if gmpy2.is_nan(v):
        raise ValueError("NaN is not a valid input value")
    ep = Endpoint(v, fixed)
    return Interval(ep, ep, ERR_NONE)


def make_constant(name: str, prec: Precision) -> Interval:
    """1-ulp enclosure of a named constant; movable since never exact."""
    lo = backend.named_constant(name, prec, DOWN)
    hi = backend.named_constant(name, prec, UP)
    return Interval(Endpoint(lo, False), Endpoint(hi, False), ERR_NONE)


def refines(narrow: Interval, wide: Interval) -> bool:
    """The refinement relation: does ``narrow`` legally narrow ``wide``?

    Immovable endpoints must be reproduced exactly; movable ones may only
    move inward.  Error intervals must narrow as well: a guaranteed error
    stays guaranteed, and possibility never appears out of nowhere.
    """
    if wide.err.guaranteed and not narrow.err.guaranteed:
        return False
    if narrow.err.possible and not wide.err.possible:
        return False
    if narrow.err.guaranteed:
        # Bounds are meaningless on a guaranteed error; nothing more to check.
        return True
    if wide.hi.fixed:
        if not (narrow.hi.fixed and narrow.hi.value == wide.hi.value):
            return False
    elif not narrow.hi.value <= wide.hi.value:
        return False
    if wide.lo.fixed:
        if not (narrow.lo.fixed and narrow.lo.value == wide.lo.value):
            return False
    elif not narrow.lo.value >= wide.lo.value:
        return False
    return True


def hull(a: Interval, b: Interval) -> Interval:
    """Union hull of two alternative branches (the `if` merge).

    A hull endpoint is immovable only when both branches pin it to the same
    value: an indeterminate condition may later resolve to either branch, so
    anything less would over-claim.
    """
    if a.err.guaranteed and b.err.guaranteed:
        return GUARANTEED_ERROR
    err = a.err.merge(b.err)
    if a.err.guaranteed:
        return Interval(b.lo, b.hi, err)
    if b.err.guaranteed:
        return Interval(a.lo, a.hi, err)
    if a.lo.value <= b.lo.value:
        lo = Endpoint(a.lo.value, a.lo.fixed and b.lo.fixed and a.lo.value == b.lo.value)
    else:
        lo = Endpoint(b.lo.value, False)
    if a.hi.value >= b.hi.value:
        hi = Endpoint(a.hi.value, a.hi.fixed and b.hi.fixed and a.hi.value == b.hi.value)
    else:
        hi = Endpoint(b.hi.value, False)
    return Interval(lo, hi, err)
