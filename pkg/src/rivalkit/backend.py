"""Correctly rounded multiple-precision scalar arithmetic.

Thin adapter over MPFR (via gmpy2) providing directed rounding, per-operation
exactness reporting, a bounded exponent range shared by every working
precision, and the ordinal view of a target float format (binary64/binary32)
used for counting, splitting and uniform sampling.

All functions here are pure; contexts and thresholds are cached by value.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

__all__ = [
    "DomainError",
    "Precision",
    "TargetFormat",
    "BINARY64",
    "BINARY32",
    "SCALAR_OPS",
    "rounded_op",
    "from_rational",
    "named_constant",
    "overflow_threshold",
    "underflow_threshold",
    "exact_floor",
    "exact_ceil",
    "ZERO",
    "ONE",
    "NEG_ZERO",
    "INF",
    "NEG_INF",
]

DOWN = "down"
UP = "up"
NEAREST = "nearest"

_GMPY_ROUND = {
    DOWN: gmpy2.RoundDown,
    UP: gmpy2.RoundUp,
    NEAREST: gmpy2.RoundToNearest,
}

ZERO = mpfr(0)
NEG_ZERO = mpfr("-0")
ONE = mpfr(1)
INF = gmpy2.inf()
NEG_INF = gmpy2.inf(-1)


class DomainError(ArithmeticError):
    """A scalar operation was applied outside its mathematical domain."""

    def __init__(self, op, args):
        super().__init__(f"{op} undefined at {tuple(str(a) for a in args)}")
        self.op = op
        self.args = args


@dataclass(frozen=True, slots=True)
class Precision:
    """Working precision: significand bits plus an engine-wide exponent budget.

    With ``exponent_bits = b`` the exponent e of a value m * 2**e
    (0.5 <= |m| < 1, MPFR convention) is confined to [-2**(b-1), 2**(b-1)];
    every magnitude therefore lies in [2**(emin-1), 2**emax).  Results beyond
    those bounds overflow to an infinity or underflow to zero in the chosen
    rounding direction, at every significand precision.
    """

    bits: int
    exponent_bits: int = 31

    def __post_init__(self):
        if not 2 <= self.bits <= 10240:
            raise ValueError(f"significand bits out of range: {self.bits}")
        if self.exponent_bits < 2:
            raise ValueError(f"exponent bits out of range: {self.exponent_bits}")

    @property
    def emax(self) -> int:
        return 1 << (self.exponent_bits - 1)

    @property
    def emin(self) -> int:
        return -(1 << (self.exponent_bits - 1))

    def double(self) -> "Precision":
        return Precision(self.bits * 2, self.exponent_bits)


_context_cache: dict = {}


def _context(bits, emin, emax, direction, subnormalize=False):
    key = (bits, emin, emax, direction, subnormalize)
    ctx = _context_cache.get(key)
    if ctx is None:
        ctx = gmpy2.context(
            precision=bits,
            emin=emin,
            emax=emax,
            round=_GMPY_ROUND[direction],
            subnormalize=subnormalize,
            trap_underflow=False,
            trap_overflow=False,
            trap_inexact=False,
            trap_invalid=False,
            trap_erange=False,
            trap_divzero=False,
        )
        _context_cache[key] = ctx
    return ctx


def context_for(prec: Precision, direction: str):
    return _context(prec.bits, prec.emin, prec.emax, direction)


# Scalar operation table: op name -> (gmpy2 context method name, arity).
SCALAR_OPS = {
    "+": ("add", 2),
    "-": ("sub", 2),
    "neg": ("minus", 1),
    "*": ("mul", 2),
    "/": ("div", 2),
    "sqrt": ("sqrt", 1),
    "cbrt": ("cbrt", 1),
    "exp": ("exp", 1),
    "exp2": ("exp2", 1),
    "log": ("log", 1),
    "log2": ("log2", 1),
    "pow": ("pow", 2),
    "sin": ("sin", 1),
    "cos": ("cos", 1),
    "tan": ("tan", 1),
    "asin": ("asin", 1),
    "acos": ("acos", 1),
    "atan": ("atan", 1),
    "atan2": ("atan2", 2),
    "fabs": ("abs", 1),
    "fmod": ("fmod", 2),
    "trunc": ("rint_trunc", 1),
    "floor": ("rint_floor", 1),
    "ceil": ("rint_ceil", 1),
}


def rounded_op(op: str, args, prec: Precision, direction: str):
    """Apply a supported scalar op with directed rounding.

    Returns ``(value, exact)`` where ``exact`` is True iff the mathematical
    result was representable at ``prec`` (MPFR ternary == 0).  A NaN result
    signals a domain violation and raises :class:`DomainError` instead of
    being returned.
    """
    method, arity = SCALAR_OPS[op]
    if len(args) != arity:
        raise TypeError(f"{op} expects {arity} args, got {len(args)}")
    ctx = context_for(prec, direction)
    result = getattr(ctx, method)(*args)
    if gmpy2.is_nan(result):
        raise DomainError(op, args)
    return result, result.rc == 0


def from_rational(value, prec: Precision, direction: str):
    """Round an exact rational (Fraction/int/mpq/mpfr) to prec; report exactness."""
    if isinstance(value, Fraction):
        value = gmpy2.mpq(value.numerator, value.denominator)
    ctx = context_for(prec, direction)
    with ctx:
        result = mpfr(value)
    return result, result.rc == 0


_CONSTANTS = {
    "PI": "const_pi",
    "E": None,  # e = exp(1); gmpy2 const_euler is the Euler-Mascheroni constant
}


def named_constant(name: str, prec: Precision, direction: str):
    """Directed rounding of a named irrational constant (PI, E)."""
    ctx = context_for(prec, direction)
    if name == "PI":
        return ctx.const_pi()
    if name == "E":
        return ctx.exp(ONE)
    raise ValueError(f"unknown constant: {name}")


_THRESHOLD_PREC = Precision(80)
_threshold_cache: dict = {}


def overflow_threshold(kind: str, exponent_bits: int) -> mpfr:
    """Smallest T such that x >= T forces exp-family overflow at every precision.

    exp(x) overflows once x reaches emax * ln 2, exp2(x) once x reaches emax.
    Thresholds are evaluated once at 80 bits rounding up, so the returned
    bound is always on the safe side.
    """
    key = ("over", kind, exponent_bits)
    value = _threshold_cache.get(key)
    if value is None:
        emax = 1 << (exponent_bits - 1)
        if kind == "exp2":
            value = mpfr(emax, _THRESHOLD_PREC.bits)
        elif kind == "exp":
            ctx = context_for(_THRESHOLD_PREC, UP)
            value = ctx.mul(mpfr(emax, _THRESHOLD_PREC.bits), ctx.log(mpfr(2)))
        else:
            raise ValueError(f"no overflow threshold for {kind}")
        _threshold_cache[key] = value
    return value


def underflow_threshold(kind: str, exponent_bits: int) -> mpfr:
    """Largest U such that x <= U forces exp-family underflow to 0 when rounding down."""
    key = ("under", kind, exponent_bits)
    value = _threshold_cache.get(key)
    if value is None:
        emin = -(1 << (exponent_bits - 1))
        if kind == "exp2":
            value = mpfr(emin - 1, _THRESHOLD_PREC.bits)
        elif kind == "exp":
            ctx = context_for(_THRESHOLD_PREC, DOWN)
            up = context_for(_THRESHOLD_PREC, UP)
            value = ctx.mul(mpfr(emin - 1, _THRESHOLD_PREC.bits), up.log(mpfr(2)))
        else:
            raise ValueError(f"no underflow threshold for {kind}")
        _threshold_cache[key] = value
    return value


_EXACT_CTX = gmpy2.context(
    precision=32,
    emin=gmpy2.get_emin_min(),
    emax=gmpy2.get_emax_max(),
    trap_overflow=False,
    trap_underflow=False,
)


def exact_floor(x: mpfr):
    """floor(x) as an exact integer (mpz); x must be finite."""
    with _EXACT_CTX:
        return gmpy2.floor(x)


def exact_ceil(x: mpfr):
    with _EXACT_CTX:
        return gmpy2.ceil(x)


# ---------------------------------------------------------------------------
# Target formats and their ordinal structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetFormat:
    """A fixed IEEE-style binary format the engine computes ground truths in.

    Values of the format are held as Python floats (binary32 members are
    exactly representable in binary64).  The format's non-NaN members,
    with -0.0 and +0.0 collapsed to a single zero, map to a contiguous
    signed integer range via :meth:`ordinal`; the mapping is strictly
    monotone with the infinities at the extremes.
    """

    name: str
    bits: int  # significand precision including the implicit bit
    emax: int  # MPFR-convention exponent bounds
    emin: int
    _pack: str
    _width: int
    _inf_bits: int

    @property
    def k_plus(self) -> float:
        """Largest finite member."""
        return self.from_ordinal(self.max_ordinal - 1)

    @property
    def k_minus(self) -> float:
        return -self.k_plus

    @property
    def max_ordinal(self) -> int:
        return self._inf_bits

    @property
    def total_count(self) -> int:
        """Number of members including both infinities (zeros collapsed)."""
        return 2 * self.max_ordinal + 1

    def is_member(self, x: float) -> bool:
        if math.isnan(x):
            return False
        packed = struct.pack(self._pack, x)
        return struct.unpack(self._pack, packed)[0] == x

    def ordinal(self, x: float) -> int:
        if math.isnan(x):
            raise ValueError("NaN has no ordinal")
        if self._width == 4 and not self.is_member(x):
            raise ValueError(f"{x!r} is not a {self.name} value")
        (bits,) = struct.unpack("<q" if self._width == 8 else "<i", struct.pack(self._pack, x))
        if bits < 0:
            magnitude_mask = (1 << (8 * self._width - 1)) - 1
            return -(bits & magnitude_mask)
        return bits

    def from_ordinal(self, i: int) -> float:
        if not -self.max_ordinal <= i <= self.max_ordinal:
            raise ValueError(f"ordinal out of range: {i}")
        if i >= 0:
            bits = i
        else:
            sign = 1 << (8 * self._width - 1)
            bits = (-i) | sign
        fmt = "<Q" if self._width == 8 else "<I"
        (x,) = struct.unpack(self._pack, struct.pack(fmt, bits))
        return x

    def count_in(self, lo: float, hi: float) -> int:
        """Number of members in the closed range [lo, hi]."""
        if lo > hi:
            raise ValueError("empty range")
        return self.ordinal(hi) - self.ordinal(lo) + 1

    def split_point(self, lo: float, hi: float):
        """Halve [lo, hi] by member count: returns (mid, next_after_mid).

        [lo, mid] and [next_after_mid, hi] partition the members, with
        counts differing by at most one.
        """
        if self.count_in(lo, hi) < 2:
            raise ValueError("cannot split a single-member range")
        mid = self.from_ordinal((self.ordinal(lo) + self.ordinal(hi)) // 2)
        return mid, self.next_up(mid)

    def next_up(self, x: float) -> float:
        return self.from_ordinal(self.ordinal(x) + 1)

    def next_down(self, x: float) -> float:
        return self.from_ordinal(self.ordinal(x) - 1)

    def round_from_mpfr(self, x: mpfr, direction: str = NEAREST) -> float:
        """Monotone correctly-rounded conversion of an mpfr into this format."""
        if gmpy2.is_nan(x):
            raise ValueError("cannot round NaN into a target format")
        ctx = _context(self.bits, self.emin, self.emax, direction, subnormalize=True)
        rounded = ctx.add(x, ZERO)
        result = float(rounded)
        return 0.0 if result == 0.0 else result


BINARY64 = TargetFormat(
    name="binary64", bits=53, emax=1024, emin=-1073,
    _pack="<d", _width=8, _inf_bits=0x7FF0000000000000,
)
BINARY32 = TargetFormat(
    name="binary32", bits=24, emax=128, emin=-148,
    _pack="<f", _width=4, _inf_bits=0x7F800000,
)

FORMATS = {"binary64": BINARY64, "binary32": BINARY32}
