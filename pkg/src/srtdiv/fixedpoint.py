"""Exact two's-complement fixed-point values.

A value is ``raw / 2**frac_bits`` with ``int_bits`` integer bits plus a sign.
Nothing here ever rounds: mixed-format operands are aligned to the wider
fraction, and leaving the representable range raises instead of wrapping.
"""
from __future__ import annotations

from fractions import Fraction

DEFAULT_INT_BITS = 4
DEFAULT_FRAC_BITS = 64


class FixedPointOverflow(ArithmeticError):
    """Raised when a result does not fit the configured width."""


class FixedPoint:
    __slots__ = ("raw", "frac_bits", "int_bits")

    raw: int
    frac_bits: int
    int_bits: int

    def __init__(self, raw: int, frac_bits: int = DEFAULT_FRAC_BITS,
                 int_bits: int = DEFAULT_INT_BITS):
        if frac_bits < 0 or int_bits < 0:
            raise ValueError("bit counts must be non-negative")
        raw = int(raw)
        if abs(raw) >> (int_bits + frac_bits):
            raise FixedPointOverflow(
                f"raw {raw} does not fit I={int_bits}, F={frac_bits}")
        self.raw = raw
        self.frac_bits = frac_bits
        self.int_bits = int_bits

    @classmethod
    def _unchecked(cls, raw: int, frac_bits: int, int_bits: int) -> FixedPoint:
        obj = object.__new__(cls)
        obj.raw = raw
        obj.frac_bits = frac_bits
        obj.int_bits = int_bits
        return obj

    @classmethod
    def from_fraction(cls, value, frac_bits: int = DEFAULT_FRAC_BITS,
                      int_bits: int = DEFAULT_INT_BITS) -> FixedPoint:
        """Exact conversion; raises ValueError if ``value`` is not on the grid."""
        scaled = Fraction(value) * (1 << frac_bits)
        if scaled.denominator != 1:
            raise ValueError(f"{value} is not a multiple of 2^-{frac_bits}")
        return cls(scaled.numerator, frac_bits, int_bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << self.frac_bits)

    def __float__(self) -> float:
        return self.raw / (1 << self.frac_bits)

    def to_decimal(self) -> str:
        """Exact decimal expansion (always finite for a dyadic value)."""
        f = self.frac_bits
        mag = abs(self.raw) * 5 ** f
        digits = str(mag).rjust(f + 1, "0")
        whole, frac = digits[:len(digits) - f], digits[len(digits) - f:].rstrip("0")
        sign = "-" if self.raw < 0 else ""
        return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"

    def aligned_raw(self, frac_bits: int) -> int:
        if frac_bits < self.frac_bits:
            raise ValueError("alignment may only widen the fraction")
        return self.raw << (frac_bits - self.frac_bits)

    def sign(self) -> int:
        return (self.raw > 0) - (self.raw < 0)

    def _cmp_raws(self, other: FixedPoint) -> tuple[int, int]:
        fa, fb = self.frac_bits, other.frac_bits
        if fa == fb:
            return self.raw, other.raw
        if fa > fb:
            return self.raw, other.raw << (fa - fb)
        return self.raw << (fb - fa), other.raw

    def __eq__(self, other):
        if not isinstance(other, FixedPoint):
            return NotImplemented
        a, b = self._cmp_raws(other)
        return a == b

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other: FixedPoint) -> bool:
        a, b = self._cmp_raws(other)
        return a < b

    def __le__(self, other: FixedPoint) -> bool:
        a, b = self._cmp_raws(other)
        return a <= b

    def __gt__(self, other: FixedPoint) -> bool:
        a, b = self._cmp_raws(other)
        return a > b

    def __ge__(self, other: FixedPoint) -> bool:
        a, b = self._cmp_raws(other)
        return a >= b

    def __add__(self, other: FixedPoint) -> FixedPoint:
        return fp_add(self, other)

    def __sub__(self, other: FixedPoint) -> FixedPoint:
        return fp_sub(self, other)

    def __neg__(self) -> FixedPoint:
        return FixedPoint._unchecked(-self.raw, self.frac_bits, self.int_bits)

    def __abs__(self) -> FixedPoint:
        return FixedPoint._unchecked(abs(self.raw), self.frac_bits, self.int_bits)

    def __repr__(self):
        return (f"FixedPoint({self.to_decimal()}, I={self.int_bits}, "
                f"F={self.frac_bits})")


def _checked(raw: int, frac_bits: int, int_bits: int) -> FixedPoint:
    if abs(raw) >> (int_bits + frac_bits):
        raise FixedPointOverflow(
            f"result {Fraction(raw, 1 << frac_bits)} exceeds I={int_bits}")
    return FixedPoint._unchecked(raw, frac_bits, int_bits)


def fp_make(raw: int, frac_bits: int = DEFAULT_FRAC_BITS,
            int_bits: int = DEFAULT_INT_BITS) -> FixedPoint:
    return FixedPoint(raw, frac_bits, int_bits)


def fp_add(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    x, y = a._cmp_raws(b)
    return _checked(x + y, max(a.frac_bits, b.frac_bits),
                    max(a.int_bits, b.int_bits))


def fp_sub(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    x, y = a._cmp_raws(b)
    return _checked(x - y, max(a.frac_bits, b.frac_bits),
                    max(a.int_bits, b.int_bits))


def fp_mul_digit(a: FixedPoint, q: int) -> FixedPoint:
    """Multiply by a radix-4 digit in {-2..2}; a shift plus optional negate."""
    if q not in (-2, -1, 0, 1, 2):
        raise ValueError(f"digit {q} outside {{-2..2}}")
    raw = a.raw << 1 if q in (2, -2) else (a.raw if q else 0)
    if q < 0:
        raw = -raw
    return _checked(raw, a.frac_bits, a.int_bits)


def fp_shl2(a: FixedPoint) -> FixedPoint:
    return _checked(a.raw << 2, a.frac_bits, a.int_bits)


def fp_shr2(a: FixedPoint) -> FixedPoint:
    """Exact division by 4; widens the fraction when low bits would drop."""
    if a.raw & 3 == 0:
        return FixedPoint._unchecked(a.raw >> 2, a.frac_bits, a.int_bits)
    return FixedPoint._unchecked(a.raw, a.frac_bits + 2, a.int_bits)
