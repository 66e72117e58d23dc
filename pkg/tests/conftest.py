import struct

import pytest

from srtdiv.fixedpoint import FixedPoint


def fx(value, frac_bits=64):
    """FixedPoint from an exact decimal/float/Fraction literal."""
    from fractions import Fraction
    return FixedPoint.from_fraction(Fraction(str(value)) if isinstance(value, float)
                                    else Fraction(value), frac_bits)


def f2b(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def b2f(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def near(value, frac_bits=64):
    """Nearest grid point to a decimal literal (for values like 0.3)."""
    from fractions import Fraction
    return FixedPoint(round(Fraction(value) * (1 << frac_bits)), frac_bits)


@pytest.fixture
def fixed():
    return fx
