"""Radix-4 SRT division model: digit selection, fuzzy overlap resolution,
on-the-fly conversion and a correctly rounded binary64 divide."""

__version__ = "0.1.0"

from .fixedpoint import (FixedPoint, FixedPointOverflow, fp_add, fp_make,
                         fp_mul_digit, fp_shl2, fp_sub)
from .ieee754 import Flags, fdiv, pack, unpack
from .kernel import BACKEND
from .srt_core import SrtConfig, run_divide

__all__ = [
    "BACKEND", "FixedPoint", "FixedPointOverflow", "Flags", "SrtConfig",
    "fdiv", "fp_add", "fp_make", "fp_mul_digit", "fp_shl2", "fp_sub", "pack",
    "run_divide", "unpack",
]
