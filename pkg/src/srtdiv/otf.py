"""On-the-fly conversion of radix-4 signed digits to conventional binary.

Two registers are kept: ``A`` holds the quotient so far and ``B`` holds
``A - 1`` (one ulp at the current digit position). Each digit appends two
bits to each register, choosing which register supplies the prefix, so no
carry ever ripples:

    q     A'            B'
    2     (A, 10)       (A, 01)
    1     (A, 01)       (A, 00)
    0     (A, 00)       (B, 11)
   -1     (B, 11)       (B, 10)
   -2     (B, 10)       (B, 01)

Registers are unsigned; a sequence starting with a negative digit wraps
modulo 4**k like a two's-complement value would.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OtfState:
    A: int = 0
    B: int = 0
    k: int = 0

    @property
    def A_bits(self) -> str:
        return format(self.A, f"0{2 * self.k}b") if self.k else ""

    @property
    def B_bits(self) -> str:
        return format(self.B, f"0{2 * self.k}b") if self.k else ""


def otf_append(s: OtfState, q: int) -> OtfState:
    if q not in (-2, -1, 0, 1, 2):
        raise ValueError(f"digit {q} outside {{-2..2}}")
    a = (s.A << 2) | q if q >= 0 else (s.B << 2) | (4 + q)
    b = (s.A << 2) | (q - 1) if q >= 1 else (s.B << 2) | (3 + q)
    return OtfState(a, b, s.k + 1)


def otf_from_digits(digits) -> OtfState:
    s = OtfState()
    for q in digits:
        s = otf_append(s, q)
    return s


def otf_value(s: OtfState) -> int:
    return s.A


def otf_finalize(s: OtfState, remainder_negative: bool) -> str:
    """Conventional quotient bits; ``B`` when the last remainder went negative."""
    if s.k == 0:
        raise ValueError("no digits have been converted")
    return s.B_bits if remainder_negative else s.A_bits
