"""Correctly rounded binary64 division on top of the radix-4 recurrence.

Significands are normalized to [1/2, 1) (subnormals first), run through 29
radix-4 steps for 58 quotient bits, fixed up on the sign of the final
remainder, and rounded to nearest-even with the remainder as sticky bit.
Only round-to-nearest-even is supported. Any NaN result is the canonical
quiet NaN 0x7FF8000000000000.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from . import kernel
from .fixedpoint import FixedPoint
from .srt_core import SrtConfig, run_divide

M_ITERS = 29

SIGN_BIT = 1 << 63
EXP_MASK = 0x7FF0000000000000
FRAC_MASK = (1 << 52) - 1
QUIET_BIT = 1 << 51
HIDDEN = 1 << 52
CANONICAL_NAN = 0x7FF8000000000000
POS_INF = 0x7FF0000000000000

ZERO, SUBNORMAL, NORMAL, INFINITY, NAN = "zero", "subnormal", "normal", "infinity", "nan"


@dataclass(frozen=True)
class Float64Parts:
    sign: int
    biased_exp: int
    fraction: int
    kind: str

    def __post_init__(self):
        if self.kind != classify(self.biased_exp, self.fraction):
            raise ValueError(f"{self.kind} inconsistent with exponent/fraction fields")


@dataclass(frozen=True)
class Flags:
    inexact: bool = False
    divide_by_zero: bool = False
    invalid: bool = False
    overflow: bool = False
    underflow: bool = False

    def names(self) -> list[str]:
        return [f.name for f in fields(self) if getattr(self, f.name)]

    def __str__(self):
        return ",".join(self.names()) or "-"

    @classmethod
    def parse(cls, text: str) -> Flags:
        text = text.strip()
        if text in ("", "-"):
            return cls()
        known = {f.name for f in fields(cls)}
        names = [n.strip() for n in text.split(",")]
        bad = [n for n in names if n not in known]
        if bad:
            raise ValueError(f"unknown flag(s): {', '.join(bad)}")
        return cls(**{n: True for n in names})


NO_FLAGS = Flags()


def classify(biased_exp: int, fraction: int) -> str:
    if biased_exp == 0:
        return ZERO if fraction == 0 else SUBNORMAL
    if biased_exp == 0x7FF:
        return INFINITY if fraction == 0 else NAN
    return NORMAL


def unpack(bits: int) -> Float64Parts:
    if not 0 <= bits < 1 << 64:
        raise ValueError("not a 64-bit word")
    e = (bits >> 52) & 0x7FF
    f = bits & FRAC_MASK
    return Float64Parts(bits >> 63, e, f, classify(e, f))


def pack(parts: Float64Parts) -> int:
    return (parts.sign << 63) | (parts.biased_exp << 52) | parts.fraction


def is_nan(bits: int) -> bool:
    return (bits & ~SIGN_BIT) > POS_INF


def is_signaling_nan(bits: int) -> bool:
    return is_nan(bits) and not bits & QUIET_BIT


def _significand(e: int, f: int) -> tuple[int, int]:
    """(M, k) with value M * 2**k and M in [2**52, 2**53)."""
    if e:
        return HIDDEN | f, e - 1075
    shift = 53 - f.bit_length()
    return f << shift, -1074 - shift


def round_pack(sign: int, n: int, e: int, sticky: bool) -> tuple[int, Flags]:
    """Round (n + t) * 2**e to binary64, t in [0, 1) and sticky == (t > 0)."""
    length = n.bit_length()
    top = e + length - 1
    shift = length - 53 if top >= -1022 else -1074 - e

    def rne(s: int) -> tuple[int, bool]:
        if s <= 0:
            return n << -s, sticky
        kept = n >> s
        rem = n & ((1 << s) - 1)
        half = 1 << (s - 1)
        if rem > half or (rem == half and (sticky or kept & 1)):
            kept += 1
        return kept, bool(rem) or sticky

    kept, inexact = rne(shift)
    # tininess is judged after rounding to 53 bits with an unbounded exponent
    k53, _ = rne(length - 53)
    tiny = top + (k53 >> 53) < -1022
    underflow = tiny and inexact
    if top >= -1022:
        if kept >> 53:
            kept >>= 1
            top += 1
        if top > 1023:
            return (sign << 63) | POS_INF, Flags(inexact=True, overflow=True)
        bits = ((top + 1023) << 52) | (kept & FRAC_MASK)
    else:
        bits = kept  # carry into bit 52 yields the smallest normal encoding
    return (sign << 63) | bits, Flags(inexact=inexact, underflow=underflow)


def fdiv(a: int, b: int, policy: str = "exact", *, rules=None,
         trace: list | None = None) -> tuple[int, Flags]:
    """IEEE-754 binary64 ``a / b`` on 64-bit words.

    Pass a list as ``trace`` to run the traced reference recurrence and
    collect its per-cycle records instead of using the kernel.
    """
    sign = (a ^ b) >> 63
    ea, eb = (a >> 52) & 0x7FF, (b >> 52) & 0x7FF
    fa, fb = a & FRAC_MASK, b & FRAC_MASK
    if ea == 0x7FF or eb == 0x7FF:
        if (ea == 0x7FF and fa) or (eb == 0x7FF and fb):
            invalid = is_signaling_nan(a) or is_signaling_nan(b)
            return CANONICAL_NAN, Flags(invalid=invalid)
        if ea == 0x7FF and eb == 0x7FF:
            return CANONICAL_NAN, Flags(invalid=True)
        if ea == 0x7FF:
            return (sign << 63) | POS_INF, NO_FLAGS
        return sign << 63, NO_FLAGS
    a_zero = ea == 0 and fa == 0
    if eb == 0 and fb == 0:
        if a_zero:
            return CANONICAL_NAN, Flags(invalid=True)
        return (sign << 63) | POS_INF, Flags(divide_by_zero=True)
    if a_zero:
        return sign << 63, NO_FLAGS

    ma, ka = _significand(ea, fa)
    mb, kb = _significand(eb, fb)
    if trace is None:
        tables = None
        if policy == "fuzzy":
            from .fuzzy import DEFAULT_RULES
            tables = (rules or DEFAULT_RULES).tables
        code = kernel.POLICY_CODES[policy]
        qa, qb, p = kernel.divide(ma, mb, 53, M_ITERS, code, tables)
        q, sticky = (qb, True) if p < 0 else (qa, p != 0)
    else:
        res = run_divide(FixedPoint(ma << 11), FixedPoint(mb << 11),
                         SrtConfig(M_ITERS, policy, rules))
        trace.extend(res.trace)
        q, sticky = res.quotient, res.corrected_remainder.raw != 0
    # a/b = (q + t) * 4**(1 - m) * 2**(ka - kb), t = corrected remainder / d
    return round_pack(sign, q, ka - kb - 2 * (M_ITERS - 1), sticky)
