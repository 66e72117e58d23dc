"""Radix-4 quotient digit selection.

Selection happens in two parts. A coarse prediction ``q_est`` in {-2..1}
looks only at the shifted remainder ``rp``, compared against 0 and +-1/2.
A correction then decides between ``q_est`` and ``q_est + 1`` using the
divisor. Three correction rules are provided:

``exact``
    containment test ``rp - q_est*d > (2/3)d``, computed exactly.
``constants``
    compares the residual ``rp - q_est*d`` with 1/4 (d < 3/4) or 1/2
    (d >= 3/4), optionally after truncating it to a few fractional bits.
``fuzzy``
    Mamdani inference over the overlap band, see :mod:`srtdiv.fuzzy`.

Any rule is acceptable as long as the next remainder stays within
``+-(2/3)d``; :func:`sweep_containment` certifies that exhaustively on a grid.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernel
from .fixedpoint import FixedPoint, fp_make

POLICIES = ("exact", "constants", "fuzzy")
Q_DIGITS = (-2, -1, 0, 1, 2)
EST_DIGITS = (-2, -1, 0, 1)


class SelectionError(ValueError):
    """Operands outside the domain the selection rules are valid for."""


@dataclass(frozen=True)
class SelectionConstants:
    c: FixedPoint = fp_make(1, 1)
    c_prime: FixedPoint = fp_make(-1, 1)
    C1: FixedPoint = fp_make(1, 2)
    C2: FixedPoint = fp_make(1, 1)
    rho: Fraction = Fraction(2, 3)
    d_split: FixedPoint = fp_make(3, 2)


SELECTION = SelectionConstants()


def _aligned(*values: FixedPoint) -> tuple[int, ...]:
    f = max(v.frac_bits for v in values)
    return tuple(v.raw << (f - v.frac_bits) for v in values)


def _check_policy(policy: str) -> str:
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    return policy


def _check_operands(rp: FixedPoint, d: FixedPoint, qe: int | None = None):
    r, dv, half, one = _aligned(rp, d, SELECTION.c, fp_make(1, 0))
    if not half <= dv < one:
        raise SelectionError(f"divisor {d.to_decimal()} outside [1/2, 1)")
    if 3 * abs(r) > 8 * dv:
        raise SelectionError(f"|rp| = {abs(rp).to_decimal()} exceeds (8/3)d")
    if qe is not None and qe not in EST_DIGITS:
        raise SelectionError(f"estimated digit {qe} outside {{-2..1}}")
    return r, dv


def predict_digit(rp: FixedPoint) -> int:
    """Coarse digit from ``rp`` alone; ties go to the upper region."""
    r, half, lim = _aligned(rp, SELECTION.c, fp_make(8, 0))
    if not 3 * abs(r) < lim:
        raise SelectionError(f"rp = {rp.to_decimal()} outside (-8/3, 8/3)")
    if r >= half:
        return 1
    if r >= 0:
        return 0
    if r >= -half:
        return -1
    return -2


def correct_digit_exact(rp: FixedPoint, d: FixedPoint, qe: int) -> int:
    r, dv = _check_operands(rp, d, qe)
    return qe + 1 if 3 * (r - qe * dv) > 2 * dv else qe


def correct_digit_constants(rp: FixedPoint, d: FixedPoint, qe: int,
                            trunc_bits: int | None = None) -> int:
    """Residual-vs-constant correction.

    With ``trunc_bits`` set, the residual is floored to that many fractional
    bits before the comparison, as a narrow hardware comparator would see it.
    """
    _check_operands(rp, d, qe)
    f = max(rp.frac_bits, d.frac_bits, 2)
    dv = d.aligned_raw(f)
    residual = rp.aligned_raw(f) - qe * dv
    if trunc_bits is not None and trunc_bits < f:
        drop = f - trunc_bits
        residual = (residual >> drop) << drop
    split = SELECTION.d_split.aligned_raw(f)
    c = SELECTION.C1 if dv < split else SELECTION.C2
    return qe + 1 if residual >= c.aligned_raw(f) else qe


def select_digit(rp: FixedPoint, d: FixedPoint, policy: str = "exact",
                 rules=None) -> tuple[int, int]:
    _check_policy(policy)
    qe = predict_digit(rp)
    if policy == "exact":
        return qe, correct_digit_exact(rp, d, qe)
    if policy == "constants":
        return qe, correct_digit_constants(rp, d, qe)
    from .fuzzy import fuzzy_decide
    return qe, fuzzy_decide(rp, d, qe, rules)


def in_overlap(rp: FixedPoint, d: FixedPoint, qe: int) -> bool:
    """True when both ``qe`` and ``qe + 1`` keep the next remainder contained."""
    r, dv = _aligned(rp, d)
    return (3 * qe + 1) * dv <= 3 * r <= (3 * qe + 2) * dv


@dataclass
class PDRegionMap:
    res_d: int
    res_p: int
    policy: str
    scale: int
    # (d_raw, rp_raw, q_est, q_final, in_overlap) with raws in units 2**-scale
    rows: list = field(default_factory=list, repr=False)

    def cell(self, row) -> tuple[FixedPoint, FixedPoint, int, int, bool]:
        d, rp, qe, q, ov = row
        return (FixedPoint(d, self.scale), FixedPoint(rp, self.scale), qe, q, ov)

    def write_csv(self, fh, meta: str | None = None) -> None:
        if meta:
            fh.write(f"# {meta}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "rp", "q_est", "q_final", "in_overlap"])
        s = self.scale
        for d, rp, qe, q, ov in self.rows:
            w.writerow([FixedPoint(d, s).to_decimal(), FixedPoint(rp, s).to_decimal(),
                        qe, q, int(ov)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def build_pd_map(res_d: int, res_p: int, policy: str = "exact",
                 rules=None) -> PDRegionMap:
    """Enumerate the P-D plane on a 2^-res_d by 2^-res_p grid.

    Covers d in [1/2, 1) and |rp| <= (8/3)d.
    """
    _check_policy(policy)
    if res_d < 1 or res_p < 0:
        raise ValueError("resolutions are bit counts: res_d >= 1, res_p >= 0")
    tables = _tables_for(policy, rules)
    code = kernel.POLICY_CODES[policy]
    s = max(res_d, res_p) + 2
    sd, sp = 1 << (s - res_d), 1 << (s - res_p)
    pd = PDRegionMap(res_d, res_p, policy, s)
    one = 1 << s
    d = one >> 1
    while d < one:
        kmax = (8 * d) // (3 * sp)
        for k in range(-kmax, kmax + 1):
            rp = k * sp
            qe, q = kernel.select(rp, d, s, code, tables)
            ov = (3 * qe + 1) * d <= 3 * rp <= (3 * qe + 2) * d
            pd.rows.append((d, rp, qe, q, ov))
        d += sd
    return pd


def _tables_for(policy: str, rules):
    if policy != "fuzzy":
        return None
    from .fuzzy import DEFAULT_RULES
    return (rules or DEFAULT_RULES).tables


@dataclass
class ValidationReport:
    cells_checked: int
    violations: list
    policies_compared: tuple
    frac_bits: int = 0
    d_bits: int = 0
    trunc_bits: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "cells_checked": self.cells_checked,
            "violations": [[d.to_decimal(), rp.to_decimal(), q, pn.to_decimal()]
                           for d, rp, q, pn in self.violations],
            "policies_compared": list(self.policies_compared),
            "frac_bits": self.frac_bits,
            "d_bits": self.d_bits,
            "trunc_bits": self.trunc_bits,
        }


def sweep_containment(frac_bits: int, policy: str = "exact",
                      d_bits: int | None = None, trunc_bits: int | None = None,
                      rules=None) -> ValidationReport:
    """Exhaustively check |4p - q*d| <= (2/3)d over the (d, p) grid.

    ``p`` steps by 2^-frac_bits over |p| <= (2/3)d, ``d`` by 2^-d_bits
    (default: same as ``frac_bits``) over [1/2, 1). ``trunc_bits`` only
    affects the ``constants`` policy.
    """
    _check_policy(policy)
    if frac_bits < 8:
        raise ValueError("frac_bits must be >= 8")
    d_bits = frac_bits if d_bits is None else d_bits
    trunc = -1 if trunc_bits is None or policy != "constants" else trunc_bits
    cells, raw_viol, s, _ = kernel.sweep(
        d_bits, frac_bits, kernel.POLICY_CODES[policy],
        _tables_for(policy, rules), trunc)
    violations = [(FixedPoint(d, s), FixedPoint(p << 2, s), q, FixedPoint(pn, s))
                  for d, p, q, pn in raw_viol]
    return ValidationReport(cells, violations, (policy,), frac_bits, d_bits,
                            trunc_bits if policy == "constants" else None)
