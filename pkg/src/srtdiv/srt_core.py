"""Radix-4 SRT recurrence  p[j+1] = 4*p[j] - q[j+1]*d  with full tracing.

Each step computes both candidate remainders (keep the predicted digit, or
take it plus one) before the correction decides between them, the way a
parallel datapath would. The dividend enters as p[0] = x/4 so that
|p[0]| <= (2/3)d holds for every normalized pair and the containment
invariant is checked from the first cycle on.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, Sequence

from .errors import ContainmentViolation
from .fixedpoint import FixedPoint, fp_mul_digit, fp_shl2, fp_shr2, fp_sub
from .fuzzy import fuzzy_decide
from .otf import OtfState, otf_append, otf_finalize
from .qds import (POLICIES, correct_digit_constants, correct_digit_exact,
                  predict_digit)

__all__ = [
    "ContainmentViolation", "CycleTrace", "DivState", "QuotientResult",
    "SrtConfig", "StepCandidates", "estimate_latency", "init", "run_divide",
    "step", "trace_to_csv", "trace_to_json",
]


@dataclass(frozen=True)
class SrtConfig:
    radix: ClassVar[int] = 4
    alpha: ClassVar[int] = 2
    rho: ClassVar[Fraction] = Fraction(2, 3)

    n_iters: int = 29
    policy: str = "exact"
    rules: object = None

    def __post_init__(self):
        if self.n_iters < 1:
            raise ValueError("n_iters must be >= 1")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")


@dataclass(frozen=True)
class StepCandidates:
    p_keep: FixedPoint
    p_inc: FixedPoint


@dataclass(frozen=True)
class CycleTrace:
    j: int
    p_in: FixedPoint
    rp: FixedPoint
    q_est: int
    q_final: int
    p_keep: FixedPoint
    p_inc: FixedPoint
    p_out: FixedPoint
    A_bits: str
    B_bits: str

    def to_dict(self) -> dict:
        out = {}
        for name in TRACE_FIELDS:
            value = getattr(self, name)
            out[name] = value.to_decimal() if isinstance(value, FixedPoint) else value
        return out


@dataclass(frozen=True)
class DivState:
    j: int
    p: FixedPoint
    d: FixedPoint
    cfg: SrtConfig
    p0: FixedPoint
    otf: OtfState = OtfState()
    digits: tuple = ()
    trace: tuple = ()


def _check_normalized(v: FixedPoint, name: str) -> None:
    f = v.frac_bits
    if f < 1 or not (1 << (f - 1)) <= v.raw < (1 << f):
        raise ValueError(f"{name} = {v.to_decimal()} not in [1/2, 1)")


def init(x: FixedPoint, d: FixedPoint, cfg: SrtConfig = SrtConfig()) -> DivState:
    _check_normalized(x, "x")
    _check_normalized(d, "d")
    if min(x.int_bits, d.int_bits) < 2:
        raise ValueError("need at least 2 integer bits to hold 4p")
    p0 = fp_shr2(x)
    return DivState(0, p0, d, cfg, p0)


def candidates(rp: FixedPoint, d: FixedPoint, qe: int) -> StepCandidates:
    return StepCandidates(fp_sub(rp, fp_mul_digit(d, qe)),
                          fp_sub(rp, fp_mul_digit(d, qe + 1)))


def _correct(rp, d, qe, cfg: SrtConfig) -> int:
    if cfg.policy == "exact":
        return correct_digit_exact(rp, d, qe)
    if cfg.policy == "constants":
        return correct_digit_constants(rp, d, qe)
    return fuzzy_decide(rp, d, qe, cfg.rules)


def step(s: DivState) -> DivState:
    d = s.d
    rp = fp_shl2(s.p)
    qe = predict_digit(rp)
    cand = candidates(rp, d, qe)
    q = _correct(rp, d, qe, s.cfg)
    p_out = cand.p_keep if q == qe else cand.p_inc
    otf = otf_append(s.otf, q)
    row = CycleTrace(s.j, s.p, rp, qe, q, cand.p_keep, cand.p_inc, p_out,
                     otf.A_bits, otf.B_bits)
    trace = s.trace + (row,)
    f = max(p_out.frac_bits, d.frac_bits)
    if 3 * abs(p_out.aligned_raw(f)) > 2 * d.aligned_raw(f):
        raise ContainmentViolation(
            f"cycle {s.j}: |p| = {abs(p_out).to_decimal()} > (2/3)d "
            f"with d = {d.to_decimal()}, digit {q}", trace)
    return DivState(s.j + 1, p_out, d, s.cfg, s.p0, otf, s.digits + (q,), trace)


@dataclass(frozen=True)
class QuotientResult:
    digits: tuple
    quotient_bits: str
    remainder: FixedPoint
    d: FixedPoint
    p0: FixedPoint
    trace: tuple = field(default=(), repr=False)

    @property
    def remainder_negative(self) -> bool:
        return self.remainder.raw < 0

    @property
    def quotient(self) -> int:
        """Conventional quotient integer after the remainder-sign fix-up."""
        return int(self.quotient_bits, 2)

    @property
    def corrected_remainder(self) -> FixedPoint:
        return self.remainder + self.d if self.remainder_negative else self.remainder

    def value(self) -> Fraction:
        """Truncated x/d: the fixed-up quotient weighted by 4**(1 - m)."""
        return Fraction(self.quotient, 4 ** (len(self.digits) - 1))

    def reconstruction_holds(self) -> bool:
        """p0 * 4**m == d * sum(q_i 4**(m-i)) + p_m, exactly."""
        m = len(self.digits)
        weighted = 0
        for q in self.digits:
            weighted = 4 * weighted + q
        f = max(self.p0.frac_bits, self.d.frac_bits, self.remainder.frac_bits)
        return (self.p0.aligned_raw(f) * 4 ** m
                == self.d.aligned_raw(f) * weighted + self.remainder.aligned_raw(f))


def run_divide(x: FixedPoint, d: FixedPoint,
               cfg: SrtConfig = SrtConfig()) -> QuotientResult:
    s = init(x, d, cfg)
    for _ in range(cfg.n_iters):
        s = step(s)
    bits = otf_finalize(s.otf, s.p.raw < 0)
    return QuotientResult(s.digits, bits, s.p, d, s.p0, s.trace)


def estimate_latency(cfg: SrtConfig, stage_delays: Sequence[float],
                     overhead: float = 0.0) -> float:
    """Iterations times the slowest per-cycle stage, plus fixed overhead.

    Stages run in parallel within a cycle, so the cycle is as long as the
    slowest one. Units are whatever the caller uses (ns in the CLI).
    """
    delays = list(stage_delays)
    if not delays or any(t <= 0 for t in delays) or overhead < 0:
        raise ValueError("stage delays must be positive and overhead non-negative")
    return cfg.n_iters * max(delays) + overhead


TRACE_FIELDS = ("j", "p_in", "rp", "q_est", "q_final", "p_keep", "p_inc",
                "p_out", "A_bits", "B_bits")


def trace_to_json(trace: Sequence[CycleTrace]) -> str:
    return json.dumps([row.to_dict() for row in trace], indent=1)


def trace_to_csv(trace: Sequence[CycleTrace], meta: str | None = None) -> str:
    buf = io.StringIO()
    if meta:
        buf.write(f"# {meta}\n")
    w = csv.DictWriter(buf, fieldnames=TRACE_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in trace:
        w.writerow(row.to_dict())
    return buf.getvalue()
