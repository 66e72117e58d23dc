"""Mamdani resolver for the overlap band.

The residual ``rp - q_est*d`` is mapped onto u in [0, 1] across the band
[d/3, 2d/3] where both ``q_est`` and ``q_est + 1`` are valid. Two rules fire:

    IF u is KEEP THEN y is KEEP_OUT
    IF u is INC  THEN y is INC_OUT

Outputs are clipped by rule strength (min), merged (max) and reduced to a
centroid y*. The digit is incremented when y* > 1/2.

The centroid is sampled on cell midpoints (i + 1/2)/n. Those points are dyadic
and symmetric about 1/2, so a perfectly balanced aggregate gives exactly 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from . import kernel
from ._pykernel import pwl
from .fixedpoint import FixedPoint
from .qds import SelectionError


@dataclass(frozen=True)
class MembershipFn:
    breakpoints: tuple

    def __post_init__(self):
        pts = tuple((float(x), float(mu)) for x, mu in self.breakpoints)
        if not pts:
            raise ValueError("membership function needs at least one breakpoint")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x1 > x0:
                raise ValueError("breakpoint x values must be strictly increasing")
        if any(not 0.0 <= mu <= 1.0 for _, mu in pts):
            raise ValueError("membership values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def xs(self):
        return tuple(x for x, _ in self.breakpoints)

    @property
    def mus(self):
        return tuple(mu for _, mu in self.breakpoints)

    def __call__(self, x: float) -> float:
        return pwl(self.xs, self.mus, x)


@dataclass(frozen=True)
class FuzzyRuleSet:
    input_keep: MembershipFn = MembershipFn(((0.0, 1.0), (1.0, 0.0)))
    input_inc: MembershipFn = MembershipFn(((0.0, 0.0), (1.0, 1.0)))
    output_keep: MembershipFn = MembershipFn(((0.0, 1.0), (0.5, 0.0)))
    output_inc: MembershipFn = MembershipFn(((0.5, 0.0), (1.0, 1.0)))
    grid_n: int = 256

    def __post_init__(self):
        if self.grid_n < 64:
            raise ValueError("grid_n must be >= 64")

    @cached_property
    def ys(self) -> tuple:
        n = self.grid_n
        return tuple((i + 0.5) / n for i in range(n))

    @cached_property
    def tables(self):
        ys = self.ys
        return kernel.FuzzyTables(
            self.input_keep.xs, self.input_keep.mus,
            self.input_inc.xs, self.input_inc.mus,
            ys, [self.output_keep(y) for y in ys], [self.output_inc(y) for y in ys])

    def is_complementary(self, points: int = 1025) -> bool:
        return all(abs(self.input_keep(u) + self.input_inc(u) - 1.0) <= 1e-12
                   for u in (i / (points - 1) for i in range(points)))


DEFAULT_RULES = FuzzyRuleSet()

_RULE_NAMES = ("input_keep", "input_inc", "output_keep", "output_inc")


def parse_rules(text: str) -> FuzzyRuleSet:
    """Parse ``name: x0,mu0; x1,mu1; ...`` lines (plus optional ``grid_n: N``).

    Names not given keep their defaults; ``#`` starts a comment.
    """
    fields = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":")
        name = name.strip()
        if not sep:
            raise ValueError(f"line {lineno}: expected 'name: points'")
        if name == "grid_n":
            fields[name] = int(body)
            continue
        if name not in _RULE_NAMES:
            raise ValueError(f"line {lineno}: unknown membership function {name!r}")
        try:
            pts = [tuple(float(v) for v in pair.split(","))
                   for pair in body.split(";") if pair.strip()]
            fields[name] = MembershipFn(tuple(pts))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return FuzzyRuleSet(**fields)


def load_rules(path) -> FuzzyRuleSet:
    return parse_rules(Path(path).read_text())


def format_rules(rules: FuzzyRuleSet) -> str:
    lines = []
    for name in _RULE_NAMES:
        fn = getattr(rules, name)
        pts = "; ".join(f"{x!r},{mu!r}" for x, mu in fn.breakpoints)
        lines.append(f"{name}: {pts}")
    lines.append(f"grid_n: {rules.grid_n}")
    return "\n".join(lines) + "\n"


def normalize_residual(rp: FixedPoint, d: FixedPoint, qe: int) -> float:
    f = max(rp.frac_bits, d.frac_bits, 1)
    dv = d.aligned_raw(f)
    if not (1 << (f - 1)) <= dv < (1 << f):
        raise SelectionError(f"divisor {d.to_decimal()} outside [1/2, 1)")
    return kernel.band_position(rp.aligned_raw(f) - qe * dv, dv)


def fuzzify(u: float, rules: FuzzyRuleSet = DEFAULT_RULES) -> tuple[float, float]:
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u = {u} outside [0, 1]")
    return rules.input_keep(u), rules.input_inc(u)


@dataclass(frozen=True)
class Aggregate:
    ys: tuple
    mus: tuple = field(repr=False)


def mamdani_aggregate(mu_keep: float, mu_inc: float,
                      rules: FuzzyRuleSet = DEFAULT_RULES) -> Aggregate:
    if not (0.0 <= mu_keep <= 1.0 and 0.0 <= mu_inc <= 1.0):
        raise ValueError("rule strengths must lie in [0, 1]")
    t = rules.tables
    mus = []
    for ok, oi in zip(t.out_keep, t.out_inc):
        a = ok if ok < mu_keep else mu_keep
        b = oi if oi < mu_inc else mu_inc
        mus.append(b if b > a else a)
    return Aggregate(rules.ys, tuple(mus))


def defuzzify_centroid(samples: Aggregate) -> float:
    num = 0.0
    den = 0.0
    for y, mu in zip(samples.ys, samples.mus):
        num += y * mu
        den += mu
    if den <= 0.0:
        raise ValueError("aggregate output is empty; no rule fired")
    return num / den


def fuzzy_decide(rp: FixedPoint, d: FixedPoint, qe: int,
                 rules: FuzzyRuleSet | None = None) -> int:
    """Return ``qe`` or ``qe + 1``; ties (y* == 1/2) keep ``qe``."""
    u = normalize_residual(rp, d, qe)
    return qe + 1 if kernel.fuzzy_increment((rules or DEFAULT_RULES).tables, u) else qe
