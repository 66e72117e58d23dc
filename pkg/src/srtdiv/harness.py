"""Verification campaigns: fuzzing, regression vectors, policy comparison.

Two reference oracles are used:

* :func:`platform_divide` - the host's binary64 division; flags derived from
  IEEE rules plus an exact integer check for inexactness.
* :func:`rational_divide` - exact rational quotient rounded to nearest-even
  with Fraction arithmetic; also yields overflow/underflow flags.

Neither shares code with the SRT datapath.
"""
from __future__ import annotations

import bisect
import hashlib
import json
import math
import random
import struct
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import kernel
from .ieee754 import (CANONICAL_NAN, POS_INF, SIGN_BIT, Flags, fdiv, is_nan,
                      is_signaling_nan)
from .qds import POLICIES, _tables_for

PLATFORM_FLAGS = ("inexact", "divide_by_zero", "invalid", "overflow")
ALL_FLAGS = PLATFORM_FLAGS + ("underflow",)


def bits_to_float(bits: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def float_to_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def _special_result(a: int, b: int):
    """Shared IEEE rules for NaN/infinity/zero operands, or None if finite/finite."""
    x, y = bits_to_float(a), bits_to_float(b)
    if math.isnan(x) or math.isnan(y):
        return CANONICAL_NAN, Flags(invalid=is_signaling_nan(a) or is_signaling_nan(b))
    neg = math.copysign(1.0, x) * math.copysign(1.0, y) < 0
    if math.isinf(x):
        if math.isinf(y):
            return CANONICAL_NAN, Flags(invalid=True)
        return float_to_bits(-math.inf if neg else math.inf), Flags()
    if math.isinf(y):
        return float_to_bits(-0.0 if neg else 0.0), Flags()
    if y == 0.0:
        if x == 0.0:
            return CANONICAL_NAN, Flags(invalid=True)
        return float_to_bits(-math.inf if neg else math.inf), Flags(divide_by_zero=True)
    if x == 0.0:
        return float_to_bits(-0.0 if neg else 0.0), Flags()
    return None


def platform_divide(a: int, b: int) -> tuple[int, Flags]:
    """Host division; ``underflow`` is never reported by this oracle."""
    special = _special_result(a, b)
    if special is not None:
        return special
    x, y = bits_to_float(a), bits_to_float(b)
    r = x / y
    if math.isinf(r):
        return float_to_bits(r), Flags(inexact=True, overflow=True)
    xn, xd = x.as_integer_ratio()
    yn, yd = y.as_integer_ratio()
    rn, rd = r.as_integer_ratio()
    exact = rn * xd * yn == xn * yd * rd
    return float_to_bits(r), Flags(inexact=not exact)


def _round_fraction(v: Fraction, lsb_exp: int) -> tuple[int, bool]:
    n = v / Fraction(2) ** lsb_exp
    fl = n.numerator // n.denominator
    rem = n - fl
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and fl % 2 == 1):
        fl += 1
    return fl, rem != 0


def rational_divide(a: int, b: int) -> tuple[int, Flags]:
    special = _special_result(a, b)
    if special is not None:
        return special
    v = Fraction(bits_to_float(a)) / Fraction(bits_to_float(b))
    neg = v < 0
    v = abs(v)
    e = v.numerator.bit_length() - v.denominator.bit_length()
    if Fraction(2) ** e > v:
        e -= 1
    lsb = max(e, -1022) - 52
    m, inexact = _round_fraction(v, lsb)
    m53, _ = _round_fraction(v, e - 52)
    tiny = m53 * Fraction(2) ** (e - 52) < Fraction(2) ** -1022
    if m * Fraction(2) ** lsb >= Fraction(2) ** 1024:
        bits = POS_INF
        flags = Flags(inexact=True, overflow=True)
    else:
        bits = float_to_bits(math.ldexp(m, lsb))
        flags = Flags(inexact=inexact, underflow=tiny and inexact)
    return bits | (SIGN_BIT if neg else 0), flags


ORACLES = {"platform": (platform_divide, PLATFORM_FLAGS),
           "rational": (rational_divide, ALL_FLAGS)}


def results_match(got, expected, flag_names=ALL_FLAGS) -> bool:
    gb, gf = got
    eb, ef = expected
    if is_nan(gb) or is_nan(eb):
        same = is_nan(gb) and is_nan(eb)
    else:
        same = gb == eb
    return same and all(getattr(gf, n) == getattr(ef, n) for n in flag_names)


@dataclass
class CampaignReport:
    cases_run: int
    mismatches: list
    seed: object
    policy: str
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"cases_run": self.cases_run, "mismatches": self.mismatches,
               "seed": self.seed, "policy": self.policy, "details": self.details}
        if include_timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_json(self, include_timing: bool = False, meta: dict | None = None) -> str:
        """Canonical JSON; leaves out wall_time unless asked, so it is reproducible."""
        doc = self.to_dict(include_timing)
        if meta is not None:
            doc = {"meta": meta, **doc}
        return json.dumps(doc, sort_keys=True, indent=1)


# -- operand generation -------------------------------------------------------

def _word(sign: int, exp: int, frac: int) -> int:
    return (sign << 63) | (exp << 52) | frac


def edge_operands() -> list[int]:
    """Curated specials: zeros, infinities, NaNs, subnormals, powers of two."""
    words = [
        0x0000000000000000, 0x7FF0000000000000,       # +0, +inf
        0x7FF8000000000000, 0x7FF0000000000001,       # qNaN, sNaN
        0x7FFFFFFFFFFFFFFF,                           # qNaN, full payload
        0x0000000000000001, 0x0000000000000002,       # tiny subnormals
        0x0008000000000000, 0x000FFFFFFFFFFFFF,       # mid/max subnormal
        0x0010000000000000, 0x0010000000000001,       # min normal (+1ulp)
        0x7FEFFFFFFFFFFFFF, 0x7FE0000000000000,       # max finite, 2^1023
        0x3FF0000000000000, 0x3FEFFFFFFFFFFFFF,       # 1.0, 1 - ulp
        0x3FF0000000000001, 0x3FF8000000000000,       # 1 + ulp, 1.5
        0x4000000000000000, 0x3FE0000000000000,       # 2.0, 0.5
        0x4008000000000000,                           # 3.0
        0x3CB0000000000000, 0x4340000000000000,       # 2^-52, 2^53
        0x0CB0000000000000, 0x7340000000000000,       # 2^-820, 2^821
    ]
    return words + [w | SIGN_BIT for w in words]


def edge_pairs() -> list[tuple[int, int]]:
    ops = edge_operands()
    return [(a, b) for a in ops for b in ops]


def _ones_run_significand(rng: random.Random) -> int:
    length = rng.randint(6, 40)
    start = rng.randint(0, 52 - length)
    return (((1 << length) - 1) << start) & ((1 << 52) - 1)


def generate_cases(n: int, seed) -> list[tuple[int, int]]:
    """Quarter each: uniform words, near-unity ratios, extreme exponents, specials."""
    rng = random.Random(seed)
    specials = edge_operands()
    cases = []
    for i in range(n):
        kind = i % 4
        if kind == 0:
            a, b = rng.getrandbits(64), rng.getrandbits(64)
        elif kind == 1:
            exp = rng.randint(1, 2046)
            frac = (_ones_run_significand(rng) if rng.random() < 0.5
                    else rng.getrandbits(52))
            delta = rng.choice((1, 2, 3, 1 << rng.randint(0, 30)))
            frac2 = (frac + rng.choice((-1, 1)) * delta) & ((1 << 52) - 1)
            exp2 = min(2046, max(1, exp + rng.choice((-1, 0, 0, 1))))
            a = _word(rng.getrandbits(1), exp, frac)
            b = _word(rng.getrandbits(1), exp2, frac2)
            if rng.random() < 0.5:
                a, b = b, a
        elif kind == 2:
            hi, lo = rng.randint(1900, 2046), rng.randint(0, 150)
            ea, eb = (hi, lo) if rng.random() < 0.5 else (lo, hi)
            if rng.random() < 0.3:
                ea, eb = ea, rng.randint(0x3F0, 0x40F)  # large/small over ~1
            a = _word(rng.getrandbits(1), ea, rng.getrandbits(52))
            b = _word(rng.getrandbits(1), eb, rng.getrandbits(52))
        else:
            def pick():
                r = rng.random()
                if r < 0.4:
                    return rng.choice(specials)
                if r < 0.8:
                    return _word(rng.getrandbits(1), 0, rng.getrandbits(rng.randint(1, 52)))
                return _word(rng.getrandbits(1), rng.randint(0, 2046), 0)
            a = pick()
            b = pick() if rng.random() < 0.7 else rng.getrandbits(64)
            if rng.random() < 0.5:
                a, b = b, a
        cases.append((a, b))
    return cases


# -- campaigns -----------------------------------------------------------------

def run_cases(cases, policy: str = "exact", oracle: str = "platform",
              seed=None, rules=None) -> CampaignReport:
    """Run ``cases`` through fdiv and compare bit-exactly against ``oracle``.

    ``details["digest"]`` hashes every (result, flags) pair in case order, so
    two runs produced identical outputs iff their digests match.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    ref, flag_names = ORACLES[oracle]
    t0 = time.perf_counter()
    h = hashlib.sha256()
    mismatches = []
    count = 0
    for a, b in cases:
        got = fdiv(a, b, policy, rules=rules)
        h.update(struct.pack("<QB", got[0], sum(1 << i for i, n in
                                                enumerate(ALL_FLAGS)
                                                if getattr(got[1], n))))
        expected = ref(a, b)
        if not results_match(got, expected, flag_names):
            mismatches.append({
                "a": f"{a:016X}", "b": f"{b:016X}",
                "got": f"{got[0]:016X}", "got_flags": str(got[1]),
                "expected": f"{expected[0]:016X}", "expected_flags": str(expected[1]),
            })
        count += 1
    return CampaignReport(count, mismatches, seed, policy,
                          time.perf_counter() - t0,
                          {"oracle": oracle, "digest": h.hexdigest(),
                           "backend": kernel.BACKEND})


def fuzz_divide(n: int, seed=0, policy: str = "exact", oracle: str = "platform",
                rules=None) -> CampaignReport:
    if n < 1:
        raise ValueError("n must be >= 1")
    return run_cases(generate_cases(n, seed), policy, oracle, seed, rules)


# -- regression files -----------------------------------------------------------

class RegressionFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionVector:
    label: str
    a_bits: int
    b_bits: int
    expected_bits: int
    expected_flags: Flags

    def line(self) -> str:
        return (f"{self.label} {self.a_bits:016X} {self.b_bits:016X} "
                f"{self.expected_bits:016X} {self.expected_flags}")


def parse_regressions(text: str) -> list[RegressionVector]:
    vectors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 5:
            raise RegressionFormatError(
                f"line {lineno}: expected 'label a_hex b_hex expected_hex flags'")
        label, a, b, e, flags = parts
        try:
            words = [int(w, 16) for w in (a, b, e)]
            if any(not 0 <= w < 1 << 64 for w in words):
                raise ValueError("word wider than 64 bits")
            vectors.append(RegressionVector(label, *words, Flags.parse(flags)))
        except ValueError as exc:
            raise RegressionFormatError(f"line {lineno}: {exc}") from None
    return vectors


def load_regressions(path) -> list[RegressionVector]:
    return parse_regressions(Path(path).read_text())


def run_regressions(path, policies=POLICIES) -> CampaignReport:
    """Every vector under every policy; one mismatch entry per failing vector."""
    vectors = load_regressions(path)
    t0 = time.perf_counter()
    mismatches = []
    for v in vectors:
        bad = {}
        for policy in policies:
            got = fdiv(v.a_bits, v.b_bits, policy)
            if not results_match(got, (v.expected_bits, v.expected_flags)):
                bad[policy] = [f"{got[0]:016X}", str(got[1])]
        if bad:
            mismatches.append({"label": v.label, "a": f"{v.a_bits:016X}",
                               "b": f"{v.b_bits:016X}",
                               "expected": f"{v.expected_bits:016X}",
                               "expected_flags": str(v.expected_flags),
                               "got": bad})
    return CampaignReport(len(vectors), mismatches, None, ",".join(policies),
                          time.perf_counter() - t0, {"file": Path(path).name})


FDIV_PAIRS = ((4195835, 3145727), (5505001, 294911), (4.999999, 14.999999),
              (1.0, 3.0), (3.0, 3.0))


def generate_fdiv_vectors() -> list[RegressionVector]:
    """Pentium-style vectors, expected values from :func:`rational_divide`.

    Divisor significands carry long runs of ones at several offsets; each is
    divided by near-unity neighbours, by itself and by a few fixed dividends.
    """
    pairs = []
    for i, (x, y) in enumerate(FDIV_PAIRS):
        pairs.append((f"classic{i}", float_to_bits(float(x)), float_to_bits(float(y))))
    for length in range(6, 51, 4):
        for offset in (0, 1, 7, 19):
            if offset + length > 52:
                continue
            frac = ((1 << length) - 1) << (52 - offset - length)
            d = _word(0, 1023, frac)
            for delta in (-(1 << 20), -3, -1, 0, 1, 2, 1 << 10):
                num = _word(0, 1023, (frac + delta) & ((1 << 52) - 1))
                pairs.append((f"run{length}_off{offset}_d{delta}", num, d))
            pairs.append((f"run{length}_off{offset}_one", 0x3FF0000000000000, d))
            pairs.append((f"run{length}_off{offset}_sub", 0x000FFFFFFFFFFFFF, d))
    vectors = []
    for label, a, b in pairs:
        bits, flags = rational_divide(a, b)
        vectors.append(RegressionVector(label, a, b, bits, flags))
    return vectors


def format_regressions(vectors, meta: str | None = None) -> str:
    head = [f"# {meta}"] if meta else []
    head.append("# label a_hex b_hex expected_hex flags")
    return "\n".join(head + [v.line() for v in vectors]) + "\n"


FDIV_VECTOR_FILE = Path(__file__).with_name("data") / "fdiv_vectors.txt"


# -- policy comparison -----------------------------------------------------------

def _random_normal_pair(rng: random.Random) -> tuple[int, int]:
    return (_word(rng.getrandbits(1), rng.randint(900, 1100), rng.getrandbits(52)),
            _word(rng.getrandbits(1), rng.randint(900, 1100), rng.getrandbits(52)))


def compare_policies(frac_bits: int, d_bits: int | None = None,
                     n_divides: int = 2000, seed=0, rules=None) -> CampaignReport:
    """Cross-check the three corrections cell by cell and on full divides.

    A mismatch is any of: a containment violation, a disagreement outside
    the overlap band, or different rounded quotients for the same operands.
    """
    if frac_bits < 8:
        raise ValueError("frac_bits must be >= 8")
    d_bits = frac_bits if d_bits is None else d_bits
    t0 = time.perf_counter()
    choices = {}
    violations = {}
    scale = None
    for policy in POLICIES:
        cells, viol, scale, rec = kernel.sweep(
            d_bits, frac_bits, kernel.POLICY_CODES[policy],
            _tables_for(policy, rules), -1, True)
        choices[policy] = rec
        violations[policy] = len(viol)
    mismatches = [{"kind": "containment", "policy": p, "count": n}
                  for p, n in violations.items() if n]

    # index -> (d, p) lookup over the d-major enumeration
    sd, sp = 1 << (scale - d_bits), 1 << (scale - frac_bits)
    starts, rows = [], []
    idx, d = 0, 1 << (scale - 1)
    while d < 1 << scale:
        kmax = (2 * d) // (3 * sp)
        starts.append(idx)
        rows.append((d, kmax))
        idx += 2 * kmax + 1
        d += sd
    half = 1 << (scale - 1)

    def cell(i):
        r = bisect.bisect_right(starts, i) - 1
        d, kmax = rows[r]
        rp = ((i - starts[r]) - kmax) * sp * 4
        qe = 1 if rp >= half else 0 if rp >= 0 else -1 if rp >= -half else -2
        return d, rp, qe

    pairs = {}
    names = list(POLICIES)
    for i, p1 in enumerate(names):
        for p2 in names[i + 1:]:
            c1, c2 = choices[p1], choices[p2]
            differing = outside = 0
            if c1 != c2:
                for k in range(len(c1)):
                    if c1[k] != c2[k]:
                        differing += 1
                        d, rp, qe = cell(k)
                        r = rp - qe * d
                        if not d <= 3 * r <= 2 * d:
                            outside += 1
                            if outside <= 20:
                                mismatches.append({"kind": "outside_band",
                                                   "pair": f"{p1}/{p2}",
                                                   "d": d, "rp": rp, "scale": scale})
            pairs[f"{p1}/{p2}"] = {"differing_cells": differing,
                                   "outside_band": outside}

    rng = random.Random(seed)
    for _ in range(n_divides):
        a, b = _random_normal_pair(rng)
        results = {p: fdiv(a, b, p, rules=rules) for p in POLICIES}
        ref = results["exact"]
        for p in POLICIES[1:]:
            if not results_match(results[p], ref):
                mismatches.append({"kind": "quotient", "policy": p,
                                   "a": f"{a:016X}", "b": f"{b:016X}"})
    return CampaignReport(len(choices["exact"]), mismatches, seed, ",".join(POLICIES),
                          time.perf_counter() - t0,
                          {"frac_bits": frac_bits, "d_bits": d_bits,
                           "pairs": pairs, "violations": violations,
                           "divides": n_divides})
