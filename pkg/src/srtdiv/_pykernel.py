"""Pure-Python kernels: digit selection, significand recurrence, grid sweep.

All quantities are integers in units of ``2**-scale``. ``_ckernel.pyx`` is a
line-for-line compiled twin; both must keep the same float operation order in
the fuzzy path so decisions agree bit for bit.
"""
from .errors import ContainmentViolation

BACKEND = "python"

EXACT, CONSTANTS, FUZZY = 0, 1, 2


class FuzzyTables:
    """Pre-sampled rule set handed to the kernels."""

    def __init__(self, keep_x, keep_mu, inc_x, inc_mu, ys, out_keep, out_inc):
        self.keep_x = tuple(keep_x)
        self.keep_mu = tuple(keep_mu)
        self.inc_x = tuple(inc_x)
        self.inc_mu = tuple(inc_mu)
        self.ys = tuple(ys)
        self.out_keep = tuple(out_keep)
        self.out_inc = tuple(out_inc)
        if not (len(self.ys) == len(self.out_keep) == len(self.out_inc)):
            raise ValueError("output samples must match the y grid")


def pwl(xs, mus, x):
    if x <= xs[0]:
        return mus[0]
    for i in range(1, len(xs)):
        if x <= xs[i]:
            x0 = xs[i - 1]
            m0 = mus[i - 1]
            return m0 + (x - x0) * (mus[i] - m0) / (xs[i] - x0)
    return mus[-1]


def band_position(r, d):
    """Clamped position of residual ``r`` inside the band [d/3, 2d/3]."""
    u = float(3 * r - d) / float(d)
    if u < 0.0:
        return 0.0
    if u > 1.0:
        return 1.0
    return u


def fuzzy_centroid(tables, u):
    mk = pwl(tables.keep_x, tables.keep_mu, u)
    mi = pwl(tables.inc_x, tables.inc_mu, u)
    ys, ok, oi = tables.ys, tables.out_keep, tables.out_inc
    num = 0.0
    den = 0.0
    for i in range(len(ys)):
        a = ok[i] if ok[i] < mk else mk
        b = oi[i] if oi[i] < mi else mi
        if b > a:
            a = b
        num += ys[i] * a
        den += a
    if den <= 0.0:
        raise ValueError("aggregate output is empty; no rule fired")
    return num / den


def fuzzy_increment(tables, u):
    return fuzzy_centroid(tables, u) > 0.5


def select(rp, d, scale, policy, tables=None, trunc_bits=-1):
    """Return ``(q_est, q)`` for shifted remainder ``rp`` and divisor ``d``."""
    half = 1 << (scale - 1)
    if rp >= half:
        qe = 1
    elif rp >= 0:
        qe = 0
    elif rp >= -half:
        qe = -1
    else:
        qe = -2
    r = rp - qe * d
    if policy == EXACT:
        inc = 3 * r > 2 * d
    elif policy == CONSTANTS:
        if 0 <= trunc_bits < scale:
            drop = scale - trunc_bits
            r = (r >> drop) << drop
        c = (1 << (scale - 2)) if d < (3 << (scale - 2)) else half
        inc = r >= c
    elif policy == FUZZY:
        if tables is None:
            raise ValueError("fuzzy policy needs rule tables")
        inc = fuzzy_increment(tables, band_position(r, d))
    else:
        raise ValueError(f"unknown policy code {policy}")
    return qe, qe + 1 if inc else qe


def divide(x, d, scale, m, policy, tables=None):
    """Run ``m`` radix-4 steps on significands ``x, d`` in [1/2, 1).

    Returns ``(A, B, p_m)``: the on-the-fly registers and the final remainder
    in units of ``2**-(scale + 2)`` (the dividend enters pre-shifted by 1/4).
    """
    s = scale + 2
    p = x
    dd = d << 2
    a = 0
    b = 0
    for _ in range(m):
        rp = p << 2
        qe, q = select(rp, dd, s, policy, tables)
        p_keep = rp - qe * dd
        p_inc = p_keep - dd
        p = p_keep if q == qe else p_inc
        if 3 * abs(p) > 2 * dd:
            raise ContainmentViolation(
                f"|p| > 2d/3 after digit {q} (x={x}, d={d}, scale={scale})")
        if q >= 0:
            na = (a << 2) | q
        else:
            na = (b << 2) | (4 + q)
        if q >= 1:
            b = (a << 2) | (q - 1)
        else:
            b = (b << 2) | (3 + q)
        a = na
    return a, b, p


def sweep(d_bits, p_bits, policy, tables=None, trunc_bits=-1, record=False):
    """Check containment on every (d, p) grid cell with |p| <= 2d/3.

    Returns ``(cells, violations, scale, choices)``; ``choices`` holds q + 2
    per cell in enumeration order (d ascending, then p ascending) when
    ``record`` is set.
    """
    s = max(d_bits, p_bits) + 2
    sd = 1 << (s - d_bits)
    sp = 1 << (s - p_bits)
    one = 1 << s
    cells = 0
    violations = []
    choices = bytearray()
    d = one >> 1
    while d < one:
        kmax = (2 * d) // (3 * sp)
        for k in range(-kmax, kmax + 1):
            p = k * sp
            rp = p << 2
            _, q = select(rp, d, s, policy, tables, trunc_bits)
            pn = rp - q * d
            if 3 * abs(pn) > 2 * d:
                violations.append((d, p, q, pn))
            if record:
                choices.append(q + 2)
        cells += 2 * kmax + 1
        d += sd
    return cells, violations, s, bytes(choices)
