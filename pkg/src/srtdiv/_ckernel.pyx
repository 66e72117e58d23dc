# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pykernel; same signatures, same results bit for bit."""
from array import array

from . import _pykernel
from .errors import ContainmentViolation

BACKEND = "cython"

cdef enum:
    C_EXACT = 0
    C_CONSTANTS = 1
    C_FUZZY = 2

EXACT, CONSTANTS, FUZZY = C_EXACT, C_CONSTANTS, C_FUZZY

ctypedef long long i64


cdef class FuzzyTables:
    cdef readonly object keep_x, keep_mu, inc_x, inc_mu, ys, out_keep, out_inc
    cdef double[::1] _kx, _km, _ix, _im, _ys, _ok, _oi
    cdef Py_ssize_t _n

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
        self._kx = array("d", self.keep_x)
        self._km = array("d", self.keep_mu)
        self._ix = array("d", self.inc_x)
        self._im = array("d", self.inc_mu)
        self._ys = array("d", self.ys)
        self._ok = array("d", self.out_keep)
        self._oi = array("d", self.out_inc)
        self._n = len(self.ys)


cdef inline double _pwl(double[::1] xs, double[::1] mus, double x) noexcept:
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef double x0, m0
    if x <= xs[0]:
        return mus[0]
    for i in range(1, n):
        if x <= xs[i]:
            x0 = xs[i - 1]
            m0 = mus[i - 1]
            return m0 + (x - x0) * (mus[i] - m0) / (xs[i] - x0)
    return mus[n - 1]


def pwl(xs, mus, double x):
    return _pwl(array("d", xs), array("d", mus), x)


cdef inline double _band_position(i64 r, i64 d) noexcept:
    cdef double u = <double>(3 * r - d) / <double>d
    if u < 0.0:
        return 0.0
    if u > 1.0:
        return 1.0
    return u


def band_position(r, d):
    if abs(r) < _LIMIT and 0 < d < _LIMIT:
        return _band_position(r, d)
    return _pykernel.band_position(r, d)


cdef double _centroid(FuzzyTables t, double u) except? -1.0:
    cdef double mk = _pwl(t._kx, t._km, u)
    cdef double mi = _pwl(t._ix, t._im, u)
    cdef double num = 0.0, den = 0.0, a, b
    cdef const double *ys = &t._ys[0]
    cdef const double *ok = &t._ok[0]
    cdef const double *oi = &t._oi[0]
    cdef Py_ssize_t i
    for i in range(t._n):
        a = ok[i] if ok[i] < mk else mk
        b = oi[i] if oi[i] < mi else mi
        if b > a:
            a = b
        num += ys[i] * a
        den += a
    if den <= 0.0:
        raise ValueError("aggregate output is empty; no rule fired")
    return num / den


def fuzzy_centroid(FuzzyTables tables, double u):
    return _centroid(tables, u)


def fuzzy_increment(FuzzyTables tables, double u):
    return _centroid(tables, u) > 0.5


cdef int _select(i64 rp, i64 d, int scale, int policy, FuzzyTables t,
                 int trunc_bits, int *qe_out) except -9:
    cdef i64 half = (<i64>1) << (scale - 1)
    cdef i64 r, c
    cdef int qe, drop
    cdef bint inc
    if rp >= half:
        qe = 1
    elif rp >= 0:
        qe = 0
    elif rp >= -half:
        qe = -1
    else:
        qe = -2
    r = rp - qe * d
    if policy == C_EXACT:
        inc = 3 * r > 2 * d
    elif policy == C_CONSTANTS:
        if 0 <= trunc_bits < scale:
            drop = scale - trunc_bits
            r = (r >> drop) << drop
        c = ((<i64>1) << (scale - 2)) if d < ((<i64>3) << (scale - 2)) else half
        inc = r >= c
    elif policy == C_FUZZY:
        if t is None:
            raise ValueError("fuzzy policy needs rule tables")
        inc = _centroid(t, _band_position(r, d)) > 0.5
    else:
        raise ValueError(f"unknown policy code {policy}")
    qe_out[0] = qe
    return qe + 1 if inc else qe


_LIMIT = 1 << 58


cdef bint _fits(object v):
    return -_LIMIT < v < _LIMIT


def select(rp, d, int scale, int policy, tables=None, int trunc_bits=-1):
    cdef int qe = 0, q
    if scale > 58 or not (_fits(rp) and _fits(d)):
        return _pykernel.select(rp, d, scale, policy, tables, trunc_bits)
    q = _select(rp, d, scale, policy, tables, trunc_bits, &qe)
    return qe, q


def divide(x, d, int scale, int m, int policy, tables=None):
    top = (<object>1) << scale  # a C int shift would overflow
    if scale > 56 or m > 31 or not (0 < x < top and 0 < d < top):
        return _pykernel.divide(x, d, scale, m, policy, tables)
    cdef int s = scale + 2, j, q, qe = 0
    cdef i64 p = x, dd = (<i64>d) << 2, rp, p_keep
    cdef unsigned long long a = 0, b = 0, na
    cdef FuzzyTables t = tables
    for j in range(m):
        rp = p << 2
        q = _select(rp, dd, s, policy, t, -1, &qe)
        p_keep = rp - qe * dd
        p = p_keep if q == qe else p_keep - dd
        if 3 * (p if p >= 0 else -p) > 2 * dd:
            raise ContainmentViolation(
                f"|p| > 2d/3 after digit {q} (x={x}, d={d}, scale={scale})")
        if q >= 0:
            na = (a << 2) | <unsigned long long>q
        else:
            na = (b << 2) | <unsigned long long>(4 + q)
        if q >= 1:
            b = (a << 2) | <unsigned long long>(q - 1)
        else:
            b = (b << 2) | <unsigned long long>(3 + q)
        a = na
    return a, b, p


def sweep(int d_bits, int p_bits, int policy, tables=None, int trunc_bits=-1,
          bint record=False):
    cdef int s = max(d_bits, p_bits) + 2
    if s > 56:
        return _pykernel.sweep(d_bits, p_bits, policy, tables, trunc_bits, record)
    cdef i64 sd = (<i64>1) << (s - d_bits)
    cdef i64 sp = (<i64>1) << (s - p_bits)
    cdef i64 one = (<i64>1) << s
    cdef i64 d, k, kmax, p, rp, pn, cells = 0
    cdef int q, qe = 0
    cdef FuzzyTables t = tables
    violations = []
    choices = bytearray()
    d = one >> 1
    while d < one:
        kmax = (2 * d) // (3 * sp)
        for k in range(-kmax, kmax + 1):
            p = k * sp
            rp = p << 2
            q = _select(rp, d, s, policy, t, trunc_bits, &qe)
            pn = rp - q * d
            if 3 * (pn if pn >= 0 else -pn) > 2 * d:
                violations.append((d, p, q, pn))
            if record:
                choices.append(q + 2)
        cells += 2 * kmax + 1
        d += sd
    return cells, violations, s, bytes(choices)
