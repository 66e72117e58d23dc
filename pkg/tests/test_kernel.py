import os
import random
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srtdiv import _pykernel, kernel
from srtdiv.fuzzy import DEFAULT_RULES

try:
    from srtdiv import _ckernel
except ImportError:  # pure-Python install
    _ckernel = None

needs_c = pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")


def tables_for(mod):
    t = DEFAULT_RULES.tables
    return mod.FuzzyTables(t.keep_x, t.keep_mu, t.inc_x, t.inc_mu, t.ys,
                           t.out_keep, t.out_inc)


def test_backend_selection():
    expected = "python" if _ckernel is None else "cython"
    if os.environ.get("SRTDIV_PURE_PYTHON") == "1":
        expected = "python"
    assert kernel.BACKEND == expected


def test_env_var_forces_fallback():
    env = dict(os.environ, SRTDIV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from srtdiv import kernel; print(kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_c
@given(st.integers(1 << 13, (1 << 14) - 1), st.integers(-(1 << 15), 1 << 15),
       st.sampled_from([0, 1, 2]), st.integers(-1, 14))
def test_select_identical(d, rp, policy, trunc):
    lim = (8 * d) // 3
    rp = max(-lim, min(lim, rp))
    args = (rp, d, 14, policy)
    assert (_ckernel.select(*args, tables_for(_ckernel), trunc)
            == _pykernel.select(*args, tables_for(_pykernel), trunc))


@needs_c
@pytest.mark.parametrize("policy", [0, 1, 2])
def test_divide_identical(policy):
    rng = random.Random(policy)
    tc, tp = tables_for(_ckernel), tables_for(_pykernel)
    for _ in range(500):
        x = rng.randrange(1 << 52, 1 << 53)
        d = rng.randrange(1 << 52, 1 << 53)
        assert (_ckernel.divide(x, d, 53, 29, policy, tc)
                == _pykernel.divide(x, d, 53, 29, policy, tp))


@needs_c
def test_divide_falls_back_for_wide_operands():
    x, d = 3 << 98, 5 << 97
    assert _ckernel.divide(x, d, 100, 40, 0) == _pykernel.divide(x, d, 100, 40, 0)


@needs_c
@pytest.mark.parametrize("policy", [0, 1, 2])
def test_sweep_identical(policy):
    c = _ckernel.sweep(7, 9, policy, tables_for(_ckernel), -1, True)
    p = _pykernel.sweep(7, 9, policy, tables_for(_pykernel), -1, True)
    assert c == p


@needs_c
@given(st.floats(0.0, 1.0))
def test_centroid_identical(u):
    assert (_ckernel.fuzzy_centroid(tables_for(_ckernel), u)
            == _pykernel.fuzzy_centroid(tables_for(_pykernel), u))


@needs_c
@given(st.integers(-(1 << 60), 1 << 60), st.integers(1, 1 << 60))
def test_band_position_identical(r, d):
    assert _ckernel.band_position(r, d) == _pykernel.band_position(r, d)


def test_fuzzy_needs_tables():
    with pytest.raises(ValueError):
        kernel.select(0, 1 << 11, 12, kernel.FUZZY, None)
