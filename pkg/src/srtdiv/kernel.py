"""Select the compiled kernel when it is importable, else the pure-Python one.

Set ``SRTDIV_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernel

if os.environ.get("SRTDIV_PURE_PYTHON") == "1":
    _impl = _pykernel
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = _pykernel

BACKEND = _impl.BACKEND
EXACT, CONSTANTS, FUZZY = _impl.EXACT, _impl.CONSTANTS, _impl.FUZZY
FuzzyTables = _impl.FuzzyTables
pwl = _impl.pwl
band_position = _impl.band_position
fuzzy_centroid = _impl.fuzzy_centroid
fuzzy_increment = _impl.fuzzy_increment
select = _impl.select
divide = _impl.divide
sweep = _impl.sweep

POLICY_CODES = {"exact": EXACT, "constants": CONSTANTS, "fuzzy": FUZZY}
