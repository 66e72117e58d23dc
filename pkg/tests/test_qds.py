from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srtdiv.fixedpoint import FixedPoint, fp_add
from srtdiv.qds import (SelectionError, build_pd_map, correct_digit_constants,
                        correct_digit_exact, in_overlap, predict_digit,
                        select_digit, sweep_containment)

from conftest import fx, near


def valid_digits(rp, d):
    """Containment oracle: every digit whose next remainder stays in +-(2/3)d."""
    r, dv = rp.to_fraction(), d.to_fraction()
    return {q for q in range(-2, 3) if abs(r - q * dv) <= Fraction(2, 3) * dv}


@pytest.mark.parametrize("rp, qe", [(0.75, 1), (0.25, 0), (-0.25, -1), (-2.0, -2),
                                    (0.5, 1), (-0.5, -1), (0, 0)])
def test_predict(rp, qe):
    assert predict_digit(fx(rp)) == qe


def test_predict_rejects_out_of_range():
    with pytest.raises(SelectionError):
        predict_digit(fx(3))


def test_exact_examples():
    assert valid_digits(fx(1.5), fx(0.75)) == {2}
    assert correct_digit_exact(fx(1.5), fx(0.75), 1) == 2
    assert 0 in valid_digits(fx(0.25), fx(0.5))
    assert correct_digit_exact(fx(0.25), fx(0.5), 0) == 0
    assert correct_digit_exact(fx(0), fx(0.5), 0) == 0


@pytest.mark.parametrize("rp, d, expected", [("0.3", "0.6", 1), ("0.6", "0.8", 1),
                                             ("0.1", "0.9", 0)])
def test_constants_examples(rp, d, expected):
    rp, d = near(rp), near(d)
    assert expected in valid_digits(rp, d)
    assert correct_digit_constants(rp, d, 0) == expected


def test_constants_truncation_floors_residual():
    # residual 0.25 - 2**-20 reads as 0.25 - 2**-4 at 4 bits: below C1
    rp = fx(Fraction(1, 4) - Fraction(1, 2 ** 20))
    assert correct_digit_constants(rp, fx(0.5), 0) == 0
    assert correct_digit_constants(fx(0.25), fx(0.5), 0, trunc_bits=4) == 1


def test_select_examples():
    assert select_digit(fx(0.75), fx(0.75), "exact") == (1, 1)
    for policy in ("exact", "constants", "fuzzy"):
        assert select_digit(fx(0), fx(0.75), policy) == (0, 0)
    assert select_digit(near("0.3"), near("0.6"), "constants") == (0, 1)


def test_select_rejects_bad_inputs():
    with pytest.raises(ValueError):
        select_digit(fx(0), fx(0.75), "nearest")
    with pytest.raises(SelectionError):
        select_digit(fx(0), fx(1.0), "exact")


def test_fuzzy_tie_keeps():
    rp = near("0.3")
    d = fp_add(rp, rp)
    assert select_digit(rp, d, "fuzzy") == (0, 0)


d_grid = st.integers(1 << 11, (1 << 12) - 1).map(lambda r: FixedPoint(r, 12))


@st.composite
def operands(draw):
    d = draw(d_grid)
    lim = (8 * d.raw) // 3
    return FixedPoint(draw(st.integers(-lim, lim)), 12), d


@given(operands(), st.sampled_from(["exact", "constants", "fuzzy"]))
def test_selection_is_always_contained(op, policy):
    rp, d = op
    qe, q = select_digit(rp, d, policy)
    assert q in (qe, qe + 1)
    assert q in valid_digits(rp, d)


@given(operands())
def test_policies_agree_outside_the_band(op):
    rp, d = op
    qe = predict_digit(rp)
    choices = {select_digit(rp, d, p)[1] for p in ("exact", "constants", "fuzzy")}
    if not in_overlap(rp, d, qe):
        assert len(choices) == 1


@given(d_grid, st.integers(-(1 << 14), 1 << 14), st.integers(0, 1 << 10))
def test_exact_is_monotone_in_rp(d, a, step):
    lim = (8 * d.raw) // 3
    a = max(-lim, min(lim, a // 4))
    b = min(lim, a + step)
    assert (select_digit(FixedPoint(a, 12), d)[1]
            <= select_digit(FixedPoint(b, 12), d)[1])


def test_pd_map_cells():
    pd = build_pd_map(5, 5, "exact")
    cells = {(c[0], c[1]): c for c in map(pd.cell, pd.rows)}
    assert cells[(fx(0.5), fx(0))][2:] == (0, 0, False)
    assert in_overlap(near("0.3"), near("0.6"), 0)
    for d, rp, qe, q, ov in map(pd.cell, pd.rows):
        assert abs(rp.to_fraction()) <= Fraction(8, 3) * d.to_fraction()
        assert q in valid_digits(rp, d)
        assert ov == in_overlap(rp, d, qe)


def test_pd_map_csv(tmp_path):
    pd = build_pd_map(3, 3, "constants")
    text = pd.to_csv()
    lines = text.splitlines()
    assert lines[0] == "d,rp,q_est,q_final,in_overlap"
    assert len(lines) == len(pd.rows) + 1
    assert "0.5,0,0,0,0" in lines
    with open(tmp_path / "m.csv", "w") as fh:
        pd.write_csv(fh, meta="pdmap res 3")
    assert (tmp_path / "m.csv").read_text().startswith("# pdmap res 3\n")


@pytest.mark.parametrize("policy", ["exact", "constants", "fuzzy"])
def test_sweep_frac_bits_10(policy):
    report = sweep_containment(10, policy)
    assert report.ok and report.cells_checked > 0
    assert report.to_dict()["violations"] == []


def test_sweep_cell_count_matches_enumeration():
    # independent count of |p| <= 2d/3 over the grid
    n = 0
    for draw in range(1 << 7, 1 << 8):
        d = Fraction(draw, 1 << 8)
        kmax = int(Fraction(2, 3) * d * (1 << 8))
        n += 2 * kmax + 1
    assert sweep_containment(8, "exact").cells_checked == n


def test_truncated_constants_fail_when_too_coarse():
    assert sweep_containment(10, "constants", trunc_bits=6).ok
    assert not sweep_containment(10, "constants", trunc_bits=1).ok


def test_sweep_argument_checks():
    with pytest.raises(ValueError):
        sweep_containment(4)
    with pytest.raises(ValueError):
        sweep_containment(10, "bogus")
