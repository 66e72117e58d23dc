import pytest
from hypothesis import given
from hypothesis import strategies as st

from srtdiv.otf import OtfState, otf_append, otf_finalize, otf_from_digits, otf_value


def weighted(digits):
    """Independent oracle: sum q_i * 4**(k - i)."""
    return sum(q * 4 ** (len(digits) - 1 - i) for i, q in enumerate(digits))


# (digit, appended A bits, appended B bits, prefix source for A, for B)
TABLE = [(0, "00", "11", "A", "B"), (1, "01", "00", "A", "A"),
         (-1, "11", "10", "B", "B"), (2, "10", "01", "A", "A"),
         (-2, "10", "01", "B", "B")]


@pytest.mark.parametrize("q, a_bits, b_bits, a_src, b_src", TABLE)
def test_table_rows(q, a_bits, b_bits, a_src, b_src):
    s = otf_from_digits([1, 2])  # A = 0110, B = 0101
    t = otf_append(s, q)
    src = {"A": s.A_bits, "B": s.B_bits}
    assert t.A_bits == src[a_src] + a_bits
    assert t.B_bits == src[b_src] + b_bits


def test_first_digit_examples():
    s = otf_append(OtfState(), 1)
    assert (s.A_bits, s.B_bits) == ("01", "00")
    s = otf_append(OtfState(), 0)
    assert (s.A_bits, s.B_bits) == ("00", "11")


def test_two_digit_example():
    s = otf_from_digits([2, -1])
    assert s.A_bits == "0111" and otf_value(s) == 7 and s.B == 6


@pytest.mark.parametrize("digits, value", [([], 0), ([1], 1), ([1, -2], 2)])
def test_value(digits, value):
    assert otf_value(otf_from_digits(digits)) == value


def test_finalize():
    assert otf_finalize(otf_from_digits([1]), False) == "01"
    assert otf_finalize(otf_from_digits([1]), True) == "00"
    assert otf_finalize(otf_from_digits([2, -1]), True) == "0110"
    with pytest.raises(ValueError):
        otf_finalize(OtfState(), False)


digit_seqs = st.tuples(st.integers(1, 2),
                       st.lists(st.integers(-2, 2), max_size=31)).map(lambda t: [t[0]] + t[1])


@given(digit_seqs)
def test_registers_match_weighted_sum(digits):
    s = otf_from_digits(digits)
    assert otf_value(s) == weighted(digits)
    assert s.B == s.A - 1
    assert len(s.A_bits) == len(s.B_bits) == 2 * len(digits)


@given(digit_seqs, st.integers(-2, 2))
def test_append_only_extends_a_prefix(digits, q):
    s = otf_from_digits(digits)
    t = otf_append(s, q)
    assert t.A_bits[:-2] in (s.A_bits, s.B_bits)
    assert t.B_bits[:-2] in (s.A_bits, s.B_bits)


@given(st.integers(1, 4 ** 20 - 1))
def test_roundtrip_conventional_number(n):
    # signed-digit encoding with 3 rewritten as 4 - 1
    digits, m = [], n
    while m:
        r = m % 4
        r = -1 if r == 3 else r
        digits.append(r)
        m = (m - r) // 4
    digits.reverse()
    assert digits[0] >= 1
    assert otf_value(otf_from_digits(digits)) == n
