import json

import pytest

from srtdiv import kernel
from srtdiv.harness import (FDIV_VECTOR_FILE, RegressionFormatError, compare_policies,
                            edge_operands, edge_pairs, format_regressions,
                            fuzz_divide, generate_cases, generate_fdiv_vectors,
                            load_regressions, platform_divide, rational_divide,
                            results_match, run_cases, run_regressions)
from srtdiv.ieee754 import unpack


def test_oracles_agree_on_fuzzed_cases():
    for a, b in generate_cases(3000, 2) + edge_pairs():
        assert results_match(platform_divide(a, b), rational_divide(a, b),
                             ("inexact", "divide_by_zero", "invalid", "overflow"))


def test_case_mix():
    cases = generate_cases(4000, 1)
    kinds = [unpack(a).kind for a, _ in cases[3::4]] + [unpack(b).kind for _, b in cases[3::4]]
    assert {"zero", "subnormal", "infinity", "nan"} <= set(kinds)
    assert generate_cases(100, 5) == generate_cases(100, 5)
    assert generate_cases(100, 5) != generate_cases(100, 6)


def test_edge_list_contents():
    ops = edge_operands()
    kinds = {unpack(w).kind for w in ops}
    assert kinds == {"zero", "subnormal", "normal", "infinity", "nan"}
    assert len(edge_pairs()) == len(ops) ** 2


@pytest.mark.parametrize("policy", ["exact", "fuzzy"])
def test_fuzz_seed7(policy):
    report = fuzz_divide(1000, 7, policy)
    assert report.cases_run == 1000 and report.ok


def test_fuzz_is_deterministic():
    r1 = fuzz_divide(500, 7, "constants")
    r2 = fuzz_divide(500, 7, "constants")
    assert r1.to_json() == r2.to_json()
    assert "wall_time" not in json.loads(r1.to_json())
    assert "wall_time" in json.loads(r1.to_json(include_timing=True))


def test_rational_oracle_campaign():
    assert fuzz_divide(1000, 3, "fuzzy", oracle="rational").ok


def test_detector_sees_a_wrong_result(monkeypatch):
    from srtdiv import harness
    real = harness.fdiv
    monkeypatch.setattr(harness, "fdiv", lambda a, b, p, rules=None: (real(a, b, p)[0] ^ 1,
                                                                       real(a, b, p)[1]))
    report = run_cases([(0x3FF0000000000000, 0x4008000000000000)])
    assert len(report.mismatches) == 1


def test_shipped_vectors_are_current():
    vectors = generate_fdiv_vectors()
    assert load_regressions(FDIV_VECTOR_FILE) == vectors
    labels = [v.label for v in vectors]
    assert "classic0" in labels and len(labels) == len(set(labels))


def test_shipped_vectors_pass():
    report = run_regressions(FDIV_VECTOR_FILE)
    assert report.cases_run > 300 and report.ok


def test_empty_file(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    report = run_regressions(path)
    assert (report.cases_run, report.mismatches) == (0, [])


def test_corrupted_vector(tmp_path):
    lines = FDIV_VECTOR_FILE.read_text().splitlines()
    i = next(k for k, line in enumerate(lines) if line.startswith("classic0 "))
    parts = lines[i].split()
    parts[3] = f"{int(parts[3], 16) ^ 1:016X}"
    lines[i] = " ".join(parts)
    path = tmp_path / "bad.txt"
    path.write_text("\n".join(lines) + "\n")
    report = run_regressions(path)
    assert len(report.mismatches) == 1
    assert report.mismatches[0]["label"] == "classic0"


def test_malformed_file_reports_line(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("# header\nok 3FF0000000000000 3FF0000000000000 3FF0000000000000 -\n"
                    "broken 3FF0 zz 1 -\n")
    with pytest.raises(RegressionFormatError, match="line 3"):
        run_regressions(path)


def test_format_roundtrip():
    vectors = generate_fdiv_vectors()[:5]
    text = format_regressions(vectors, meta="sample")
    assert text.startswith("# sample\n")
    from srtdiv.harness import parse_regressions
    assert parse_regressions(text) == vectors


def test_compare_policies():
    report = compare_policies(10, n_divides=300, seed=1)
    assert report.ok
    pairs = report.details["pairs"]
    assert pairs["exact/constants"]["differing_cells"] > 0
    assert all(p["outside_band"] == 0 for p in pairs.values())
    assert report.details["violations"] == {"exact": 0, "constants": 0, "fuzzy": 0}


def test_same_policy_never_differs():
    a = kernel.sweep(8, 10, kernel.EXACT, None, -1, True)
    b = kernel.sweep(8, 10, kernel.EXACT, None, -1, True)
    assert a[3] == b[3]


def test_bad_arguments():
    with pytest.raises(ValueError):
        fuzz_divide(0)
    with pytest.raises(ValueError):
        compare_policies(4)
    with pytest.raises(ValueError):
        run_cases([], "nearest")
