"""Acceptance criteria, one test per criterion, each printing its PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Runtime budgets are part of the criteria and asserted here.
"""

import time

import pytest

from rabi2p import acceptance

pytestmark = pytest.mark.slow

_BUDGETS = {1: 1.0, 2: 10.0, 3: 60.0, 4: 10.0, 5: 300.0, 6: 300.0, 7: 30.0, 8: 120.0}


@pytest.fixture(scope="module")
def first_run():
    """One full pass over criteria 1-8 with per-criterion wall times."""
    results = {}
    for fn in acceptance._CRITERIA:
        t0 = time.perf_counter()
        result = fn()
        results[result.cid] = (result, time.perf_counter() - t0)
    return results


def _check(first_run, cid):
    result, elapsed = first_run[cid]
    print(f"\n{result.line()}  [{elapsed:.1f}s]")
    for finding in result.findings:
        print(f"  finding: {finding}")
    assert elapsed < _BUDGETS[cid], f"criterion {cid} exceeded its runtime budget"
    assert result.passed, result.details
    return result


def test_criterion_1_exponent_identity(first_run):
    result = _check(first_run, 1)
    assert result.details["worst_re_deviation"] < 1e-9


def test_criterion_2_delta0_oracle(first_run):
    result = _check(first_run, 2)
    assert result.details["worst_level_error"] < 1e-9
    assert result.details["even_levels_equal_pole_grid"]


def test_criterion_3_cross_backend(first_run):
    result = _check(first_run, 3)
    assert result.details["max_chen_vs_oracle"] < 1e-6
    assert result.details["max_zhang_vs_oracle"] < 1e-6
    assert result.details["max_chen_vs_zhang"] < 1e-6
    assert result.details["max_dip_vs_oracle_first5"] < 1e-4


def test_criterion_4_pole_structure(first_run):
    result = _check(first_run, 4)
    assert result.details["sign_flips"]
    assert min(result.details["window_magnitudes"]) > 1e6
    assert result.details["pole_energies"][:3] == pytest.approx([-0.5, 2.5, 5.5])


def test_criterion_5_conjecture_audit(first_run):
    result = _check(first_run, 5)
    for counts in result.details["interval_counts"].values():
        assert set(counts) <= {0, 1, 2}, counts


def test_criterion_6_collapse_law(first_run):
    result = _check(first_run, 6)
    lows = result.details["lowest_levels"]
    assert all(b < a for a, b in zip(lows, lows[1:]))


def test_criterion_7_instability_exhibit(first_run):
    result = _check(first_run, 7)
    assert result.details["off_spectrum_max"] > 1e8
    assert max(result.details["relative_dips"]) < 1e-6
    assert result.details["dip_position_spread"] < 1e-4


def test_criterion_8_exceptional_detection(first_run):
    result = _check(first_run, 8)
    hit = next(h for h in result.details["hits"] if h["degenerate"])
    assert hit["oracle_offset_even_plus"] < 1e-5
    assert hit["oracle_offset_even_minus"] < 1e-5


def test_criterion_9_determinism(first_run):
    results = [first_run[cid][0] for cid in sorted(first_run)]
    rerun = acceptance.run_criteria()
    identical = acceptance.report_bytes(results) == acceptance.report_bytes(rerun)
    status = "PASS" if identical else "FAIL"
    print(f"\n{status} criterion 9: determinism: byte-identical reruns")
    assert identical
