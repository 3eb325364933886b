import time

import pytest

from concordia.concurrence import PairCorrelators, correlators
from concordia.verify import format_table, run_verification


def flipped_hop(density, i, j):
    """Wick correlators with the sign of <c_j c_i^+> inverted."""
    c = correlators(density, i, j)
    return PairCorrelators(c.n_i, c.n_j, c.n_ij, -c.hop)


def test_quick_suite_passes_fast():
    t0 = time.perf_counter()
    results = run_verification("quick")
    elapsed = time.perf_counter() - t0
    assert all(r.passed for r in results), format_table(results)
    assert elapsed < 10
    assert sum(r.n_checks for r in results) >= 200
    assert results[0].n_checks >= 200  # Wick vs Fock instances


def test_injected_sign_bug_is_caught():
    results = run_verification("quick", correlator_fn=flipped_hop)
    wick = results[0]
    assert not wick.passed
    assert wick.max_error > 0.01
    assert "FAIL" in format_table(results)


@pytest.mark.slow
def test_full_suite_passes():
    results = run_verification("full")
    assert all(r.passed for r in results), format_table(results)
    assert any("N<=12" in r.name for r in results)


def test_unknown_scale():
    with pytest.raises(ValueError):
        run_verification("huge")
