from __future__ import annotations

import math

import numpy as np
import pytest

from fourier_gap import explicit, primes


def test_table_basics(zeros):
    assert len(zeros) == 100_000
    assert zeros.ordinates[0] == pytest.approx(explicit.FIRST_ORDINATE, abs=1e-12)
    assert zeros.count_below(100) == 29
    assert zeros.max_height == pytest.approx(74920.827, abs=1e-3)
    cut = zeros.truncated(1000)
    assert len(cut) == 649 and cut.max_height == 1000


@pytest.mark.parametrize("text,match", [
    ("14.1\nabc\n", ":2: cannot parse"),
    ("14.1\n-3\n", ":2: ordinate must be positive"),
    ("14.1\n21.0\n21.0\n", ":3: .* not above"),
    ("# nothing\n\n", "no ordinates"),
])
def test_load_zeros_errors(tmp_path, text, match):
    p = tmp_path / "z.txt"
    p.write_text(text)
    with pytest.raises(explicit.ZeroTableError, match=match):
        explicit.load_zeros(p)


def test_load_zeros_comments_and_env(tmp_path, monkeypatch):
    p = tmp_path / "z.txt"
    p.write_text("# header\n14.134725141734693  # first\n21.022039638771555\n")
    monkeypatch.setenv(explicit.ZEROS_ENV, str(p))
    t = explicit.load_zeros()
    assert len(t) == 2 and t.source == str(p)
    assert explicit.resolve_zeros_path("other.txt").name == "other.txt"
    monkeypatch.delenv(explicit.ZEROS_ENV)
    assert explicit.resolve_zeros_path() == explicit.DEFAULT_ZEROS


def test_zero_counts_in_band(zeros):
    for x in np.geomspace(20, zeros.max_height, 40):
        assert explicit.zero_count_check(zeros, float(x)).ok
    with pytest.raises(ValueError):
        explicit.zero_count_check(zeros, 1.0)
    with pytest.raises(ValueError):
        explicit.zero_count_check(zeros, 1e6)


def test_von_mangoldt_window():
    got = explicit.von_mangoldt_window(60, 70)
    assert [n for n, _ in got] == [61, 64, 67]
    assert got[1][1] == pytest.approx(math.log(2))


def test_trivial_series_within_bound():
    for a, theta in [(1000, 5 * math.pi), (50, 1.0), (30, 0.5)]:
        delta = math.pi / (2 * theta)
        s = explicit.trivial_zero_series(a, theta, delta)
        assert 0 < s <= (3 / theta) * (math.exp(delta) / a) ** 2.5
    with pytest.raises(ValueError):
        explicit.trivial_zero_series(20, 0.5, math.pi)


def test_tail_estimate_decreasing():
    vals = [explicit.zero_tail_estimate(T, 5.0) for T in (100, 1000, 1e4, 1e5)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert explicit.zero_tail_estimate(4.0, 5.0) == math.inf


@pytest.mark.parametrize("a,theta", [(1000, 5 * math.pi), (500, 2.0), (5000, 10.0), (1e5, 3.3), (50, 1.0)])
def test_residual_within_tail_envelope(zeros, a, theta):
    for T in (1000, 5000, 20000, None):
        ev = explicit.explicit_formula_check(zeros, a, theta, T)
        assert abs(ev.residual) <= ev.tail_estimate
        assert ev.trivial_sum <= ev.trivial_bound


def test_more_zeros_tighten_envelope(zeros):
    a, theta = 1000.0, 5 * math.pi
    short = explicit.explicit_formula_check(zeros, a, theta, zeros.ordinates[9_999])
    full = explicit.explicit_formula_check(zeros, a, theta)
    assert short.zeros_used == 10_000 and full.zeros_used == 100_000
    assert abs(full.residual) <= abs(short.residual) + short.tail_estimate
    assert full.tail_estimate < short.tail_estimate


def test_formula_errors(zeros):
    with pytest.raises(explicit.PoleError):
        explicit.explicit_formula_check(zeros, 1000, float(zeros.ordinates[0]))
    with pytest.raises(ValueError):
        explicit.explicit_formula_check(zeros, 1.0, 1.0)
    with pytest.raises(ValueError):
        explicit.explicit_formula_check(zeros, 100, -1.0)


def test_audit_constant():
    rep = explicit.audit_zero_sum_constants(0.9)
    assert rep.ok and rep.assembled == pytest.approx(0.064711, abs=5e-5)
    assert rep.l1 == pytest.approx(0.8333717, abs=1e-5)


def test_edge_value():
    rep = explicit.edge_value_check(0.9)
    assert rep.eight_fhat == pytest.approx(0.884616, abs=1e-6)
    assert rep.ok and rep.assembled_ok
    assert rep.sqrt_a_delta_sq == pytest.approx(2.29e-7, rel=1e-2)


def test_prime_power_report():
    rep = explicit.prime_power_report()
    a, D = primes.gap_parameters(1e6)
    assert rep.a == pytest.approx(a) and rep.delta == pytest.approx(2 * math.pi * D)
    assert rep.raw_sum == pytest.approx(0.01378, abs=1e-5)
    assert rep.raw_sum <= rep.closed_form_bound
    assert abs(rep.weighted_sum) < 0.001
    assert rep.ok
