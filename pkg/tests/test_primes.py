from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourier_gap import primes


def _trial_primes(lo, hi):
    return [n for n in range(lo, hi) if primes.is_prime_trial(n)]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=10**6), st.integers(min_value=1, max_value=3000))
def test_sieve_matches_trial_division(lo, width):
    seg = primes.sieve(lo, lo + width)
    assert seg.primes().tolist() == _trial_primes(lo, lo + width)
    assert seg.count() == len(seg.primes())


def test_sieve_near_int64_limit():
    hi = primes.MAX_HI
    seg = primes.sieve(hi - 200, hi)
    got = seg.primes().tolist()
    # 2^63 - 25 is the largest prime below 2^63
    assert got[-1] == 2**63 - 25
    assert all(n % 2 for n in got)


def test_sieve_errors():
    with pytest.raises(ValueError):
        primes.sieve(1, 10)
    with pytest.raises(primes.RangeError):
        primes.sieve(10, 2**63 + 5)
    with pytest.raises(MemoryError):
        primes.sieve(2, 10**6, memory_cap=1000)
    seg = primes.sieve(100, 200)
    assert seg.is_prime(101) and not seg.is_prime(111)
    with pytest.raises(ValueError):
        seg.is_prime(300)


def test_segments_are_ordered_and_complete():
    blocks = list(primes.primes_between(2, 300_000, segment=1000))
    allp = np.concatenate(blocks)
    assert np.all(np.diff(allp) > 0)
    assert allp.size == 25997


@pytest.mark.parametrize("lo,hi,n", [(2, 100, 25), (2, 10**6, 78498), (10**7, 10**7 + 10**5, 6241)])
def test_count_primes(lo, hi, n):
    assert primes.count_primes(lo, hi) == n


def test_next_prime():
    assert primes.next_prime(0) == 2
    assert primes.next_prime(114) == 127
    assert primes.next_prime(10**12) == 10**12 + 39


def test_small_gap_scan_records():
    scan = primes.scan_gaps(200)
    assert (scan.max_gap.p, scan.max_gap.q) == (113, 127)
    assert scan.max_gap.cramer_ratio == pytest.approx(14 / (math.sqrt(113) * math.log(113)))
    assert (scan.max_ratio.p, scan.max_ratio.q) == (7, 11)
    assert scan.max_ratio.cramer_ratio == pytest.approx(0.776941, abs=1e-6)


def test_scan_counts_and_p_min():
    scan = primes.scan_gaps(10**5, p_min=2)
    assert scan.primes_scanned == 9592
    assert scan.max_ratio.p in (2, 3)
    assert scan.max_ratio.cramer_ratio > 1


def test_scan_threads_and_segments_agree():
    ref = primes.scan_gaps(3 * 10**6)
    assert primes.scan_gaps(3 * 10**6, threads=4, segment=1 << 15) == ref
    assert primes.scan_gaps(3 * 10**6, segment=1 << 12) == ref


def test_scan_resume_from_midway_checkpoint(tmp_path):
    from dataclasses import asdict

    seg = 1 << 16
    N = 2 * 10**6
    ref = primes.scan_gaps(N, segment=seg)
    # a scan ending just before a block start holds exactly the state of an
    # interrupted scan at that block
    cut = 2 + 2 * seg * 8
    part = primes.scan_gaps(cut - 1, segment=seg)
    records = {"ratio": asdict(part.max_ratio), "gap": asdict(part.max_gap), "lsq": asdict(part.max_log_sq)}
    path = str(tmp_path / "state.json")
    primes.ScanState(cut, {"records": records, "scanned": part.primes_scanned}).save(path)
    assert primes.scan_gaps(N, segment=seg, resume_path=path) == ref
    assert primes.ScanState.load(path).next_lo == N + 1


def test_max_cramer_ratio_default_excludes_tiny_primes():
    rec = primes.max_cramer_ratio(10**4)
    assert (rec.p, rec.q) == (7, 11)
    with pytest.raises(ValueError):
        primes.max_cramer_ratio(4)


def test_verify_interval():
    chk = primes.verify_interval(1000.0)
    lo, hi = primes.window_bounds(1000.0, primes.CRAMER_C * math.sqrt(1000) * math.log(1000))
    assert (chk.lo, chk.hi) == (lo, hi) == (1000, 1192)
    assert chk.witness == 1009
    # a window inside the gap after 1327 (next prime 1361)
    chk = primes.verify_interval(1328.0, c=0.1)
    assert not chk.ok and chk.witness is None
    with pytest.raises(ValueError):
        primes.verify_interval(3.0)


def test_window_stat():
    st_ = primes.window_stat(1e4)
    assert st_.prime_count == 11
    assert st_.normalized == pytest.approx(11 / (100 / math.log(1e4)), rel=1e-12)
    cr = primes.window_stat(1e4, "cramer", c=0.5)
    assert cr.prime_count == primes.count_primes(10001, math.floor(1e4 + 50 * math.log(1e4)))


def test_bt_ratio_scan():
    scan = primes.bt_ratio_scan(1e4, 1e7, 7)
    assert len(scan.stats) == 7
    assert scan.running_max == sorted(scan.running_max)
    assert scan.max_normalized == max(s.normalized for s in scan.stats)
    assert primes.bt_ratio_scan(1e4, 1e7, 7, threads=3) == scan
    with pytest.raises(ValueError):
        primes.bt_ratio_scan(10, 100, 3)


def test_prime_powers():
    got = [n for n, _, _ in primes.prime_powers_in(60, 170)]
    assert got == [64, 81, 121, 125, 128, 169]
    tail = primes.prime_power_tail(100, 0.3)
    ref = sum(math.log(p) / math.sqrt(n) for n, p, _ in primes.prime_powers_in(100 * math.exp(-0.6), 100 * math.exp(0.6)))
    assert tail == pytest.approx(ref)
    assert primes.prime_power_tail(1000, 0.0) == 0.0
    with pytest.raises(ValueError):
        primes.prime_power_tail(-1, 0.1)


def test_gap_parameters():
    x = 1e6
    a, D = primes.gap_parameters(x)
    y = primes.CRAMER_C * math.sqrt(x) * math.log(x)
    assert a * math.exp(-2 * math.pi * D) == pytest.approx(x)
    assert a * math.exp(2 * math.pi * D) == pytest.approx(x + y)
    assert primes.prime_power_bound(a) == pytest.approx(9.366, abs=1e-3)


@settings(max_examples=300)
@given(st.integers(min_value=0, max_value=2 * 10**6))
def test_miller_rabin_matches_trial(n):
    assert primes.is_prime_mr(n) == primes.is_prime_trial(n)


def test_strong_pseudoprimes_rejected():
    # strong pseudoprimes to several small bases
    for n in (2047, 3215031751, 3825123056546413051):
        assert not primes.is_prime_mr(n)


def test_sieve_beyond_base_limit():
    # sqrt(1e16) = 1e8 exceeds the cached base primes, so survivors go to Miller-Rabin
    got = primes.sieve(10**16, 10**16 + 200).primes().tolist()
    assert got[0] == 10**16 + 61
    assert all(primes.is_prime_mr(n) for n in got)
