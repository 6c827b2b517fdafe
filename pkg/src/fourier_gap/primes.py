"""Segmented sieve and desk-scale checks of prime-gap statements."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator

import numpy as np

SEGMENT = 1 << 20           # odd entries per segment
MAX_HI = 2**63 - 1
DEFAULT_MEMORY_CAP = 1 << 28  # bytes for one SieveSegment
BASE_LIMIT = 1 << 26        # largest base prime kept in memory
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # exact for n < 3.3e24
CRAMER_C = 22 / 25


class RangeError(OverflowError):
    """Requested range outside what the sieve can handle."""


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a plain sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_p[p]:
            is_p[p * p::2 * p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


def base_primes(hi: int) -> np.ndarray:
    """Primes up to sqrt(hi), cached by the next power of two and capped at BASE_LIMIT.

    Above BASE_LIMIT^2 the sieve only pre-filters and survivors go to
    Miller-Rabin.
    """
    r = math.isqrt(max(hi, 4)) + 1
    return _small_primes(min(1 << (r - 1).bit_length(), BASE_LIMIT))


def is_prime_mr(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _odd_block(lo: int, hi: int, primes: np.ndarray) -> tuple[int, np.ndarray]:
    """Primality of the odd numbers in [lo, hi); returns (first odd, flags)."""
    first = lo | 1
    n = max(0, (hi - first + 1) // 2)
    flags = np.ones(n, dtype=bool)
    if n == 0:
        return first, flags
    last = first + 2 * (n - 1)
    odd = primes[1:]
    odd = odd[odd * odd <= last]
    small = odd[odd <= n]
    for p in small:
        p = int(p)
        start = max(p * p, ((first + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        flags[(start - first) // 2::p] = False
    big = odd[odd > n]
    if big.size:
        # stride p exceeds the block, so each prime strikes at most once
        off = (big - first % big) % big
        off = np.where(off % 2 == 1, off + big, off)
        idx = off // 2
        hit = idx < n
        flags[idx[hit]] = False
    if first == 1:
        flags[0] = False
    if primes.size and int(primes[-1]) ** 2 < last:
        for i in np.nonzero(flags)[0]:
            n_i = first + 2 * int(i)
            if n_i > int(primes[-1]) ** 2:
                flags[i] = is_prime_mr(n_i)
    return first, flags


@dataclass(frozen=True)
class SieveSegment:
    lo: int
    hi: int
    first_odd: int
    odd_flags: np.ndarray

    def primes(self) -> np.ndarray:
        odd = self.first_odd + 2 * np.nonzero(self.odd_flags)[0].astype(np.int64)
        if self.lo <= 2 < self.hi:
            return np.concatenate([np.array([2], dtype=np.int64), odd])
        return odd

    def count(self) -> int:
        return int(self.odd_flags.sum()) + (1 if self.lo <= 2 < self.hi else 0)

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise ValueError(f"{n} outside [{self.lo}, {self.hi})")
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        return bool(self.odd_flags[(n - self.first_odd) // 2])


def _check_range(lo: int, hi: int) -> None:
    if lo < 2 or hi <= lo:
        raise ValueError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > MAX_HI:
        raise RangeError(f"hi={hi} exceeds 2^63-1")


def sieve(lo: int, hi: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> SieveSegment:
    """Exact primality over [lo, hi)."""
    lo, hi = int(lo), int(hi)
    _check_range(lo, hi)
    if (hi - lo) // 2 + 1 > memory_cap:
        raise MemoryError(f"segment of length {hi - lo} exceeds the memory cap of {memory_cap} bytes")
    first, flags = _odd_block(lo, hi, base_primes(hi))
    return SieveSegment(lo, hi, first, flags)


def is_prime_trial(n: int) -> bool:
    """Trial division; the test oracle for the sieve."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_between(lo: int, hi: int, segment: int = SEGMENT) -> Iterator[np.ndarray]:
    """Primes in [lo, hi) in ascending segments."""
    lo = max(int(lo), 2)
    hi = int(hi)
    if hi <= lo:
        return
    _check_range(lo, hi)
    bp = base_primes(hi)
    step = 2 * segment
    if lo <= 2:
        yield np.array([2], dtype=np.int64)
        lo = 3
    for s in range(lo, hi, step):
        first, flags = _odd_block(s, min(s + step, hi), bp)
        yield first + 2 * np.nonzero(flags)[0].astype(np.int64)


def count_primes(lo: int, hi: int) -> int:
    """Number of primes in the integer interval [lo, hi]."""
    lo, hi = max(int(lo), 2), int(hi)
    if hi < lo:
        return 0
    return sum(int(p.size) for p in primes_between(lo, hi + 1))


def next_prime(n: int) -> int:
    """Least prime >= n."""
    n = max(int(n), 2)
    width = max(64, int(4 * math.log(n + 2) ** 2))
    while True:
        for block in primes_between(n, n + width):
            if block.size:
                return int(block[0])
        n += width
        width *= 2


# ---------------------------------------------------------------- gaps

@dataclass(frozen=True)
class GapRecord:
    p: int
    q: int
    gap: int
    cramer_ratio: float
    log_sq_ratio: float

    @classmethod
    def of(cls, p: int, q: int) -> "GapRecord":
        lp = math.log(p)
        return cls(p, q, q - p, (q - p) / (math.sqrt(p) * lp), (q - p) / lp**2)

    def row(self) -> list[str]:
        return [str(self.p), str(self.q), str(self.gap), f"{self.cramer_ratio:.6g}", f"{self.log_sq_ratio:.6g}"]


GAP_CSV_HEADER = ["p", "q", "gap", "cramer_ratio", "log_sq_ratio"]


@dataclass(frozen=True)
class GapScan:
    """Result of scanning consecutive primes p in [p_min, N]."""

    N: int
    p_min: int
    max_ratio: GapRecord
    max_gap: GapRecord
    max_log_sq: GapRecord      # largest gap/(log p)^2 among p >= 11
    primes_scanned: int

    def log_sq_ok(self) -> bool:
        return self.max_log_sq.log_sq_ratio < 1.0


def _scan_block(primes: np.ndarray, nxt: np.ndarray, p_min: int):
    keep = primes >= p_min
    p = primes[keep].astype(np.float64)
    q = nxt[keep].astype(np.float64)
    if p.size == 0:
        return None
    g = q - p
    lp = np.log(p)
    ratio = g / (np.sqrt(p) * lp)
    i_ratio = int(np.argmax(ratio))
    i_gap = int(np.argmax(g))
    big = p >= 11
    if big.any():
        lsq = np.where(big, g / lp**2, -np.inf)
        i_lsq = int(np.argmax(lsq))
    else:
        i_lsq = None
    pi, qi = primes[keep], nxt[keep]

    def rec(i):
        return None if i is None else GapRecord.of(int(pi[i]), int(qi[i]))

    return rec(i_ratio), rec(i_gap), rec(i_lsq), int(p.size)


def _better(a: GapRecord | None, b: GapRecord | None, key) -> GapRecord | None:
    # ties go to the smaller p, which keeps the reduction order independent
    if a is None:
        return b
    if b is None:
        return a
    ka, kb = key(a), key(b)
    if kb > ka or (kb == ka and b.p < a.p):
        return b
    return a


@dataclass
class ScanState:
    """Resumable state for long scans; serialised as JSON."""

    next_lo: int
    running_max: dict | None = None

    def save(self, path: str) -> None:
        atomic_write_text(path, json.dumps(asdict(self), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str) -> "ScanState":
        with open(path) as fh:
            data = json.load(fh)
        return cls(int(data["next_lo"]), data.get("running_max"))


def atomic_write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def scan_gaps(N: int, p_min: int = 5, threads: int = 1, segment: int = SEGMENT,
              resume_path: str | None = None) -> GapScan:
    """Scan consecutive primes p in [p_min, N] (q may exceed N).

    Work is split into fixed blocks of 2*segment integers; blocks are
    independent and results are reduced in block order. With `resume_path`
    the running maxima are checkpointed after each block.
    """
    N = int(N)
    if N < p_min:
        raise ValueError(f"N must be >= {p_min}")
    q_end = next_prime(N + 1)
    step = 2 * segment
    starts = list(range(2, N + 1, step))
    best = {"ratio": None, "gap": None, "lsq": None}
    scanned = 0
    if resume_path and os.path.exists(resume_path):
        st = ScanState.load(resume_path)
        if st.running_max:
            best = {k: (GapRecord(**v) if v else None) for k, v in st.running_max["records"].items()}
            scanned = st.running_max["scanned"]
        starts = [s for s in starts if s >= st.next_lo]

    def work(s: int):
        hi = min(s + step, N + 1)
        ps = np.concatenate(list(primes_between(s, hi)) or [np.zeros(0, dtype=np.int64)])
        if ps.size == 0:
            return None
        after = next_prime(hi) if hi <= N else q_end
        nxt = np.append(ps[1:], after)
        return _scan_block(ps, nxt, p_min)

    def merge(res):
        nonlocal scanned
        if res is None:
            return
        r, g, l, n = res
        best["ratio"] = _better(best["ratio"], r, lambda x: x.cramer_ratio)
        best["gap"] = _better(best["gap"], g, lambda x: x.gap)
        best["lsq"] = _better(best["lsq"], l, lambda x: x.log_sq_ratio)
        scanned += n

    def checkpoint(next_lo: int):
        if resume_path:
            records = {k: (asdict(v) if v else None) for k, v in best.items()}
            ScanState(next_lo, {"records": records, "scanned": scanned}).save(resume_path)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunk = 4 * threads
            for i in range(0, len(starts), chunk):
                for res in pool.map(work, starts[i:i + chunk]):
                    merge(res)
                checkpoint(starts[i + chunk] if i + chunk < len(starts) else N + 1)
    else:
        for i, s in enumerate(starts):
            merge(work(s))
            checkpoint(starts[i + 1] if i + 1 < len(starts) else N + 1)
    if best["ratio"] is None:
        raise ValueError(f"no primes in [{p_min}, {N}]")
    lsq = best["lsq"] if best["lsq"] is not None else best["ratio"]
    return GapScan(N, p_min, best["ratio"], best["gap"], lsq, scanned)


def max_cramer_ratio(N: int, p_min: int = 5, threads: int = 1) -> GapRecord:
    """The consecutive pair p < q with p in [p_min, N] maximising (q-p)/(sqrt(p) log p).

    p_min defaults to 5: for p = 2, 3 the ratio exceeds 1 and the gap
    statement is only made for p > 3.
    """
    if N < 5:
        raise ValueError("N must be >= 5")
    return scan_gaps(N, p_min, threads).max_ratio


# ---------------------------------------------------------------- windows

@dataclass(frozen=True)
class IntervalCheck:
    ok: bool
    witness: int | None
    lo: int
    hi: int


def window_bounds(x: float, y: float) -> tuple[int, int]:
    """Integer interval [ceil x, floor(x + y)] for the real window [x, x+y]."""
    return math.ceil(x), math.floor(x + y)


def verify_interval(x: float, c: float = CRAMER_C) -> IntervalCheck:
    """Is there a prime in [x, x + c sqrt(x) log x]? Returns the least one."""
    if not x >= 4:
        raise ValueError(f"x must be >= 4, got {x}")
    lo, hi = window_bounds(x, c * math.sqrt(x) * math.log(x))
    if hi >= MAX_HI:
        raise RangeError("window beyond sieve range")
    if hi < lo:
        return IntervalCheck(False, None, lo, hi)
    for block in primes_between(lo, hi + 1):
        if block.size:
            return IntervalCheck(True, int(block[0]), lo, hi)
    return IntervalCheck(False, None, lo, hi)


class WindowKind(str, Enum):
    SQRT = "sqrt"
    CRAMER = "cramer"


@dataclass(frozen=True)
class WindowStat:
    x: float
    window_kind: WindowKind
    c: float
    prime_count: int
    normalized: float

    def row(self) -> list[str]:
        return [f"{self.x:.10g}", self.window_kind.value, str(self.prime_count), f"{self.normalized:.6g}"]


WINDOW_CSV_HEADER = ["x", "window", "count", "normalized"]


def window_stat(x: float, kind: WindowKind | str = WindowKind.SQRT, c: float = 1.0) -> WindowStat:
    """pi(x + y) - pi(x) for y = c sqrt(x) (sqrt) or c sqrt(x) log x (cramer)."""
    kind = WindowKind(kind)
    root = math.sqrt(x)
    if kind is WindowKind.SQRT:
        y = c * root
        scale = root / math.log(x)
    else:
        y = c * root * math.log(x)
        scale = root
    # pi(x+y) - pi(x) counts primes in (x, x+y]
    count = count_primes(math.floor(x) + 1, math.floor(x + y))
    return WindowStat(x, kind, c, count, count / scale)


@dataclass(frozen=True)
class WindowScan:
    stats: list[WindowStat]
    running_max: list[float]

    @property
    def max_normalized(self) -> float:
        return self.running_max[-1] if self.running_max else 0.0


def bt_ratio_scan(x_lo: float, x_hi: float, samples: int, kind: WindowKind | str = WindowKind.SQRT,
                  c: float = 1.0, threads: int = 1) -> WindowScan:
    """Normalised window counts on a geometric grid; the running max is an empirical snapshot."""
    if x_lo < 100 or x_hi < x_lo or samples < 1:
        raise ValueError("need 100 <= x_lo <= x_hi and samples >= 1")
    xs = [x_lo] if samples == 1 else list(np.geomspace(x_lo, x_hi, samples))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(lambda x: window_stat(float(x), kind, c), xs))
    else:
        stats = [window_stat(float(x), kind, c) for x in xs]
    run = list(np.maximum.accumulate([s.normalized for s in stats]))
    return WindowScan(stats, [float(v) for v in run])


# ---------------------------------------------------------------- prime powers

def prime_powers_in(lo: float, hi: float, min_k: int = 2) -> list[tuple[int, int, int]]:
    """All (n, p, k) with n = p^k in [lo, hi] and k >= min_k, sorted by n."""
    out = []
    if hi < 4:
        return out
    kmax = int(math.log2(hi)) + 1
    for k in range(min_k, kmax + 1):
        pmax = int(round(hi ** (1.0 / k))) + 1
        for p in _small_primes(max(pmax, 2)):
            n = int(p) ** k
            if lo <= n <= hi:
                out.append((n, int(p), k))
    out.sort()
    return out


def prime_power_tail(a: float, delta: float) -> float:
    """Sum of log p / sqrt(n) over n = p^k, k >= 2, in [a e^(-2 delta), a e^(2 delta)]."""
    if a <= 0 or delta < 0:
        raise ValueError("need a > 0 and delta >= 0")
    hi = a * math.exp(2 * delta)
    if hi >= MAX_HI:
        raise RangeError("window beyond sieve range")
    lo = a * math.exp(-2 * delta)
    terms = [math.log(p) / math.sqrt(n) for n, p, _ in prime_powers_in(lo, hi)]
    return math.fsum(terms)


def gap_parameters(x: float, c: float = CRAMER_C) -> tuple[float, float]:
    """(a, Delta) with [x, x + c sqrt(x) log x] = [a e^(-2 pi Delta), a e^(2 pi Delta)]."""
    u = c * math.log(x) / math.sqrt(x)
    return x * math.sqrt(1 + u), math.log1p(u) / (4 * math.pi)


def prime_power_bound(a: float) -> float:
    """2 (log a + 1)^3 / (log 2 sqrt a), the closed-form cap on the prime-power sum."""
    return 2 * (math.log(a) + 1) ** 3 / (math.log(2) * math.sqrt(a))
