"""Zeta-zero ingestion and numerical checks of a Mellin-type explicit formula."""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import integrate as sp_integrate

from .families import h_kernel, h_kernel_prime
from .primes import (CRAMER_C, RangeError, gap_parameters, prime_power_bound, prime_power_tail,
                     prime_powers_in, primes_between)
from .quadrature import integrate, sign_change_roots

ZEROS_ENV = "FOURIER_GAP_ZEROS"
DEFAULT_ZEROS = Path(__file__).resolve().parents[2] / "data" / "zeta_zeros_1e5.txt"
FIRST_ORDINATE = 14.134725141734693
AUDIT_LIMIT = 0.070
EDGE_LIMIT = 0.885
EDGE_ASSEMBLED = 0.886


class ZeroTableError(ValueError):
    pass


class PoleError(ValueError):
    """theta sits on (or within 1e-9 of) a zero ordinate."""


@dataclass(frozen=True)
class ZetaZeroTable:
    ordinates: np.ndarray
    max_height: float
    source: str

    def __post_init__(self):
        o = self.ordinates
        if o.size == 0:
            raise ZeroTableError("empty zero table")
        if o[0] <= 0 or np.any(np.diff(o) <= 0):
            raise ZeroTableError("ordinates must be positive and strictly increasing")

    def __len__(self) -> int:
        return int(self.ordinates.size)

    def count_below(self, x: float) -> int:
        return int(np.searchsorted(self.ordinates, x, side="right"))

    def truncated(self, height: float) -> "ZetaZeroTable":
        n = self.count_below(height)
        return ZetaZeroTable(self.ordinates[:n], float(height), f"{self.source} (cut at {height:g})")


def resolve_zeros_path(path: str | os.PathLike | None = None) -> Path:
    if path:
        return Path(path)
    env = os.environ.get(ZEROS_ENV)
    if env:
        return Path(env)
    return DEFAULT_ZEROS


def load_zeros(path: str | os.PathLike | None = None) -> ZetaZeroTable:
    """Read one ordinate per line; '#' starts a comment."""
    p = resolve_zeros_path(path)
    values: list[float] = []
    prev = 0.0
    with open(p) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                v = float(line)
            except ValueError:
                raise ZeroTableError(f"{p}:{lineno}: cannot parse {line!r}") from None
            if not (v > 0 and math.isfinite(v)):
                raise ZeroTableError(f"{p}:{lineno}: ordinate must be positive, got {line}")
            if v <= prev:
                raise ZeroTableError(f"{p}:{lineno}: ordinate {line} is not above the previous one ({prev!r})")
            values.append(v)
            prev = v
    if not values:
        raise ZeroTableError(f"{p}: no ordinates found")
    arr = np.array(values)
    return ZetaZeroTable(arr, float(arr[-1]), str(p))


# ---------------------------------------------------------------- zero counting

def riemann_von_mangoldt(x: float) -> float:
    return x / (2 * math.pi) * math.log(x / (2 * math.pi * math.e)) + 7 / 8


def count_error_bound(x: float) -> float:
    return 0.15 * math.log(x) + 3


@dataclass(frozen=True)
class ZeroCount:
    x: float
    count: int
    band_lo: float
    band_hi: float
    ok: bool


def zero_count_check(table: ZetaZeroTable, x: float) -> ZeroCount:
    if not x >= math.e:
        raise ValueError("x must be >= e")
    if x > table.max_height:
        raise ValueError(f"x={x} beyond the table height {table.max_height}")
    n = table.count_below(x)
    m, e = riemann_von_mangoldt(x), count_error_bound(x)
    return ZeroCount(x, n, m - e, m + e, m - e <= n <= m + e)


# ---------------------------------------------------------------- explicit formula

@dataclass(frozen=True)
class FormulaEvaluation:
    a: float
    delta: float
    theta: float
    lhs: float
    main_term: float
    zero_sum: float
    trivial_sum: float
    trivial_bound: float
    truncation_height: float
    zeros_used: int
    residual: float
    tail_estimate: float

    def as_dict(self) -> dict:
        return asdict(self)


def von_mangoldt_window(lo: float, hi: float) -> list[tuple[int, float]]:
    """(n, Lambda(n)) for every prime power n in [lo, hi]."""
    lo_i, hi_i = max(2, math.ceil(lo)), math.floor(hi)
    if hi_i >= 2**63 - 1:
        raise RangeError("window beyond sieve range")
    out: list[tuple[int, float]] = []
    if hi_i < lo_i:
        return out
    for block in primes_between(lo_i, hi_i + 1):
        out.extend((int(p), math.log(int(p))) for p in block)
    out.extend((n, math.log(p)) for n, p, _ in prime_powers_in(lo_i, hi_i))
    out.sort()
    return out


def trivial_zero_series(a: float, theta: float, delta: float) -> float:
    """Sum over n >= 1 of theta a^(-2n-1/2) (e^(k delta) + e^(-k delta))/(k^2 + theta^2), k = 2n + 1/2."""
    if not math.log(a) > delta:
        raise ValueError(f"series diverges unless a > e^delta = {math.exp(delta):.6g}")
    total = []
    n = 1
    while True:
        k = 2 * n + 0.5
        term = theta * (math.exp(-k * (math.log(a) - delta)) + math.exp(-k * (math.log(a) + delta))) / (k * k + theta * theta)
        total.append(term)
        if term < 1e-18 * total[0] or n > 10_000:
            break
        n += 1
    return math.fsum(total)


def zero_sum(ordinates: np.ndarray, a: float, theta: float, delta: float, chunk: int = 16384) -> float:
    """2 theta sum over +-gamma of a^(i gamma) cos(delta gamma)/(theta^2 - gamma^2).

    The +gamma and -gamma terms pair to 2 cos(gamma log a); the chunked
    partial sums are combined in a fixed order.
    """
    la = math.log(a)
    parts = []
    for i in range(0, ordinates.size, chunk):
        g = ordinates[i:i + chunk]
        parts.append(math.fsum(2 * np.cos(g * la) * np.cos(delta * g) / (theta * theta - g * g)))
    return 2 * theta * math.fsum(parts)


def zero_tail_estimate(T: float, theta: float) -> float:
    """Bound for 2 theta sum over |gamma| > T of 1/(gamma^2 - theta^2).

    With g(x) = 1/(x^2 - theta^2) decreasing and N = M + R, |R| <= E:
    sum_{gamma > T} g <= int_T g M' + int_T g E' + 2 g(T) E(T). The factor 2
    outside counts the negative ordinates.
    """
    if T <= theta:
        return math.inf

    def g(x):
        return 1.0 / (x * x - theta * theta)

    # x = T/u maps [T, inf) onto (0, 1]
    def main_u(u):
        return math.log(T / (2 * math.pi * u)) / (2 * math.pi) * T / (T * T - theta * theta * u * u)

    main, _ = sp_integrate.quad(main_u, 0.0, 1.0, epsabs=0, epsrel=1e-10, limit=200)
    err, _ = sp_integrate.quad(lambda u: 0.15 * u / (T * T - theta * theta * u * u), 0.0, 1.0, epsabs=0, epsrel=1e-10)
    one_side = main + err + 2 * g(T) * count_error_bound(T)
    return 2 * theta * 2 * one_side


def explicit_formula_check(table: ZetaZeroTable, a: float, theta: float, height: float | None = None) -> FormulaEvaluation:
    """Evaluate both sides of the explicit formula for the cosine-weighted window sum.

    delta = pi/(2 theta). The left side is the exact sum of
    Lambda(n) n^(-1/2) cos(theta log(a/n)) over ae^-delta <= n <= ae^delta;
    the cosine vanishes at both endpoints. The zero sum uses ordinates up to
    `height` (default: the whole table).
    """
    if not (theta > 0 and a > 0):
        raise ValueError("need a > 0 and theta > 0")
    delta = math.pi / (2 * theta)
    if not a > math.exp(delta):
        raise ValueError(f"need a > e^delta = {math.exp(delta):.6g}")
    ords = table.ordinates
    near = ords[np.abs(ords - theta) < 1e-9 * max(1.0, theta)]
    if near.size:
        raise PoleError(f"theta={theta} coincides with the ordinate {near[0]!r}")
    T = table.max_height if height is None else min(height, table.max_height)
    used = ords[ords <= T]

    lo, hi = a * math.exp(-delta), a * math.exp(delta)
    terms = [lam / math.sqrt(n) * math.cos(theta * math.log(a / n)) for n, lam in von_mangoldt_window(lo, hi)]
    lhs = math.fsum(terms)
    main = theta * math.sqrt(a) / (0.25 + theta * theta) * (math.exp(delta / 2) + math.exp(-delta / 2))
    zs = zero_sum(used, a, theta, delta)
    triv = trivial_zero_series(a, theta, delta)
    triv_bound = (3 / theta) * (math.exp(delta) / a) ** 2.5
    residual = lhs - (main - zs - triv)
    return FormulaEvaluation(a, delta, theta, lhs, main, zs, triv, triv_bound, float(T), int(used.size),
                             residual, zero_tail_estimate(T, theta))


# ---------------------------------------------------------------- constants audit

@dataclass(frozen=True)
class AuditReport:
    lam: float
    l1: float
    log_l1: float
    deriv_l1: float
    log_deriv_l1: float
    assembled: float
    limit: float
    ok: bool
    truncation_radius: float

    def as_dict(self) -> dict:
        return asdict(self)


def _weighted_l1(f, weight, zeros_of_f, R: float) -> float:
    """2 int_0^R weight(y) |f(y)| dy, with the zeros of f as panel edges."""
    edges = np.concatenate([[0.0, 1.0], zeros_of_f, [R]])
    edges = np.unique(edges[(edges >= 0) & (edges <= R)])
    est = integrate(lambda y: weight(y) * np.abs(f(y)), edges, abs_tol=1e-12, rel_tol=1e-11, max_panels=2_000_000)
    return 2 * est.value


def audit_zero_sum_constants(lam: float = 0.9, R: float = 4000.0) -> AuditReport:
    """Norms of F = H(./lam) and F' with and without log+|y|, and the assembled constant.

    assembled = ||log+|y| F||_1 + 2 pi (0.15e-8 ||log+|y| F'||_1 + 6e-8 ||F'||_1),
    which must stay below 0.070. Integrals run to R; beyond R, |cos| and
    |sin| are replaced by their mean 2/pi in the 1/y^2 envelopes, whose
    relative error is O(1/R).
    """
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")

    def F(y):
        return h_kernel(y / lam)

    def dF(y):
        return h_kernel_prime(y / lam) / lam

    one = lambda y: np.ones_like(y)  # noqa: E731
    logp = lambda y: np.log(np.maximum(y, 1.0))  # noqa: E731
    k = np.arange(1, int(2 * R / lam) + 2)
    zf = lam * (0.25 + 0.5 * k)            # cos(2 pi y/lam) = 0, skipping the removable y = lam/4
    zd = sign_change_roots(dF, np.linspace(1e-6, R, int(40 * R / lam)))

    # envelopes for y > R: |F| ~ lam^2 |cos|/(16 y^2), |F'| ~ 2 pi lam |sin|/(16 y^2)
    mean = 2 / math.pi
    t_f = 2 * mean * lam**2 / 16 / R
    t_lf = 2 * mean * lam**2 / 16 * (math.log(R) + 1) / R
    t_d = 2 * mean * 2 * math.pi * lam / 16 / R
    t_ld = 2 * mean * 2 * math.pi * lam / 16 * (math.log(R) + 1) / R

    l1 = _weighted_l1(F, one, zf, R) + t_f
    log_l1 = _weighted_l1(F, logp, zf, R) + t_lf
    d_l1 = _weighted_l1(dF, one, zd, R) + t_d
    log_d_l1 = _weighted_l1(dF, logp, zd, R) + t_ld
    assembled = log_l1 + 2 * math.pi * (0.15e-8 * log_d_l1 + (3e-8 + 0.15 * 2e-7) * d_l1)
    return AuditReport(lam, l1, log_l1, d_l1, log_d_l1, assembled, AUDIT_LIMIT, assembled < AUDIT_LIMIT, R)


@dataclass(frozen=True)
class EdgeReport:
    lam: float
    fhat_at_1: float
    eight_fhat: float
    limit: float
    ok: bool
    x: float
    c: float
    sqrt_a_delta_sq: float
    correction: float
    assembled: float
    assembled_limit: float
    assembled_ok: bool

    def as_dict(self) -> dict:
        return asdict(self)


def edge_value_check(lam: float = 0.9, x: float = 4e18, c: float = 1.0) -> EdgeReport:
    """8 F^(1) = 8 lam (pi/4) cos(pi lam/2) and the covering-argument constant.

    The correction 24 sqrt(a) (2 pi Delta)^2 F^(1) (1/lam - 1) is evaluated
    with a, Delta taken from x and c.
    """
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    fh1 = lam * (math.pi / 4) * math.cos(math.pi * lam / 2)
    u = c * math.log(x) / math.sqrt(x)
    a = x * math.sqrt(1 + u)
    two_pi_delta = 0.5 * math.log1p(u)
    s = math.sqrt(a) * two_pi_delta**2
    corr = 24 * s * fh1 * (1 / lam - 1)
    assembled = 8 * fh1 + corr
    return EdgeReport(lam, fh1, 8 * fh1, EDGE_LIMIT, 8 * fh1 <= EDGE_LIMIT, x, c, s, corr, assembled,
                      EDGE_ASSEMBLED, assembled <= EDGE_ASSEMBLED)


# ---------------------------------------------------------------- prime powers in the gap argument

@dataclass(frozen=True)
class PrimePowerReport:
    x: float
    c: float
    lam: float
    a: float
    delta: float
    raw_sum: float
    closed_form_bound: float
    weighted_sum: float
    limit: float

    @property
    def ok(self) -> bool:
        """Raw window sum under its closed-form cap, and the weighted sum under the limit."""
        return self.raw_sum <= self.closed_form_bound and abs(self.weighted_sum) < self.limit

    def as_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def prime_power_weighted(a: float, Delta: float, lam: float) -> float:
    """Sum over n = p^k, k >= 2, of log p n^(-1/2) F^(log(n/a)/(2 pi Delta)) for F = H(./lam)."""
    w = 2 * math.pi * Delta / lam
    total = []
    for n, p, _ in prime_powers_in(a * math.exp(-w), a * math.exp(w)):
        t = math.log(n / a) / (2 * math.pi * Delta)
        if abs(t) <= 1 / lam:
            total.append(math.log(p) / math.sqrt(n) * lam * (math.pi / 4) * math.cos(math.pi * lam * t / 2))
    return math.fsum(total)


def prime_power_report(x: float = 1e6, c: float = CRAMER_C, lam: float = 0.9, limit: float = 0.001) -> PrimePowerReport:
    """Prime-power contribution for the window [x, x + c sqrt(x) log x].

    raw_sum is the unweighted sum over [a e^(-2 delta), a e^(2 delta)] with
    delta = 2 pi Delta; closed_form_bound is 2 (log a + 1)^3/(log 2 sqrt a),
    which drops below 0.001 only near a = 1e17. weighted_sum carries the
    transform weight, which is what enters the inequality being bounded.
    """
    a, Delta = gap_parameters(x, c)
    delta = 2 * math.pi * Delta
    return PrimePowerReport(x, c, lam, a, delta, prime_power_tail(a, delta), prime_power_bound(a),
                            prime_power_weighted(a, Delta, lam), limit)
