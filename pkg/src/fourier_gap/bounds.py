"""Closed-form bounds for C(A) and C+(A), the lambda(A) equation, and mixture search."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .core import INF, DomainError, FunctionalReport, Mode, functional
from .dual import PSI_C, PSI_EXAMPLE_BOUND, PSI_EXAMPLE_C, default_d0, mollify_params
from .families import C0, REFERENCE_MIXTURE, GaussianMixture, MixtureTerm, make_gaussian_mixture
from .quadrature import DEFAULT_SPEC, QuadratureError, QuadratureSpec

C_AVAILABLE_FROM = 2.6
CPLUS_AVAILABLE_ABOVE = 1.222


class Target(str, Enum):
    C = "C"
    CPLUS = "Cplus"


def _lambda_rhs(lam: float) -> float:
    z = math.pi * lam / 2
    return math.sin(z) - z * math.cos(z)


def lambda_of_A(A: float) -> float:
    """Root in (0, 1) of 1 - 1/A = sin(pi l/2) - (pi l/2) cos(pi l/2).

    The right side increases from 0 to 1 on (0, 1) (its derivative is
    (pi/2) z sin z with z = pi l/2), so bisection on (0, 1) is safe; two
    Newton steps polish the bisection result. lambda(inf) = 1.
    """
    if math.isinf(A):
        return 1.0
    if not A > 1:
        raise DomainError(f"lambda(A) needs A > 1, got {A}")
    target = 1.0 - 1.0 / A
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _lambda_rhs(mid) < target:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    for _ in range(2):
        z = math.pi * lam / 2
        deriv = (math.pi / 2) * z * math.sin(z)
        if deriv > 0:
            lam -= (_lambda_rhs(lam) - target) / deriv
    return lam


def fejer_bound(A: float) -> float:
    """2A - 2 sqrt(A(A-1)) in the cancellation-free form 2A/(A + sqrt(A(A-1)))."""
    if math.isinf(A):
        return 1.0
    return 2 * A / (A + math.sqrt(A * (A - 1)))


def cosine_bound(A: float) -> float:
    """(pi A c0/2) cos(pi lambda(A)/2); equals c0 at A = inf."""
    if math.isinf(A):
        return C0
    if A == 1:
        return math.pi * C0 / 2
    return math.pi * A * C0 / 2 * math.cos(math.pi * lambda_of_A(A) / 2)


def lower_bound_C(A: float) -> tuple[float, str]:
    """Best of the Fejer and cosine-kernel lower bounds, with the witness used."""
    if math.isnan(A) or A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    if math.isinf(A):
        return C0, "H"
    fb = fejer_bound(A)
    cb = cosine_bound(A)
    if fb >= cb:
        lam = math.sqrt((A - 1) / A)
        return fb, f"K(x/{lam:.6f})" if A > 1 else "K (A=1 limit)"
    return cb, f"H(x/{lambda_of_A(A):.6f})"


def upper_bound_C(A: float) -> tuple[float, str]:
    """min{d0/(1 - 0.3/(A-2)), 2}, the first branch only for A >= 2.6."""
    if math.isnan(A) or A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    d0 = default_d0()
    if math.isinf(A):
        return d0, "psi (gamma=1)"
    if A < C_AVAILABLE_FROM:
        return 2.0, "trivial bound C(1)=2"
    lam, gamma = mollify_params(A, PSI_C, 2.0)
    val = gamma * d0
    if val >= 2.0:
        return 2.0, "trivial bound C(1)=2"
    return val, f"mollified psi (gamma={gamma:.6f}, lambda_m={lam:.6f})"


def upper_bound_Cplus(A: float) -> tuple[float, str]:
    """min{1.2/(1 - 0.222/(A-1)), 2}, the first branch only for A > 1.222."""
    if math.isnan(A) or A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    if math.isinf(A):
        return PSI_EXAMPLE_BOUND, "Psi example (gamma=1)"
    if not A > CPLUS_AVAILABLE_ABOVE:
        return 2.0, "trivial bound C+(1)=2"
    lam, gamma = mollify_params(A, PSI_EXAMPLE_C, 1.0)
    val = gamma * PSI_EXAMPLE_BOUND
    if val >= 2.0:
        return 2.0, "trivial bound C+(1)=2"
    return val, f"mollified Psi example (gamma={gamma:.6f}, lambda_m={lam:.6f})"


# ---------------------------------------------------------------- mixture search

@dataclass(frozen=True)
class OptimizerConfig:
    max_evaluations: int = 4000
    initial_simplex_scale: float = 0.05
    convergence_tol: float = 1e-9
    seed: int = 0
    restarts: int = 5
    threads: int = 1

    def __post_init__(self):
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.max_evaluations < 1 or self.initial_simplex_scale <= 0 or self.restarts < 1:
            raise ValueError("max_evaluations, initial_simplex_scale and restarts must be positive")


@dataclass(frozen=True)
class MixtureSearchResult:
    mixture: GaussianMixture
    report: FunctionalReport
    initial_value: float
    improved: bool
    evaluations: int

    def __iter__(self):
        yield self.mixture
        yield self.report


class _FastFunctional:
    """Fixed-grid Gauss-Legendre evaluation of J / J+ for a mixture.

    Good to about 1e-8 on smooth mixtures; used only to steer the search.
    The final candidate is always re-evaluated by `functional`.
    """

    def __init__(self, powers: list[int], A: float, mode: Mode, R: float = 8.0, T: float = 12.0, panels: int = 800):
        self.powers = np.array(powers)
        self.A, self.mode = A, mode
        xg, wg = np.polynomial.legendre.leggauss(12)
        e = np.linspace(0.0, R, panels + 1)
        self.x = ((e[:-1] + e[1:])[:, None] / 2 + (np.diff(e) / 2)[:, None] * xg).ravel()
        self.wx = (np.diff(e)[:, None] / 2 * wg).ravel()
        e = np.linspace(1.0, T, panels + 1)
        self.t = ((e[:-1] + e[1:])[:, None] / 2 + (np.diff(e) / 2)[:, None] * xg).ravel()
        self.wt = (np.diff(e)[:, None] / 2 * wg).ravel()

    def __call__(self, c: np.ndarray, s: np.ndarray) -> float:
        mix = GaussianMixture(tuple(MixtureTerm(float(ci), int(m), float(si))
                                    for ci, m, si in zip(c, self.powers, s)))
        f0 = float(mix.f(0.0))
        l1 = 2 * float(np.abs(mix.f(self.x)) @ self.wx)
        fh = mix.fhat(self.t)
        part = np.abs(fh) if self.mode is Mode.J else np.maximum(fh, 0.0)
        tail = 2 * float(part @ self.wt)
        lead = abs(f0) if self.mode is Mode.J else f0
        return (lead - self.A * tail) / l1 if l1 > 0 else -np.inf


def _pack(mix: GaussianMixture) -> np.ndarray:
    return np.array([t.c for t in mix.terms] + [math.log(t.s) for t in mix.terms])


def _unpack(v: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    return v[:k], np.exp(np.clip(v[k:], -6.0, 6.0))


def _one_restart(args):
    fast, x0, scale, cfg, k = args
    start = x0 + scale
    simplex = [start]
    for i in range(len(x0)):
        p = start.copy()
        p[i] += cfg.initial_simplex_scale * max(1.0, abs(start[i]))
        simplex.append(p)

    def obj(v):
        c, s = _unpack(v, k)
        val = fast(c, s)
        return -val if np.isfinite(val) else 1e6

    res = optimize.minimize(obj, start, method="Nelder-Mead",
                            options={"initial_simplex": np.array(simplex), "maxfev": cfg.max_evaluations,
                                     "xatol": cfg.convergence_tol, "fatol": cfg.convergence_tol})
    return res.x, -res.fun, res.nfev


def optimize_mixture(A: float, mode: Mode | str, init: GaussianMixture = REFERENCE_MIXTURE,
                     cfg: OptimizerConfig = OptimizerConfig(),
                     q: QuadratureSpec = DEFAULT_SPEC) -> MixtureSearchResult:
    """Nelder-Mead over (c_k, log s_k) with the powers m_k held fixed.

    Restart 0 starts at `init`; the others start from seeded perturbations.
    The best candidate by the fast evaluator is re-evaluated accurately and
    kept only if it beats the initial mixture; otherwise `init` comes back
    with improved=False.
    """
    mode = Mode(mode)
    if math.isinf(A) or not A > 1:
        raise DomainError(f"optimize_mixture needs finite A > 1, got {A}")
    k = len(init.terms)
    powers = [t.m for t in init.terms]
    fast = _FastFunctional(powers, A, mode)
    x0 = _pack(init)
    rng = np.random.default_rng(cfg.seed)
    shifts = [np.zeros_like(x0)] + [rng.normal(0.0, 0.05, size=x0.shape) * np.maximum(1.0, np.abs(x0))
                                    for _ in range(cfg.restarts - 1)]
    jobs = [(fast, x0, sh, cfg, k) for sh in shifts]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_one_restart, jobs))
    else:
        results = [_one_restart(j) for j in jobs]
    evaluations = sum(r[2] for r in results)

    init_report = functional(make_gaussian_mixture(init), A, mode, q)
    # candidates in order of fast value, ties by restart index
    order = sorted(range(len(results)), key=lambda i: (-results[i][1], i))
    for i in order:
        c, s = _unpack(results[i][0], k)
        try:
            cand = GaussianMixture(tuple(MixtureTerm(float(ci), m, float(si)) for ci, m, si in zip(c, powers, s)))
            rep = functional(make_gaussian_mixture(cand), A, mode, q)
        except (QuadratureError, DomainError, ValueError):
            continue
        if rep.functional_value > init_report.functional_value:
            return MixtureSearchResult(cand, rep, init_report.functional_value, True, evaluations)
        break
    return MixtureSearchResult(init, init_report, init_report.functional_value, False, evaluations)


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class BoundRecord:
    A: float
    target: Target
    lower: float
    upper: float
    lower_witness: str
    upper_witness: str

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise AssertionError(f"lower {self.lower} exceeds upper {self.upper} at A={self.A}")

    def row(self) -> list[str]:
        return [format_A(self.A), self.target.value, f"{self.lower:.10g}", f"{self.upper:.10g}",
                self.lower_witness, self.upper_witness]


def format_A(A: float) -> str:
    return "inf" if math.isinf(A) else f"{A:.10g}"


def lower_bound_Cplus(A: float, q: QuadratureSpec = DEFAULT_SPEC) -> tuple[float, str]:
    """max of the C(A) lower bound (since C <= C+) and the reference mixture at finite A."""
    lb, wit = lower_bound_C(A)
    parts = [f"C-branch {lb:.6f} via {wit}"]
    best, best_w = lb, wit
    if not math.isinf(A) and A > 1:
        mix = functional(make_gaussian_mixture(REFERENCE_MIXTURE), A, Mode.JPLUS, q).functional_value
        parts.append(f"mixture {mix:.6f}")
        if mix > best:
            best, best_w = mix, "Gaussian mixture"
    return best, f"{best_w} [{'; '.join(parts)}]"


def bound_record(A: float, target: Target | str, q: QuadratureSpec = DEFAULT_SPEC) -> BoundRecord:
    target = Target(target)
    if target is Target.C:
        lo, lw = lower_bound_C(A)
        up, uw = upper_bound_C(A)
        if not math.isinf(A) and A > 1:
            fb, cb = fejer_bound(A), cosine_bound(A)
            lw = f"{lw} [fejer {fb:.6f}; cosine {cb:.6f}]"
    else:
        lo, lw = lower_bound_Cplus(A, q)
        up, uw = upper_bound_Cplus(A)
    return BoundRecord(A, target, lo, up, lw, uw)


def bounds_table(A_values, target: Target | str, threads: int = 1,
                 q: QuadratureSpec = DEFAULT_SPEC) -> list[BoundRecord]:
    for A in A_values:
        if math.isnan(A) or A < 1:
            raise DomainError(f"A must be >= 1, got {A}")
    default_d0()   # solve once before fanning out
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda A: bound_record(A, target, q), A_values))
    return [bound_record(A, target, q) for A in A_values]


CSV_HEADER = ["A", "target", "lower", "upper", "lower_witness", "upper_witness"]


def records_to_csv(records: list[BoundRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()
