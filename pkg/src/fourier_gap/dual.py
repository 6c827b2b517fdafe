"""Dual witnesses: bounded functions whose transform is 1 on (-1, 1).

Covers Gorbachev's construction psi (built from the piecewise-linear
profile alpha), the step-function witness psi-tilde, the explicit example
Psi with its sinc/cosine closed form, and box-mollified versions Phi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize, special

from .core import DomainError, FourierPair
from .quadrature import Estimate, QuadratureError, integrate, sign_change_roots

TAU = 29289 / 100000
PSI_C = 0.6            # bound on |a_n| used when mollifying psi
PSI_EXAMPLE_C = 0.444  # largest atom of the Psi example
PSI_EXAMPLE_BOUND = 1.2


class BracketError(ValueError):
    """The root bracket does not contain a sign change."""


class CertificationError(RuntimeError):
    pass


class MollifyMode(str, Enum):
    C = "C"
    CPLUS = "Cplus"


def j_fn(x):
    """sin(2 pi x)/(2 pi x)."""
    return np.sinc(2.0 * np.asarray(x, dtype=float))


# ---------------------------------------------------------------- alpha profile

def epsilon_of(y: float, tau: float = TAU, zero_mean: bool = False) -> float:
    """Ramp width for a given dip depth y.

    The default rule (denominator 1 + y - 2 tau) leaves alpha with mean
    -tau*eps over [0, 1/2]; `zero_mean` uses 1 + y - tau, which makes the
    mean vanish exactly.
    """
    num = tau * tau - 2 * tau + 0.5
    return num / (1 + y - tau) if zero_mean else num / (1 + y - 2 * tau)


@dataclass(frozen=True)
class AlphaProfile:
    """Continuous piecewise-linear alpha on [0, 1/2].

    alpha = 2x - 1 up to tau, ramps to 1 over width epsilon, stays 1, then
    dips linearly to 1 - y at 1/2 - epsilon and climbs back to 1 at 1/2.
    """

    tau: float
    epsilon: float
    y: float

    def __post_init__(self):
        if not 0 < self.epsilon < (0.5 - self.tau) / 3:
            raise DomainError(f"epsilon {self.epsilon} incompatible with tau {self.tau}")

    @classmethod
    def from_y(cls, y: float, tau: float = TAU, zero_mean: bool = False) -> "AlphaProfile":
        return cls(tau=tau, epsilon=epsilon_of(y, tau, zero_mean), y=y)

    def mean(self) -> float:
        """Integral of alpha over [0, 1/2]."""
        kx, kv = self.knots, self.knot_values
        return float(np.sum(np.diff(kx) * (kv[:-1] + kv[1:]) / 2))

    @property
    def knots(self) -> np.ndarray:
        t, e = self.tau, self.epsilon
        return np.array([0.0, t, t + e, 0.5 - 2 * e, 0.5 - e, 0.5])

    @property
    def knot_values(self) -> np.ndarray:
        t = self.tau
        return np.array([-1.0, 2 * t - 1, 1.0, 1.0, 1.0 - self.y, 1.0])

    def alpha(self, x):
        return np.interp(np.asarray(x, dtype=float), self.knots, self.knot_values)

    def one_minus_alpha_u(self, u):
        """1 - alpha(1/2 - u) for 0 <= u <= 2 epsilon, without cancellation."""
        u = np.asarray(u, dtype=float)
        e, y = self.epsilon, self.y
        return np.where(u <= e, y * u / e, y * (2 * e - u) / e)

    def weighted_integral(self, weight: Callable, tol: float = 1e-15) -> Estimate:
        """Integral over [0, 1/2] of (1 - alpha(x))/j(x) * weight(x).

        The integrand vanishes on the flat stretch where alpha = 1; the last
        two pieces are integrated in u = 1/2 - x where j = sin(2 pi u)/(2 pi x).
        """
        t, e, y = self.tau, self.epsilon, self.y
        lin = lambda x: (2 - 2 * x) / j_fn(x) * weight(x)
        ramp = lambda x: (2 - 2 * t) * (1 - (x - t) / e) / j_fn(x) * weight(x)

        def tail(u):
            x = 0.5 - u
            jj = np.sin(2 * math.pi * u) / (2 * math.pi * x)
            return self.one_minus_alpha_u(u) / jj * weight(x)

        parts = [
            integrate(lin, np.linspace(0.0, t, 9), abs_tol=tol, rel_tol=1e-14),
            integrate(ramp, [t, t + e], abs_tol=tol, rel_tol=1e-14),
            integrate(tail, [0.0, e, 2 * e], abs_tol=tol, rel_tol=1e-14),
        ]
        return Estimate(sum(p.value for p in parts), sum(p.error for p in parts))


def orthogonality_residual(profile: AlphaProfile) -> float:
    return profile.weighted_integral(lambda x: np.cos(2 * math.pi * x)).value


def solve_alpha(y_bracket: tuple[float, float] = (0.3, 0.6), tau: float = TAU,
                zero_mean: bool = False) -> AlphaProfile:
    """Choose y so that (1 - alpha)/j is orthogonal to cos(2 pi x) on [0, 1/2]."""
    lo, hi = y_bracket
    g = lambda y: orthogonality_residual(AlphaProfile.from_y(y, tau, zero_mean))
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketError(f"no sign change of the orthogonality integral on [{lo}, {hi}]")
    y = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return AlphaProfile.from_y(y, tau, zero_mean)


def compute_d0(profile: AlphaProfile) -> float:
    """d0 = 1 / integral of (1 - alpha)/j over [0, 1/2]."""
    est = profile.weighted_integral(lambda x: np.ones_like(x))
    if not est.value > 1e-12:
        raise DomainError("integral of (1 - alpha)/j vanishes; d0 diverges")
    return 1.0 / est.value


@lru_cache(maxsize=4)
def default_profile() -> AlphaProfile:
    return solve_alpha()


@lru_cache(maxsize=4)
def default_d0() -> float:
    return compute_d0(default_profile())


# ---------------------------------------------------------------- a(x), b(x) and coefficients

@dataclass(frozen=True)
class GorbachevSeries:
    profile: AlphaProfile
    d0: float
    a: np.ndarray          # a_0 .. a_nmax
    b: np.ndarray          # b_0 .. b_nmax
    a_l2_sq: float         # ||a||^2 over one period, exact
    b_l1: float            # integral of |b| over one period

    @property
    def n_max(self) -> int:
        return len(self.a) - 1

    def parseval_a(self) -> float:
        return float(2 * np.sum(self.a[1:] ** 2))

    def phi_hat_sup(self) -> float:
        """Sup of the non-atomic transform: 1 on (-1, 1), then overlapping blocks."""
        b = self.b
        sums = np.abs(b[1:-1] + b[2:])      # on (k, k+1) for k >= 1
        return float(max(1.0, np.max(sums), abs(b[-1])))


def _a_values(profile: AlphaProfile, d0: float, x):
    return d0 * profile.alpha(x)


def b_values(profile: AlphaProfile, d0: float, x):
    """b on [0, 1/2] from x; accurate away from 1/2 (see b_values_u)."""
    x = np.asarray(x, dtype=float)
    return d0 * (1 - profile.alpha(x)) / (2 * j_fn(x)) - 1


def b_values_u(profile: AlphaProfile, d0: float, u):
    """b at x = 1/2 - u for 0 < u <= 2 epsilon."""
    u = np.asarray(u, dtype=float)
    e, y = profile.epsilon, profile.y
    # (1 - alpha)/u is y/e or y(2e - u)/(e u); j/u = 2 sinc(2u)/(1 - 2u)
    slope = np.where(u <= e, y / e, y * (2 * e - u) / (e * np.where(u == 0, 1.0, u)))
    j_over_u = 2 * np.sinc(2 * u) / (1 - 2 * u)
    return d0 * slope / (2 * j_over_u) - 1


def _cos_coeffs_linear(x0, x1, v0, v1, n: np.ndarray) -> np.ndarray:
    """Integral of the linear interpolant times cos(2 pi n x) over [x0, x1]."""
    h = x1 - x0
    m = (v1 - v0) / h
    out = np.empty(n.shape)
    zero = n == 0
    out[zero] = 0.5 * h * (v0 + v1)
    k = 2 * math.pi * n[~zero]
    out[~zero] = (v1 * np.sin(k * x1) - v0 * np.sin(k * x0)) / k + m * (np.cos(k * x1) - np.cos(k * x0)) / k**2
    return out


def _b_nodes(profile: AlphaProfile, d0: float, n_max: int, order: int = 20):
    """Gauss nodes, weights and b-values covering [0, 1/2]."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    t, e = profile.tau, profile.epsilon
    width = min(0.02, 1.0 / (2 * max(n_max, 1)))
    xs, ws, bs = [], [], []

    def add(lo, hi, fn, in_u=False):
        m = max(1, int(math.ceil((hi - lo) / width)))
        edges = np.linspace(lo, hi, m + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        pts = (mid + half * xg).ravel()
        w = (half * wg).ravel()
        vals = fn(pts)
        xs.append(0.5 - pts if in_u else pts)
        ws.append(w)
        bs.append(vals)

    bx = lambda x: b_values(profile, d0, x)
    add(0.0, t, bx)
    add(t, t + e, bx)
    add(t + e, 0.5 - 2 * e, bx)
    bu = lambda u: b_values_u(profile, d0, u)
    add(e, 2 * e, bu, in_u=True)
    add(0.0, e, bu, in_u=True)
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(bs)


def fourier_coeffs(profile: AlphaProfile, n_max: int = 2000, d0: float | None = None) -> GorbachevSeries:
    """Cosine coefficients a_n, b_n (n = 0..n_max) of the even 1-periodic a and b.

    a is piecewise linear, so a_n is exact; b_n uses Gauss panels that
    respect every knot of alpha and resolve cos(2 pi n_max x).
    """
    if n_max < 3:
        raise DomainError("n_max must be at least 3")
    d0 = compute_d0(profile) if d0 is None else d0
    n = np.arange(n_max + 1, dtype=float)
    kx, kv = profile.knots, d0 * profile.knot_values
    a = np.zeros(n_max + 1)
    for i in range(len(kx) - 1):
        a += 2 * _cos_coeffs_linear(kx[i], kx[i + 1], kv[i], kv[i + 1], n)
    a_l2 = 2 * sum((kx[i + 1] - kx[i]) * (kv[i] ** 2 + kv[i] * kv[i + 1] + kv[i + 1] ** 2) / 3
                   for i in range(len(kx) - 1))

    xs, ws, bs = _b_nodes(profile, d0, n_max)
    wb = 2 * ws * bs
    b = np.empty(n_max + 1)
    chunk = max(1, 4_000_000 // len(xs))
    for lo in range(0, n_max + 1, chunk):
        nn = n[lo:lo + chunk, None]
        b[lo:lo + chunk] = np.cos(2 * math.pi * nn * xs[None, :]) @ wb

    series = GorbachevSeries(profile, d0, a, b, float(a_l2), b_l1_norm(profile, d0))
    # b_0 = 0 is the definition of d0 and b_1 = 0 is the choice of y; a_0 is
    # 2 d0 mean(alpha), which only the zero-mean ramp rule makes exactly 0.
    for name, val in (("b_0", b[0]), ("b_1", b[1])):
        if abs(val) > 1e-9:
            raise QuadratureError(f"{name} should vanish", float(val), abs(float(val)))
    if abs(a[0] - 2 * d0 * profile.mean()) > 1e-12:
        raise QuadratureError("a_0 disagrees with 2 d0 mean(alpha)", float(a[0]), abs(float(a[0])))
    return series


def b_l1_norm(profile: AlphaProfile, d0: float) -> float:
    """Integral of |b| over one period, split at the sign changes of b."""
    t, e = profile.tau, profile.epsilon
    bx = lambda x: b_values(profile, d0, x)
    bu = lambda u: b_values_u(profile, d0, u)
    total = 0.0
    for fn, lo, hi in ((bx, 0.0, t), (bx, t, t + e), (bx, t + e, 0.5 - 2 * e), (bu, e, 2 * e), (bu, 0.0, e)):
        grid = np.linspace(lo, hi, 513)
        edges = np.union1d(grid, sign_change_roots(fn, grid))
        total += integrate(lambda z: np.abs(fn(z)), edges, abs_tol=1e-13, rel_tol=1e-12).value
    return 2 * total


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class SupCertificate:
    """Sampled-and-refined sup norm; a numerical certificate, not a proof."""

    sup_norm: float
    sampled_max: float
    argmax: float
    grid_step: float
    refinement_depth: int
    tail_allowance: float
    method: str

    def as_dict(self) -> dict:
        return {
            "grid_step": self.grid_step,
            "refinement_depth": self.refinement_depth,
            "tail_allowance": self.tail_allowance,
            "sampled_max": self.sampled_max,
            "argmax": self.argmax,
            "method": self.method,
        }


@dataclass(frozen=True)
class DualWitness:
    """A bounded even function with transform 1 on (-1, 1).

    The transform outside the core is stored exactly: `blocks` are
    indicator pieces (center, half_width, height) and `delta_atoms` are
    Dirac masses (location, coefficient). Both are listed for t > 0 and
    t < 0 separately.
    """

    name: str
    continuous_part: Callable[[np.ndarray], np.ndarray]
    delta_atoms: tuple[tuple[float, float], ...]
    blocks: tuple[tuple[float, float, float], ...]
    certificate: SupCertificate
    edges: Callable[[float, float], np.ndarray]
    terms: list = field(default_factory=list)
    transform_on_core: bool = True

    @property
    def sup_norm(self) -> float:
        return self.certificate.sup_norm

    def __call__(self, x):
        return self.continuous_part(np.asarray(x, dtype=float))

    def transform_continuous(self, t):
        """Non-atomic part of the transform (the indicator pieces)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, h, v in self.blocks:
            out = out + np.where(np.abs(t - c) <= h, v, 0.0)
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "continuous_terms": self.terms,
            "transform_blocks": [list(b) for b in self.blocks],
            "delta_atoms": [list(a) for a in self.delta_atoms],
            "sup_norm": self.sup_norm,
            "certificate": self.certificate.as_dict(),
        }


def _core_block():
    return ((0.0, 1.0, 1.0),)


def _symmetric(items):
    out = []
    for loc, *rest in items:
        out.append((loc, *rest))
        out.append((-loc, *rest))
    return tuple(out)


def _refine_max(fn, centers, halfwidth, depth: int):
    """Local bounded maximization of |fn| around sample points."""
    best_val, best_x = -np.inf, 0.0
    for c in centers:
        res = optimize.minimize_scalar(lambda z: -abs(float(fn(np.array([z]))[0])),
                                       bounds=(c - halfwidth, c + halfwidth), method="bounded",
                                       options={"xatol": halfwidth * 2.0**-depth})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, float(res.x)
    return best_val, best_x


# psi: Gorbachev

def psi_closed_form(profile: AlphaProfile, d0: float):
    """psi = phi + a in closed form.

    With x = k + s, |s| <= 1/2, the periodic parts give
    psi(x) = d0 (r + (1 - r) alpha(|s|)) where r = s/x (r = 1 when k = 0).
    """
    def psi(x):
        x = np.abs(np.asarray(x, dtype=float))
        k = np.floor(x + 0.5)
        s = x - k
        r = np.where(k == 0, 1.0, s / np.where(x == 0, 1.0, x))
        return d0 * (r + (1 - r) * profile.alpha(np.abs(s)))
    return psi


def _psi_profile_points(profile: AlphaProfile, step: float) -> np.ndarray:
    kn = profile.knots
    grid = np.union1d(np.arange(0.0, 0.5, step), kn)
    return np.union1d(grid, -grid)


def _period_edges(profile: AlphaProfile, lo: float, hi: float, scale: float = 1.0) -> np.ndarray:
    """Panel edges in [lo, hi] for a function with psi's period structure, dilated by 1/scale."""
    kn = profile.knots
    base = np.union1d(np.union1d(kn, -kn), np.arange(-0.5, 0.5, 1 / 16))
    k0, k1 = math.floor(lo * scale) - 1, math.ceil(hi * scale) + 1
    ks = np.arange(k0, k1 + 1, dtype=float)
    e = (ks[:, None] + base[None, :]).ravel() / scale
    e = e[(e >= lo) & (e <= hi)]
    return np.union1d(e, [lo, hi])


def certify_psi(profile: AlphaProfile, d0: float, step: float = 1e-4, depth: int = 40) -> SupCertificate:
    """Sup of |psi| over R.

    For fixed s, psi is affine in r = s/(k + s), and r moves monotonically
    from its k = 1 value toward 0 as k grows; so over all periods k >= 1 the
    extremes occur at k = 1 or in the limit profile d0 alpha(|s|). Sampling
    k = 0, k = 1 and the limit therefore covers the real line.
    """
    psi = psi_closed_form(profile, d0)
    s = _psi_profile_points(profile, step)
    s = s[(s >= -0.5) & (s < 0.5)]
    x0 = np.abs(s)
    x1 = 1.0 + s
    lim = d0 * profile.alpha(np.abs(s))
    v0, v1 = np.abs(psi(x0)), np.abs(psi(x1))
    cand = [(float(np.max(v0)), float(x0[np.argmax(v0)])),
            (float(np.max(v1)), float(x1[np.argmax(v1)])),
            (float(np.max(np.abs(lim))), math.inf)]
    sampled, arg = max(cand, key=lambda c: c[0])
    top = x1[np.argsort(v1)[-100:]]
    ref, ref_x = _refine_max(psi, top, step, depth)
    if ref > sampled:
        sampled, arg = ref, ref_x
    return SupCertificate(sup_norm=sampled, sampled_max=sampled, argmax=arg, grid_step=step,
                          refinement_depth=depth, tail_allowance=0.0,
                          method="closed form on periods k=0,1 and the k->inf limit")


def build_psi(profile: AlphaProfile | None = None, series: GorbachevSeries | None = None,
              n_max: int = 2000) -> DualWitness:
    """Gorbachev's witness psi = 2 j (1 + b) + a, with transform
    chi_[-1,1] + sum b_n chi_[-1,1](t -+ n) + sum a_n delta(t -+ n)."""
    profile = profile or default_profile()
    if series is None:
        series = fourier_coeffs(profile, n_max)
    d0 = series.d0
    cert = certify_psi(profile, d0)
    atoms = _symmetric((float(n), float(series.a[n])) for n in range(1, series.n_max + 1))
    blocks = _core_block() + _symmetric((float(n), 1.0, float(series.b[n])) for n in range(2, series.n_max + 1))
    terms = [{"kind": "gorbachev_psi", "tau": profile.tau, "epsilon": profile.epsilon,
              "y": profile.y, "d0": d0, "n_max": series.n_max,
              "formula": "d0*(r + (1-r)*alpha(|s|)), x = k + s, r = s/x"}]
    return DualWitness(
        name="psi",
        continuous_part=psi_closed_form(profile, d0),
        delta_atoms=atoms,
        blocks=blocks,
        certificate=cert,
        edges=lambda lo, hi: _period_edges(profile, lo, hi),
        terms=terms,
    )


# psi-tilde

def tilde_psi_a0(n_terms: int = 1_000_000) -> Estimate:
    """a~_0 = (4/pi) sum_j (-1)^j/(2j+1)^2, with its Leibniz error bound."""
    j = np.arange(n_terms, dtype=float)
    terms = np.where(j % 2 == 0, 1.0, -1.0) / (2 * j + 1) ** 2
    # sum smallest terms first
    value = (4 / math.pi) * float(np.sum(terms[::-1]))
    return Estimate(value, (4 / math.pi) / (2 * n_terms + 1) ** 2)


def tilde_coeffs(n_max: int):
    """a~_n for n = 0..n_max via trigamma: sum_{j>=n} (-1)^j/(2j+1)^2
    = (-1)^n (psi1((2n+1)/4) - psi1((2n+3)/4))/16."""
    n = np.arange(n_max + 1, dtype=float)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    return (4 / math.pi) * sign * (special.polygamma(1, (2 * n + 1) / 4) - special.polygamma(1, (2 * n + 3) / 4)) / 16


def build_tilde_psi(n_max: int = 4000) -> DualWitness:
    """The step witness 2 a~_n on |x -+ n/2| <= 1/4, minus a~_0 sgn(cos 2 pi x)."""
    coef = tilde_coeffs(n_max)
    a0 = coef[0]

    def psi_t(x):
        x = np.abs(np.asarray(x, dtype=float))
        n = np.minimum(np.floor(2 * x + 0.5), n_max).astype(int)
        return 2 * coef[n] - a0 * np.sign(np.cos(2 * math.pi * x))

    # On the n-th step the value is 2 a~_n - (-1)^n a~_0; the steps tend to
    # -+ a~_0, so sampling each step centre bounds the sup.
    n = np.arange(n_max + 1)
    vals = np.abs(2 * coef - np.where(n % 2 == 0, 1.0, -1.0) * a0)
    cert = SupCertificate(sup_norm=float(max(vals.max(), a0)), sampled_max=float(vals.max()),
                          argmax=float(np.argmax(vals)) / 2, grid_step=0.5, refinement_depth=0,
                          tail_allowance=0.0, method="exact on each step")
    return DualWitness(
        name="psi-tilde",
        continuous_part=psi_t,
        delta_atoms=(),
        blocks=_core_block(),
        certificate=cert,
        edges=lambda lo, hi: np.union1d(np.arange(math.floor(4 * lo) / 4, hi, 1 / 16), [lo, hi]),
        terms=[{"kind": "tilde_step", "a0": float(a0), "n_max": n_max}],
        transform_on_core=True,
    )


# Psi example

PSI_EXAMPLE_WIDTHS = {"a": 0.018, "b": 0.027, "c": 0.002}
_PSI_BLOCKS = ((1.5, PSI_EXAMPLE_WIDTHS["a"]), (2.0, PSI_EXAMPLE_WIDTHS["b"]), (5.0, PSI_EXAMPLE_WIDTHS["c"]))
_PSI_COS = ((1.0, -0.888), (3.0, -0.01))


def psi_example(x):
    x = np.asarray(x, dtype=float)
    out = 2.0 * np.sinc(2 * x)
    for center, w in _PSI_BLOCKS:
        out = out + 2 * w * np.sinc(w * x) * np.cos(2 * math.pi * center * x)
    for freq, coef in _PSI_COS:
        out = out + coef * np.cos(2 * math.pi * freq * x)
    return out


def _psi_example_m2() -> float:
    """Bound on |Psi''| from the transform: sum of (2 pi |t|)^2 over its total variation."""
    m2 = (2 * math.pi) ** 2 * 2 / 3                                   # core
    for center, w in _PSI_BLOCKS:
        m2 += 2 * w * (2 * math.pi * (center + w / 2)) ** 2
    for freq, coef in _PSI_COS:
        m2 += abs(coef) * (2 * math.pi * freq) ** 2
    return m2


def certify_psi_example(step: float = 1e-4, depth: int = 40, far: float = 50.0) -> SupCertificate:
    """Grid maximum on [0, far] plus M2 h^2/8, checked against the analytic
    envelope 0.898 + 7/(pi |x|) beyond `far`."""
    x = np.arange(0.0, far + step, step)
    v = np.abs(psi_example(x))
    i = int(np.argmax(v))
    allowance = _psi_example_m2() * step * step / 8
    envelope = sum(abs(c) for _, c in _PSI_COS) + 7 / (math.pi * far)
    top = x[np.argsort(v)[-100:]]
    ref, ref_x = _refine_max(psi_example, top, step, depth)
    sampled = float(v[i])
    sup = max(sampled + allowance, envelope, ref)
    return SupCertificate(sup_norm=sup, sampled_max=max(sampled, ref),
                          argmax=ref_x if ref > sampled else float(x[i]),
                          grid_step=step, refinement_depth=depth, tail_allowance=allowance,
                          method=f"grid + M2 h^2/8 on [0,{far:g}], envelope beyond")


def build_psi_example(certify_bound: float = PSI_EXAMPLE_BOUND) -> DualWitness:
    cert = certify_psi_example()
    if not cert.sup_norm < certify_bound:
        raise CertificationError(f"certified sup {cert.sup_norm} is not below {certify_bound}")
    blocks = _core_block() + _symmetric((c, w / 2, 1.0) for c, w in _PSI_BLOCKS)
    # A cosine coefficient k cos(2 pi f x) is the pair of atoms (k/2) at +-f.
    atoms = _symmetric((f, coef / 2) for f, coef in _PSI_COS)
    terms = [{"kind": "sinc", "amplitude": 2.0, "width": 2.0, "carrier": 0.0}]
    terms += [{"kind": "sinc", "amplitude": 2.0, "width": w, "carrier": c} for c, w in _PSI_BLOCKS]
    terms += [{"kind": "cos", "amplitude": coef, "freq": f} for f, coef in _PSI_COS]
    return DualWitness(
        name="Psi-example",
        continuous_part=psi_example,
        delta_atoms=atoms,
        blocks=blocks,
        certificate=cert,
        edges=lambda lo, hi: np.union1d(np.arange(lo, hi, 1 / 32), [hi]),
        terms=terms,
    )


# ---------------------------------------------------------------- mollification

def mollify_params(A: float, c: float, shift: float) -> tuple[float, float]:
    """(lambda_m, gamma) with gamma - 1 = lambda_m/2 and c gamma/lambda_m = A - shift."""
    k = A - shift
    lam = 2.0 / ((2.0 / c) * k - 1.0)
    gamma = 1.0 / (1.0 - c / (2.0 * k))
    return lam, gamma


@dataclass(frozen=True)
class MollifiedWitness:
    """Phi(x) = gamma base(gamma x) sinc(lambda_m x).

    The transform is base^(t/gamma) convolved with a unit-mass box of width
    lambda_m, so each atom becomes a box of height gamma coef/lambda_m.
    """

    base: DualWitness
    A: float
    mode: MollifyMode
    gamma: float
    lambda_m: float
    c: float

    @property
    def sup_norm(self) -> float:
        return self.gamma * self.base.sup_norm

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma * self.base(self.gamma * x) * np.sinc(self.lambda_m * x)

    def _steps(self):
        """Dilated base transform as intervals [lo, hi] with heights (atoms excluded)."""
        g = self.gamma
        blk = np.array(self.base.blocks, dtype=float).reshape(-1, 3)
        return g * (blk[:, 0] - blk[:, 1]), g * (blk[:, 0] + blk[:, 1]), blk[:, 2]

    def transform(self, t):
        """Phi^(t): blocks become trapezoids, atoms become boxes.

        The block part is (G(t + lam/2) - G(t - lam/2))/lam with G the
        antiderivative of the dilated step function, evaluated by sorting.
        """
        t = np.asarray(t, dtype=float)
        g, lam = self.gamma, self.lambda_m
        lo, hi, v = self._steps()

        def antideriv(x):
            # sum over steps of v * clip(x - lo, 0, hi - lo)
            out = np.zeros_like(x)
            for edge, sign in ((lo, 1.0), (hi, -1.0)):
                order = np.argsort(edge)
                e, w = edge[order], sign * v[order]
                cw = np.concatenate([[0.0], np.cumsum(w)])
                cwe = np.concatenate([[0.0], np.cumsum(w * e)])
                k = np.searchsorted(e, x, side="right")
                out = out + cw[k] * x - cwe[k]
            return out

        out = (antideriv(t + lam / 2) - antideriv(t - lam / 2)) / lam
        if self.base.delta_atoms:
            atoms = np.array(self.base.delta_atoms, dtype=float)
            order = np.argsort(atoms[:, 0])
            loc, coef = g * atoms[order, 0], g * atoms[order, 1] / lam
            cc = np.concatenate([[0.0], np.cumsum(coef)])
            inside = np.searchsorted(loc, t + lam / 2, side="right")
            out = out + cc[inside] - cc[np.searchsorted(loc, t - lam / 2, side="left")]
        return out

    def edges(self, lo: float, hi: float) -> np.ndarray:
        e = self.base.edges(lo * self.gamma, hi * self.gamma) / self.gamma
        return np.union1d(e, np.arange(lo, hi, 1 / 16))

    def check_transform_range(self) -> dict:
        """Extremes of Phi^ over R.

        The transform is piecewise linear, with kinks where a box edge crosses
        a step edge and jumps at the atom boxes; evaluating at those points
        (and just inside each atom box) is exhaustive.
        """
        g, lam = self.gamma, self.lambda_m
        lo, hi, _ = self._steps()
        pts = [lo - lam / 2, lo + lam / 2, hi - lam / 2, hi + lam / 2]
        if self.base.delta_atoms:
            loc = g * np.array(self.base.delta_atoms, dtype=float)[:, 0]
            inner = lam / 2 * (1 - 1e-9)
            pts += [loc - inner, loc + inner, loc]
        t = np.unique(np.concatenate(pts))
        t = np.union1d(t[t >= 0], np.linspace(0.0, 1.0, 101)[:-1])
        v = self.transform(t)
        core = v[t < 1.0 - 1e-9]    # the open core; atom boxes may start at t = 1
        vmin, vmax = float(v.min()), float(v.max())
        tol = 1e-12
        if self.mode is MollifyMode.C:
            # duality needs |Phi^ - 1| <= A; the construction aims at |Phi^| <= A - 1
            ok = max(abs(vmin - 1), abs(vmax - 1)) <= self.A + tol
            design = max(abs(vmin), abs(vmax)) <= self.A - 1 + tol
        else:
            ok = vmin >= 1 - self.A - tol and vmax <= 1 + tol
            design = ok
        return {"min": vmin, "max": vmax, "core_deviation": float(np.max(np.abs(core - 1))),
                "ok": bool(ok), "design_range_ok": bool(design)}

    def to_json(self) -> dict:
        return {
            "name": f"mollified {self.base.name}",
            "A": self.A,
            "mode": self.mode.value,
            "gamma": self.gamma,
            "lambda_m": self.lambda_m,
            "c": self.c,
            "continuous_terms": [{"kind": "mollified", "formula": "gamma*base(gamma*x)*sinc(lambda_m*x)",
                                  "base": self.base.to_json()}],
            "delta_atoms": [],
            "sup_norm": self.sup_norm,
            "certificate": {**self.base.certificate.as_dict(), "scaled_by_gamma": self.gamma},
        }


def mollify(base: DualWitness, A: float, mode: MollifyMode | str, c: float | None = None) -> MollifiedWitness:
    """Dilate and box-mollify `base` so its atoms fit the A-dependent transform range.

    Mode C uses c = 0.6 and needs A >= 2.6; mode Cplus uses c = 0.444 and
    needs A > 1.222. A = inf returns the base unchanged (gamma = 1).
    """
    mode = MollifyMode(mode)
    if mode is MollifyMode.C:
        c = PSI_C if c is None else c
        shift = 2.0
        if not A >= 2.6:
            raise DomainError(f"mode C needs A >= 2.6, got {A}")
    else:
        c = PSI_EXAMPLE_C if c is None else c
        shift = 1.0
        if not A > 1.222:
            raise DomainError(f"mode Cplus needs A > 1.222, got {A}")
    if math.isinf(A):
        return MollifiedWitness(base, A, mode, 1.0, 0.0, c)
    lam, gamma = mollify_params(A, c, shift)
    return MollifiedWitness(base, A, mode, gamma, lam, c)


# ---------------------------------------------------------------- pairing

def pair(witness, fp: FourierPair, R: float = 2000.0) -> Estimate:
    """Integral of F times the witness over R, for even F.

    Panels follow the witness's structure; the integral is carried to R and
    the change between R/2 and R serves as the truncation error estimate.
    """
    if not fp.is_even:
        raise DomainError("pairing expects an even test function")
    xg, wg = np.polynomial.legendre.leggauss(20)
    edges = witness.edges(0.0, R)
    step = 1.0 / (8 * max(fp.f_frequency, 1.0))
    edges = np.union1d(edges, np.arange(0.0, R, step))
    a, b = edges[:-1], edges[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = np.zeros(a.size)
    for lo in range(0, a.size, 20_000):
        sl = slice(lo, lo + 20_000)
        pts = mid[sl, None] + half[sl, None] * xg[None, :]
        total[sl] = half[sl] * ((fp.eval_f(pts) * witness(pts)) @ wg)
    cum = np.cumsum(total)
    full = 2 * float(cum[-1])
    halfway = 2 * float(cum[np.searchsorted(b, R / 2)])
    return Estimate(full, abs(full - halfway))
