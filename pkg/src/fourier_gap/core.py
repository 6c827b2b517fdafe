"""Fourier pairs and the extremal functionals J and J+.

Convention: F^(t) = integral of F(x) exp(-2 pi i x t) dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate

from .quadrature import (
    DEFAULT_SPEC,
    ArrayFunc,
    Estimate,
    QuadratureError,
    QuadratureSpec,
    grid_for,
    integrate,
    sign_change_roots,
)

INF = math.inf


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class DegenerateInputError(ValueError):
    pass


class TransformKind(str, Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC_ORACLE = "numeric_oracle"


class Mode(str, Enum):
    J = "J"
    JPLUS = "Jplus"


@dataclass(frozen=True)
class Carrier:
    """One term g(x) cos(2 pi freq x) of an asymptotic split of F beyond `start`.

    `g` must be smooth and non-oscillating on [start, inf); it lets the
    transform oracle hand each term to a Fourier-weighted integrator.
    """

    freq: float
    g: ArrayFunc


@dataclass(frozen=True)
class FourierPair:
    eval_f: ArrayFunc
    eval_fhat: ArrayFunc
    transform_kind: TransformKind = TransformKind.CLOSED_FORM
    support_radius: float | None = None
    is_even: bool = True
    l1_closed_form: float | None = None
    name: str = "F"
    # Bounds for the discarded tails: f_tail_bound(R) >= int_{|x|>R} |F|,
    # fhat_tail_bound(T) >= int_{|t|>T} |F^|.
    f_tail_bound: Callable[[float], float] | None = None
    fhat_tail_bound: Callable[[float], float] | None = None
    # Highest oscillation frequency of F in x; sets sampling density.
    f_frequency: float = 1.0
    carriers: tuple[Carrier, ...] = ()
    carrier_start: float = 0.0
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.support_radius is not None and not self.support_radius > 0:
            raise DomainError("support_radius must be positive")
        if self.l1_closed_form is not None and self.l1_closed_form < 0:
            raise DomainError("l1_closed_form must be nonnegative")

    def f(self, x):
        return self.eval_f(np.asarray(x, dtype=float))

    def fhat(self, t):
        return self.eval_fhat(np.asarray(t, dtype=float))

    def describe(self) -> str:
        if not self.params:
            return self.name
        inner = ";".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class FunctionalReport:
    A: float
    value_at_zero: float
    l1_norm: float
    tail_integral: float
    functional_value: float
    mode: Mode
    error_estimate: float

    def __post_init__(self):
        if not self.l1_norm > 0:
            raise DegenerateInputError("l1_norm must be positive")

    def as_dict(self) -> dict:
        return {
            "A": "inf" if math.isinf(self.A) else self.A,
            "mode": self.mode.value,
            "value_at_zero": self.value_at_zero,
            "l1_norm": self.l1_norm,
            "tail_integral": self.tail_integral,
            "functional_value": self.functional_value,
            "error_estimate": self.error_estimate,
        }


def dilate(fp: FourierPair, lam: float) -> FourierPair:
    """The pair for x -> F(x/lam), whose transform is lam F^(lam t)."""
    if not lam > 0:
        raise DomainError("dilation factor must be positive")
    f, fh = fp.eval_f, fp.eval_fhat
    ftb, fhtb = fp.f_tail_bound, fp.fhat_tail_bound
    return replace(
        fp,
        eval_f=lambda x: f(x / lam),
        eval_fhat=lambda t: lam * fh(lam * t),
        support_radius=None if fp.support_radius is None else fp.support_radius / lam,
        l1_closed_form=None if fp.l1_closed_form is None else lam * fp.l1_closed_form,
        name=f"{fp.name}(x/{lam:g})",
        f_tail_bound=None if ftb is None else (lambda R: lam * ftb(R / lam)),
        fhat_tail_bound=None if fhtb is None else (lambda T: fhtb(lam * T)),
        f_frequency=fp.f_frequency / lam,
        carriers=tuple(Carrier(c.freq / lam, _scaled(c.g, lam)) for c in fp.carriers),
        carrier_start=fp.carrier_start * lam,
        params={**fp.params, "dilation": lam},
    )


def _scaled(g, lam):
    return lambda x: g(x / lam)


# ---------------------------------------------------------------- integrals

def _sampling_step(freq: float) -> float:
    return 1.0 / (16.0 * max(freq, 1.0))


def _panels_with_roots(func: ArrayFunc, lo: float, hi: float, step: float) -> np.ndarray:
    grid = grid_for(lo, hi, step)
    roots = sign_change_roots(func, grid)
    return np.unique(np.concatenate([grid, roots]))


def _integrate_checked(func, edges, q: QuadratureSpec, budget_share: float = 0.25) -> Estimate:
    try:
        return integrate(func, edges, abs_tol=q.abs_tol * budget_share,
                         rel_tol=q.rel_tol * budget_share, max_panels=q.max_subdivisions)
    except QuadratureError as exc:
        raise QuadratureError("adaptive quadrature did not converge", exc.value, exc.error) from None


def _cutoff(bound, q: QuadratureSpec) -> float:
    """Smallest power-of-two radius (capped by truncation_radius) where the
    declared tail bound is negligible against abs_tol."""
    if bound is None:
        return q.truncation_radius
    r = 2.0
    while r < q.truncation_radius and bound(r) > 1e-2 * q.abs_tol:
        r *= 2
    return min(r, q.truncation_radius)


def l1_numeric(fp: FourierPair, q: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    """Quadrature of |F| on [-R, R]; the tail bound at R is added to the error."""
    R = _cutoff(fp.f_tail_bound, q)
    absf = lambda x: np.abs(fp.eval_f(x))
    step = _sampling_step(fp.f_frequency)
    if fp.is_even:
        est = _integrate_checked(absf, _panels_with_roots(fp.eval_f, 0.0, R, step), q)
        value, err = 2 * est.value, 2 * est.error
    else:
        est = _integrate_checked(absf, _panels_with_roots(fp.eval_f, -R, R, step), q)
        value, err = est.value, est.error
    tail = fp.f_tail_bound(R) if fp.f_tail_bound is not None else INF
    return Estimate(value, err + tail)


def l1_norm(fp: FourierPair, q: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    """The L1 norm of F.

    A closed form, when present, is returned after a cross-check against
    quadrature (the check allows for the truncation tail). Otherwise the
    quadrature estimate must meet the tolerance or QuadratureError is raised.
    """
    num = l1_numeric(fp, q)
    if fp.l1_closed_form is not None:
        cf = fp.l1_closed_form
        slack = num.error + 1e3 * q.target(cf)
        if abs(num.value - cf) > slack:
            raise QuadratureError(
                f"closed-form L1 norm {cf!r} disagrees with quadrature", num.value, num.error)
        return Estimate(cf, 0.0)
    return q.check(num, "l1_norm")


def _tail_interval(fp: FourierPair, q: QuadratureSpec) -> tuple[float, float]:
    """Upper end T of the t-range for tail integrals and the discarded mass."""
    if fp.support_radius is not None:
        return fp.support_radius, 0.0
    if fp.fhat_tail_bound is None:
        raise DomainError(f"{fp.name}: tail integrals need support_radius or fhat_tail_bound")
    T = _cutoff(fp.fhat_tail_bound, q)
    return T, fp.fhat_tail_bound(T)


def _tail_integral(fp: FourierPair, q: QuadratureSpec, positive: bool) -> Estimate:
    T, discarded = _tail_interval(fp, q)
    if T <= 1.0:
        return Estimate(0.0, 0.0)
    part = (lambda t: np.maximum(fp.eval_fhat(t), 0.0)) if positive else (lambda t: np.abs(fp.eval_fhat(t)))
    step = min(_sampling_step(1.0), (T - 1.0) / 8)
    right = _integrate_checked(part, _panels_with_roots(fp.eval_fhat, 1.0, T, step), q)
    if fp.is_even:
        value, err = 2 * right.value, 2 * right.error
    else:
        left = _integrate_checked(part, _panels_with_roots(fp.eval_fhat, -T, -1.0, step), q)
        value, err = right.value + left.value, right.error + left.error
    est = Estimate(value, err + discarded)
    return q.check(est, "tail integral")


def tail_abs_integral(fp: FourierPair, q: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    """Integral of |F^| over |t| > 1."""
    return _tail_integral(fp, q, positive=False)


def tail_pos_integral(fp: FourierPair, q: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    """Integral of the positive part of F^ over |t| > 1."""
    return _tail_integral(fp, q, positive=True)


def functional(fp: FourierPair, A: float, mode: Mode | str = Mode.J,
               q: QuadratureSpec = DEFAULT_SPEC) -> FunctionalReport:
    """Evaluate J (|F(0)| against |F^| tails) or J+ (F(0) against positive tails).

    A = math.inf is a distinguished value: J then requires F^ supported in
    [-1, 1] and J+ requires the positive tail to vanish.
    """
    mode = Mode(mode)
    if math.isnan(A) or A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    f0 = float(fp.f(0.0))
    norm = l1_norm(fp, q)
    if norm.value <= 0:
        raise DegenerateInputError("F has zero L1 norm")

    if math.isinf(A):
        if mode is Mode.J:
            if fp.support_radius is None or fp.support_radius > 1:
                raise DomainError("A = inf in mode J needs support_radius <= 1")
            tail = Estimate(0.0, 0.0)
        else:
            tail = tail_pos_integral(fp, q)
            if tail.value > tail.error + q.abs_tol:
                raise DomainError("A = inf in mode Jplus needs a vanishing positive tail")
            tail = Estimate(0.0, tail.error)
        penalty, penalty_err = 0.0, 0.0
    else:
        tail = tail_abs_integral(fp, q) if mode is Mode.J else tail_pos_integral(fp, q)
        penalty, penalty_err = A * tail.value, A * tail.error

    lead = abs(f0) if mode is Mode.J else f0
    numer = lead - penalty
    value = numer / norm.value
    err = penalty_err / norm.value + abs(value) * norm.error / norm.value
    return FunctionalReport(A=A, value_at_zero=f0, l1_norm=norm.value, tail_integral=tail.value,
                            functional_value=value, mode=mode, error_estimate=err)


# ---------------------------------------------------------------- transform oracle

_QAWF_OPTS = dict(epsabs=1e-14, limlst=200, limit=200)


def _fourier_tail(g: ArrayFunc, start: float, omega: float) -> Estimate:
    """Integral of g(x) cos(2 pi omega x) over [start, inf)."""
    scalar = lambda x: float(g(np.asarray(x, dtype=float)))
    if omega == 0.0:
        val, err = sp_integrate.quad(scalar, start, np.inf, epsabs=1e-14, epsrel=1e-12, limit=500)
    else:
        val, err = sp_integrate.quad(scalar, start, np.inf, weight="cos", wvar=2 * math.pi * abs(omega),
                                     **_QAWF_OPTS)
    return Estimate(val, err)


def numeric_transform(fp: FourierPair, t: float, q: QuadratureSpec = DEFAULT_SPEC):
    """F^(t) by quadrature, independent of fp.eval_fhat.

    The core [0, R0] is integrated with adaptive Gauss-Legendre panels at
    the local oscillation scale. Beyond R0 the integral is either dropped
    (when the declared tail bound is within tolerance) or taken term by term
    over the pair's carrier split with a Fourier-weighted rule. Even pairs
    return a float; other pairs return a complex number.
    """
    t = float(t)
    if not fp.is_even:
        re = _transform_part(fp, t, q, np.cos)
        im = _transform_part(fp, t, q, np.sin)
        return complex(re, -im)
    return _transform_part(fp, t, q, np.cos)


def _transform_part(fp: FourierPair, t: float, q: QuadratureSpec, trig) -> float:
    w = 2 * math.pi * t
    if fp.is_even:
        integrand = lambda x: 2 * fp.eval_f(x) * trig(w * x)
    else:
        integrand = lambda x: (fp.eval_f(x) * trig(w * x)) + (fp.eval_f(-x) * trig(-w * x))

    if fp.carriers and trig is np.cos and fp.is_even:
        R0 = max(fp.carrier_start, 1.0)
        tail_val, tail_err = 0.0, 0.0
        for c in fp.carriers:
            for om in (c.freq + t, c.freq - t):
                est = _fourier_tail(c.g, R0, om)
                tail_val += est.value
                tail_err += est.error
    else:
        R0 = _cutoff(fp.f_tail_bound, q)
        tail_val = 0.0
        tail_err = fp.f_tail_bound(R0) if fp.f_tail_bound is not None else INF

    h = 1.0 / (8.0 * max(abs(t) + fp.f_frequency, 1.0))
    core = _integrate_checked(integrand, grid_for(0.0, R0, h), q, budget_share=0.1)
    est = Estimate(core.value + tail_val, core.error + tail_err)
    return q.check(est, f"transform at t={t}").value
