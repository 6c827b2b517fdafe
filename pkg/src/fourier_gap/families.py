"""Closed-form Fourier pairs: the cosine kernel H, the Fejer kernel, Gaussian mixtures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .core import Carrier, DomainError, FourierPair, TransformKind, dilate

SI_PI = float(special.sici(math.pi)[0])
C0 = 2.0 / SI_PI                 # H(0)/||H||_1
H_L1 = 1.0 / C0


# ---------------------------------------------------------------- H(x) = cos(2 pi x)/(1 - 16 x^2)

def h_kernel(x):
    """cos(2 pi x)/(1 - 16 x^2), written as (pi/4) sinc(2|x| - 1/2)/(2|x| + 1/2).

    The two forms agree identically; the second has no removable singularity
    at |x| = 1/4, so no guard window is needed.
    """
    u = 2.0 * np.abs(np.asarray(x, dtype=float))
    return (math.pi / 4) * np.sinc(u - 0.5) / (u + 0.5)


def _dsinc(z):
    """Derivative of sinc(z) = sin(pi z)/(pi z)."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    direct = (np.cos(math.pi * zs) - np.sinc(zs)) / zs
    p2 = math.pi**2
    series = z * (-p2 / 3 + z * z * (p2 * p2 / 30 - z * z * p2**3 / 840))
    return np.where(small, series, direct)


def h_kernel_prime(x):
    """H'(x), from the same sinc form."""
    x = np.asarray(x, dtype=float)
    u = 2.0 * np.abs(x)
    z = u - 0.5
    d = u + 0.5
    val = (math.pi / 4) * 2.0 * (_dsinc(z) / d - np.sinc(z) / d**2)
    return np.sign(x) * val


def h_transform(t):
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) <= 1.0, (math.pi / 4) * np.cos(math.pi * t / 2), 0.0)


def _h_tail(R: float) -> float:
    # |H(x)| <= 1/(16x^2 - 1) for |x| > 1/4; both sides of the origin.
    if R <= 0.25:
        return math.inf
    return 0.25 * math.log((4 * R + 1) / (4 * R - 1))


H = FourierPair(
    eval_f=h_kernel,
    eval_fhat=h_transform,
    support_radius=1.0,
    l1_closed_form=H_L1,
    name="H",
    f_tail_bound=_h_tail,
    f_frequency=1.0,
    carriers=(Carrier(1.0, lambda x: 1.0 / (1.0 - 16.0 * x * x)),),
    carrier_start=1.0,
)


def make_dilated_cosine(lam: float) -> FourierPair:
    """F(x) = H(x/lam), with F^(t) = lam (pi/4) cos(pi lam t/2) on |t| <= 1/lam."""
    if not 0 < lam <= 1:
        raise DomainError(f"dilation must lie in (0, 1], got {lam}")
    return dilate(H, lam)


# ---------------------------------------------------------------- Fejer kernel

def fejer_kernel(x):
    return np.sinc(np.asarray(x, dtype=float)) ** 2


def fejer_transform(t):
    return np.maximum(1.0 - np.abs(np.asarray(t, dtype=float)), 0.0)


_INV_2PI2 = 1.0 / (2 * math.pi**2)

FEJER = FourierPair(
    eval_f=fejer_kernel,
    eval_fhat=fejer_transform,
    support_radius=1.0,
    l1_closed_form=1.0,
    name="K",
    f_tail_bound=lambda R: 2.0 / (math.pi**2 * R),
    f_frequency=1.0,
    # sin^2(pi x)/(pi x)^2 = (1 - cos 2 pi x)/(2 pi^2 x^2)
    carriers=(Carrier(0.0, lambda x: _INV_2PI2 / (x * x)),
              Carrier(1.0, lambda x: -_INV_2PI2 / (x * x))),
    carrier_start=1.0,
)


def make_fejer(lam: float) -> FourierPair:
    """F(x) = K(x/lam), with F^(t) = lam (1 - lam|t|)_+."""
    if not 0 < lam <= 1:
        raise DomainError(f"dilation must lie in (0, 1], got {lam}")
    return dilate(FEJER, lam)


# ---------------------------------------------------------------- Gaussian mixtures

@dataclass(frozen=True)
class MixtureTerm:
    c: float
    m: int
    s: float

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise DomainError(f"power must be a nonnegative integer, got {self.m!r}")
        if not (self.s > 0 and math.isfinite(self.s)):
            raise DomainError(f"rate must be positive, got {self.s!r}")
        if not math.isfinite(self.c):
            raise DomainError("coefficient must be finite")


@dataclass(frozen=True)
class GaussianMixture:
    """Sum of c_k x^(2 m_k) exp(-s_k x^2)."""

    terms: tuple[MixtureTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("a mixture needs at least one term")

    @classmethod
    def from_tuples(cls, rows: Iterable[Sequence[float]]) -> "GaussianMixture":
        return cls(tuple(MixtureTerm(float(c), int(m), float(s)) for c, m, s in rows))

    def as_tuples(self) -> list[tuple[float, int, float]]:
        return [(t.c, t.m, t.s) for t in self.terms]

    def f(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        out = np.zeros_like(x2)
        for t in self.terms:
            out = out + t.c * x2**t.m * np.exp(-t.s * x2)
        return out

    def fhat(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        comp = np.zeros_like(t)
        for term in self.terms:
            # Neumaier summation across terms: the x^24 term and the low
            # terms nearly cancel in parts of the tail.
            v = term.c * gaussian_moment_transform(term.m, term.s, t)
            s = out + v
            comp = comp + np.where(np.abs(out) >= np.abs(v), (out - s) + v, (v - s) + out)
            out = s
        return out + comp

    def tail_bound_f(self, R: float) -> float:
        return sum(abs(t.c) * _moment_tail(t.m, t.s, R) for t in self.terms)

    def tail_bound_fhat(self, T: float) -> float:
        return sum(abs(t.c) * _transform_tail(t.m, t.s, T) for t in self.terms)

    def to_text(self) -> str:
        return "".join(f"{t.c!r} {t.m} {t.s!r}\n" for t in self.terms)


def hermite_phys(n: int, u):
    """Physicists' Hermite polynomial H_n(u) by the three-term recurrence."""
    u = np.asarray(u, dtype=float)
    h0 = np.ones_like(u)
    if n == 0:
        return h0
    h1 = 2 * u
    for k in range(1, n):
        h0, h1 = h1, 2 * u * h1 - 2 * k * h0
    return h1


def gaussian_moment_transform(m: int, s: float, t):
    """Transform of x^(2m) exp(-s x^2).

    Equals (-1/(4 pi^2))^m d^(2m)/dt^(2m) of sqrt(pi/s) exp(-pi^2 t^2/s),
    i.e. (-1/(4s))^m sqrt(pi/s) H_2m(pi t/sqrt s) exp(-pi^2 t^2/s).
    """
    u = math.pi * np.asarray(t, dtype=float) / math.sqrt(s)
    return (-0.25 / s) ** m * math.sqrt(math.pi / s) * hermite_phys(2 * m, u) * np.exp(-u * u)


def _moment_tail(m: int, s: float, R: float) -> float:
    # int_{|x|>R} x^(2m) e^(-s x^2) dx = s^-(m+1/2) Gamma(m+1/2) Q(m+1/2, s R^2)
    a = m + 0.5
    return float(s**-a * special.gamma(a) * special.gammaincc(a, s * R * R))


def _transform_tail(m: int, s: float, T: float) -> float:
    # Cramer's inequality |H_n(u)| e^(-u^2/2) <= 1.086435 sqrt(2^n n!).
    n = 2 * m
    amp = (0.25 / s) ** m * math.sqrt(math.pi / s) * 1.086435 * math.sqrt(2.0**n * math.factorial(n))
    # int_{|t|>T} exp(-pi^2 t^2/(2s)) dt
    width = math.sqrt(2 * s) / math.pi
    return float(amp * width * math.sqrt(math.pi) * special.erfc(T / width))


def make_gaussian_mixture(terms) -> FourierPair:
    """FourierPair for a mixture given as GaussianMixture or (c, m, s) rows."""
    mix = terms if isinstance(terms, GaussianMixture) else GaussianMixture.from_tuples(terms)
    smax = max(t.s for t in mix.terms)
    return FourierPair(
        eval_f=mix.f,
        eval_fhat=mix.fhat,
        transform_kind=TransformKind.CLOSED_FORM,
        support_radius=None,
        is_even=True,
        l1_closed_form=None,
        name="mixture",
        f_tail_bound=mix.tail_bound_f,
        fhat_tail_bound=mix.tail_bound_fhat,
        f_frequency=max(1.0, math.sqrt(smax)),
        params={"terms": mix.as_tuples()},
    )


REFERENCE_MIXTURE = GaussianMixture.from_tuples([
    (-4.8, 1, 3.3),
    (1.5, 1, 7.4),
    (520.0, 12, 9.7),
    (1.3, 0, 2.8),
    (0.18, 0, 2.0),
])


def parse_mixture(text: str) -> GaussianMixture:
    """Parse "c m s" lines; '#' starts a comment, blank lines are skipped."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'c m s', got {raw!r}")
        try:
            c, m, s = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"line {lineno}: not a number in {raw!r}") from None
        if m != int(m):
            raise ValueError(f"line {lineno}: power {parts[1]!r} is not an integer")
        try:
            rows.append(MixtureTerm(c, int(m), s))
        except DomainError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("no mixture terms found")
    return GaussianMixture(tuple(rows))
