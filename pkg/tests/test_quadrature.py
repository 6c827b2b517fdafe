from __future__ import annotations

import math

import numpy as np
import pytest

from fourier_gap.quadrature import (Estimate, QuadratureError, QuadratureSpec, fixed_gauss, grid_for, integrate,
                                    sign_change_roots)


def test_integrate_polynomial_exact():
    est = integrate(lambda x: 3 * x**2, [0.0, 2.0])
    assert est.value == pytest.approx(8.0, abs=1e-14)


def test_integrate_oscillatory_against_closed_form():
    est = integrate(lambda x: np.cos(40 * x), np.linspace(0, 3, 7), abs_tol=1e-13)
    assert est.value == pytest.approx(math.sin(120) / 40, abs=1e-12)
    assert est.error <= 1e-12


def test_integrate_kink_needs_refinement():
    est = integrate(lambda x: np.abs(x - 1 / 3), [0.0, 1.0], abs_tol=1e-10)
    assert est.value == pytest.approx((1 / 9 + 4 / 9) / 2, abs=1e-9)


def test_integrate_budget_exhausted_raises_with_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sign(np.sin(1e4 * x)), [0.0, 1.0], abs_tol=1e-14, max_panels=50)
    assert math.isfinite(info.value.value)


def test_empty_edges():
    assert integrate(lambda x: x, [1.0]) == Estimate(0.0, 0.0)


def test_fixed_gauss_matches_adaptive():
    f = lambda x: np.exp(-x) * np.sin(3 * x)  # noqa: E731
    edges = np.linspace(0, 5, 51)
    assert fixed_gauss(f, edges) == pytest.approx(integrate(f, edges).value, abs=1e-13)


def test_sign_change_roots_finds_sine_zeros():
    roots = sign_change_roots(np.sin, grid_for(0.5, 10.0, 0.1))
    assert np.allclose(roots, [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-13)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    qs = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-6)
    assert qs.target(10.0) == pytest.approx(1e-5)
    with pytest.raises(QuadratureError):
        qs.check(Estimate(1.0, 1e-3))
