from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourier_gap.core import (DegenerateInputError, DomainError, FourierPair, Mode, dilate, functional, l1_norm,
                              numeric_transform, tail_abs_integral, tail_pos_integral)
from fourier_gap.families import C0, FEJER, H, H_L1, REFERENCE_MIXTURE, make_dilated_cosine, make_fejer, \
    make_gaussian_mixture
from fourier_gap.quadrature import QuadratureSpec


@pytest.mark.parametrize("t", [0.0, 0.3, 0.75, 1.0, 1.4, 2.5])
def test_transform_oracle_cosine_kernel(t):
    assert numeric_transform(H, t) == pytest.approx(float(H.fhat(t)), abs=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.5, 0.9, 1.2])
def test_transform_oracle_fejer(t):
    assert numeric_transform(FEJER, t) == pytest.approx(float(FEJER.fhat(t)), abs=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.8, 1.0, 1.7])
def test_transform_oracle_mixture(t):
    fp = make_gaussian_mixture(REFERENCE_MIXTURE)
    assert numeric_transform(fp, t) == pytest.approx(float(fp.fhat(t)), abs=1e-9)


def test_transform_oracle_gaussian_self_dual():
    g = FourierPair(lambda x: np.exp(-math.pi * x * x), lambda t: np.exp(-math.pi * t * t),
                    support_radius=None, f_tail_bound=lambda R: math.erfc(math.sqrt(math.pi) * R))
    for t in (0.0, 0.5, 1.3):
        assert numeric_transform(g, t) == pytest.approx(math.exp(-math.pi * t * t), abs=1e-11)


def test_transform_oracle_odd_shift_is_complex():
    # F(x) = exp(-pi (x-1/2)^2) has F^(t) = exp(-pi t^2) exp(-i pi t)
    g = FourierPair(lambda x: np.exp(-math.pi * (x - 0.5) ** 2), lambda t: np.exp(-math.pi * t * t),
                    is_even=False, f_tail_bound=lambda R: math.erfc(math.sqrt(math.pi) * (R - 0.5)))
    val = numeric_transform(g, 0.3)
    assert val == pytest.approx(math.exp(-math.pi * 0.09) * complex(math.cos(0.3 * math.pi), -math.sin(0.3 * math.pi)),
                                abs=1e-10)


def test_l1_closed_form_cross_checked():
    assert l1_norm(H).value == pytest.approx(H_L1, abs=0)
    assert l1_norm(make_dilated_cosine(0.9)).value == pytest.approx(0.9 * H_L1, rel=1e-15)


def test_l1_closed_form_disagreement_raises():
    bad = FourierPair(FEJER.eval_f, FEJER.eval_fhat, support_radius=1.0, l1_closed_form=1.1,
                      f_tail_bound=FEJER.f_tail_bound, f_frequency=1.0)
    with pytest.raises(Exception):
        l1_norm(bad)


def test_c0_value():
    rep = functional(H, math.inf, Mode.J)
    assert rep.functional_value == pytest.approx(C0, rel=1e-12)
    assert rep.functional_value == pytest.approx(1.0799503, abs=1e-7)


def test_fejer_closed_form_functional():
    # J(K(x/l), A) = (1 - A (1 - l)^2)/l; at l = sqrt(1/2), A = 2 it is 4 - 2 sqrt 2
    lam = math.sqrt(0.5)
    rep = functional(make_fejer(lam), 2.0, Mode.J)
    assert rep.functional_value == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-9)
    assert rep.tail_integral == pytest.approx((1 - lam) ** 2, abs=1e-10)


def test_dilated_cosine_functional():
    rep = functional(make_dilated_cosine(0.9), 4, Mode.J)
    assert rep.functional_value == pytest.approx(1.14085, abs=1e-5)
    assert rep.l1_norm == pytest.approx(0.83337, abs=1e-5)


def test_mixture_functional_jplus():
    rep = functional(make_gaussian_mixture(REFERENCE_MIXTURE), 36 / 11, Mode.JPLUS)
    assert rep.functional_value == pytest.approx(1.1943018, abs=1e-6)
    assert rep.l1_norm == pytest.approx(1.09668, abs=1e-5)
    assert rep.tail_integral == pytest.approx(0.052014, abs=1e-6)


def test_jplus_at_least_j():
    fp = make_gaussian_mixture(REFERENCE_MIXTURE)
    assert functional(fp, 3.0, Mode.JPLUS).functional_value >= functional(fp, 3.0, Mode.J).functional_value


def test_infinite_A_rules():
    with pytest.raises(DomainError):
        functional(make_dilated_cosine(0.9), math.inf, Mode.J)      # transform leaves [-1, 1]
    with pytest.raises(DomainError):
        functional(make_gaussian_mixture(REFERENCE_MIXTURE), math.inf, Mode.JPLUS)


def test_domain_errors():
    with pytest.raises(DomainError):
        functional(H, 0.5)
    with pytest.raises(DomainError):
        functional(H, float("nan"))
    with pytest.raises(DomainError):
        dilate(H, 0.0)


def test_zero_function_degenerate():
    zero = FourierPair(lambda x: 0 * x, lambda t: 0 * t, support_radius=1.0, l1_closed_form=0.0,
                       f_tail_bound=lambda R: 0.0)
    with pytest.raises(DegenerateInputError):
        functional(zero, 2.0)


def test_tail_integrals_vanish_inside_support():
    assert tail_abs_integral(H).value == 0.0
    assert tail_pos_integral(make_fejer(0.5)).value == pytest.approx(0.25, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.3, max_value=1.0), st.floats(min_value=-3.0, max_value=3.0))
def test_dilation_transform_property(lam, t):
    fp = dilate(H, lam)
    assert float(fp.fhat(t)) == pytest.approx(lam * float(H.fhat(lam * t)), abs=1e-15)


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.5, max_value=1.0))
def test_l1_norm_scales_under_dilation(lam):
    rep = functional(dilate(H, lam), 10.0, Mode.J)
    assert rep.l1_norm == pytest.approx(lam * H_L1, rel=1e-12)


def test_tolerance_spec_is_honoured():
    loose = QuadratureSpec(abs_tol=1e-6, rel_tol=1e-6)
    assert functional(make_fejer(0.8), 2.0, Mode.J, loose).functional_value == pytest.approx(
        (1 - 2 * 0.04) / 0.8, abs=1e-5)
