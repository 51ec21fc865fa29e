import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from tailnorms.measure import constant, indicator, sqrt_log
from tailnorms.norms import DivergenceError
from tailnorms.measure import from_callable
from tailnorms.psi import (
    INCONCLUSIVE,
    NOT_WEAKER,
    WEAKER,
    constant_psi,
    custom_psi,
    degenerate,
    gls_weaker,
    make_natural_psi,
    orlicz_weaker,
    power_singular,
    psi_from_record,
    sqrt_psi,
    young_custom,
    young_exp,
    young_exp_square,
    young_from_record,
    young_power,
)


# ---------------------------------------------------------------- natural psi

def test_natural_psi_of_constant():
    nu = make_natural_psi(constant(1.0), 4.0)
    for p in (1.0, 2.0, 3.5, 4.0):
        assert nu(p) == pytest.approx(1.0, abs=1e-12)


def test_natural_psi_of_sqrt_log_is_gamma_root():
    nu = make_natural_psi(sqrt_log(), 10.0)
    for p in np.linspace(1, 10, 10):
        assert nu(p) == pytest.approx(gamma(p / 2 + 1) ** (1 / p), rel=1e-9)


def test_natural_psi_of_half_indicator():
    nu = make_natural_psi(indicator(0.5), 4.0)
    for p in (1.0, 2.0, 4.0):
        assert nu(p) == pytest.approx(2 ** (-1 / p), rel=1e-12)


def test_natural_psi_outside_support_is_infinite():
    nu = make_natural_psi(constant(1.0), 4.0)
    assert nu(5.0) == math.inf and nu(0.5) == math.inf


def test_natural_psi_rejects_function_outside_lpmax():
    f = from_callable(lambda x: x ** -0.3, singular_at_0=True)
    with pytest.raises(DivergenceError):
        make_natural_psi(f, 4.0)


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_natural_psi_is_homogeneous(c):
    nu = make_natural_psi(sqrt_log(), 6.0)
    nuc = make_natural_psi(sqrt_log().scaled(c), 6.0)
    for p in (1.0, 2.5, 6.0):
        assert nuc(p) == pytest.approx(c * nu(p), rel=1e-9)


# ---------------------------------------------------------------- psi families

def test_power_singular_exact_and_infinite_outside():
    psi = power_singular(0.25, 4.0)
    p = np.array([1.0, 2.0, 3.9, 4.0 - 1e-8])
    assert np.allclose(psi(p), (4.0 - p) ** -0.25, rtol=1e-15)
    assert psi(4.0) == math.inf and psi(0.9) == math.inf and psi(5.0) == math.inf


def test_degenerate_psi():
    psi = degenerate(3.0)
    assert psi(3.0) == 1.0 and psi(2.999) == math.inf and psi(4.0) == math.inf


def test_psi_validation():
    with pytest.raises(ValueError):
        power_singular(-0.1, 4.0)
    with pytest.raises(ValueError):
        constant_psi(0.0)
    with pytest.raises(ValueError):
        degenerate(0.5)
    with pytest.raises(ValueError):
        custom_psi(lambda p: p - 2.0, 1.0, 4.0)


@pytest.mark.parametrize("psi", [power_singular(0.125, 4.0), constant_psi(2.0), degenerate(2.0),
                                 sqrt_psi(1.0, 60.0)])
def test_psi_record_roundtrip(psi):
    back = psi_from_record(psi.to_record())
    p = np.array([1.0, 2.0, 3.5])
    assert np.array_equal(back(p), psi(p))


# ---------------------------------------------------------------- Young functions

def test_young_validation_rejects_bad_functions():
    with pytest.raises(ValueError):
        young_custom(lambda u: np.abs(u) + 1.0)  # Phi(0) != 0
    with pytest.raises(ValueError):
        young_custom(lambda u: np.sqrt(np.abs(u)))  # concave


def test_young_log_is_stable_far_out():
    Phi = young_exp_square()
    u = np.array([1.0, 40.0, 1e3, 1e5])
    assert np.all(np.isfinite(Phi.log(u)))
    assert Phi.log(1e3) == pytest.approx(0.5e6, rel=1e-12)


@pytest.mark.parametrize("Phi", [young_power(2.0), young_exp_square(), young_exp()])
def test_young_record_roundtrip(Phi):
    back = young_from_record(Phi.to_record())
    u = np.array([0.0, 0.5, 2.0])
    assert np.allclose(back(u), Phi(u), rtol=1e-15)


# ---------------------------------------------------------------- GLS weaker

def test_phi0_weaker_than_constant_one():
    v = gls_weaker(power_singular(0.125, 4.0), constant_psi(1.0, 1.0, 4.0))
    assert v.verdict == WEAKER
    assert len(v.trace) > 10


def test_identical_escaping_functions_not_weaker():
    psi = power_singular(0.25, 4.0)
    assert gls_weaker(psi, psi).verdict == NOT_WEAKER


def test_identical_bounded_functions_inconclusive():
    psi = constant_psi(1.0)
    assert gls_weaker(psi, psi).verdict == INCONCLUSIVE


def test_quarter_weaker_than_eighth():
    assert gls_weaker(power_singular(0.25, 4.0), power_singular(0.125, 4.0)).verdict == WEAKER


def test_grid_must_share_endpoint():
    with pytest.raises(ValueError):
        gls_weaker(power_singular(0.25, 4.0), power_singular(0.25, 5.0))


betas = st.sampled_from([k / 16 for k in range(1, 17)])


@settings(max_examples=40, deadline=None)
@given(betas, betas)
def test_power_family_verdict_follows_exponent_order(b1, b2):
    v = gls_weaker(power_singular(b1, 4.0), power_singular(b2, 4.0)).verdict
    assert (v == WEAKER) == (b1 > b2)
    assert v in (WEAKER, NOT_WEAKER)


@settings(max_examples=40, deadline=None)
@given(betas, betas)
def test_gls_weaker_antisymmetric(b1, b2):
    phi, psi = power_singular(b1, 4.0), power_singular(b2, 4.0)
    if gls_weaker(phi, psi).verdict == WEAKER:
        assert gls_weaker(psi, phi).verdict == NOT_WEAKER


# ---------------------------------------------------------------- Orlicz weaker

def test_square_weaker_than_exp_square():
    assert orlicz_weaker(young_power(2.0), young_exp_square()).verdict == WEAKER


def test_exp_weaker_than_exp_square():
    assert orlicz_weaker(young_exp(), young_exp_square()).verdict == WEAKER


def test_identical_young_not_weaker():
    Phi = young_exp_square()
    assert orlicz_weaker(Phi, Phi).verdict == NOT_WEAKER


def test_exp_square_not_weaker_than_square():
    assert orlicz_weaker(young_exp_square(), young_power(2.0)).verdict == NOT_WEAKER


def test_orlicz_rejects_bad_lambda():
    with pytest.raises(ValueError):
        orlicz_weaker(young_exp(), young_exp_square(), lambdas=(0.0,))
