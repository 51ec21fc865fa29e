import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailnorms.measure import (
    DisjointnessError,
    QuadratureConfig,
    QuadratureError,
    block,
    block_union,
    constant,
    evaluate_block_union,
    from_callable,
    indicator,
    integrate,
    sqrt_log,
)


def test_integrate_constant():
    val, err = integrate(constant(1.0))
    assert val == pytest.approx(1.0, abs=1e-14)
    assert err < 1e-9


def test_integrate_log_singularity():
    # antiderivative x - x ln x gives exactly 1
    f = from_callable(lambda x: -np.log(x), singular_at_0=True)
    val, err = integrate(f)
    assert abs(val - 1.0) <= max(1e-12, 1e-9 * val)


def test_integrate_half_power_of_log_is_gamma():
    f = sqrt_log().map(lambda y: np.power(y, 3.0))
    val, _ = integrate(f)
    assert val == pytest.approx(math.gamma(2.5), rel=1e-9)
    assert val == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-9)


def test_divergent_integrand_raises_with_estimate():
    f = from_callable(lambda x: 1.0 / x, singular_at_0=True)
    with pytest.raises(QuadratureError):
        integrate(f)


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=-1)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=0)


def _two_blocks():
    return [block(constant(2.0), 0.0, 0.5, reverse=False),
            block(constant(3.0), 0.5, 1.0, reverse=False)]


def test_block_union_lookup():
    blocks = _two_blocks()
    assert evaluate_block_union(blocks, 0.25) == 2.0
    assert evaluate_block_union(blocks, 0.75) == 3.0


def test_block_union_outside_supports_is_zero():
    blocks = [block(constant(2.0), 0.1, 0.2), block(constant(3.0), 0.5, 0.6)]
    assert evaluate_block_union(blocks, 0.3) == 0.0
    assert evaluate_block_union(blocks, 0.2) == 0.0  # half-open support


def test_overlapping_blocks_rejected():
    blocks = [block(constant(1.0), 0.0, 0.6), block(constant(1.0), 0.5, 1.0)]
    with pytest.raises(DisjointnessError):
        evaluate_block_union(blocks, 0.55)


def test_reverse_block_puts_profile_start_at_right_end():
    g = block(sqrt_log(), 0.2, 0.4)
    # profile value at s = 0.25 sits at x = 0.4 - 0.25 * 0.2
    assert g(0.35) == pytest.approx(math.sqrt(-math.log(0.25)), rel=1e-12)
    assert g.singular_at_0 is False
    assert g(0.4) == 0.0


def test_indicator_profile_block_keeps_support_exact():
    g = block(indicator(0.5, 4.0), 0.2, 0.6)
    assert g(0.5) == 4.0 and g(0.3) == 0.0
    assert integrate(g).value == pytest.approx(0.2 * 4.0, rel=1e-12)


@st.composite
def disjoint_families(draw):
    k = draw(st.integers(1, 5))
    cuts = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=2 * k, max_size=2 * k,
                                unique=True)))
    blocks = []
    for i in range(k):
        lo, hi = cuts[2 * i], cuts[2 * i + 1]
        if hi - lo < 1e-6:
            continue
        prof = draw(st.sampled_from(["const", "sqrtlog", "ind"]))
        base = {"const": constant(1.0), "sqrtlog": sqrt_log(), "ind": indicator(0.5)}[prof]
        scale = draw(st.floats(0.1, 5.0))
        blocks.append(block(base, lo, hi, scale, reverse=draw(st.booleans())))
    return blocks


@settings(max_examples=30, deadline=None)
@given(disjoint_families(), st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0]))
def test_disjoint_powers_add(blocks, p):
    union = block_union(blocks)
    lhs = integrate(union.map(lambda y: np.abs(y) ** p)).value
    rhs = math.fsum(integrate(b.map(lambda y: np.abs(y) ** p)).value for b in blocks)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("fn", [lambda x: np.exp(x), lambda x: 1 + x ** 2, lambda x: np.cos(x)])
def test_substitution_agrees_with_plain_rule(fn):
    plain = integrate(from_callable(fn))
    subst = integrate(from_callable(fn, singular_at_0=True))
    assert abs(plain.value - subst.value) <= 10 * (plain.error + subst.error) + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.0, 2.0))
def test_integral_is_monotone(scale, shift):
    f = sqrt_log().scaled(scale)
    g = sqrt_log().scaled(scale).map(lambda y: y + shift)
    grid = np.linspace(1e-6, 1 - 1e-6, 2001)
    assert np.all(f(grid) <= g(grid))
    If, Ig = integrate(f), integrate(g)
    assert If.value <= Ig.value + If.error + Ig.error + 1e-12
