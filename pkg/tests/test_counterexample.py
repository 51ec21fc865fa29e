import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma, zeta

from tailnorms.counterexample import (
    INF,
    CounterexampleProcess,
    MetricSpaceT,
    asymptotic_table,
    block,
    block_lp_closed_form,
    build_spec,
    gls_continuity_modulus,
    richardson_limit,
    sup_lp_series,
    symmetrize,
    theta,
    weaker_norm_divergence,
)
from tailnorms.measure import block_union, evaluate_block_union, from_callable, integrate, sqrt_log
from tailnorms.norms import gls_norm, lp_norm
from tailnorms.psi import constant_psi, degenerate, power_singular


@pytest.fixture(scope="module")
def spec1():
    return build_spec(1.0)


@pytest.fixture(scope="module")
def spec_half():
    return build_spec(0.5)


@pytest.fixture(scope="module")
def spec_sqrtlog():
    return build_spec(1.0, sqrt_log(), nmax=20_000)


# ---------------------------------------------------------------- metric space

def test_metric_space_distances():
    T = MetricSpaceT(100)
    assert T.distance(2, 4) == pytest.approx(0.25)
    assert T.distance(4, INF) == pytest.approx(0.25)
    assert T.distance(INF, INF) == 0.0
    with pytest.raises(ValueError):
        T.distance(0, 3)
    with pytest.raises(ValueError):
        T.distance(101, 3)


@settings(max_examples=200)
@given(st.lists(st.one_of(st.integers(1, 50), st.just(INF)), min_size=3, max_size=3))
def test_metric_triangle_inequality(pts):
    T = MetricSpaceT(50)
    i, j, k = pts
    assert T.distance(i, k) <= T.distance(i, j) + T.distance(j, k) + 1e-15


# ---------------------------------------------------------------- spec

def test_normalisation_beta_one(spec1):
    assert spec1.C == pytest.approx(1 / zeta(5), rel=1e-12)
    assert spec1.normalization.rel_width < 1e-15


def test_normalisation_beta_half(spec_half):
    assert spec_half.C == pytest.approx(1 / zeta(3), rel=1e-10)


def test_sequences(spec1):
    n = np.arange(1, 1001)
    assert spec1.a_n(1) == 1.0
    assert np.all(np.diff(spec1.a[1:]) < 0) and spec1.a[-1] > 0
    assert np.allclose(spec1.a[n] - spec1.a[n + 1], spec1.delta[n], rtol=1e-9, atol=1e-18)
    assert np.all(np.diff(spec1.c[1:]) > 0)
    assert math.fsum(spec1.delta[1:]) + spec1.a[-1] == pytest.approx(1.0, abs=1e-12)


def test_build_spec_validation():
    with pytest.raises(ValueError):
        build_spec(0.0)
    with pytest.raises(ValueError):
        build_spec(-1.0)
    with pytest.raises(ValueError):
        build_spec(1.0, nmax=5)
    with pytest.raises(ValueError):
        build_spec(1.0, from_callable(lambda x: x ** -0.3, singular_at_0=True))


def test_spec_record(spec1):
    rec = spec1.to_record(seed=3)
    assert rec["beta"] == 1.0 and rec["nmax"] == 100_000 and rec["seed"] == 3


# ---------------------------------------------------------------- blocks

def test_constant_block(spec1):
    g = block(spec1, 3)
    mid = 0.5 * (spec1.a_n(3) + spec1.a_n(4))
    assert g(mid) == pytest.approx(3.0)
    assert g(spec1.a_n(3)) == 0.0
    assert g.support_measure == pytest.approx(spec1.C * 3.0 ** -5, rel=1e-9)


def test_block_beyond_truncation(spec1):
    with pytest.raises(IndexError):
        block(spec1, spec1.nmax + 1)


def test_block_closed_form_examples(spec1):
    assert block_lp_closed_form(spec1, 2, 4.0) == pytest.approx((1 / zeta(5) / 2) ** 0.25, rel=1e-12)
    assert block_lp_closed_form(spec1, 2, 4.0) == pytest.approx(0.8333077, abs=5e-7)
    for p in (1.0, 2.0, 3.3):
        assert block_lp_closed_form(spec1, 1, p) ** p == pytest.approx(spec1.C, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 7, 50])
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, 3.9])
def test_closed_form_vs_quadrature(spec1, n, p):
    assert lp_norm(block(spec1, n), p).value == pytest.approx(block_lp_closed_form(spec1, n, p),
                                                             rel=1e-6)


@pytest.mark.parametrize("n", [1, 3, 40])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.9])
def test_closed_form_vs_quadrature_sqrt_log_profile(spec_sqrtlog, n, p):
    # nu(p) = Gamma(p/2 + 1)**(1/p) for this profile
    g = block(spec_sqrtlog, n)
    expected = (spec_sqrtlog.C * n ** (p - 5.0)) ** (1 / p) * gamma(p / 2 + 1) ** (1 / p)
    assert lp_norm(g, p).value == pytest.approx(expected, rel=1e-6)
    assert block_lp_closed_form(spec_sqrtlog, n, p) == pytest.approx(expected, rel=1e-8)


def test_blocks_pairwise_disjoint(spec1):
    x = np.sort(np.concatenate([np.linspace(1e-9, 1, 20_001),
                                spec1.a[1:52], np.nextafter(spec1.a[1:52], 0)]))
    vals = np.array([block(spec1, n)(x) for n in range(1, 51)])
    for m, n in itertools.combinations(range(50), 2):
        assert not np.any(vals[m] * vals[n])


def test_pointwise_sup_equals_sum(spec1):
    rng = np.random.default_rng(0)
    x = rng.random(10_000)
    blocks = [block(spec1, n) for n in range(1, 201)]
    vals = np.array([b(x) for b in blocks])
    union = block_union(blocks)(x)
    some = x[:200]
    assert np.array_equal([evaluate_block_union(blocks, xi) for xi in some], union[:200])
    assert np.array_equal(union, vals.sum(axis=0))
    assert np.array_equal(union, vals.max(axis=0))
    _, located = CounterexampleProcess(spec1).locate(x)
    inside = x >= spec1.a_n(201)
    assert np.allclose(located[inside], union[inside], rtol=1e-12)


def test_uniform_l4_bound(spec1, spec_sqrtlog):
    for spec in (spec1, spec_sqrtlog):
        bound = spec.C * spec.nu(4.0) ** 4
        for p in np.linspace(1, 4, 13):
            n = np.array([1, 2, 10, 100, spec.nmax])
            vals = np.array([block_lp_closed_form(spec, int(k), p) ** p for k in n])
            assert np.all(vals <= bound * (1 + 1e-9))


# ---------------------------------------------------------------- series

def test_sup_series_at_one(spec1):
    sv = sup_lp_series(spec1, 1.0)
    assert sv.value == pytest.approx(zeta(4) / zeta(5), rel=1e-12)
    assert sv.value == pytest.approx(1.044, abs=1e-3)


def test_sup_series_divergent_at_four(spec1):
    assert sup_lp_series(spec1, 4.0).divergent
    assert sup_lp_series(spec1, 4.5).norm == math.inf


def test_sup_series_matches_envelope_quadrature():
    spec = build_spec(1.0, nmax=40)
    env = CounterexampleProcess(spec).envelope()
    for p in (1.0, 2.5):
        partial = sum(block_lp_closed_form(spec, n, p) ** p for n in range(1, 41))
        assert lp_norm(env, p).value ** p == pytest.approx(partial, rel=1e-8)


def test_blowup_limit_by_extrapolation(spec1):
    target = spec1.C * spec1.nu(4.0) ** 4 / spec1.beta
    rows = [(4 - p, (4 - p) * sup_lp_series(spec1, p).value) for p in (3.9, 3.99, 3.999)]
    lim = richardson_limit([r[0] for r in rows], [r[1] for r in rows])
    assert lim == pytest.approx(target, rel=1e-4)


def test_asymptotic_law_converges(spec1):
    rows = asymptotic_table(spec1, 4, 20)
    last = np.array([r[6] for r in rows])
    diffs = np.abs(np.diff(last))
    assert np.all(np.diff(diffs[3:]) < 0)
    # limit of (4-p)**(1/4) |sup g|_p is (C nu(4)**4 / beta)**(1/4)
    assert last[-1] == pytest.approx((spec1.C / spec1.beta) ** 0.25, rel=1e-4)
    assert all(r[3] < 1e-3 for r in rows)


# ---------------------------------------------------------------- process

def test_theta_values(spec1):
    proc = CounterexampleProcess(spec1)
    x = np.linspace(0.01, 0.99, 50)
    assert np.all(theta(proc, INF, x) == 0)
    outside = x[(x < spec1.a_n(6)) | (x >= spec1.a_n(5))]
    assert np.all(theta(proc, 5, outside) == 0)
    with pytest.raises(ValueError):
        theta(proc, 0, 0.5)


def test_symmetrize_keeps_absolute_values(spec1):
    proc = CounterexampleProcess(spec1)
    sym = symmetrize(proc, 5)
    x = np.random.default_rng(1).random(2000)
    for n in (1, 2, 3, 10):
        assert np.array_equal(np.abs(theta(sym, n, x)), np.abs(theta(proc, n, x)))
        for p in (1.0, 2.0, 3.9):
            assert lp_norm(sym.block(n), p).value == pytest.approx(lp_norm(proc.block(n), p).value,
                                                                   rel=1e-12)


def test_symmetrize_reproducible_and_fair(spec1):
    proc = CounterexampleProcess(spec1)
    a, b = symmetrize(proc, 11), symmetrize(proc, 11)
    assert np.array_equal(a.signs, b.signs)
    assert not np.array_equal(a.signs, symmetrize(proc, 12).signs)
    # mean sign over 1e5 indices within 4 standard errors of 0
    assert abs(a.signs[1:].mean()) < 4 / math.sqrt(spec1.nmax)


def test_sign_averaged_block_mean_vanishes(spec1):
    proc = CounterexampleProcess(spec1)
    first = np.array([integrate(block(spec1, n)).value for n in range(1, 6)])
    signed = np.array([symmetrize(proc, s).signs[1:6] * first for s in range(2000)])
    se = signed.std(axis=0, ddof=1) / math.sqrt(signed.shape[0])
    assert np.all(np.abs(signed.mean(axis=0)) < 4 * se)


# ---------------------------------------------------------------- continuity

def test_continuity_modulus_degenerate_four(spec1):
    proc = CounterexampleProcess(spec1)
    prev = math.inf
    for n in (1, 2, 5, 20, 100, 1000):
        val = gls_continuity_modulus(proc, degenerate(4.0), n).value
        assert val == pytest.approx((spec1.C / n) ** 0.25, rel=1e-6)
        assert val < prev
        prev = val


def test_continuity_modulus_same_point(spec1):
    proc = CounterexampleProcess(spec1)
    assert gls_continuity_modulus(proc, degenerate(4.0), 7, 7).value == 0.0
    assert gls_continuity_modulus(proc, degenerate(4.0), INF, INF).value == 0.0


def test_continuity_modulus_between_blocks(spec1):
    proc = CounterexampleProcess(spec1)
    val = gls_continuity_modulus(proc, degenerate(4.0), 3, 8).value
    expected = (block_lp_closed_form(spec1, 3, 4) ** 4 + block_lp_closed_form(spec1, 8, 4) ** 4) ** 0.25
    assert val == pytest.approx(expected, rel=1e-6)


# ---------------------------------------------------------------- certificates

def test_certificate_phi0_divergent(spec1):
    cert = weaker_norm_divergence(spec1, power_singular(0.125, 4.0))
    assert cert.certified
    ratios = [r[3] for r in cert.rows]
    assert np.all(np.diff(ratios[-8:]) > 0)
    assert cert.slope == pytest.approx(0.125, abs=0.01)


def test_certificate_same_exponent_bounded(spec1):
    cert = weaker_norm_divergence(spec1, power_singular(0.25, 4.0))
    assert cert.verdict == "bounded"


def test_certificate_unit_psi_quarter_power(spec1):
    cert = weaker_norm_divergence(spec1, constant_psi(1.0, 1.0, 4.0))
    assert cert.certified
    assert cert.slope == pytest.approx(0.25, abs=0.01)


def test_certificate_ratio_near_predicted_value(spec1):
    # ratio ~ C2 (4 - p)**(-1/8); at 4 - p = 1e-8 that is C2 * 10
    c2 = (spec1.C / spec1.beta) ** 0.25
    cert = weaker_norm_divergence(spec1, power_singular(0.125, 4.0),
                                  gaps=np.geomspace(1e-4, 1e-8, 12))
    assert cert.rows[-1][3] == pytest.approx(10 * c2, rel=0.01)


def test_certificate_reaches_tenfold_growth_on_long_grid(spec1):
    # (4 - p)**(-1/8) needs 4 - p ~ 2**-(6 + 8 log2 10) to multiply by ten
    gaps = [2.0 ** -k for k in range(6, 41)]
    cert = weaker_norm_divergence(spec1, power_singular(0.125, 4.0), gaps=gaps)
    assert cert.certified and cert.growth > 10


def test_gls_argmax_moves_toward_endpoint():
    psi = constant_psi(1.0, 1.0, 4.0)
    argmaxes = []
    for nmax in (10, 100, 1000):
        spec = build_spec(1.0, nmax=nmax)

        def natural(p, spec=spec):
            n = np.arange(1, spec.nmax + 1, dtype=float)
            return (spec.C * math.fsum(n ** (p - 5.0))) ** (1 / p)

        argmaxes.append(gls_norm(None, psi, natural=natural).argmax)
    assert argmaxes == sorted(argmaxes)
    assert argmaxes[-1] > 3.99


def test_gls_of_truncated_envelope_by_quadrature():
    spec = build_spec(1.0, nmax=10)
    env = CounterexampleProcess(spec).envelope()
    psi = constant_psi(1.0, 1.0, 4.0)
    rep = gls_norm(env, psi, grid=np.linspace(1, 4, 31)[:-1])
    n = np.arange(1, 11, dtype=float)
    p = np.linspace(1, 4, 31)[:-1]
    oracle = max((spec.C * np.sum(n ** (q - 5.0))) ** (1 / q) for q in p)
    assert rep.value >= oracle * (1 - 1e-8)
