import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dios_fpj.analysis import (
    BoundInputs,
    empirical_moments,
    prop1_variance,
    prop2_variances,
    theorem1_bounds,
    theorem2_bounds,
    wishart_trace_expectation,
)
from dios_fpj.fading import complex_normal
from dios_fpj.precoder import trace_inverse_gram

SIDES2 = ("refractive", "reflective")


def _symmetric(**kw):
    args = dict(p0=2.0, n_a=8, n_d=4, noise=1.0, l_g=1.0, l_d=[1.0, 1.0], l_i=[1.0, 1.0],
                sides=SIDES2, mu=0.5)
    args.update(kw)
    return BoundInputs(**args)


def test_theorem1_symmetric_hand_value():
    # direct = 2*2*2*6/2 = 24, DIOS = 2*4 = 8, interference = 8, noise 2K = 4.
    b = theorem1_bounds(_symmetric())
    assert b.per_lu[0] == pytest.approx(1.874469117916141, rel=1e-12)
    assert b.refractive == pytest.approx(b.reflective)
    assert b.total == pytest.approx(2 * math.log2(1 + 32 / 12))


def test_theorem2_symmetric_hand_value():
    # direct = 12, DIOS = 2*4*0.5 = 4, interference 4, noise K = 2.
    b = theorem2_bounds(_symmetric())
    assert b.per_lu[0] == pytest.approx(math.log2(1 + 16 / 6), rel=1e-12)


def test_theorem2_printed_form_scales_reflective_term():
    plain = theorem2_bounds(_symmetric())
    printed = theorem2_bounds(_symmetric(), printed_form=True)
    assert printed.refractive == pytest.approx(plain.refractive)
    # Reflective numerator DIOS term multiplied by N_A = 8: (12 + 32) / 6.
    assert printed.reflective == pytest.approx(math.log2(1 + 44 / 6))


def test_expectation_form_matches_jensen_for_deterministic_trace():
    inp = _symmetric()
    jensen = (inp.n_a - 2) / 2.0
    assert theorem1_bounds(inp, mean_inv_trace=jensen).total == pytest.approx(theorem1_bounds(inp).total)


def test_jensen_direction(rng):
    # E[1/tr] >= 1/E[tr] so the expectation form is never below the closed form.
    l_d = np.array([1.0, 0.5, 2.0])
    h = complex_normal(rng, (20_000, 10, 3)) * np.sqrt(l_d)
    inv_tr = float(np.mean(1.0 / trace_inverse_gram(h)))
    assert inv_tr >= 1.0 / wishart_trace_expectation(10, l_d)
    inp = BoundInputs(1.0, 10, 8, 1.0, 1.0, l_d, np.ones(3), ("refractive",) * 3)
    assert theorem1_bounds(inp, mean_inv_trace=inv_tr).total >= theorem1_bounds(inp).total


def test_wishart_hand_value():
    assert wishart_trace_expectation(128, np.ones(24)) == pytest.approx(24 / 104)
    with pytest.raises(ValueError):
        wishart_trace_expectation(4, np.ones(4))


def test_wishart_monte_carlo(rng):
    l_d = np.array([1.0, 3.0, 0.2, 0.7])
    h = complex_normal(rng, (20_000, 16, 4)) * np.sqrt(l_d)
    assert np.mean(trace_inverse_gram(h)) == pytest.approx(wishart_trace_expectation(16, l_d), rel=0.02)


def test_proposition_variances():
    assert prop1_variance(2.0, 3.0, 100) == 300.0
    t, r = prop2_variances(1.0, 2.0, 4.0, 10, 0.25)
    assert (t, r) == (5.0, 30.0)
    with pytest.raises(ValueError):
        prop2_variances(1, 1, 1, 1, 1.5)


def _random_inputs(draw_seed, n_a, n_d, k=4):
    rng = np.random.default_rng(draw_seed)
    return dict(p0=0.1, n_a=n_a, n_d=n_d, noise=1e-15, l_g=1e-5,
                l_d=rng.uniform(1e-12, 1e-10, k), l_i=rng.uniform(1e-12, 1e-10, k),
                sides=("refractive", "refractive", "reflective", "reflective"), mu=0.66)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(5, 200), st.integers(1, 4096))
def test_bounds_monotone_in_n_a(seed, n_a, n_d):
    a = _random_inputs(seed, n_a, n_d)
    b = _random_inputs(seed, n_a + 1, n_d)
    for f in (theorem1_bounds, theorem2_bounds):
        assert f(BoundInputs(**b)).total > f(BoundInputs(**a)).total


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4096))
def test_theorem1_monotone_in_n_d(seed, n_d):
    # Per-LU rate is log2(1 + (A + a N) / (b N + c)); its N_D slope has the sign of a c - A b.
    kw = _random_inputs(seed, 32, n_d)
    lo = np.array(theorem1_bounds(BoundInputs(**kw)).per_lu)
    hi = np.array(theorem1_bounds(BoundInputs(**dict(kw, n_d=n_d + 1))).per_lu)
    k = len(kw["sides"])
    direct = 2.0 * kw["p0"] * k * (kw["n_a"] - k) / np.sum(1.0 / kw["l_d"])
    a = kw["p0"] * kw["l_g"] * kw["l_i"]
    b = kw["p0"] * kw["l_g"] * (kw["l_i"].sum() - kw["l_i"])
    c = 2.0 * k * kw["noise"]
    slope = a * c - direct * b
    clear = np.abs(slope) > 1e-6 * (a * c + direct * b)
    assert np.all(np.sign(hi - lo)[clear] == np.sign(slope)[clear])


def test_bounds_decrease_in_n_d_at_default_scale():
    # With realistic gains the direct term dominates, so more elements mean lower bounds.
    kw = dict(_random_inputs(3, 128, 256), p0=0.24, noise=10 ** ((-170 + 10 * math.log10(180e3) - 30) / 10))
    prev = None
    for n_d in (256, 512, 1024, 2048, 4096):
        cur = theorem2_bounds(BoundInputs(**dict(kw, n_d=n_d))).total
        assert prev is None or cur < prev
        prev = cur


def test_bounds_permutation_invariant(rng):
    kw = _random_inputs(11, 32, 256)
    perm = np.array([1, 0, 3, 2])
    swapped = dict(kw, l_d=kw["l_d"][perm], l_i=kw["l_i"][perm])
    for f in (theorem1_bounds, theorem2_bounds):
        a, b = f(BoundInputs(**kw)), f(BoundInputs(**swapped))
        assert a.refractive == pytest.approx(b.refractive, rel=1e-12)
        assert a.reflective == pytest.approx(b.reflective, rel=1e-12)
        np.testing.assert_allclose(np.array(a.per_lu)[perm], b.per_lu, rtol=1e-12)


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        _symmetric(n_a=2)
    with pytest.raises(ValueError):
        _symmetric(l_d=[1.0, 0.0])
    with pytest.raises(ValueError):
        _symmetric(mu=1.5)
    with pytest.raises(ValueError):
        _symmetric(sides=("refractive",))


def test_empirical_moments_gaussian(rng):
    m = empirical_moments(complex_normal(rng, 100_000, variance=3.0))
    assert m.variance == pytest.approx(3.0, rel=0.02)
    assert 1.95 < m.fourth_moment_ratio < 2.05


def test_empirical_moments_constant_modulus():
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 1000, endpoint=False))
    assert empirical_moments(z).fourth_moment_ratio == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        empirical_moments([1.0])
