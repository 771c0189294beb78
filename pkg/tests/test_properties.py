"""Randomised property checks over physically sensible parameter ranges."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwcoherence.appendix import GaussianTwoSlit, gaussian_two_slit_exact, quality_R
from mwcoherence.beam import detector_smooth
from mwcoherence.decoherence import coherence_length_at, total_rates
from mwcoherence.farfield import ApertureModel, Pattern, pattern_N
from mwcoherence.model import fullerene_scenario
from mwcoherence.talbot import two_grating_signal

BASE = fullerene_scenario()
FAST = settings(max_examples=40, deadline=None)


@FAST
@given(pressure=st.floats(1e-8, 1e-3), temperature=st.floats(50, 1000), internal=st.floats(300, 3500))
def test_rates_nonnegative(pressure, temperature, internal):
    cfg = BASE.replace(environment__pressure=pressure, environment__temperature=temperature,
                       molecule__internal_temperature=internal)
    r = total_rates(cfg)
    for n in (1, 2, 5):
        assert r.lambda_air(n) >= 0
        assert math.isfinite(r.lambda_total(n))
    assert r.lambda_ph >= 0


@FAST
@given(ell0=st.floats(1e-8, 1e-5), lam=st.floats(0, 1e20), t1=st.floats(0, 1e-1), t2=st.floats(0, 1e-1))
def test_coherence_length_decreasing(ell0, lam, t1, t2):
    a, b = sorted((t1, t2))
    assert coherence_length_at(ell0, lam, a) >= coherence_length_at(ell0, lam, b)
    assert coherence_length_at(ell0, lam, 0.0) == pytest.approx(ell0)


@FAST
@given(ell=st.floats(1e-8, 1e-3), n=st.sampled_from([2, 4, 10]))
def test_pattern_nonnegative_even(ell, n):
    cfg = BASE.replace(grating__slit_count=n)
    x = np.linspace(-2e-4, 2e-4, 801)
    y = pattern_N(x, cfg, ell)
    assert np.all(y >= -1e-12 * y.max())
    assert np.allclose(y, y[::-1], rtol=1e-10, atol=1e-12 * y.max())


@FAST
@given(seed=st.integers(0, 2**32 - 1), x_tilde=st.floats(2e-6, 2e-5))
def test_smoothing_bounds(seed, x_tilde):
    rng = np.random.default_rng(seed)
    x = np.linspace(-1e-4, 1e-4, 1601)
    y = rng.random(x.size)
    out = detector_smooth(Pattern(x, y), x_tilde).intensity
    assert out.min() >= y.min() and out.max() <= y.max()


@FAST
@given(ell=st.floats(1e-9, 1e-4), k=st.floats(0, 1e9), d=st.floats(1e-9, 1e-7))
def test_quality_R_nonnegative(ell, k, d):
    assert quality_R(ell, k, d) >= 0


@FAST
@given(sigma=st.floats(2e-9, 2e-8), ell=st.floats(1e-9, 1e-3), time=st.floats(1e-4, 1e-1))
def test_exact_two_slit_nonnegative(sigma, ell, time):
    p = GaussianTwoSlit(sigma, 1e-7, ell, time, 1.2e-24)
    x = np.linspace(-5e-4, 5e-4, 2001)
    assert np.all(gaussian_two_slit_exact(x, p) >= 0)


@FAST
@given(shift=st.floats(0, 1e-7), ell=st.floats(1e-8, 1e-5))
def test_signal_periodic_and_bounded(shift, ell):
    ap, D = ApertureModel.rectangular(5e-8), 1e-7
    s = two_grating_signal(shift, ap, D, ell)
    assert s == pytest.approx(two_grating_signal(shift + D, ap, D, ell), rel=1e-10, abs=1e-22)
    assert -1e-22 <= s <= ap.width * (1 + 1e-12)
