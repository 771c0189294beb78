import math

import numpy as np
import pytest

from mwcoherence.appendix import GaussianTwoSlit, gaussian_two_slit_exact, quality_R, quality_R_limit
from mwcoherence.farfield import GAUSSIAN, coherence_length_at_screen, pattern_N, pattern_oracle
from mwcoherence.model import beam_kinematics



def test_R_limit_value():
    assert quality_R_limit(1e-7, 3.6e-8) == pytest.approx(0.011, rel=0.05)


@pytest.mark.parametrize("r", np.linspace(0.02, 0.4, 12))
def test_R_small_ratio(r):
    assert quality_R(1.0, 0.0, r) == pytest.approx(r**2 / 12, rel=0.05)


def test_R_increasing_in_k():
    d, ell = 3.6e-8, 1e-7
    R = quality_R(ell, np.linspace(0, 1 / d, 100), d)
    assert np.all(np.diff(R) >= 0)
    assert R[-1] == pytest.approx(R[0], rel=0.5)
    assert np.all(R >= 0)


def test_R_branch_switch():
    d, ell = 3.6e-8, 1e-7
    k = 1e-6 / ell
    assert quality_R(ell, k * (1 + 1e-9), d) == pytest.approx(quality_R(ell, 0.0, d), abs=1e-9)


def test_R_vanishes_with_ratio():
    kd = 0.7
    vals = [quality_R(ell, kd / 1e-8, 1e-8) for ell in (1e-7, 1e-6, 1e-5)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-3


def test_R_rejects_bad_input():
    with pytest.raises(ValueError):
        quality_R(0.0, 1.0, 1e-8)


def _params(**kw):
    base = dict(sigma_x=1e-8, period=1e-7, ell=1e-7, time=5e-3, mass=1.2e-24)
    base.update(kw)
    return GaussianTwoSlit(**base)


def test_Q_monotone():
    Ts = [1e-4, 1e-3, 1e-2, 1e-1]
    Q = [_params(time=t).Q for t in Ts]
    assert all(a > b for a, b in zip(Q, Q[1:]))
    Q = [_params(ell=e).Q for e in (1e-8, 1e-7, 1e-6)]
    assert all(a > b for a, b in zip(Q, Q[1:]))
    assert _params(time=1e9, ell=1e9).Q == pytest.approx(1.0, abs=1e-12)


def test_exact_nonnegative_and_peaked():
    x = np.linspace(-2e-4, 2e-4, 4001)
    for ell in (3e-8, 1e-7, 1e-5):
        I = gaussian_two_slit_exact(x, _params(ell=ell))
        assert np.all(I >= 0)
        assert np.argmax(I) == 2000


def test_exact_normalized():
    # integral equals the total input norm 2 * C^2 * sqrt(2 pi) sigma (no overlap)
    p = _params(ell=1e3)
    x = np.linspace(-5e-4, 5e-4, 200001)
    norm = np.trapezoid(gaussian_two_slit_exact(x, p), x)
    expect = 2 * p.amplitude**2 * math.sqrt(2 * math.pi) * p.sigma_x
    assert norm == pytest.approx(expect, rel=1e-6)


def _gaussian_two_slit_config(c60):
    sig = c60.grating.slit_width / 6
    cfg = c60.replace(grating__slit_count=2, grating__aperture_shape=GAUSSIAN, grating__sigma_x=sig)
    kin = beam_kinematics(cfg)
    period = kin.wavelength * cfg.geometry.screen_distance / cfg.grating.period
    return cfg, sig, kin, np.linspace(-2.5 * period, 2.5 * period, 501)


def test_matches_pattern_N_far_limit(c60):
    cfg, sig, kin, x = _gaussian_two_slit_config(c60)
    ell = 1e3 * cfg.grating.period
    p = GaussianTwoSlit(sig, cfg.grating.period, ell, kin.time_of_flight, cfg.molecule.mass)
    exact = gaussian_two_slit_exact(x, p)
    assert np.max(np.abs(exact - pattern_N(x, cfg, ell))) <= 0.01 * exact.max()


@pytest.mark.parametrize("ell_kind", ["screen", "far"])
def test_matches_oracle(c60, ell_kind):
    cfg, sig, kin, x = _gaussian_two_slit_config(c60)
    ell = coherence_length_at_screen(cfg) if ell_kind == "screen" else 1e3 * cfg.grating.period
    p = GaussianTwoSlit(sig, cfg.grating.period, ell, kin.time_of_flight, cfg.molecule.mass)
    exact = gaussian_two_slit_exact(x, p)
    oracle = pattern_oracle(x, cfg, ell).intensity
    assert np.max(np.abs(exact - oracle)) <= 1e-4 * exact.max()
