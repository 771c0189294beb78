import math

import numpy as np
import pytest

from conftest import central_grid
from mwcoherence.decoherence import coherence_length_at, initial_coherence_length, total_rates
from mwcoherence.farfield import (
    ApertureModel,
    DivergenceModel,
    Pattern,
    classical_grating_pattern,
    coherence_length_at_screen,
    damping_term,
    envelope,
    pattern_N,
    pattern_general,
    pattern_general_oracle,
    pattern_oracle,
    visibility,
)
from mwcoherence.model import beam_kinematics


def test_aperture_ft():
    d = 3.6e-8
    rect = ApertureModel.rectangular(d)
    assert rect.ft_squared(0.0) == pytest.approx(1.296e-15)
    assert rect.ft_squared(2 * np.pi / d) == pytest.approx(0.0, abs=1e-30)
    g = ApertureModel.gaussian(d / 6)
    assert g.ft_squared(1 / g.sigma) == pytest.approx(math.exp(-2) * g.ft_squared(0.0))
    assert g.ft_squared(0.0) == pytest.approx(d**2)
    k = np.linspace(-5e8, 5e8, 101)
    for ap in (rect, g):
        v = ap.ft_squared(k)
        assert np.all(v >= 0)
        assert np.allclose(v, v[::-1], rtol=0, atol=1e-30)
        assert v.max() == ap.ft_squared(0.0)


def test_pattern_rejects_bad_ell(c60):
    with pytest.raises(ValueError):
        pattern_N([0.0], c60, 0.0)


def test_classical_special_points(c60):
    lam_L = 2.5e-12 * 1.25
    D, N = 1e-7, 10
    env0 = envelope(0.0, ApertureModel.rectangular(3.6e-8), 2.5e-12, 1.25)
    assert classical_grating_pattern(0.0, c60) == pytest.approx(N**2 * env0, rel=1e-14)
    assert classical_grating_pattern(lam_L / (N * D), c60) == pytest.approx(0.0, abs=1e-20 * env0)
    x1 = lam_L / D
    e1 = envelope(x1, ApertureModel.rectangular(3.6e-8), 2.5e-12, 1.25)
    assert classical_grating_pattern(x1, c60) == pytest.approx(N**2 * e1, rel=1e-10)


def test_single_slit_is_envelope(c60):
    cfg = c60.replace(grating__slit_count=1)
    x = np.linspace(-1e-4, 1e-4, 101)
    env = envelope(x, ApertureModel.rectangular(3.6e-8), 2.5e-12, 1.25)
    assert np.allclose(pattern_N(x, cfg, 1e-7), env, rtol=1e-14, atol=0)


def test_pattern_symmetric_nonnegative(c60, fringe_period):
    x = central_grid(fringe_period)
    y = pattern_N(x, c60, 1.2e-7)
    assert np.all(y >= 0)
    assert np.array_equal(y, pattern_N(-x, c60, 1.2e-7))


def test_general_equals_N_for_gaussian_divergence(c60, fringe_period):
    x = central_grid(fringe_period)
    rates = total_rates(c60)
    div = DivergenceModel.from_config(c60)
    ell = coherence_length_at_screen(c60)
    a = pattern_general(x, c60, div, rates)
    b = pattern_N(x, c60, ell)
    assert np.max(np.abs(a - b) / b.max()) < 1e-12


def test_general_delta_coherent(c60, fringe_period):
    x = central_grid(fringe_period, 3)
    a = pattern_general(x, c60, DivergenceModel.delta(), 0.0)
    b = classical_grating_pattern(x, c60)
    assert np.max(np.abs(a - b)) < 1e-10 * b.max()


@pytest.mark.parametrize("N", [2, 10])
def test_general_custom_bounded(c60, fringe_period, N):
    ell0 = initial_coherence_length(c60)
    cfg = c60.replace(grating__slit_count=N)
    div = DivergenceModel.from_ratio(lambda s: np.cos(s / ell0))
    x = np.linspace(-5 * fringe_period, 5 * fringe_period, 101)
    coherent_top = N**2 * envelope(x, ApertureModel.rectangular(3.6e-8), 2.5e-12, 1.25)
    y = pattern_general(x, cfg, div, 0.0)
    assert np.all(y >= 0)
    assert np.all(y <= coherent_top * (1 + 1e-12))
    # the quadrature keeps the divergence factor inside each slit, which shifts
    # the envelope by 1/ell0, so only the global coherent peak bounds it
    o = pattern_general_oracle(x, cfg, div, 0.0).intensity
    assert np.all(o >= 0)
    assert o.max() <= coherent_top.max() * (1 + 1e-9)


def test_damping_term(c60):
    assert damping_term(c60, 0.0, DivergenceModel.delta()) == 1.0
    v = damping_term(c60)
    assert v == pytest.approx(0.70, rel=0.05)
    lam = total_rates(c60).lambda_total(1)
    wide = c60.replace(grating__period=2e-7, grating__slit_width=7.2e-8)
    div = DivergenceModel.from_config(c60)
    for rate, d in ((lam, DivergenceModel.delta()), (0.0, div)):
        ratio = math.log(damping_term(wide, rate, d)) / math.log(damping_term(c60, rate, d))
        assert ratio == pytest.approx(4.0, rel=1e-12)


def test_visibility_two_slit(c60):
    cfg = c60.replace(grating__slit_count=2, grating__slit_width=1e-9)
    period = 2.5e-12 * 1.25 / 1e-7
    x = np.linspace(-2 * period, 2 * period, 801)
    g = 0.6
    ell = 1e-7 / math.sqrt(-2 * math.log(g))
    assert visibility(Pattern(x, pattern_N(x, cfg, ell)), period) == pytest.approx(g, abs=1e-3)
    assert visibility(Pattern(x, pattern_N(x, cfg, 1e3)), period) == pytest.approx(1.0, abs=1e-3)
    assert visibility(Pattern(x, np.ones_like(x)), period) == 0.0
    with pytest.raises(ValueError):
        visibility(Pattern(x[::40], np.ones_like(x[::40])), period)


def test_visibility_monotone_in_ell(c60, fringe_period):
    x = central_grid(fringe_period, 2)
    vs = [visibility(Pattern(x, pattern_N(x, c60, ell)), fringe_period) for ell in (3e-7, 2e-7, 1.2e-7, 8e-8)]
    assert all(a >= b for a, b in zip(vs, vs[1:]))


def _order_offsets(c60, period, ell, per_period=64):
    x = central_grid(period, 3, per_period)
    y = pattern_N(x, c60, ell)
    out = []
    for m in (-2, -1, 1, 2):
        j = np.abs(x - m * period) < 0.2 * period
        out.append(abs(x[j][np.argmax(y[j])] - m * period))
    return np.array(out), x[1] - x[0]


@pytest.mark.parametrize("ell", [1e-6, 1e3])
def test_order_positions(c60, fringe_period, ell):
    off, step = _order_offsets(c60, fringe_period, ell)
    assert np.all(off <= step / 2 + 1e-15)


@pytest.mark.xfail(strict=True, reason="the falling single-slit envelope pulls broad partially "
                   "coherent maxima towards the axis by more than half a grid step at ell = D")
def test_order_positions_at_ell_equal_period(c60, fringe_period):
    off, step = _order_offsets(c60, fringe_period, 1e-7)
    assert np.all(off <= step / 2 + 1e-15)


def test_oracle_classical_two_slit(c60, fringe_period):
    cfg = c60.replace(grating__slit_count=2)
    x = np.linspace(-3 * fringe_period, 3 * fringe_period, 121)
    o = pattern_oracle(x, cfg, 1e3).intensity
    c = classical_grating_pattern(x, cfg)
    assert np.max(np.abs(o - c)) / c.max() < 0.02


def test_pattern_validates_grid():
    with pytest.raises(ValueError):
        Pattern([0.0, 0.0], [1.0, 1.0])
    p = Pattern([0.0, 1.0, 2.0], [1.0, 4.0, 2.0]).normalized()
    assert p.intensity.max() == 1.0 and p.normalization == "peak"
