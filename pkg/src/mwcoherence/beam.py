"""Velocity averaging, detector resolution and the full screen-pattern pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .decoherence import DecoherenceRates, coherence_length_at, initial_coherence_length, total_rates
from .farfield import Pattern, pattern_N
from .model import SUPERSONIC, ConvergenceError, ExperimentConfig, beam_kinematics, reference_velocity

DEFAULT_NODES = 64
MAX_NODES = 1024
CONVERGENCE_TOL = 1e-6
SPAN = 4.0  # quadrature interval is v0 -+ SPAN * v_hat


@dataclass(frozen=True)
class VelocityDistribution:
    """Speed law v^3 exp(-(v - v0)^2 / v_hat^2), optionally cut to a window."""

    v0: float
    v_hat: float
    window: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.v_hat > 0:
            raise ValueError(f"v_hat must be positive, got {self.v_hat}")
        if self.window is not None:
            lo, hi = (float(w) for w in self.window)
            if not 0 <= lo < hi:
                raise ValueError(f"velocity window must satisfy 0 <= v_min < v_max, got {self.window}")
            object.__setattr__(self, "window", (lo, hi))
        object.__setattr__(self, "_norm", self._compute_norm())

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "VelocityDistribution":
        b = config.beam
        if b.mode != SUPERSONIC or b.v0 is None or b.v_hat is None:
            raise ValueError("beam section does not describe a supersonic distribution")
        return cls(b.v0, b.v_hat, b.velocity_window)

    def _raw(self, v):
        v = np.asarray(v, dtype=float)
        vp = np.clip(v, 0.0, None)
        return np.where(v > 0, vp**3 * np.exp(-((vp - self.v0) / self.v_hat) ** 2), 0.0)

    @property
    def support(self) -> tuple[float, float]:
        if self.window is not None:
            return self.window
        return 0.0, max(self.v0, 0.0) + 12 * self.v_hat

    @property
    def quadrature_interval(self) -> tuple[float, float]:
        if self.window is not None:
            return self.window
        return max(self.v0 - SPAN * self.v_hat, 0.0), self.v0 + SPAN * self.v_hat

    def _compute_norm(self) -> float:
        lo, hi = self.support
        peak = self.mode()
        pts = [peak] if lo < peak < hi else None
        val, _ = integrate.quad(lambda v: float(self._raw(v)), lo, hi, points=pts,
                                epsabs=0, epsrel=1e-12, limit=200)
        if not val > 0:
            raise ValueError("velocity distribution has no weight inside its window")
        return val

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        out = self._raw(v) / self._norm
        if self.window is not None:
            lo, hi = self.window
            out = np.where((v >= lo) & (v <= hi), out, 0.0)
        return float(out) if out.ndim == 0 else out

    def mode(self) -> float:
        """Root of 3/v = 2 (v - v0) / v_hat^2, the maximum of the untruncated law."""
        return 0.5 * (self.v0 + math.sqrt(self.v0**2 + 6 * self.v_hat**2))

    def moment(self, k: int) -> float:
        lo, hi = self.support
        val, _ = integrate.quad(lambda v: v**k * float(self.pdf(v)), lo, hi,
                                epsabs=0, epsrel=1e-12, limit=200)
        return val

    def mean(self) -> float:
        return self.moment(1)

    def fwhm(self) -> float:
        """Full width at half maximum of the untruncated law."""
        vm = self.mode()
        half = 0.5 * float(self._raw(vm))
        f = lambda v: float(self._raw(v)) - half
        lo = brentq(f, 1e-12 * vm, vm)
        hi = brentq(f, vm, vm + 20 * self.v_hat)
        return hi - lo

    def selected(self, fraction: float, center: float | None = None) -> "VelocityDistribution":
        """Same law cut to a window of relative full width ``fraction`` around ``center``."""
        if not fraction > 0:
            raise ValueError("selection fraction must be positive")
        c = self.mean() if center is None else center
        return VelocityDistribution(self.v0, self.v_hat, (c * (1 - fraction / 2), c * (1 + fraction / 2)))


def supersonic_pdf(v, dist: VelocityDistribution):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("velocities must be non-negative")
    return dist.pdf(v)


def monochromatic_pattern(x, config: ExperimentConfig, velocity: float,
                          rates: DecoherenceRates | None = None) -> np.ndarray:
    """pattern_N at one velocity with the coherence length evaluated at its own flight time."""
    rates = total_rates(config) if rates is None else rates
    T = config.geometry.screen_distance / velocity
    ell = coherence_length_at(initial_coherence_length(config, velocity), rates.lambda_total(1), T)
    return pattern_N(x, config, ell, velocity)


def _average(x, config, dist, rates, n):
    lo, hi = dist.quadrature_interval
    nodes, weights = np.polynomial.legendre.leggauss(n)
    v = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * weights * dist.pdf(v)
    w = w / w.sum()
    out = np.zeros_like(x)
    for vi, wi in zip(v, w):
        if wi > 0:
            out += wi * monochromatic_pattern(x, config, vi, rates)
    return out


def polychromatic_pattern(x, config: ExperimentConfig, dist: VelocityDistribution | None = None,
                          rates: DecoherenceRates | None = None, nodes: int = DEFAULT_NODES,
                          tol: float = CONVERGENCE_TOL) -> Pattern:
    """Average of the monochromatic patterns over the velocity distribution.

    Averaging over v with f(v) is the same as averaging over the de Broglie
    wavelength with f(lambda) = f(v) |dv/dlambda|.  The node count doubles
    until the change is below ``tol`` of the peak.
    """
    x = np.asarray(x, dtype=float)
    dist = VelocityDistribution.from_config(config) if dist is None else dist
    rates = total_rates(config) if rates is None else rates
    n = nodes
    current = _average(x, config, dist, rates, n)
    while True:
        if 2 * n > MAX_NODES:
            raise ConvergenceError(f"velocity quadrature not converged with {n} nodes",
                                   float(np.max(current)))
        n *= 2
        refined = _average(x, config, dist, rates, n)
        change = np.max(np.abs(refined - current)) / max(np.max(np.abs(refined)), 1e-300)
        current = refined
        if change < tol:
            return Pattern(x, current)


def _cumulative(x, y):
    return np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))])


def _antiderivative(x, y, F, at):
    """Integral of the linear interpolant of (x, y) from x[0] to ``at``."""
    i = np.clip(np.searchsorted(x, at, side="right") - 1, 0, x.size - 2)
    h = x[i + 1] - x[i]
    t = at - x[i]
    slope = (y[i + 1] - y[i]) / h
    return F[i] + y[i] * t + 0.5 * slope * t**2


def detector_smooth(pattern: Pattern, x_tilde: float) -> Pattern:
    """Moving average over [x - x_tilde, x + x_tilde] of the linear interpolant.

    The window is clipped at the ends of the grid.  A half-width below half
    the grid step returns the input unchanged; otherwise the grid step must
    not exceed x_tilde / 4.
    """
    x, y = pattern.x, pattern.intensity
    if x.size < 2:
        return pattern
    step = float(np.max(np.diff(x)))
    if x_tilde < 0:
        raise ValueError("detector half-width must be non-negative")
    if x_tilde < step / 2:
        return Pattern(x, y.copy(), pattern.normalization)
    if step > x_tilde / 4:
        raise ValueError(f"grid step {step:.3g} m too coarse for detector half-width {x_tilde:.3g} m "
                         "(need step <= x_tilde/4)")
    F = _cumulative(x, y)
    a = np.clip(x - x_tilde, x[0], x[-1])
    b = np.clip(x + x_tilde, x[0], x[-1])
    out = (_antiderivative(x, y, F, b) - _antiderivative(x, y, F, a)) / (b - a)
    # rounding can push a flat average a hair outside the sampled range
    out = np.clip(out, y.min(), y.max())
    return Pattern(x, out, pattern.normalization)


def default_screen_grid(config: ExperimentConfig, orders: float = 3.5, samples_per_period: int = 64):
    """Symmetric grid spanning +-orders fringe periods at the reference wavelength."""
    kin = beam_kinematics(config)
    period = kin.wavelength * kin.screen_distance / config.grating.period
    half = orders * period
    n = int(math.ceil(2 * orders * samples_per_period)) | 1
    x = np.linspace(-half, half, n)
    step = x[1] - x[0]
    x_tilde = config.geometry.detector_half_width
    if x_tilde > 0 and step > x_tilde / 4:
        n = int(math.ceil(2 * half / (x_tilde / 4))) + 1 | 1
        x = np.linspace(-half, half, n)
    return x


def add_background(pattern: Pattern, background: float) -> Pattern:
    """Add a constant equal to ``background`` times the pattern maximum."""
    if background < 0:
        raise ValueError("background must be non-negative")
    y = pattern.intensity
    return Pattern(pattern.x, y + background * float(np.max(y)), pattern.normalization)


def fig4_pipeline(config: ExperimentConfig, dist: VelocityDistribution | None = None,
                  x_tilde: float | None = None, background: float | None = None, x=None,
                  rates: DecoherenceRates | None = None, normalize: bool = True) -> Pattern:
    """Velocity average, detector smoothing, constant background, peak normalisation.

    ``background`` is a fraction of the smoothed maximum.  With
    ``normalize=False`` the smoothed density plus background is returned,
    which lets a sweep share one normalisation constant.
    """
    x = default_screen_grid(config) if x is None else np.asarray(x, dtype=float)
    x_tilde = config.geometry.detector_half_width if x_tilde is None else x_tilde
    background = config.geometry.background if background is None else background
    if dist is None and config.beam.mode == SUPERSONIC:
        dist = VelocityDistribution.from_config(config)
    if dist is None:
        avg = Pattern(x, monochromatic_pattern(x, config, reference_velocity(config), rates))
    else:
        avg = polychromatic_pattern(x, config, dist, rates)
    out = add_background(detector_smooth(avg, x_tilde), background)
    return out.normalized() if normalize else out


def count_fringes(pattern: Pattern, threshold: float = 0.05) -> int:
    """Number of local maxima at or above ``threshold`` times the global maximum."""
    y = pattern.intensity
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    return int(np.count_nonzero(inner & (y[1:-1] >= threshold * y.max())))

