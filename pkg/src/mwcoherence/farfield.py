"""Far-field interference patterns of a partially coherent grating beam.

Patterns are densities on the screen for the *unnormalised* grating state
whose single-slit wave packet is the aperture amplitude (unit height for a
rectangular slit), so the screen integral equals N times the transmitted
norm of one slit.  Two routes are provided:

* the Fraunhofer-like sum over slit pairs, damped per pair separation
  (:func:`pattern_N`, :func:`pattern_general`), and
* direct quadrature of the screen density matrix element over the slit
  supports (:func:`pattern_oracle`, :func:`pattern_general_oracle`), which
  keeps the quadratic Fresnel phase and the intra-slit coherence factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import CONSTANTS
from .decoherence import DecoherenceRates, coherence_length_at, initial_coherence_length, total_rates
from .model import (
    GAUSSIAN,
    RECTANGULAR,
    ConvergenceError,
    ExperimentConfig,
    GratingSpec,
    beam_kinematics,
)

DENSITY = "density"
PEAK = "peak"


@dataclass(frozen=True)
class ApertureModel:
    """Single-slit wave packet.

    Rectangular: unit amplitude on ``|x| <= width/2``.  Gaussian:
    ``(3/sqrt(pi)) exp(-x^2 / (4 sigma^2))``, scaled so that ``|A(0)|^2`` equals
    the rectangular value for ``width = 6 sigma``.
    """

    shape: str
    width: float
    sigma: float | None = None

    def __post_init__(self):
        if self.shape not in (RECTANGULAR, GAUSSIAN):
            raise ValueError(f"unknown aperture shape {self.shape!r}")
        if not self.width > 0:
            raise ValueError("aperture width must be positive")
        if self.shape == GAUSSIAN and self.sigma is None:
            object.__setattr__(self, "sigma", self.width / 6.0)

    @classmethod
    def rectangular(cls, width: float) -> "ApertureModel":
        return cls(RECTANGULAR, width)

    @classmethod
    def gaussian(cls, sigma: float) -> "ApertureModel":
        return cls(GAUSSIAN, 6 * sigma, sigma)

    @classmethod
    def from_grating(cls, grating: GratingSpec) -> "ApertureModel":
        if grating.aperture_shape == GAUSSIAN:
            return cls.gaussian(grating.gaussian_sigma)
        return cls.rectangular(grating.slit_width)

    @property
    def half_support(self) -> float:
        """Half width of the interval outside which the amplitude is negligible."""
        if self.shape == RECTANGULAR:
            return self.width / 2
        return 10 * self.sigma

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == RECTANGULAR:
            return (np.abs(x) <= self.width / 2).astype(float)
        return 3 / math.sqrt(math.pi) * np.exp(-(x**2) / (4 * self.sigma**2))

    def ft(self, k):
        """A(k) = integral of amplitude(x) exp(-i k x) dx (real, even)."""
        k = np.asarray(k, dtype=float)
        if self.shape == RECTANGULAR:
            return self.width * np.sinc(k * self.width / (2 * np.pi))
        return 6 * self.sigma * np.exp(-(k * self.sigma) ** 2)

    def ft_squared(self, k):
        return self.ft(k) ** 2


def aperture_ft_squared(aperture: ApertureModel, k):
    return aperture.ft_squared(k)


@dataclass(frozen=True)
class DivergenceModel:
    """Transverse wave-number distribution, through its normalised Fourier transform.

    ``ratio(s)`` is p^(s)/p^(0) evaluated at a slit-pair separation ``s``.
    """

    kind: str
    sigma_kx: float | None = None
    custom: Callable | None = field(default=None, compare=False)

    @classmethod
    def delta(cls) -> "DivergenceModel":
        return cls("delta")

    @classmethod
    def gaussian(cls, sigma_kx: float) -> "DivergenceModel":
        if not sigma_kx > 0:
            raise ValueError("sigma_kx must be positive")
        return cls("gaussian", sigma_kx=sigma_kx)

    @classmethod
    def from_ratio(cls, fn: Callable) -> "DivergenceModel":
        return cls("custom", custom=fn)

    @classmethod
    def from_config(cls, config: ExperimentConfig, velocity: float | None = None) -> "DivergenceModel":
        return cls.gaussian(1.0 / initial_coherence_length(config, velocity))

    def ratio(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "delta":
            return np.ones_like(s)
        if self.kind == "gaussian":
            return np.exp(-0.5 * (s * self.sigma_kx) ** 2)
        return np.asarray(self.custom(s), dtype=float)


@dataclass(frozen=True)
class Pattern:
    x: np.ndarray
    intensity: np.ndarray
    normalization: str = DENSITY

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.intensity, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and intensity must be 1-D arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("x grid must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "intensity", y)

    def normalized(self, scale: float | None = None) -> "Pattern":
        """Divide by ``scale`` (default: the maximum) and mark as peak-normalised."""
        scale = float(np.max(self.intensity)) if scale is None else float(scale)
        return Pattern(self.x, self.intensity / scale, PEAK)

    def integral(self) -> float:
        return float(np.trapezoid(self.intensity, self.x))


# --- Fraunhofer-like sums ---------------------------------------------------------------

def envelope(x, aperture: ApertureModel, wavelength: float, screen_distance: float):
    """Single-slit diffraction density (2 pi / lambda L) |phi^(2 pi x / lambda L)|^2."""
    lam_L = wavelength * screen_distance
    k = 2 * np.pi * np.asarray(x, dtype=float) / lam_L
    return aperture.ft_squared(k) / lam_L


def grating_pattern(x, aperture: ApertureModel, period: float, slit_count: int,
                    wavelength: float, screen_distance: float, pair_weights=None):
    """Envelope times N + 2 sum_n (N - n) w_n cos(2 pi n D x / lambda L).

    ``pair_weights[n-1]`` damps the pairs ``n`` periods apart (all ones if
    omitted).
    """
    x = np.asarray(x, dtype=float)
    N = int(slit_count)
    n = np.arange(1, N)
    w = np.ones(N - 1) if pair_weights is None else np.asarray(pair_weights, dtype=float)
    if w.shape != n.shape:
        raise ValueError(f"expected {N - 1} pair weights, got {w.shape}")
    phase = 2 * np.pi * period * x / (wavelength * screen_distance)
    bracket = N + 2 * (np.cos(np.multiply.outer(phase, n)) @ ((N - n) * w))
    return envelope(x, aperture, wavelength, screen_distance) * bracket


def _wavelength(config, velocity):
    return beam_kinematics(config, velocity).wavelength


def pattern_N(x, config: ExperimentConfig, ell: float, velocity: float | None = None):
    """Pattern with Gaussian pair damping exp(-(nD)^2 / 2 ell^2)."""
    if not ell > 0:
        raise ValueError(f"coherence length must be positive, got {ell}")
    g = config.grating
    n = np.arange(1, g.slit_count)
    weights = np.exp(-((n * g.period) ** 2) / (2 * ell**2))
    return grating_pattern(x, ApertureModel.from_grating(g), g.period, g.slit_count,
                           _wavelength(config, velocity), config.geometry.screen_distance, weights)


def pair_weights_general(config: ExperimentConfig, divergence: DivergenceModel, rate,
                         velocity: float | None = None, per_pair_air: bool = False):
    """Per-pair factor exp(-Lambda T (nD)^2 / 3) p^(nD)/p^(0).

    ``rate`` is either a number or a :class:`DecoherenceRates`; in the latter
    case ``per_pair_air`` selects the air rate for each separation instead of
    the adjacent-slit value.
    """
    g = config.grating
    n = np.arange(1, g.slit_count)
    sep = n * g.period
    T = beam_kinematics(config, velocity).time_of_flight
    if isinstance(rate, DecoherenceRates):
        if per_pair_air:
            lam = np.array([rate.lambda_total(int(k)) for k in n])
        else:
            lam = rate.lambda_total(1)
    else:
        if per_pair_air:
            raise ValueError("per_pair_air needs a DecoherenceRates instance")
        lam = float(rate)
    return np.exp(-lam * T * sep**2 / 3) * divergence.ratio(sep)


def pattern_general(x, config: ExperimentConfig, divergence: DivergenceModel, rate,
                    velocity: float | None = None, per_pair_air: bool = False):
    """Pattern for an arbitrary transverse wave-number distribution."""
    g = config.grating
    w = pair_weights_general(config, divergence, rate, velocity, per_pair_air)
    return grating_pattern(x, ApertureModel.from_grating(g), g.period, g.slit_count,
                           _wavelength(config, velocity), config.geometry.screen_distance, w)


def classical_grating_pattern(x, config: ExperimentConfig, velocity: float | None = None):
    """Fully coherent grating: envelope * (sin(N u) / sin(u))^2, u = pi D x / lambda L."""
    g = config.grating
    lam = _wavelength(config, velocity)
    L = config.geometry.screen_distance
    N = g.slit_count
    u = np.pi * g.period * np.asarray(x, dtype=float) / (lam * L)
    s = np.sin(u)
    near = np.abs(s) < 1e-8
    safe = np.where(near, 1.0, s)
    ratio2 = (np.sin(N * u) / safe) ** 2
    delta = u - np.pi * np.round(u / np.pi)
    series = N**2 * (1 - (N**2 - 1) * delta**2 / 3)
    ratio2 = np.where(near, series, ratio2)
    return envelope(x, ApertureModel.from_grating(g), lam, L) * ratio2


def damping_term(config: ExperimentConfig, rates: DecoherenceRates | float | None = None,
                 divergence: DivergenceModel | None = None, velocity: float | None = None) -> float:
    """Two-slit fringe damping p^(D)/p^(0) * exp(-Lambda T D^2 / 3)."""
    if rates is None:
        rates = total_rates(config)
    lam = rates.lambda_total(1) if isinstance(rates, DecoherenceRates) else float(rates)
    if divergence is None:
        divergence = DivergenceModel.from_config(config, velocity)
    D = config.grating.period
    T = beam_kinematics(config, velocity).time_of_flight
    return float(divergence.ratio(D) * math.exp(-lam * T * D**2 / 3))


def coherence_length_at_screen(config: ExperimentConfig, velocity: float | None = None,
                               rate: float | None = None) -> float:
    if rate is None:
        rate = total_rates(config).lambda_total(1)
    T = beam_kinematics(config, velocity).time_of_flight
    return coherence_length_at(initial_coherence_length(config, velocity), rate, T)


# --- visibility -------------------------------------------------------------------------------

MIN_SAMPLES_PER_PERIOD = 16


def visibility(pattern: Pattern, period_hint: float) -> float:
    """(I_max - I_min) / (I_max + I_min) next to the optical axis.

    I_max is the largest sample within half a period of x = 0; I_min is the
    first local minimum reached walking away from it (averaged over the two
    sides when both are sampled).
    """
    x, y = pattern.x, pattern.intensity
    step = float(np.median(np.diff(x)))
    if period_hint / step < MIN_SAMPLES_PER_PERIOD:
        raise ValueError(
            f"grid too coarse: {period_hint / step:.1f} samples per period, need {MIN_SAMPLES_PER_PERIOD}")
    central = np.flatnonzero(np.abs(x) <= period_hint / 2)
    if central.size == 0:
        raise ValueError("pattern does not cover the optical axis")
    i0 = central[np.argmax(y[central])]
    i_max = y[i0]

    minima = []
    for direction in (1, -1):
        j = i0
        limit = x[i0] + direction * period_hint
        moved = False
        while 0 <= j + direction < x.size and direction * (x[j + direction] - limit) <= 0:
            if y[j + direction] > y[j]:
                break
            j += direction
            moved = True
        if moved:
            minima.append(y[j])
    if not minima:
        raise ValueError("no samples next to the central maximum")
    i_min = float(np.mean(minima))
    total = i_max + i_min
    return 0.0 if total == 0 else float((i_max - i_min) / total)


# --- quadrature oracle -------------------------------------------------------------------------

def slit_centers(period: float, slit_count: int) -> np.ndarray:
    """Slit centres s D / 2 for s = -(N-1), ..., -1, 1, ..., N-1 (N even) or 0 for N = 1."""
    return (np.arange(slit_count) - (slit_count - 1) / 2) * period


def _quadrature_pattern(x, aperture, centers, wavelength, L, mass, kernel, fresnel,
                        tol, n_start, n_max):
    """Screen density by Gauss-Legendre quadrature over each slit, nodes doubled until stable.

    The double integral is a Hermitian form a^H G a with node amplitudes
    ``a(x)`` and coherence kernel ``G``; the kernel is even in the separation,
    so only pairs with non-negative centre offset are formed.
    """
    x = np.asarray(x, dtype=float)
    T = mass * wavelength * L / CONSTANTS.h
    alpha = mass / (2 * CONSTANTS.hbar * T)
    kbar = 2 * alpha * x
    centers = np.asarray(centers, dtype=float)
    offsets = centers - centers[0]
    half = aperture.half_support

    def evaluate(n):
        t, w = np.polynomial.legendre.leggauss(n)
        xi = half * t
        w = half * w * aperture.amplitude(xi)
        # a[s, x, i]: amplitudes at the nodes of slit s
        x0 = centers[:, None] + xi[None, :]
        phase = -np.multiply.outer(kbar, x0).transpose(1, 0, 2)
        if fresnel:
            phase = phase + alpha * x0[:, None, :] ** 2
        a = w[None, None, :] * np.exp(1j * phase)
        total = np.zeros(x.size)
        N = centers.size
        for m in range(N):
            sep = offsets[m] + xi[None, :] - xi[:, None]  # x0'_j - x0_i for slits s, s+m
            G = kernel(sep)
            left = a[: N - m] @ G  # (N-m, X, n)
            contrib = np.einsum("sxj,sxj->x", left, np.conj(a[m:])).real
            total += contrib if m == 0 else 2 * contrib
        return total / (wavelength * L)

    n = n_start
    prev = evaluate(n)
    while True:
        n *= 2
        cur = evaluate(n)
        err = float(np.max(np.abs(cur - prev)))
        scale = float(np.max(np.abs(cur))) or 1.0
        if err <= tol * scale:
            return cur, err / scale
        if n >= n_max:
            raise ConvergenceError(f"slit quadrature did not converge with {n} nodes", err / scale)
        prev = cur


def pattern_oracle(x, config: ExperimentConfig, ell: float, velocity: float | None = None,
                   tol: float = 1e-9, n_start: int = 16, n_max: int = 1024) -> Pattern:
    """Screen density by direct quadrature over the slit supports.

    Keeps the quadratic phase M x0^2 / (2 hbar T) and the full coherence
    factor exp(-(x0 - x0')^2 / 2 ell^2) inside every slit pair; slow, meant
    as an independent reference for :func:`pattern_N`.
    """
    if not ell > 0:
        raise ValueError("coherence length must be positive")
    g = config.grating
    kernel = lambda s: np.exp(-(s**2) / (2 * ell**2))  # noqa: E731
    y, _ = _quadrature_pattern(
        x, ApertureModel.from_grating(g), slit_centers(g.period, g.slit_count),
        _wavelength(config, velocity), config.geometry.screen_distance, config.molecule.mass,
        kernel, True, tol, n_start, n_max)
    return Pattern(np.asarray(x, dtype=float), y)


def pattern_general_oracle(x, config: ExperimentConfig, divergence: DivergenceModel, rate: float,
                           velocity: float | None = None, fresnel: bool = False,
                           tol: float = 1e-9, n_start: int = 16, n_max: int = 1024) -> Pattern:
    """Quadrature reference for :func:`pattern_general`.

    The divergence factor p^(x0' - x0)/p^(0) and the decoherence factor are
    evaluated at the exact node separations rather than at the slit-centre
    separations.  ``fresnel=False`` drops the quadratic phase (long-time form).
    """
    g = config.grating
    T = beam_kinematics(config, velocity).time_of_flight
    kernel = lambda s: np.exp(-rate * T * s**2 / 3) * divergence.ratio(s)  # noqa: E731
    y, _ = _quadrature_pattern(
        x, ApertureModel.from_grating(g), slit_centers(g.period, g.slit_count),
        _wavelength(config, velocity), config.geometry.screen_distance, config.molecule.mass,
        kernel, fresnel, tol, n_start, n_max)
    return Pattern(np.asarray(x, dtype=float), y)
