"""Near-field self-imaging of a periodic grating at the Talbot distance.

At t_T = 2 M D^2 / h the free propagator of an infinite grating collapses
to sums of delta functions and the transmission pattern reappears.  With
Gaussian position localization each Fourier component p of the image is
damped by exp(-2 p^2 (D / ell_T)^2), which is a convolution of the free
image with a Gaussian of standard deviation D^2 / (pi ell_T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .constants import CONSTANTS
from .decoherence import coherence_length_at, initial_coherence_length, total_rates
from .farfield import GAUSSIAN, ApertureModel, Pattern
from .model import ConvergenceError, ExperimentConfig, beam_kinematics

DEFAULT_J = 16
TRUNCATION_TOL = 1e-8


def talbot_length(period: float, wavelength: float) -> float:
    if not (period > 0 and wavelength > 0):
        raise ValueError("period and wavelength must be positive")
    return 2 * period**2 / wavelength


@dataclass(frozen=True)
class TalbotSetup:
    period: float
    wavelength: float
    mass: float
    ell_T: float = math.inf
    J: int = DEFAULT_J

    def __post_init__(self):
        if not (self.period > 0 and self.wavelength > 0 and self.mass > 0):
            raise ValueError("period, wavelength and mass must be positive")
        if not self.ell_T > 0:
            raise ValueError("ell_T must be positive")
        if self.J < 1:
            raise ValueError("truncation J must be >= 1")

    @property
    def length(self) -> float:
        return talbot_length(self.period, self.wavelength)

    @property
    def time(self) -> float:
        return 2 * self.mass * self.period**2 / CONSTANTS.h

    @property
    def velocity(self) -> float:
        return CONSTANTS.h / (self.mass * self.wavelength)

    @property
    def blur(self) -> float:
        return image_blur(self.period, self.ell_T)

    @classmethod
    def from_config(cls, config: ExperimentConfig, ell_T: float | None = None, J: int = DEFAULT_J):
        """Setup at the first Talbot distance; ell_T defaults to ell(t_T) of the scenario."""
        kin = beam_kinematics(config)
        M, D = config.molecule.mass, config.grating.period
        if ell_T is None:
            t_T = 2 * M * D**2 / CONSTANTS.h
            ell0 = initial_coherence_length(config, kin.velocity)
            ell_T = coherence_length_at(ell0, total_rates(config).lambda_total(1), t_T)
        return cls(D, kin.wavelength, M, ell_T, J)


def image_blur(period: float, ell_T: float) -> float:
    """Standard deviation D^2 / (pi ell_T) of the Gaussian that smears the image."""
    return 0.0 if math.isinf(ell_T) else period**2 / (math.pi * ell_T)


def _check_support(aperture: ApertureModel, period: float, J: int):
    if J * period < aperture.half_support + period / 2:
        raise ValueError(f"truncation J={J} does not cover the aperture support "
                         f"({aperture.half_support:.3g} m half width, period {period:.3g} m)")


def _reduce(x, period):
    """Fold x into [-D/2, D/2); the image is periodic."""
    return x - period * np.floor(x / period + 0.5)


class _Image:
    """Periodic image built from Gaussian and blurred-step components.

    ``value(x)`` and ``integral(a, b)`` are exact for one period replica
    set with shifts ``jD`` for ``|j| <= J``.
    """

    def __init__(self, aperture: ApertureModel, period: float, blur: float, J: int):
        _check_support(aperture, period, J)
        self.ap, self.D, self.s, self.J = aperture, period, blur, J
        self.j = np.arange(-J, J + 1)

    # rectangular slits: the replicas never overlap for d < D, so |sum|^2 = sum of indicators
    def _rect_value(self, x):
        h = self.ap.width / 2
        c = -self.j * self.D
        u = np.subtract.outer(x, c)
        if self.s == 0:
            return (np.abs(u) <= h).astype(float).sum(axis=-1)
        r = math.sqrt(2) * self.s
        return 0.5 * (special.erf((u + h) / r) - special.erf((u - h) / r)).sum(axis=-1)

    def _rect_integral(self, a, b):
        h = self.ap.width / 2
        c = -self.j * self.D
        if self.s == 0:
            lo = np.maximum(a, c - h)
            hi = np.minimum(b, c + h)
            return float(np.clip(hi - lo, 0, None).sum())
        s = self.s

        def G(z):  # antiderivative of the standard normal cdf
            return z * special.ndtr(z) + np.exp(-z**2 / 2) / math.sqrt(2 * math.pi)

        def F(x):
            return s * (G((x - c + h) / s) - G((x - c - h) / s))

        return float((F(b) - F(a)).sum())

    def _gauss_terms(self):
        sig = self.ap.sigma
        jj, kk = np.meshgrid(self.j, self.j, indexing="ij")
        amp = (3 / math.sqrt(math.pi)) ** 2 * np.exp(-((jj - kk) * self.D) ** 2 / (8 * sig**2))
        centers = -(jj + kk) * self.D / 2
        width = math.sqrt(sig**2 + self.s**2)
        return amp.ravel() * sig / width, centers.ravel(), width

    def _gauss_value(self, x):
        amp, centers, w = self._gauss_terms()
        return np.exp(-np.subtract.outer(x, centers) ** 2 / (2 * w**2)) @ amp

    def _gauss_integral(self, a, b):
        amp, centers, w = self._gauss_terms()
        r = math.sqrt(2) * w
        part = 0.5 * (special.erf((b - centers) / r) - special.erf((a - centers) / r))
        return float(amp @ part) * math.sqrt(2 * math.pi) * w

    def value(self, x):
        x = _reduce(np.asarray(x, dtype=float), self.D)
        if self.ap.shape == GAUSSIAN:
            return self._gauss_value(x)
        return self._rect_value(x)

    def integral(self, a: float, b: float) -> float:
        """Integral of the image over [a, b] with b - a <= D, after folding a."""
        shift = a - _reduce(a, self.D)
        a, b = a - shift, b - shift
        if self.ap.shape == GAUSSIAN:
            return self._gauss_integral(a, b)
        return self._rect_integral(a, b)


def _converged(build, x, J):
    """Evaluate with J and 2J; raise if the truncation still matters."""
    first = build(J).value(x)
    second = build(2 * J).value(x)
    scale = max(float(np.max(np.abs(second))), 1e-300)
    if np.max(np.abs(second - first)) > TRUNCATION_TOL * scale:
        raise ConvergenceError(f"Talbot image not converged at J={J}", float(np.max(second)))
    return second


def talbot_intensity_free(x, aperture: ApertureModel, period: float, J: int = DEFAULT_J) -> Pattern:
    """|sum_j phi(x + jD)|^2: the grating image at multiples of the Talbot distance."""
    x = np.asarray(x, dtype=float)
    y = _converged(lambda n: _Image(aperture, period, 0.0, n), x, J)
    return Pattern(x, y)


def talbot_intensity_env(x, aperture: ApertureModel, period: float, ell_T: float,
                         J: int = DEFAULT_J) -> Pattern:
    """Image with the Fourier components damped by exp(-2 p^2 (D / ell_T)^2)."""
    if not ell_T > 0:
        raise ValueError("ell_T must be positive")
    x = np.asarray(x, dtype=float)
    s = image_blur(period, ell_T)
    y = _converged(lambda n: _Image(aperture, period, s, n), x, J)
    return Pattern(x, y)


def talbot_intensity_series(x, aperture: ApertureModel, period: float, ell_T: float, J: int):
    """Direct double sum over (j, j') of the damped Talbot kernel against phi phi^*.

    The j-th Fourier coefficient of the slit is A(2 pi j / D).  Only useful
    for smooth apertures; rectangular slits converge slowly.
    """
    x = np.asarray(x, dtype=float)
    j = np.arange(-J, J + 1)
    coef = aperture.ft(2 * np.pi * j / period)
    r2 = 0.0 if math.isinf(ell_T) else (period / ell_T) ** 2
    p = np.subtract.outer(j, j)
    weight = np.exp(-2 * r2 * p**2) * np.outer(coef, coef)
    out = np.zeros_like(x)
    for lag in range(-2 * J, 2 * J + 1):
        c = np.trace(weight, offset=-lag)
        if c != 0:
            out += c * np.cos(2 * np.pi * lag * x / period)
    return out / period**2


def image_contrast(pattern: Pattern) -> float:
    y = pattern.intensity
    hi, lo = float(y.max()), float(y.min())
    return (hi - lo) / (hi + lo) if hi + lo > 0 else 0.0


def two_grating_signal(shift, aperture: ApertureModel, period: float, ell_T: float = math.inf,
                       J: int = DEFAULT_J, open_width: float | None = None):
    """Flux through a second, identical grating displaced by ``shift``.

    The second grating transmits |x - nD| <= open_width/2 (the slit width of
    the first by default).  Periodic in the shift with period D.
    """
    w = aperture.width if open_width is None else open_width
    if not 0 < w <= period:
        raise ValueError("open width must lie in (0, D]")
    img = _Image(aperture, period, image_blur(period, ell_T), J)
    shifts = np.atleast_1d(np.asarray(shift, dtype=float))
    out = np.array([img.integral(-w / 2 - s, w / 2 - s) for s in shifts])
    return float(out[0]) if np.ndim(shift) == 0 else out


def signal_visibility(aperture: ApertureModel, period: float, ell_T: float = math.inf,
                      J: int = DEFAULT_J) -> float:
    """(S_max - S_min) / (S_max + S_min) with the extremes at zero and half-period shift."""
    s_max = two_grating_signal(0.0, aperture, period, ell_T, J)
    s_min = two_grating_signal(period / 2, aperture, period, ell_T, J)
    return (s_max - s_min) / (s_max + s_min)
