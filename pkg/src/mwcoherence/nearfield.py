"""Free evolution of Gaussian slit packets and the time-integrated quantum current.

The state factorises into a transverse part psi(x, t), a sum of Gaussians
centred on the slits, and a longitudinal packet phi(y, t) moving towards
the screen.  Everything is analytic; only the arrival-time integral is
done numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .constants import CONSTANTS, NEUTRON_MASS
from .farfield import ApertureModel, Pattern
from .model import ConvergenceError

HBAR = CONSTANTS.hbar
ARRIVAL_RTOL = 1e-7
POSITIVITY_WARN = 20.0  # k_y sigma_y below this makes backward current likely


def _alpha(sigma, t, mass):
    return sigma**2 + 1j * HBAR * np.asarray(t, dtype=float) / (2 * mass)


def evolve_gaussian_1d(x, t, sigma: float, k: float, x_center: float, mass: float):
    """Free Schroedinger evolution of (2 pi sigma^2)^(-1/4) exp(-(x - c)^2 / 4 sigma^2 + i k x)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be non-negative")
    x = np.asarray(x, dtype=float)
    a = _alpha(sigma, t, mass)
    drift = x - x_center - HBAR * k * np.asarray(t) / mass
    phase = 1j * k * x - 1j * HBAR * k**2 * np.asarray(t) / (2 * mass)
    return (2 * np.pi) ** -0.25 * np.sqrt(sigma / a) * np.exp(-drift**2 / (4 * a) + phase)


def _log_derivative(x, t, sigma, k, x_center, mass):
    """d/dx ln psi for one evolved Gaussian."""
    a = _alpha(sigma, t, mass)
    return -(np.asarray(x) - x_center - HBAR * k * np.asarray(t) / mass) / (2 * a) + 1j * k


@dataclass(frozen=True)
class GaussianBeamState:
    """Sum of transverse Gaussians times a longitudinal packet with mean wave number k_y."""

    sigma_x: float
    sigma_y: float
    k_y: float
    offsets: tuple[float, ...]
    mass: float
    norm_x: float = field(init=False)

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError("sigma_x and sigma_y must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if len(self.offsets) == 0:
            raise ValueError("need at least one slit offset")
        off = tuple(float(o) for o in self.offsets)
        object.__setattr__(self, "offsets", off)
        c = np.asarray(off)
        gram = np.exp(-np.subtract.outer(c, c) ** 2 / (8 * self.sigma_x**2))
        object.__setattr__(self, "norm_x", 1 / math.sqrt(gram.sum()))
        if self.k_y * self.sigma_y < POSITIVITY_WARN:
            warnings.warn(f"k_y sigma_y = {self.k_y * self.sigma_y:.3g}: the current may be negative "
                          "at the screen", stacklevel=2)

    @classmethod
    def double_slit(cls, period: float, slit_width: float, sigma_y: float, velocity: float,
                    mass: float) -> "GaussianBeamState":
        """Two slits at +-D/2 with sigma_x = d/6."""
        k = mass * velocity / HBAR
        return cls(slit_width / 6, sigma_y, k, (-period / 2, period / 2), mass)

    @property
    def velocity(self) -> float:
        return HBAR * self.k_y / self.mass

    @property
    def wavelength(self) -> float:
        return 2 * np.pi / self.k_y

    @property
    def transverse_extent(self) -> float:
        """Support width: outermost slit centres plus three standard deviations each side."""
        return max(self.offsets) - min(self.offsets) + 6 * self.sigma_x

    def psi(self, x, t):
        out = sum(evolve_gaussian_1d(x, t, self.sigma_x, 0.0, c, self.mass) for c in self.offsets)
        return self.norm_x * out

    def dpsi_dx(self, x, t):
        out = sum(evolve_gaussian_1d(x, t, self.sigma_x, 0.0, c, self.mass)
                  * _log_derivative(x, t, self.sigma_x, 0.0, c, self.mass) for c in self.offsets)
        return self.norm_x * out

    def phi(self, y, t):
        return evolve_gaussian_1d(y, t, self.sigma_y, self.k_y, 0.0, self.mass)

    def dphi_dy(self, y, t):
        return self.phi(y, t) * _log_derivative(y, t, self.sigma_y, self.k_y, 0.0, self.mass)

    def sigma_y_at(self, t: float) -> float:
        return self.sigma_y * math.sqrt(1 + (HBAR * t / (2 * self.mass * self.sigma_y**2)) ** 2)

    def density(self, x, y, t):
        return np.abs(self.psi(x, t)) ** 2 * np.abs(self.phi(y, t)) ** 2


def _flux_factor(y, t, state: GaussianBeamState):
    """Im[phi^* d phi/dy] in closed form."""
    a = _alpha(state.sigma_y, t, state.mass)
    u = np.asarray(y) - HBAR * state.k_y * np.asarray(t) / state.mass
    return np.abs(state.phi(y, t)) ** 2 * (state.k_y + u * a.imag / (2 * np.abs(a) ** 2))


def current_jy(x, y, t, state: GaussianBeamState):
    """Longitudinal current (hbar/M) |psi|^2 Im[phi^* d_y phi]."""
    return HBAR / state.mass * np.abs(state.psi(x, t)) ** 2 * _flux_factor(y, t, state)


def current_jx(x, y, t, state: GaussianBeamState):
    psi = state.psi(x, t)
    return HBAR / state.mass * np.abs(state.phi(y, t)) ** 2 * np.imag(np.conj(psi) * state.dpsi_dx(x, t))


def continuity_residual(x, y, t, state: GaussianBeamState, h_t: float, h_x: float, h_y: float):
    """(d_t rho + div J, scale) by central differences; scale is |d_t rho|."""
    drho = (state.density(x, y, t + h_t) - state.density(x, y, t - h_t)) / (2 * h_t)
    djx = (current_jx(x + h_x, y, t, state) - current_jx(x - h_x, y, t, state)) / (2 * h_x)
    djy = (current_jy(x, y + h_y, t, state) - current_jy(x, y - h_y, t, state)) / (2 * h_y)
    return drho + djx + djy, np.abs(drho)


@dataclass(frozen=True)
class ArrivalPattern:
    pattern: Pattern
    negative_fraction: float
    t_max: float


def arrival_window(state: GaussianBeamState, L: float) -> float:
    """Time by which the longitudinal packet has passed L + 8 sigma_y(t)."""
    v = state.velocity
    t = (L + 8 * state.sigma_y_at(L / v)) / v
    return (L + 8 * state.sigma_y_at(t)) / v


def arrival_intensity(x, L: float, state: GaussianBeamState, rtol: float = ARRIVAL_RTOL) -> ArrivalPattern:
    """I(x) = integral over t of J_y(x, L, t), negative contributions included.

    The fraction of |J_y| time-integral coming from backward flux is
    reported so violations of current positivity are visible.
    """
    if not L > 0:
        raise ValueError("screen distance must be positive")
    x = np.asarray(x, dtype=float)
    t_max = arrival_window(state, L)
    t_peak = L / state.velocity

    def f(t):
        return current_jy(x, L, t, state)

    # quad_vec wants the peak inside the interval on a breakpoint
    pts = [t_peak] if t_peak < t_max else None
    total, err = integrate.quad_vec(f, 0.0, t_max, epsrel=rtol, epsabs=0, points=pts, limit=2000)
    if not np.all(np.isfinite(total)):
        raise ConvergenceError("arrival-time integral did not converge", float(np.nanmax(total)))
    neg = _negative_flux(L, state, t_max)
    return ArrivalPattern(Pattern(x, total), neg, t_max)


def _negative_flux(L, state, t_max):
    """Share of backward flux in the time integral of |Im[phi^* d phi]| at y = L."""
    g = lambda t: float(_flux_factor(L, t, state))
    pos, _ = integrate.quad(lambda t: max(g(t), 0.0), 0, t_max, limit=400, points=[L / state.velocity])
    neg, _ = integrate.quad(lambda t: max(-g(t), 0.0), 0, t_max, limit=400, points=[L / state.velocity])
    return neg / (pos + neg) if pos + neg > 0 else 0.0


def crossing_time_density(t, L: float, state: GaussianBeamState):
    """v |phi_0(L - v t)|^2: arrival-time density of the rigidly translated packet."""
    v = state.velocity
    s = state.sigma_y
    return v * np.exp(-((L - v * np.asarray(t)) ** 2) / (2 * s**2)) / (math.sqrt(2 * np.pi) * s)


def approx_I1(x, L: float, state: GaussianBeamState, rtol: float = 1e-10):
    """Transverse density averaged over classical crossing times of the undistorted packet."""
    x = np.asarray(x, dtype=float)
    v = state.velocity
    t0, dt = L / v, state.sigma_y / v
    lo, hi = max(t0 - 12 * dt, 0.0), t0 + 12 * dt
    f = lambda t: np.abs(state.psi(x, t)) ** 2 * crossing_time_density(t, L, state)
    pts = [t0] if lo < t0 < hi else None
    val, _ = integrate.quad_vec(f, lo, hi, epsrel=rtol, epsabs=0, points=pts, limit=2000)
    return val


def crossing_probability(L: float, state: GaussianBeamState) -> float:
    """Weight of the crossing-time density on t > 0."""
    return 0.5 * special.erfc(-L / (math.sqrt(2) * state.sigma_y))


def approx_I2(x, L: float, state: GaussianBeamState):
    """|psi(x, T)|^2 at the classical time of flight."""
    return np.abs(state.psi(x, L / state.velocity)) ** 2


def approx_I3(x, L: float, wavelength: float, aperture: ApertureModel, offsets, norm: float = 1.0):
    """(2 pi / lambda L) |psi0^(2 pi x / lambda L)|^2 for psi0 = norm * sum_s phi(x - x_s)."""
    x = np.asarray(x, dtype=float)
    lam_L = wavelength * L
    k = 2 * np.pi * x / lam_L
    phases = np.exp(-1j * np.multiply.outer(k, np.asarray(offsets, dtype=float))).sum(axis=-1)
    return norm**2 * aperture.ft_squared(k) * np.abs(phases) ** 2 / lam_L


def approx_I2_I3(x, L: float, state: GaussianBeamState):
    """I2 and the Fourier-transform limit I3 for the same Gaussian state."""
    ap = ApertureModel.gaussian(state.sigma_x)
    # ApertureModel's Gaussian has peak 3/sqrt(pi); the state's packets have (2 pi sigma^2)^(-1/4)
    scale = (2 * np.pi * state.sigma_x**2) ** -0.25 / (3 / math.sqrt(math.pi))
    I3 = approx_I3(x, L, state.wavelength, ap, state.offsets, state.norm_x * scale)
    return approx_I2(x, L, state), I3


@dataclass(frozen=True)
class TimeScales:
    tau: float
    T: float
    delta_T: float

    @property
    def fraunhofer(self) -> float:
        """tau / T; far field needs this small."""
        return self.tau / self.T

    @property
    def arrival_spread(self) -> float:
        return self.delta_T / self.T


def time_scales(state: GaussianBeamState, L: float) -> TimeScales:
    """tau = M dx^2 / hbar for the transverse support, T = L/v, delta_T = sigma_y / v."""
    v = state.velocity
    return TimeScales(tau=state.mass * state.transverse_extent**2 / HBAR, T=L / v, delta_T=state.sigma_y / v)


# --- ultra-cold neutron double slit -----------------------------------------------------------

NEUTRON_VELOCITY = 1.0
NEUTRON_PERIOD = 1e-5
NEUTRON_SLIT_WIDTH = 5e-6
NEUTRON_SIGMA_Y = 1e-3
NEUTRON_DISTANCES = (3e-3, 6e-3, 12e-3, 24e-3)


def neutron_state() -> GaussianBeamState:
    return GaussianBeamState.double_slit(NEUTRON_PERIOD, NEUTRON_SLIT_WIDTH, NEUTRON_SIGMA_Y,
                                         NEUTRON_VELOCITY, NEUTRON_MASS)


def screen_grid(state: GaussianBeamState, L: float, samples_per_fringe: int = 64, spread: float = 7.0):
    """Symmetric grid covering +-spread transverse widths at T with the fringe period resolved."""
    T = L / state.velocity
    s = state.sigma_x * math.sqrt(1 + (HBAR * T / (2 * state.mass * state.sigma_x**2)) ** 2)
    half = max(np.abs(state.offsets)) + spread * s
    D = max(state.offsets) - min(state.offsets)
    fringe = 2 * np.pi * HBAR * T / (state.mass * D) if D > 0 else 2 * s
    n = int(math.ceil(2 * half / fringe * samples_per_fringe)) | 1
    return np.linspace(-half, half, max(n, 201))


def fringe_period(state: GaussianBeamState, L: float) -> float:
    D = max(state.offsets) - min(state.offsets)
    return 2 * np.pi * HBAR * (L / state.velocity) / (state.mass * D)
