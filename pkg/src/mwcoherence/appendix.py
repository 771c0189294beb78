"""Closed-form checks: exact Gaussian double slit and the zero-order error metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS

# both branches of quality_R agree to ~1e-13 at this switch
_SMALL_ELL_K = 1e-6


@dataclass(frozen=True)
class GaussianTwoSlit:
    """Two Gaussian slits of standard deviation ``sigma_x`` at +-D/2.

    ``amplitude`` is the peak amplitude C of each slit packet
    C exp(-(x -+ D/2)^2 / 4 sigma_x^2); the default matches the Gaussian
    :class:`~mwcoherence.farfield.ApertureModel` convention.
    """

    sigma_x: float
    period: float
    ell: float
    time: float
    mass: float
    amplitude: float = 3 / math.sqrt(math.pi)

    @property
    def Q(self) -> float:
        hbar = CONSTANTS.hbar
        return 1 + (2 * self.mass * self.sigma_x**2 / (hbar * self.time)) ** 2 + (2 * self.sigma_x / self.ell) ** 2


def gaussian_two_slit_exact(x, params: GaussianTwoSlit):
    """Exact screen density for two Gaussian slits with coherence length ell.

    Includes the Gaussian envelope, the cosh cross term from the finite
    flight time, and the fringe term damped by exp(-D^2 / 2 Q ell^2).
    """
    x = np.asarray(x, dtype=float)
    p = params
    hbar = CONSTANTS.hbar
    Q = p.Q
    D = p.period
    b = (math.sqrt(2) * p.mass * p.sigma_x / (hbar * p.time)) ** 2
    pref = 4 * p.mass * p.sigma_x**2 * p.amplitude**2 / (hbar * p.time * math.sqrt(Q))
    fringe = math.exp(-(D**2) / (2 * Q * p.ell**2)) * np.cos(p.mass * D * x / (hbar * p.time * Q))
    # cosh(a) * exp(-c) written as a sum of exponentials to avoid overflow far from the axis
    expo = -(x**2 + D**2 / 4) * b / Q
    cross = b * D * x / Q
    return pref * (0.5 * (np.exp(expo + cross) + np.exp(expo - cross)) + np.exp(expo) * fringe)


def quality_R(ell: float, k_bar, d: float):
    """Relative error of dropping the intra-slit coherence factor for a rectangular slit.

    Uses 2 sin^2(k d / 2) for 1 - cos(k d) so the formula stays accurate as
    k -> 0; below |ell k| = 1e-6 the analytic limit is returned.
    """
    if not (ell > 0 and d > 0):
        raise ValueError("ell and d must be positive")
    k = np.abs(np.asarray(k_bar, dtype=float))
    r = d / ell
    cosh_m1 = 2 * math.sinh(r / 2) ** 2
    limit = abs(1 - r**2 / (2 * cosh_m1))
    small = np.abs(ell * k) < _SMALL_ELL_K
    ks = np.where(small, 1.0, k)
    one_m_cos = 2 * np.sin(ks * d / 2) ** 2
    general = np.abs(1 - (1 + 1 / (ell * ks) ** 2) * one_m_cos / (cosh_m1 + one_m_cos))
    out = np.where(small, limit, general)
    return float(out) if out.ndim == 0 else out


def quality_R_limit(ell: float, d: float) -> float:
    return quality_R(ell, 0.0, d)
