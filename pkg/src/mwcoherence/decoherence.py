"""Localization rates of the decoherence channels and coherence lengths.

Each channel damps the off-diagonal density-matrix elements as
``exp(-Lambda * t * (x - x')**2)``.  Air scattering saturates for
separations above the de Broglie wavelength of the gas, so it is reported
as an effective rate for a pair of slits ``n`` periods apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS
from .model import EnvironmentSpec, ExperimentConfig, MoleculeSpec, beam_kinematics

_C = CONSTANTS


def thermal_wavelength(temperature: float) -> float:
    """Wavelength hc/(k_B T) of a thermal photon."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return _C.h * _C.c / (_C.k_B * temperature)


def air_de_broglie_wavelength(environment: EnvironmentSpec) -> float:
    e = environment
    if not e.gas_mass > 0:
        return math.inf
    return _C.h / math.sqrt(2 * math.pi * e.gas_mass * _C.k_B * e.temperature)


def rate_photon_scattering(molecule: MoleculeSpec, temperature: float) -> float:
    """Rayleigh scattering of thermal photons off a dielectric sphere of radius R."""
    lam = thermal_wavelength(temperature)
    polar = ((molecule.epsilon_r - 1) / (molecule.epsilon_r + 2)) ** 2
    return (math.factorial(8) * 8 * _C.c * molecule.radius**6 / 3
            * polar * _C.zeta9 * (2 * math.pi / lam) ** 9)


def rate_air_constant(environment: EnvironmentSpec) -> float:
    """Saturated collision rate F_air(inf) for a Maxwell-Boltzmann gas, in 1/s."""
    e = environment
    if e.pressure == 0 or e.cross_section == 0:
        return 0.0
    return e.cross_section * e.pressure * math.sqrt(32 * math.pi / (_C.k_B * e.temperature * e.gas_mass))


def rate_air_effective(f_air: float, n: int, period: float) -> float:
    """Air rate as an effective localization factor for slits ``n`` periods apart."""
    if n < 1:
        raise ValueError(f"slit-pair index must be >= 1, got {n}")
    if not period > 0:
        raise ValueError("period must be positive")
    return f_air / (n * period) ** 2


@dataclass(frozen=True)
class BlackbodyEmission:
    power: float  # W
    photon_rate: float  # 1/s
    rate: float  # m^-2 s^-1
    wavelength: float  # m

    @property
    def power_ev_per_s(self) -> float:
        return self.power / _C.eV


def rate_blackbody(molecule: MoleculeSpec) -> BlackbodyEmission:
    """Thermal emission of the hot molecule, treated as a grey body."""
    theta = molecule.internal_temperature
    power = molecule.emissivity * 4 * math.pi * molecule.radius**2 * _C.sigma_SB * theta**4
    photons = power / (_C.k_B * theta)
    lam = thermal_wavelength(theta)
    rate = 8 * math.pi**2 * _C.zeta5 / _C.zeta3 * photons * molecule.emissivity / lam**2
    return BlackbodyEmission(power=power, photon_rate=photons, rate=rate, wavelength=lam)


def rate_vibrational(emission_rate: float, k_star: float) -> float:
    """Upper bound N k*^2 / 6 from the most energetic infrared line."""
    if emission_rate < 0 or k_star < 0:
        raise ValueError("emission rate and wave number must be non-negative")
    return emission_rate * k_star**2 / 6


@dataclass(frozen=True)
class DecoherenceRates:
    lambda_ph_scat: float
    f_air_inf: float
    period: float
    lambda_bb: float
    lambda_vib: float
    photon_wavelength: float
    air_wavelength: float
    emission_wavelength: float
    bb_photon_rate: float
    bb_power: float

    def lambda_air(self, n: int = 1) -> float:
        return rate_air_effective(self.f_air_inf, n, self.period)

    @property
    def lambda_ph(self) -> float:
        return self.lambda_ph_scat + self.lambda_bb + self.lambda_vib

    def lambda_total(self, n: int = 1) -> float:
        return self.lambda_air(n) + self.lambda_ph

    def table(self) -> list[tuple[str, float, str]]:
        """Rows (channel, value, unit) in the order of the usual summary table."""
        return [
            ("photon_scattering", self.lambda_ph_scat, "m^-2 s^-1"),
            ("air_constant", self.f_air_inf, "s^-1"),
            ("air_adjacent", self.lambda_air(1), "m^-2 s^-1"),
            ("blackbody_power", self.bb_power, "W"),
            ("blackbody_photon_rate", self.bb_photon_rate, "s^-1"),
            ("blackbody", self.lambda_bb, "m^-2 s^-1"),
            ("vibrational", self.lambda_vib, "m^-2 s^-1"),
            ("total", self.lambda_total(1), "m^-2 s^-1"),
        ]


def total_rates(config: ExperimentConfig) -> DecoherenceRates:
    m, env = config.molecule, config.environment
    bb = rate_blackbody(m)
    return DecoherenceRates(
        lambda_ph_scat=rate_photon_scattering(m, env.temperature),
        f_air_inf=rate_air_constant(env),
        period=config.grating.period,
        lambda_bb=bb.rate,
        lambda_vib=rate_vibrational(m.vib_emission_rate, m.vib_k_star),
        photon_wavelength=thermal_wavelength(env.temperature),
        air_wavelength=air_de_broglie_wavelength(env),
        emission_wavelength=bb.wavelength,
        bb_photon_rate=bb.photon_rate,
        bb_power=bb.power,
    )


# --- coherence length -------------------------------------------------------------

def initial_coherence_length(config: ExperimentConfig, velocity: float | None = None) -> float:
    """Coherence length at the grating set by the collimator divergence.

    The largest transverse drift v*a/l is identified with three standard
    deviations of the transverse wave number.
    """
    col = config.collimation
    if not col.geometric:
        return 1.0 / col.sigma_kx
    v = beam_kinematics(config, velocity).velocity
    theta = col.aperture / col.separation
    return 3 * CONSTANTS.hbar / (config.molecule.mass * v * theta)


def coherence_length_at(ell0, rate, t):
    """ell(t) = ell0 / sqrt(1 + 2 Lambda t ell0^2 / 3); broadcasts over arrays."""
    ell0 = np.asarray(ell0, dtype=float)
    if np.any(ell0 <= 0):
        raise ValueError("ell0 must be positive")
    if np.any(np.asarray(rate) < 0) or np.any(np.asarray(t) < 0):
        raise ValueError("rate and time must be non-negative")
    out = ell0 / np.sqrt(1 + 2 * np.asarray(rate) * np.asarray(t) * ell0**2 / 3)
    return float(out) if out.ndim == 0 else out


def coherence_time(ell0: float, rate: float, period: float) -> float | None:
    """Longest flight time for which ell(t) >= D.

    Returns 0 when the beam is already incoherent over one period and
    ``None`` when there is no decoherence and hence no finite bound.
    """
    if not period > 0:
        raise ValueError("period must be positive")
    if rate < 0:
        raise ValueError("rate must be non-negative")
    if ell0 <= period:
        return 0.0
    if rate == 0:
        return None
    return 3 / (2 * rate * period**2) * (1 - (period / ell0) ** 2)


@dataclass(frozen=True)
class CoherenceState:
    ell0: float
    rate: float
    period: float

    def ell_of(self, t):
        return coherence_length_at(self.ell0, self.rate, t)

    @property
    def tau_c(self) -> float | None:
        return coherence_time(self.ell0, self.rate, self.period)


def coherence_state(config: ExperimentConfig, velocity: float | None = None,
                    rates: DecoherenceRates | None = None, n: int = 1) -> CoherenceState:
    rates = total_rates(config) if rates is None else rates
    return CoherenceState(ell0=initial_coherence_length(config, velocity),
                          rate=rates.lambda_total(n), period=config.grating.period)
