"""Experiment description, validation, scenario files and beam kinematics.

Every quantity is SI.  A scenario file is a JSON document whose top-level
keys mirror :class:`ExperimentConfig`; keys starting with ``_`` are treated as
comments and ignored, any other unknown key is an error.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .constants import CONSTANTS

RECTANGULAR = "rectangular"
GAUSSIAN = "gaussian"
MONOCHROMATIC = "monochromatic"
SUPERSONIC = "supersonic"

# "much less than" threshold used by every regime flag
REGIME_THRESHOLD = 0.1


@dataclass(frozen=True)
class MoleculeSpec:
    mass: float
    radius: float
    epsilon_r: float
    emissivity: float
    internal_temperature: float
    vib_emission_rate: float = 0.0
    vib_k_star: float = 0.0


@dataclass(frozen=True)
class EnvironmentSpec:
    temperature: float
    pressure: float
    gas_mass: float
    cross_section: float


@dataclass(frozen=True)
class CollimationSpec:
    """Two-slit collimator (``aperture``, ``separation``) or a direct ``sigma_kx``."""

    aperture: float | None = None
    separation: float | None = None
    sigma_kx: float | None = None

    @property
    def geometric(self) -> bool:
        return self.sigma_kx is None


@dataclass(frozen=True)
class GratingSpec:
    period: float
    slit_width: float
    slit_count: int
    aperture_shape: str = RECTANGULAR
    sigma_x: float | None = None

    @property
    def gaussian_sigma(self) -> float:
        return self.sigma_x if self.sigma_x is not None else self.slit_width / 6.0


@dataclass(frozen=True)
class GeometrySpec:
    screen_distance: float
    detector_half_width: float = 0.0
    background: float = 0.0


@dataclass(frozen=True)
class BeamSpec:
    mode: str = MONOCHROMATIC
    wavelength: float | None = None
    v0: float | None = None
    v_hat: float | None = None
    velocity_window: tuple[float, float] | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    molecule: MoleculeSpec
    environment: EnvironmentSpec
    collimation: CollimationSpec
    grating: GratingSpec
    geometry: GeometrySpec
    beam: BeamSpec

    def replace(self, **sections: Any) -> "ExperimentConfig":
        """Return a copy with whole sections, or ``section__field`` values, swapped."""
        updates: dict[str, Any] = {}
        nested: dict[str, dict[str, Any]] = {}
        for key, value in sections.items():
            if "__" in key:
                sec, name = key.split("__", 1)
                nested.setdefault(sec, {})[name] = value
            else:
                updates[key] = value
        for sec, values in nested.items():
            base = updates.get(sec, getattr(self, sec))
            updates[sec] = dataclasses.replace(base, **values)
        return dataclasses.replace(self, **updates)


@dataclass(frozen=True)
class Violation:
    field: str
    constraint: str
    value: Any

    def __str__(self) -> str:
        return f"{self.field}: {self.constraint} (got {self.value!r})"


class ConvergenceError(RuntimeError):
    """A numerical quadrature missed its tolerance; ``estimate`` is the achieved error."""

    def __init__(self, message: str, estimate: float):
        self.estimate = estimate
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")


class ConfigError(ValueError):
    """Raised with the complete list of invariant violations of a config."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"{len(self.violations)} configuration violation(s):\n{lines}")


def _positive(out, name, value, what):
    if value is None or not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        out.append(Violation(name, f"{what} must be positive", value))


def _nonnegative(out, name, value, what):
    if value is None or not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
        out.append(Violation(name, f"{what} must be non-negative", value))


def find_violations(config: ExperimentConfig) -> list[Violation]:
    """Check every invariant and return all violations found (empty if valid)."""
    out: list[Violation] = []

    m = config.molecule
    _positive(out, "molecule.mass", m.mass, "mass")
    _positive(out, "molecule.radius", m.radius, "radius")
    _positive(out, "molecule.internal_temperature", m.internal_temperature, "internal temperature")
    if not (isinstance(m.emissivity, (int, float)) and 0 < m.emissivity <= 1):
        out.append(Violation("molecule.emissivity", "emissivity must lie in (0, 1]", m.emissivity))
    if not (isinstance(m.epsilon_r, (int, float)) and m.epsilon_r > 1):
        out.append(Violation("molecule.epsilon_r", "dielectric constant must be > 1", m.epsilon_r))
    _nonnegative(out, "molecule.vib_emission_rate", m.vib_emission_rate, "vibrational emission rate")
    _nonnegative(out, "molecule.vib_k_star", m.vib_k_star, "vibrational wave number")

    e = config.environment
    _positive(out, "environment.temperature", e.temperature, "temperature")
    _nonnegative(out, "environment.pressure", e.pressure, "pressure")
    _nonnegative(out, "environment.gas_mass", e.gas_mass, "gas mass")
    _nonnegative(out, "environment.cross_section", e.cross_section, "cross section")
    if e.pressure and e.pressure > 0 and not (e.gas_mass and e.gas_mass > 0):
        out.append(Violation("environment.gas_mass", "gas mass must be positive when pressure > 0", e.gas_mass))

    c = config.collimation
    has_geo = c.aperture is not None or c.separation is not None
    if has_geo and c.sigma_kx is not None:
        out.append(Violation("collimation", "set either aperture/separation or sigma_kx, not both", dataclasses.asdict(c)))
    elif c.sigma_kx is not None:
        _positive(out, "collimation.sigma_kx", c.sigma_kx, "transverse wave-number spread")
    else:
        _positive(out, "collimation.aperture", c.aperture, "collimator aperture")
        _positive(out, "collimation.separation", c.separation, "collimator separation")

    g = config.grating
    _positive(out, "grating.period", g.period, "period")
    _positive(out, "grating.slit_width", g.slit_width, "slit width")
    if (isinstance(g.period, (int, float)) and isinstance(g.slit_width, (int, float))
            and g.period > 0 and g.slit_width > 0 and not g.slit_width < g.period):
        out.append(Violation("grating.slit_width", "slit width must be < period", g.slit_width))
    if not (isinstance(g.slit_count, int) and not isinstance(g.slit_count, bool) and g.slit_count > 0):
        out.append(Violation("grating.slit_count", "slit count must be a positive integer", g.slit_count))
    elif g.slit_count % 2:
        out.append(Violation("grating.slit_count", "slit count must be even", g.slit_count))
    if g.aperture_shape not in (RECTANGULAR, GAUSSIAN):
        out.append(Violation("grating.aperture_shape", "shape must be 'rectangular' or 'gaussian'", g.aperture_shape))
    if g.sigma_x is not None:
        _positive(out, "grating.sigma_x", g.sigma_x, "Gaussian slit width")

    geo = config.geometry
    _positive(out, "geometry.screen_distance", geo.screen_distance, "screen distance")
    _nonnegative(out, "geometry.detector_half_width", geo.detector_half_width, "detector half width")
    _nonnegative(out, "geometry.background", geo.background, "background")

    b = config.beam
    if b.mode == MONOCHROMATIC:
        _positive(out, "beam.wavelength", b.wavelength, "wavelength")
    elif b.mode == SUPERSONIC:
        _positive(out, "beam.v0", b.v0, "v0")
        _positive(out, "beam.v_hat", b.v_hat, "v_hat")
        if b.wavelength is not None:
            _positive(out, "beam.wavelength", b.wavelength, "wavelength")
    else:
        out.append(Violation("beam.mode", "mode must be 'monochromatic' or 'supersonic'", b.mode))
    if b.velocity_window is not None:
        w = b.velocity_window
        if len(w) != 2 or not (0 <= w[0] < w[1]):
            out.append(Violation("beam.velocity_window", "window must satisfy 0 <= v_min < v_max", w))
    return out


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    """Return ``config`` unchanged if valid, else raise :class:`ConfigError`."""
    violations = find_violations(config)
    if violations:
        raise ConfigError(violations)
    c = config.collimation
    if c.geometric and c.separation < 10 * c.aperture:
        warnings.warn(
            f"collimator separation {c.separation:g} m is not much larger than aperture {c.aperture:g} m",
            stacklevel=2,
        )
    return config


# --- scenario files ----------------------------------------------------------

_SECTIONS = {
    "molecule": MoleculeSpec,
    "environment": EnvironmentSpec,
    "collimation": CollimationSpec,
    "grating": GratingSpec,
    "geometry": GeometrySpec,
    "beam": BeamSpec,
}


def _strip_comments(d: Mapping[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in d.items() if not k.startswith("_")}


def config_from_dict(data: Mapping[str, Any], validate: bool = True) -> ExperimentConfig:
    data = _strip_comments(data)
    unknown = set(data) - set(_SECTIONS)
    missing = set(_SECTIONS) - set(data)
    if unknown or missing:
        parts = []
        if unknown:
            parts.append(f"unknown top-level keys {sorted(unknown)}")
        if missing:
            parts.append(f"missing sections {sorted(missing)}")
        raise ValueError("invalid scenario: " + "; ".join(parts))
    sections = {}
    for name, cls in _SECTIONS.items():
        values = _strip_comments(data[name])
        allowed = {f.name for f in dataclasses.fields(cls)}
        bad = set(values) - allowed
        if bad:
            raise ValueError(f"invalid scenario: unknown keys {sorted(bad)} in section '{name}'")
        if name == "beam" and values.get("velocity_window") is not None:
            values["velocity_window"] = tuple(values["velocity_window"])
        sections[name] = cls(**values)
    config = ExperimentConfig(**sections)
    return validate_config(config) if validate else config


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    out = {}
    for name in _SECTIONS:
        values = dataclasses.asdict(getattr(config, name))
        if name == "beam" and values["velocity_window"] is not None:
            values["velocity_window"] = list(values["velocity_window"])
        out[name] = values
    return out


def load_scenario(path: str | Path, validate: bool = True) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh), validate=validate)


def fullerene_scenario() -> ExperimentConfig:
    """The C60 experiment of the reference data set (packaged scenario)."""
    text = resources.files("mwcoherence").joinpath("data/fullerene.json").read_text(encoding="utf-8")
    return config_from_dict(json.loads(text))


# --- kinematics ----------------------------------------------------------------

@dataclass(frozen=True)
class BeamKinematics:
    velocity: float
    wavelength: float
    time_of_flight: float
    screen_distance: float

    def k_bar(self, x):
        """Transverse wave number 2 pi x / (lambda L) probed at screen position ``x``."""
        return 2 * np.pi * np.asarray(x, dtype=float) / (self.wavelength * self.screen_distance)


def wavelength_from_velocity(mass: float, velocity: float) -> float:
    return CONSTANTS.h / (mass * velocity)


def velocity_from_wavelength(mass: float, wavelength: float) -> float:
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return CONSTANTS.h / (mass * wavelength)


def reference_velocity(config: ExperimentConfig) -> float:
    b = config.beam
    if b.wavelength is not None:
        return velocity_from_wavelength(config.molecule.mass, b.wavelength)
    from .beam import VelocityDistribution

    return VelocityDistribution.from_config(config).mean()


def beam_kinematics(config: ExperimentConfig, velocity: float | None = None) -> BeamKinematics:
    """Velocity, de Broglie wavelength and grating-to-screen time of flight.

    Uses ``velocity`` when given, the configured wavelength otherwise, and the
    mean of the supersonic distribution as a last resort.
    """
    M = config.molecule.mass
    v = reference_velocity(config) if velocity is None else float(velocity)
    if not v > 0:
        raise ValueError(f"velocity must be positive, got {v}")
    lam = wavelength_from_velocity(M, v)
    L = config.geometry.screen_distance
    return BeamKinematics(velocity=v, wavelength=lam, time_of_flight=L / v, screen_distance=L)


# --- regime diagnostics -------------------------------------------------------------

@dataclass(frozen=True)
class RegimeEntry:
    name: str
    value: float
    threshold: float
    ok: bool
    meaning: str

    @property
    def flag(self) -> str:
        return "pass" if self.ok else "warn"


@dataclass(frozen=True)
class RegimeReport:
    entries: tuple[RegimeEntry, ...]
    time_of_flight: float
    arrival_spread: float
    support: float

    def __getitem__(self, name: str) -> RegimeEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def all_ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def format(self) -> str:
        rows = [f"{'ratio':<14} {'value':>12}  {'limit':>6}  flag"]
        for e in self.entries:
            rows.append(f"{e.name:<14} {e.value:12.4e}  {e.threshold:6.2g}  {e.flag:<4}  {e.meaning}")
        rows.append(f"time of flight T = {self.time_of_flight:.4e} s, arrival spread dT = {self.arrival_spread:.4e} s")
        return "\n".join(rows)


def regime_report(config: ExperimentConfig, ell: float, delta_y: float,
                  velocity: float | None = None) -> RegimeReport:
    """Dimensionless ratios behind each approximation, flagged against 0.1.

    The transverse support is taken as N*D.  ``D/ell`` is flagged against 1
    since fringes need coherence over at least one period.
    """
    if not (ell > 0 and delta_y > 0):
        raise ValueError("ell and delta_y must be positive")
    kin = beam_kinematics(config, velocity)
    M = config.molecule.mass
    hbar = CONSTANTS.hbar
    T = kin.time_of_flight
    g = config.grating
    dx = g.slit_count * g.period
    L = config.geometry.screen_distance
    thr = REGIME_THRESHOLD

    def entry(name, value, limit, meaning):
        return RegimeEntry(name, float(value), limit, bool(value <= limit), meaning)

    entries = (
        entry("lambda/dy", kin.wavelength / delta_y, thr, "sharp longitudinal momentum"),
        entry("dy/L", delta_y / L, thr, "screen far from the packet"),
        entry("Mdx*ell/hT", M * dx * ell / (hbar * T), thr, "Fraunhofer with partial coherence"),
        entry("Mdx^2/hT", M * dx**2 / (hbar * T), thr, "Fraunhofer, fully coherent"),
        entry("d/ell", g.slit_width / ell, thr, "slit unresolved by coherence"),
        entry("D/ell", g.period / ell, 1.0, "coherence spans a period"),
        entry("dT/T", delta_y / L, thr, "arrival-time spread"),
    )
    return RegimeReport(entries=entries, time_of_flight=T,
                        arrival_spread=delta_y / kin.velocity, support=dx)
