"""Command-line front end: rate tables, screen patterns, sweeps, near-field and Talbot runs.

Every command writes CSV files plus a ``<command>_manifest.json`` into
``--out``.  Nothing depends on the clock or on random numbers, so reruns
are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .appendix import GaussianTwoSlit, gaussian_two_slit_exact, quality_R
from .beam import (
    VelocityDistribution,
    count_fringes,
    default_screen_grid,
    fig4_pipeline,
)
from .decoherence import coherence_state, total_rates
from .farfield import (
    ApertureModel,
    DivergenceModel,
    Pattern,
    classical_grating_pattern,
    coherence_length_at_screen,
    pattern_N,
    pattern_general,
    pattern_oracle,
    visibility,
)
from .model import (
    GAUSSIAN,
    SUPERSONIC,
    ConfigError,
    ConvergenceError,
    ExperimentConfig,
    beam_kinematics,
    config_to_dict,
    fullerene_scenario,
    load_scenario,
    regime_report,
)
from . import nearfield as nf
from . import talbot as tb

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3

FRINGE_THRESHOLD = 0.05


# --- output helpers ----------------------------------------------------------------------

def fmt(value) -> str:
    """Scientific notation with 9 significant digits; strings pass through."""
    if isinstance(value, (str, bool)) or value is None:
        return "" if value is None else str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.8e}"


class Writer:
    """Collects output files and writes the run manifest."""

    def __init__(self, out: Path, formats: set[str], command: str, params: dict, scenario: dict):
        self.out = out
        self.formats = formats
        self.command = command
        self.params = params
        self.scenario = scenario
        self.files: list[str] = []
        out.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, header: Sequence[str], rows) -> Path:
        path = self.out / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
        self.files.append(name)
        return path

    def svg(self, name: str, curves: Sequence[tuple[str, np.ndarray, np.ndarray]],
            xlabel: str = "x [m]", ylabel: str = "normalized intensity") -> Path | None:
        if "svg" not in self.formats:
            return None
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        with matplotlib.rc_context({"svg.hashsalt": "mwcoherence", "svg.fonttype": "none"}):
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            for label, x, y in curves:
                ax.plot(x, y, lw=1.2, label=label)
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            if len(curves) > 1:
                ax.legend(fontsize=8)
            fig.tight_layout()
            path = self.out / name
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
        self.files.append(name)
        return path

    def manifest(self) -> Path:
        blob = json.dumps(self.scenario, sort_keys=True, separators=(",", ":")).encode()
        data = {
            "tool": "mwcoherence",
            "version": __version__,
            "command": self.command,
            "parameters": self.params,
            "scenario_sha256": hashlib.sha256(blob).hexdigest(),
            "outputs": self.files,
        }
        path = self.out / f"{self.command}_manifest.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _formats(text: str) -> set[str]:
    fm = {f.strip() for f in text.split(",") if f.strip()}
    if not fm <= {"csv", "svg"} or "csv" not in fm:
        raise argparse.ArgumentTypeError("format must be 'csv' or 'csv,svg'")
    return fm


def _fringe_period(config: ExperimentConfig) -> float:
    kin = beam_kinematics(config)
    return kin.wavelength * kin.screen_distance / config.grating.period


# --- sweeps -------------------------------------------------------------------------------------

MASS = "mass_multiple"
PRESSURE = "pressure_multiple"
DISTANCE = "distance_multiple"
VELOCITY_SELECTION = "velocity_selection"
SWEEP_PARAMETERS = (MASS, PRESSURE, DISTANCE, VELOCITY_SELECTION)
FIXED_TEMPERATURE = "fixed-temperature"
FIXED_VELOCITY = "fixed-velocity"


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    base: ExperimentConfig
    mass_convention: str = FIXED_TEMPERATURE

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.values or any(not v > 0 for v in self.values):
            raise ValueError("sweep values must be a non-empty list of positive numbers")
        if self.mass_convention not in (FIXED_TEMPERATURE, FIXED_VELOCITY):
            raise ValueError(f"unknown mass convention {self.mass_convention!r}")


@dataclass
class SweepPoint:
    value: float
    pattern: Pattern | None = None
    visibility: float = math.nan
    detected_visibility: float = math.nan
    fringes: int = 0
    error: str | None = None


@dataclass
class SweepResult:
    spec: SweepSpec
    base: SweepPoint
    points: list[SweepPoint] = field(default_factory=list)
    scale: float = 1.0


def sweep_config(spec: SweepSpec, value: float) -> tuple[ExperimentConfig, VelocityDistribution | None]:
    """Configuration and velocity distribution for one sweep point."""
    c = spec.base
    b = c.beam
    dist = VelocityDistribution.from_config(c) if b.mode == SUPERSONIC else None
    if spec.parameter == PRESSURE:
        return c.replace(environment__pressure=c.environment.pressure * value), dist
    if spec.parameter == DISTANCE:
        return c.replace(geometry__screen_distance=c.geometry.screen_distance * value), dist
    if spec.parameter == VELOCITY_SELECTION:
        if dist is None:
            raise ValueError("velocity selection needs a supersonic beam")
        return c, dist.selected(value)
    # mass: same molecule properties, heavier; the beam either keeps its speeds or
    # comes from a source at the same temperature (speeds scale as 1/sqrt(m))
    s = 1.0 if spec.mass_convention == FIXED_VELOCITY else value**-0.5
    upd = {"molecule__mass": c.molecule.mass * value}
    if b.wavelength is not None:
        upd["beam__wavelength"] = b.wavelength / (value * s)
    if b.v0 is not None:
        upd["beam__v0"] = b.v0 * s
    if b.v_hat is not None:
        upd["beam__v_hat"] = b.v_hat * s
    cfg = c.replace(**upd)
    return cfg, (VelocityDistribution.from_config(cfg) if dist is not None else None)


def _evaluate_point(config: ExperimentConfig, dist, value: float) -> SweepPoint:
    x = default_screen_grid(config)
    intrinsic = fig4_pipeline(config, dist, x_tilde=0.0, x=x, normalize=False)
    detected = fig4_pipeline(config, dist, x=x, normalize=False)
    period = _fringe_period(config)
    return SweepPoint(value=value, pattern=detected, visibility=visibility(intrinsic, period),
                      detected_visibility=visibility(detected, period), fringes=count_fringes(detected, FRINGE_THRESHOLD))


def _safe_point(spec: SweepSpec, value: float) -> SweepPoint:
    try:
        cfg, dist = sweep_config(spec, value)
        return _evaluate_point(cfg, dist, value)
    except (ValueError, ConvergenceError) as exc:
        return SweepPoint(value=value, error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate every point, normalising all curves to the base case's maximum.

    Visibility is measured before detector smoothing: a fixed detector
    width resolves the wider fringes at larger distance better, which would
    mask the trend of the interference itself.
    """
    base_cfg = spec.base
    base_dist = VelocityDistribution.from_config(base_cfg) if base_cfg.beam.mode == SUPERSONIC else None
    base = _evaluate_point(base_cfg, base_dist, 1.0 if spec.parameter != VELOCITY_SELECTION else 0.0)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        points = list(pool.map(lambda v: _safe_point(spec, v), spec.values))
    scale = float(np.max(base.pattern.intensity))
    return SweepResult(spec, base, points, scale)


# --- commands -----------------------------------------------------------------------------------

def cmd_rates(args, config, out: Writer):
    rates = total_rates(config)
    rows = rates.table()
    extra = [
        ("thermal_wavelength_environment", rates.photon_wavelength, "m"),
        ("thermal_wavelength_internal", rates.emission_wavelength, "m"),
        ("air_de_broglie_wavelength", rates.air_wavelength, "m"),
    ]
    print(f"{'channel':<32} {'value':>14}  unit")
    for name, value, unit in rows + extra:
        print(f"{name:<32} {value:14.4e}  {unit}")
    out.csv("rates.csv", ["channel", "value", "unit"], rows + extra)
    return EXIT_OK


def cmd_coherence(args, config, out: Writer):
    rates = total_rates(config)
    kin = beam_kinematics(config)
    state = coherence_state(config, kin.velocity, rates)
    ell_T = state.ell_of(kin.time_of_flight)
    tau = state.tau_c
    rows = [
        ("velocity", kin.velocity, "m/s"),
        ("wavelength", kin.wavelength, "m"),
        ("time_of_flight", kin.time_of_flight, "s"),
        ("lambda_total", state.rate, "m^-2 s^-1"),
        ("ell0", state.ell0, "m"),
        ("ell_T", ell_T, "m"),
        ("tau_c", "unbounded" if tau is None else tau, "s"),
    ]
    for name, value, unit in rows:
        shown = value if isinstance(value, str) else f"{value:.4e}"
        print(f"{name:<16} {shown:>14}  {unit}")
    report = regime_report(config, ell_T, args.delta_y)
    print(report.format())
    out.csv("coherence.csv", ["quantity", "value", "unit"], rows)
    out.csv("regime.csv", ["ratio", "value", "limit", "flag"],
            [(e.name, e.value, e.threshold, e.flag) for e in report.entries])
    return EXIT_OK


def _pattern_grid(config, args):
    half = args.orders * _fringe_period(config)
    lo = -half if args.xmin is None else args.xmin
    hi = half if args.xmax is None else args.xmax
    if not hi > lo:
        raise ValueError("--xmax must exceed --xmin")
    return np.linspace(lo, hi, args.points)


def cmd_pattern(args, config, out: Writer):
    x = _pattern_grid(config, args)
    model = "oracle" if args.oracle else args.model
    v = beam_kinematics(config, args.velocity).velocity
    rates = total_rates(config)
    ell = args.ell if args.ell is not None else coherence_length_at_screen(config, v, rates.lambda_total(1))
    if model == "sum":
        y = pattern_N(x, config, ell, v)
    elif model == "oracle":
        y = pattern_oracle(x, config, ell, v).intensity
    elif model == "classical":
        y = classical_grating_pattern(x, config, v)
    else:
        div = DivergenceModel.from_config(config, v)
        y = pattern_general(x, config, div, rates, v, per_pair_air=args.per_pair_air)
    p = Pattern(x, y)
    if args.normalize == "peak":
        p = p.normalized()
    print(f"model={model} velocity={v:.6g} m/s ell={ell:.6g} m points={x.size}")
    out.csv("pattern.csv", ["x_m", "intensity"], zip(p.x, p.intensity))
    out.svg("pattern.svg", [(model, p.x, p.intensity)],
            ylabel="normalized intensity" if args.normalize == "peak" else "intensity [1/m]")
    return EXIT_OK


def _read_data(path):
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if arr.shape[1] < 2:
        raise ValueError(f"{path}: expected columns x_m,counts")
    order = np.argsort(arr[:, 0])
    return arr[order, 0], arr[order, 1]


def cmd_fig4(args, config, out: Writer):
    b = config.beam
    v0 = args.v0 if args.v0 is not None else b.v0
    vh = args.vhat if args.vhat is not None else b.v_hat
    if v0 is None or vh is None:
        raise ValueError("fig4 needs v0 and v_hat (scenario beam section or --v0/--vhat)")
    dist = VelocityDistribution(v0, vh, b.velocity_window)
    x = default_screen_grid(config)
    p = fig4_pipeline(config, dist, args.xtilde, args.background, x=x)
    header, rows = ["x_m", "model"], list(zip(p.x, p.intensity))
    if args.data:
        xd, counts = _read_data(args.data)
        model = np.interp(xd, p.x, p.intensity)
        data = counts / counts.max()
        header += ["data", "residual"]
        rows = list(zip(xd, model, data, data - model))
    kin = beam_kinematics(config)
    print(f"mean velocity {dist.mean():.6g} m/s, fringe period {_fringe_period(config):.4e} m, "
          f"fringes above {FRINGE_THRESHOLD:g}: {count_fringes(p, FRINGE_THRESHOLD)}, L = {kin.screen_distance:g} m")
    out.csv("fig4.csv", header, rows)
    out.svg("fig4.svg", [("model", p.x, p.intensity)])
    return EXIT_OK


def cmd_sweep(args, config, out: Writer):
    spec = SweepSpec(args.parameter, tuple(args.values), config, args.mass_convention)
    res = run_sweep(spec, args.threads)
    curves = []
    table = []
    status = EXIT_OK
    for pt in [res.base] + res.points:
        label = "base" if pt is res.base else f"{pt.value:g}"
        if pt.error:
            print(f"{args.parameter}={label}: FAILED {pt.error}", file=sys.stderr)
            table.append((label, math.nan, math.nan, 0, pt.error))
            status = EXIT_CONVERGENCE if pt.error.startswith("ConvergenceError") else EXIT_VALIDATION
            continue
        y = pt.pattern.intensity / res.scale
        out.csv(f"sweep_{args.parameter}_{label}.csv", ["x_m", "intensity"], zip(pt.pattern.x, y))
        curves.append((f"{args.parameter}={label}", pt.pattern.x, y))
        table.append((label, pt.visibility, pt.detected_visibility, pt.fringes, "ok"))
        print(f"{args.parameter}={label:>16}  V={pt.visibility:.4f}  V_detected={pt.detected_visibility:.4f}  "
              f"fringes>{FRINGE_THRESHOLD:g}: {pt.fringes}")
    out.csv(f"sweep_{args.parameter}_visibility.csv",
            ["value", "visibility", "detected_visibility", "fringes_above_5pct", "status"], table)
    out.svg(f"sweep_{args.parameter}.svg", curves)
    return status


def _nearfield_state(args, config):
    if args.particle == "neutron":
        return nf.neutron_state()
    kin = beam_kinematics(config)
    g = config.grating
    return nf.GaussianBeamState.double_slit(g.period, g.slit_width, args.sigma_y, kin.velocity,
                                            config.molecule.mass)


def cmd_nearfield(args, config, out: Writer):
    state = _nearfield_state(args, config)
    distances = args.distances or list(nf.NEUTRON_DISTANCES)
    rows, table, curves = [], [], []
    for L in distances:
        x = nf.screen_grid(state, L) if args.grid is None else np.linspace(-args.grid_half, args.grid_half, args.grid)
        res = nf.arrival_intensity(x, L, state)
        p = res.pattern
        V = visibility(p, nf.fringe_period(state, L))
        rows.extend((L, xi, yi) for xi, yi in zip(p.x, p.intensity))
        table.append((L, V, p.integral(), res.negative_fraction))
        curves.append((f"L={L:g} m", p.x, p.intensity / p.intensity.max()))
        print(f"L={L:.4g} m  visibility={V:.4f}  total={p.integral():.6f}  negative_fraction={res.negative_fraction:.2e}")
    out.csv("nearfield.csv", ["L_m", "x_m", "intensity"], rows)
    out.csv("nearfield_summary.csv", ["L_m", "visibility", "total", "negative_fraction"], table)
    out.svg("nearfield.svg", curves)
    return EXIT_OK


def cmd_timescales(args, config, out: Writer):
    state = _nearfield_state(args, config)
    distances = args.distances or list(nf.NEUTRON_DISTANCES)
    rows = []
    print(f"{'L [m]':>10} {'tau [s]':>12} {'T [s]':>12} {'dT [s]':>12} {'tau/T':>9} {'dT/T':>9}  flags")
    for L in distances:
        ts = nf.time_scales(state, L)
        far = "far-field" if ts.fraunhofer < 0.1 else "near-field"
        sharp = "sharp-arrival" if ts.arrival_spread < 0.1 else "arrival-spread"
        print(f"{L:10.4g} {ts.tau:12.4e} {ts.T:12.4e} {ts.delta_T:12.4e} {ts.fraunhofer:9.3g} "
              f"{ts.arrival_spread:9.3g}  {far},{sharp}")
        rows.append((L, ts.tau, ts.T, ts.delta_T, ts.fraunhofer, ts.arrival_spread, far, sharp))
    out.csv("timescales.csv", ["L_m", "tau_s", "T_s", "delta_T_s", "tau_over_T", "delta_T_over_T",
                               "regime", "arrival"], rows)
    return EXIT_OK


def cmd_talbot(args, config, out: Writer):
    setup = tb.TalbotSetup.from_config(config, ell_T=args.ell, J=args.J)
    ap = ApertureModel.from_grating(config.grating)
    D = setup.period
    shifts = np.linspace(0.0, D, args.shift_scan, endpoint=False)
    s_env = tb.two_grating_signal(shifts, ap, D, setup.ell_T, setup.J)
    s_free = tb.two_grating_signal(shifts, ap, D, math.inf, setup.J)
    x = np.linspace(-D / 2, D / 2, 401)
    free = tb.talbot_intensity_free(x, ap, D, setup.J)
    env = tb.talbot_intensity_env(x, ap, D, setup.ell_T, setup.J)
    print(f"L_T={setup.length:.4e} m  t_T={setup.time:.4e} s  ell_T={setup.ell_T:.4e} m  "
          f"blur={setup.blur:.4e} m  S-visibility={tb.signal_visibility(ap, D, setup.ell_T, setup.J):.4f}")
    out.csv("talbot.csv", ["shift_m", "signal"], zip(shifts, s_env))
    out.csv("talbot_free.csv", ["shift_m", "signal"], zip(shifts, s_free))
    out.csv("talbot_image.csv", ["x_m", "free", "env"], zip(x, free.intensity, env.intensity))
    out.svg("talbot.svg", [("free", shifts, s_free / s_free.max()), ("environment", shifts, s_env / s_free.max())],
            xlabel="shift [m]", ylabel="signal / free maximum")
    return EXIT_OK


def appendix_checks(config: ExperimentConfig) -> list[tuple[str, float, float, bool]]:
    """(name, measured, tolerance, passed) for the closed-form validators."""
    checks = []
    d, ell = 3.6e-8, 1e-7
    r0 = quality_R(ell, 0.0, d)
    checks.append(("R limit vs 0.011", abs(r0 / 0.011 - 1), 0.05, abs(r0 / 0.011 - 1) <= 0.05))
    k = np.linspace(0, 1 / d, 100)
    R = quality_R(ell, k, d)
    worst = float(np.max(-np.diff(R))) if R.size > 1 else 0.0
    checks.append(("R nondecreasing in k", worst, 0.0, worst <= 0.0))
    small = [abs(quality_R(d / r, 0.0, d) / (r**2 / 12) - 1) for r in np.linspace(0.05, 0.4, 8)]
    checks.append(("R limit vs (d/ell)^2/12", max(small), 0.05, max(small) <= 0.05))

    sig = config.grating.slit_width / 6
    cfg2 = config.replace(grating__slit_count=2, grating__aperture_shape=GAUSSIAN, grating__sigma_x=sig)
    kin = beam_kinematics(cfg2)
    ell_far = 1e3 * config.grating.period
    params = GaussianTwoSlit(sig, cfg2.grating.period, ell_far, kin.time_of_flight, cfg2.molecule.mass)
    period = _fringe_period(cfg2)
    x = np.linspace(-2.5 * period, 2.5 * period, 501)
    exact = gaussian_two_slit_exact(x, params)
    approx = pattern_N(x, cfg2, ell_far)
    dev = float(np.max(np.abs(exact - approx)) / np.max(exact))
    checks.append(("Gaussian two-slit vs pattern_N", dev, 0.01, dev <= 0.01))
    ell_T = coherence_length_at_screen(cfg2)
    params = GaussianTwoSlit(sig, cfg2.grating.period, ell_T, kin.time_of_flight, cfg2.molecule.mass)
    exact = gaussian_two_slit_exact(x, params)
    oracle = pattern_oracle(x, cfg2, ell_T).intensity
    dev = float(np.max(np.abs(exact - oracle)) / np.max(exact))
    checks.append(("Gaussian two-slit vs oracle", dev, 1e-4, dev <= 1e-4))
    return checks


def cmd_check_appendix(args, config, out: Writer):
    checks = appendix_checks(config)
    print(f"{'check':<34} {'measured':>12} {'tolerance':>10}  result")
    for name, value, tol, ok in checks:
        print(f"{name:<34} {value:12.4e} {tol:10.2g}  {'pass' if ok else 'FAIL'}")
    out.csv("appendix_checks.csv", ["check", "measured", "tolerance", "passed"],
            [(n, v, t, "true" if ok else "false") for n, v, t, ok in checks])
    return EXIT_OK if all(c[3] for c in checks) else EXIT_CHECK_FAILED


COMMANDS = {
    "rates": cmd_rates,
    "coherence": cmd_coherence,
    "pattern": cmd_pattern,
    "fig4": cmd_fig4,
    "sweep": cmd_sweep,
    "nearfield": cmd_nearfield,
    "timescales": cmd_timescales,
    "talbot": cmd_talbot,
    "check-appendix": cmd_check_appendix,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, help="scenario JSON (default: packaged C60 scenario)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--format", type=_formats, default={"csv"}, help="csv or csv,svg")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")

    parser = argparse.ArgumentParser(prog="mwcoherence", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("rates", parents=[common], help="decoherence rate table")
    p = sub.add_parser("coherence", parents=[common], help="coherence length, tau_c and regime flags")
    p.add_argument("--delta-y", type=float, default=1e-3, help="longitudinal packet size [m]")

    p = sub.add_parser("pattern", parents=[common], help="monochromatic far-field pattern")
    p.add_argument("--model", choices=["sum", "general", "oracle", "classical"], default="sum")
    p.add_argument("--ell", type=float, help="coherence length at the screen [m]")
    p.add_argument("--velocity", type=float, help="beam velocity [m/s]")
    p.add_argument("--oracle", action="store_true", help="same as --model oracle")
    p.add_argument("--orders", type=float, default=5.0, help="half width in fringe periods")
    p.add_argument("--xmin", type=float, help="grid start [m] (default: -orders periods)")
    p.add_argument("--xmax", type=float, help="grid end [m]")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--per-pair-air", action="store_true", help="air rate per slit separation (general model)")
    p.add_argument("--normalize", choices=["density", "peak"], default="density")

    p = sub.add_parser("fig4", parents=[common], help="velocity-averaged, detector-smoothed pattern")
    p.add_argument("--v0", type=float)
    p.add_argument("--vhat", type=float)
    p.add_argument("--xtilde", type=float, help="detector half width [m]")
    p.add_argument("--background", type=float, help="constant background, fraction of the maximum")
    p.add_argument("--data", type=Path, help="CSV with columns x_m,counts to overlay")

    p = sub.add_parser("sweep", parents=[common], help="pressure, distance, mass or velocity-selection sweep")
    p.add_argument("--parameter", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--values", required=True, type=_floats, help="comma-separated multipliers or window fractions")
    p.add_argument("--mass-convention", choices=[FIXED_TEMPERATURE, FIXED_VELOCITY], default=FIXED_TEMPERATURE)

    for name, text in (("nearfield", "arrival intensity from the quantum current"),
                       ("timescales", "tau, T, delta_T and regime flags")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--distances", type=_floats, help="screen distances [m]")
        p.add_argument("--particle", choices=["neutron", "scenario"], default="neutron")
        p.add_argument("--sigma-y", type=float, default=1e-3, help="longitudinal width for --particle scenario [m]")
        if name == "nearfield":
            p.add_argument("--grid", type=int, help="number of screen points (default: adaptive)")
            p.add_argument("--grid-half", type=float, default=5e-4, help="grid half width with --grid [m]")

    p = sub.add_parser("talbot", parents=[common], help="Talbot image and two-grating signal")
    p.add_argument("--ell", type=float, help="coherence length at the Talbot time [m]")
    p.add_argument("--shift-scan", type=int, default=64, help="number of shifts over one period")
    p.add_argument("--J", type=int, default=tb.DEFAULT_J, help="replica truncation")

    sub.add_parser("check-appendix", parents=[common], help="closed-form validators")
    return parser


def _jsonable(v):
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, set):
        return sorted(v)
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, list):
        return [_jsonable(i) for i in v]
    return v


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_scenario(args.scenario) if args.scenario else fullerene_scenario()
        params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("out",)}
        writer = Writer(args.out, args.format, args.command, params, config_to_dict(config))
        code = COMMANDS[args.command](args, config, writer)
        writer.manifest()
        return code
    except ConfigError as exc:
        print(f"invalid scenario:\n{exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
