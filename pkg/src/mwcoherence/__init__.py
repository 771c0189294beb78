"""Matter-wave interference with environmental decoherence."""

__version__ = "0.1.0"

from .constants import CONSTANTS, NEUTRON_MASS, PhysicalConstants
from .model import (
    BeamSpec,
    CollimationSpec,
    ConfigError,
    ConvergenceError,
    EnvironmentSpec,
    ExperimentConfig,
    GeometrySpec,
    GratingSpec,
    MoleculeSpec,
    beam_kinematics,
    config_from_dict,
    config_to_dict,
    fullerene_scenario,
    load_scenario,
    regime_report,
    validate_config,
)
from .decoherence import (
    CoherenceState,
    DecoherenceRates,
    coherence_length_at,
    coherence_state,
    coherence_time,
    initial_coherence_length,
    thermal_wavelength,
    total_rates,
)
from .farfield import (
    ApertureModel,
    DivergenceModel,
    Pattern,
    classical_grating_pattern,
    damping_term,
    pattern_N,
    pattern_general,
    pattern_oracle,
    visibility,
)
from .beam import VelocityDistribution, detector_smooth, fig4_pipeline, polychromatic_pattern, supersonic_pdf
from .nearfield import GaussianBeamState, TimeScales, arrival_intensity, evolve_gaussian_1d
from .talbot import TalbotSetup, talbot_intensity_env, talbot_intensity_free, talbot_length, two_grating_signal
from .appendix import GaussianTwoSlit, gaussian_two_slit_exact, quality_R
