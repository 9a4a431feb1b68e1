"""
affective_polarization - stance dynamics driven by in-group love and
out-group hate.

Simulates the stochastic switching model on party-labelled graphs,
integrates its two-party and N-party mean-field limits, estimates
(alpha, beta, delta) from observed transitions by logistic regression and
runs the regime suites that reproduce the model's qualitative outcomes.
"""

__version__ = "0.1.0"

from .core import (
    BLUE, RED, InfluenceMeasureKind, InfluenceVector, ModelParams, PartyGraph,
    influence, influence_def1, influence_def2, influence_messages,
    switch_logit, transition_probability,
)

from .errors import (
    PolarizationError, ConfigError, ParameterError, UnknownSuiteError,
    GraphFormatError, MissingNodeError, EstimationError,
    InsufficientObservationsError, SingularDesignError, SeparationError,
    NotConvergedError,
)

# Stochastic dynamics
from .network_sim import (
    InitialStanceSpec, NetworkSimulator, SimConfig, SyntheticPanel, Trajectory,
    complete_party_graph, two_block_graph, ensemble_mean, ensemble_run,
    init_stances, run, simulate_panel, step,
)

# Mean-field limits
from .meanfield import (
    EmotionMatrix, MeanFieldState, MultiPartyState, TwoPartyConfig,
    integrate_multi_party, integrate_two_party, multi_party_derivative,
    two_party_derivative,
)

# Estimation
from .estimation import (
    EstimationResult, FitOptions, RecoveryReport, StancePanel,
    TransitionObservation, TransitionRecord,
    build_observations_case1, build_observations_case2, fit_logistic,
    recovery_report,
)

from .experiments import (
    RegimeRecord, RegimeReport, SUITES,
    classify_multi_party, classify_two_party, outgroup_sweep,
    parameter_sweep, run_figure_suite, run_roundtrip,
)

from .formats import load_graph, load_observations, load_panel, save_graph, save_panel
from .config import RunConfig, build_config, load_config
from .themes import ReportTheme, PlainTheme, get_default_theme, create_custom_theme

__all__ = [
    "BLUE",
    "RED",
    "InfluenceMeasureKind",
    "InfluenceVector",
    "ModelParams",
    "PartyGraph",
    "influence",
    "influence_def1",
    "influence_def2",
    "influence_messages",
    "switch_logit",
    "transition_probability",
    "PolarizationError",
    "ConfigError",
    "ParameterError",
    "UnknownSuiteError",
    "GraphFormatError",
    "MissingNodeError",
    "EstimationError",
    "InsufficientObservationsError",
    "SingularDesignError",
    "SeparationError",
    "NotConvergedError",
    "InitialStanceSpec",
    "NetworkSimulator",
    "SimConfig",
    "SyntheticPanel",
    "Trajectory",
    "complete_party_graph",
    "two_block_graph",
    "ensemble_mean",
    "ensemble_run",
    "init_stances",
    "run",
    "simulate_panel",
    "step",
    "EmotionMatrix",
    "MeanFieldState",
    "MultiPartyState",
    "TwoPartyConfig",
    "integrate_multi_party",
    "integrate_two_party",
    "multi_party_derivative",
    "two_party_derivative",
    "EstimationResult",
    "FitOptions",
    "RecoveryReport",
    "StancePanel",
    "TransitionObservation",
    "TransitionRecord",
    "build_observations_case1",
    "build_observations_case2",
    "fit_logistic",
    "recovery_report",
    "RegimeRecord",
    "RegimeReport",
    "SUITES",
    "classify_multi_party",
    "classify_two_party",
    "outgroup_sweep",
    "parameter_sweep",
    "run_figure_suite",
    "run_roundtrip",
    "load_graph",
    "load_observations",
    "load_panel",
    "save_graph",
    "save_panel",
    "RunConfig",
    "build_config",
    "load_config",
    "ReportTheme",
    "PlainTheme",
    "get_default_theme",
    "create_custom_theme",
    "__version__",
]
