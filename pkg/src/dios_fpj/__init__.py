"""Monte Carlo and closed-form analysis of DIOS fully-passive jamming on MU-MISO downlinks."""

from .analysis import (
    BoundInputs,
    empirical_moments,
    prop1_variance,
    prop2_variances,
    theorem1_bounds,
    theorem2_bounds,
    wishart_trace_expectation,
)
from .config import SimConfig, default_config, parse_config
from .dios import DiosKind, DiosModel, make_model, mu, sample_coefficients
from .engine import RateReport, Scheme, Variant, estimate_rates
from .precoder import trace_inverse_gram, zf_precoder
from .scene import PathLossLaw, Scene, build_scene, distance, path_gain_linear
from .sweep import Axis, emit_csv, run_sweep

__version__ = "0.1.0"
