"""Roughness and activity estimation from discretely observed paths.

The roughness signature compares realized power variations at two sampling
frequencies over a range of powers; its shape separates rough continuous
processes (flat at H), pure-jump processes (flat at 1/beta, then 1/p) and
their mixtures. The package also simulates those model classes and runs
seeded Monte Carlo experiments over them.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .montecarlo import CurveSummary, ExperimentConfig, GridSpec, run_experiment, summarize
from .seeding import derive_seed
from .signature import (
    DEFAULT_P_GRID,
    DEFAULT_QUANTILES,
    PointEstimate,
    SignatureCurve,
    TheoreticalLimit,
    activity_signature_tt,
    curve_provider,
    median_provider,
    path_provider,
    point_estimate,
    point_estimate_H,
    quantile_signature,
    roughness_signature,
    roughness_signature_curve,
    theoretical_limit,
)
from .variation import IncrementScheme, Path, increments, power_variation, power_variation_curve
