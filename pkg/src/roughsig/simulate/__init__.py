from .bss import (
    HybridConfig,
    correlation_gamma_bss,
    default_truncation,
    hybrid_covariance,
    kernel_norm_sq,
    optimal_points,
    simulate_gamma_bss,
    variogram_gamma_bss,
)
from .fbm import simulate_fbm
from .jumps import SeriesConfig, small_jump_moments, poisson_jumps, simulate_poisson, simulate_tempered_stable, tempered_stable_jumps
from .models import default_mixture_jumps, default_overlay, path_scale, simulate_model
from .params import (
    ConstantJumps,
    ExpTransform,
    FbmParams,
    GammaBssParams,
    Mixture,
    ModelSpec,
    NormalJumps,
    PoissonParams,
    TemperedStableParams,
    describe,
    spec_from_dict,
)

__all__ = [
    "ConstantJumps",
    "ExpTransform",
    "FbmParams",
    "GammaBssParams",
    "HybridConfig",
    "Mixture",
    "ModelSpec",
    "NormalJumps",
    "PoissonParams",
    "SeriesConfig",
    "TemperedStableParams",
    "correlation_gamma_bss",
    "default_mixture_jumps",
    "default_overlay",
    "default_truncation",
    "describe",
    "hybrid_covariance",
    "kernel_norm_sq",
    "optimal_points",
    "path_scale",
    "poisson_jumps",
    "simulate_fbm",
    "simulate_gamma_bss",
    "simulate_model",
    "simulate_poisson",
    "simulate_tempered_stable",
    "small_jump_moments",
    "spec_from_dict",
    "tempered_stable_jumps",
    "variogram_gamma_bss",
]
