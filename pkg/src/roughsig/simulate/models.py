"""Dispatch from a model specification to its generator."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter
from ..seeding import derive_seed
from ..signature import TheoreticalLimit
from ..variation import Path
from .bss import HybridConfig, simulate_gamma_bss
from .fbm import simulate_fbm
from .jumps import SeriesConfig, simulate_poisson, simulate_tempered_stable
from .params import (
    ExpTransform,
    FbmParams,
    GammaBssParams,
    Mixture,
    ModelSpec,
    NormalJumps,
    PoissonParams,
    TemperedStableParams,
)

CONTINUOUS_KEY, JUMP_KEY = 0, 1
DEFAULT_JUMP_RATE = 5.0


def path_scale(spec: ModelSpec) -> float:
    """Rough size of a continuous model's excursions over one unit period.

    Three stationary standard deviations for gamma-BSS, three times the
    standard deviation at t=1 for fBm.
    """
    if isinstance(spec, GammaBssParams):
        return 3.0 * spec.stationary_sd
    if isinstance(spec, FbmParams):
        return 3.0 * spec.scale
    raise InvalidParameter(f"no path scale for {type(spec).__name__}")


def default_mixture_jumps(continuous: ModelSpec, rate: float = DEFAULT_JUMP_RATE) -> PoissonParams:
    """Rare Poisson jumps with N(0, (0.5 * path_scale)^2) sizes."""
    return PoissonParams(rate, NormalJumps(0.0, 0.5 * path_scale(continuous)))


def simulate_model(
    spec: ModelSpec,
    n: int,
    delta: float,
    seed: int,
    *,
    hybrid: HybridConfig | None = None,
    series: SeriesConfig | None = None,
) -> Path:
    """Simulate any model specification.

    Mixture components use the derived seeds ``derive_seed(seed, 0)``
    (continuous) and ``derive_seed(seed, 1)`` (jumps), so each can be
    reproduced alone. ``ExpTransform`` reuses its seed for the inner model.
    """
    if isinstance(spec, GammaBssParams):
        return simulate_gamma_bss(spec, n, delta, seed, hybrid)
    if isinstance(spec, FbmParams):
        return simulate_fbm(spec, n, delta, seed)
    if isinstance(spec, TemperedStableParams):
        return simulate_tempered_stable(spec, n, delta, seed, series)
    if isinstance(spec, PoissonParams):
        return simulate_poisson(spec, n, delta, seed)
    if isinstance(spec, Mixture):
        x = simulate_model(spec.continuous, n, delta, derive_seed(seed, CONTINUOUS_KEY), hybrid=hybrid, series=series)
        y = simulate_model(spec.jump, n, delta, derive_seed(seed, JUMP_KEY), hybrid=hybrid, series=series)
        return x.with_values(x.values + y.values)
    if isinstance(spec, ExpTransform):
        inner = simulate_model(spec.inner, n, delta, seed, hybrid=hybrid, series=series)
        return inner.with_values(np.exp(inner.values))
    raise InvalidParameter(f"not a model spec: {spec!r}")


def _roughness(spec) -> float | None:
    if isinstance(spec, GammaBssParams):
        return spec.hurst
    if isinstance(spec, FbmParams):
        return spec.hurst
    if isinstance(spec, ExpTransform):
        return _roughness(spec.inner)
    return None


def default_overlay(spec: ModelSpec) -> TheoreticalLimit | None:
    """Infill limit implied by the model, or None when none applies.

    Compound Poisson alone has no overlay (its signature tends to ``1/p``
    for every p); a mixture whose continuous part has H > 1/2 has none either.
    """
    if isinstance(spec, TemperedStableParams):
        return TheoreticalLimit("pure_jump", spec.beta)
    if isinstance(spec, Mixture):
        h = _roughness(spec.continuous)
        if h is None or h > 0.5:
            return None
        return TheoreticalLimit("continuous_plus_jumps", h)
    h = _roughness(spec)
    return None if h is None else TheoreticalLimit("continuous", h)
