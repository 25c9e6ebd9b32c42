"""Seeded Monte Carlo experiments over signature curves.

Replication ``r`` simulates with ``derive_seed(master_seed, r)``, so each
replication can be rerun on its own and the output does not depend on how
replications are scheduled across workers. Aggregation is a fold in
replication order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AllReplicationsDegenerate,
    DegeneratePath,
    ExcessiveDegeneracy,
    InvalidParameter,
    ReplicationError,
    RoughSigError,
)
from .seeding import check_seed, derive_seed
from .signature import (
    DEFAULT_QUANTILES,
    SignatureCurve,
    TheoreticalLimit,
    _check_nu,
    _check_quantiles,
    quantile_label,
    quantile_values,
    roughness_signature_curve,
)
from .simulate import HybridConfig, SeriesConfig, describe, simulate_model, spec_from_dict
from .simulate.params import MODEL_TYPES, ModelSpec

WORKERS_ENV = "ROUGHSIG_WORKERS"
MAX_DEGENERATE_FRACTION = 0.01


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise InvalidParameter(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if workers < 1:
        raise InvalidParameter(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return workers


@dataclass(frozen=True)
class GridSpec:
    """``count`` equispaced powers on ``[p_min, p_max]``."""

    p_min: float = 0.1
    p_max: float = 10.0
    count: int = 100

    def __post_init__(self):
        lo, hi = float(self.p_min), float(self.p_max)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo):
            raise InvalidParameter(f"p grid bounds must be positive and finite, got ({lo!r}, {hi!r})")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 1:
            raise InvalidParameter(f"p grid count must be a positive integer, got {self.count!r}")
        if self.count > 1 and not hi > lo:
            raise InvalidParameter(f"p_max must exceed p_min, got ({lo!r}, {hi!r})")
        object.__setattr__(self, "p_min", lo)
        object.__setattr__(self, "p_max", hi)
        object.__setattr__(self, "count", int(self.count))

    @property
    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.p_min])
        return np.linspace(self.p_min, self.p_max, self.count)


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    n_per_period: int = 2000
    replications: int = 500
    delta: float | None = None
    p_grid: GridSpec = field(default_factory=GridSpec)
    nu: int = 2
    quantiles: tuple[float, ...] = DEFAULT_QUANTILES
    master_seed: int = 0
    overlay: TheoreticalLimit | None = None
    hybrid: HybridConfig | None = None
    series: SeriesConfig | None = None

    def __post_init__(self):
        if not isinstance(self.model, MODEL_TYPES):
            raise InvalidParameter(f"model must be a model spec, got {self.model!r}")
        n = self.n_per_period
        if isinstance(n, bool) or int(n) != n or n < 3:
            raise InvalidParameter(f"n_per_period must be an integer >= 3, got {n!r}")
        r = self.replications
        if isinstance(r, bool) or int(r) != r or r < 1:
            raise InvalidParameter(f"replications must be a positive integer, got {r!r}")
        if self.delta is not None and not (math.isfinite(self.delta) and self.delta > 0):
            raise InvalidParameter(f"delta must be positive, got {self.delta!r}")
        if not isinstance(self.p_grid, GridSpec):
            object.__setattr__(self, "p_grid", GridSpec(*self.p_grid))
        object.__setattr__(self, "nu", _check_nu(self.nu))
        object.__setattr__(self, "quantiles", tuple(_check_quantiles(self.quantiles).tolist()))
        object.__setattr__(self, "master_seed", check_seed(self.master_seed))
        object.__setattr__(self, "n_per_period", int(n))
        object.__setattr__(self, "replications", int(r))

    @property
    def step(self) -> float:
        """Sampling step; one period of unit length unless ``delta`` is given."""
        return 1.0 / self.n_per_period if self.delta is None else float(self.delta)

    def replication_seed(self, r: int) -> int:
        return derive_seed(self.master_seed, r)

    def to_dict(self) -> dict:
        out = {
            "model": self.model.to_dict(),
            "n_per_period": self.n_per_period,
            "replications": self.replications,
            "delta": self.delta,
            "p_grid": [self.p_grid.p_min, self.p_grid.p_max, self.p_grid.count],
            "nu": self.nu,
            "quantiles": list(self.quantiles),
            "master_seed": self.master_seed,
            "overlay": None if self.overlay is None else [self.overlay.kind, self.overlay.parameter],
        }
        if self.hybrid is not None:
            out["hybrid"] = {"kappa": self.hybrid.kappa, "n_trunc": self.hybrid.n_trunc}
        if self.series is not None:
            out["series"] = {"gamma_max": self.series.gamma_max, "small_jumps": self.series.small_jumps}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        overlay = data.pop("overlay", None)
        hybrid = data.pop("hybrid", None)
        series = data.pop("series", None)
        return cls(
            model=spec_from_dict(data.pop("model")),
            p_grid=GridSpec(*data.pop("p_grid")),
            overlay=None if overlay is None else TheoreticalLimit(*overlay),
            hybrid=None if hybrid is None else HybridConfig(**hybrid),
            series=None if series is None else SeriesConfig(**series),
            quantiles=tuple(data.pop("quantiles")),
            **data,
        )


@dataclass(frozen=True, eq=False)
class CurveSummary:
    """Pointwise quantiles of a set of signature curves, plus an optional overlay.

    ``values[i]`` is the curve for ``quantiles[i]``.
    """

    p_grid: np.ndarray
    quantiles: tuple[float, ...]
    values: np.ndarray
    overlay: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.p_grid, dtype=np.float64)
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if values.shape != (len(self.quantiles), grid.size):
            raise InvalidParameter(f"values must have shape (quantiles, p), got {values.shape}")
        object.__setattr__(self, "p_grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "quantiles", tuple(float(q) for q in self.quantiles))
        if self.overlay is not None:
            overlay = np.asarray(self.overlay, dtype=np.float64)
            if overlay.shape != grid.shape:
                raise InvalidParameter("overlay must match the p grid")
            object.__setattr__(self, "overlay", overlay)

    def quantile(self, q: float) -> np.ndarray:
        return self.values[self.quantiles.index(float(q))]

    @property
    def median(self) -> np.ndarray:
        return self.quantile(0.5)

    def as_curves(self) -> list[SignatureCurve]:
        nu = self.metadata.get("nu", 2)
        order = self.metadata.get("order", 1)
        curves = [
            SignatureCurve(self.p_grid, row, nu, order, quantile_label(q))
            for q, row in zip(self.quantiles, self.values)
        ]
        if self.overlay is not None:
            curves.append(SignatureCurve(self.p_grid, self.overlay, nu, order, "limit"))
        return curves


def summarize(
    curves: Sequence[SignatureCurve],
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    *,
    overlay: TheoreticalLimit | None = None,
    metadata: dict | None = None,
) -> CurveSummary:
    q = tuple(_check_quantiles(quantiles).tolist())
    first, table = quantile_values(curves, q)
    meta = {"nu": first.nu, "order": first.order, "curves": len(curves)}
    meta.update(metadata or {})
    if overlay is not None:
        meta["overlay"] = overlay.describe()
    return CurveSummary(
        first.p_grid,
        q,
        table,
        None if overlay is None else overlay(first.p_grid),
        meta,
    )


def run_replication(config: ExperimentConfig, r: int) -> np.ndarray | None:
    """Signature values of replication ``r``, or None if its path is degenerate."""
    path = simulate_model(
        config.model,
        config.n_per_period,
        config.step,
        config.replication_seed(r),
        hybrid=config.hybrid,
        series=config.series,
    )
    try:
        return roughness_signature_curve(path, config.p_grid.values, config.nu).values
    except DegeneratePath:
        return None


def _guarded(config: ExperimentConfig, r: int):
    try:
        return run_replication(config, r)
    except RoughSigError as exc:
        raise ReplicationError(r, exc) from exc


def _replicate_all(config: ExperimentConfig, workers: int) -> list:
    indices = range(config.replications)
    if workers <= 1 or config.replications == 1:
        return [_guarded(config, r) for r in indices]
    chunk = max(1, config.replications // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_guarded, [config] * config.replications, indices, chunksize=chunk))


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> CurveSummary:
    """Simulate every replication, compute its curve and aggregate the quantiles.

    Degenerate replications are dropped and counted; more than 1% of them
    raises :class:`ExcessiveDegeneracy`.
    """
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise InvalidParameter(f"workers must be positive, got {workers}")
    results = _replicate_all(config, workers)
    excluded = [r for r, v in enumerate(results) if v is None]
    kept = [v for v in results if v is not None]
    if not kept:
        raise AllReplicationsDegenerate(f"all {config.replications} replications produced degenerate paths")
    if len(excluded) > MAX_DEGENERATE_FRACTION * config.replications:
        raise ExcessiveDegeneracy(
            f"{len(excluded)} of {config.replications} replications were degenerate "
            f"(more than {MAX_DEGENERATE_FRACTION:.0%}); first: {excluded[:5]}"
        )
    grid = config.p_grid.values
    curves = [SignatureCurve(grid, v, config.nu) for v in kept]
    return summarize(
        curves,
        config.quantiles,
        overlay=config.overlay,
        metadata={
            "model": describe(config.model),
            "master_seed": config.master_seed,
            "replications": config.replications,
            "excluded": len(excluded),
            "excluded_indices": excluded,
            "n_per_period": config.n_per_period,
            "delta": config.step,
        },
    )
