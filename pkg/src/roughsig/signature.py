"""Roughness signature functions and their summaries.

The roughness signature at power ``p`` compares the power variation of a
path at lag ``nu`` with the one at lag 1:

    H(p) = [log V(p, nu) - log V(p, 1)] / (p log nu).

A flat curve at level H indicates a continuous process with roughness index
H; a pure-jump process with Blumenthal-Getoor index beta gives 1/beta below
``p = beta`` and ``1/p`` above it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DegeneratePath,
    EmptyPanel,
    GridMismatch,
    IndeterminateActivity,
    InvalidParameter,
    InvalidTau,
)
from .variation import IncrementScheme, Path, _check_grid, _check_power, _PhaseLogs

DEFAULT_P_GRID = np.linspace(0.1, 10.0, 100)
DEFAULT_QUANTILES = (0.25, 0.5, 0.75)


@dataclass(frozen=True, eq=False)
class SignatureCurve:
    p_grid: np.ndarray
    values: np.ndarray
    nu: int = 2
    order: int = 1
    label: str = ""
    subsampling: str = "overlapping"

    def __post_init__(self):
        grid = np.array(self.p_grid, dtype=np.float64)
        values = np.array(self.values, dtype=np.float64)
        if grid.shape != values.shape or grid.ndim != 1:
            raise GridMismatch(
                f"p_grid and values must be 1-d of equal length, got {grid.shape} and {values.shape}"
            )
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise GridMismatch("p_grid must be strictly increasing")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "p_grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def relabel(self, label: str) -> "SignatureCurve":
        return SignatureCurve(self.p_grid, self.values, self.nu, self.order, label, self.subsampling)


def _check_nu(nu) -> int:
    if isinstance(nu, bool) or int(nu) != nu or nu < 2:
        raise InvalidParameter(f"nu must be an integer >= 2, got {nu!r}")
    return int(nu)


def _log_ratio(v_lag: float, v_one: float, p: float, log_nu: float, decimated: bool) -> float:
    if v_lag == 0.0 or v_one == 0.0:
        raise DegeneratePath(
            f"power variation vanished at p={p:g} (constant or near-constant window)"
        )
    if decimated:
        # a decimated phase holds 1/nu of the increments
        return log_nu + math.log(v_lag) - math.log(v_one)
    return math.log(v_lag) - math.log(v_one)


class _SignatureKernel:
    def __init__(self, path: Path, nu: int, order: int, subsampling: str, phase: int = 0):
        self.nu = _check_nu(nu)
        self.order = order
        self.decimated = subsampling == "decimated"
        self.log_nu = math.log(self.nu)
        self.one = _PhaseLogs(path, IncrementScheme(1, order))
        self.lag = _PhaseLogs(path, IncrementScheme(self.nu, order, subsampling, phase))

    def numerator(self, p: float) -> float:
        return _log_ratio(self.lag.variation(p), self.one.variation(p), p, self.log_nu, self.decimated)

    def __call__(self, p: float) -> float:
        return self.numerator(p) / (p * self.log_nu)


def roughness_signature(
    path: Path,
    p: float,
    nu: int = 2,
    *,
    order: int = 1,
    subsampling: Literal["overlapping", "decimated"] = "overlapping",
    phase: int = 0,
) -> float:
    """Roughness signature of ``path`` at power ``p``.

    With ``subsampling="decimated"`` the lag-``nu`` variation only uses one
    phase and is scaled by ``nu`` so that it stays comparable with the
    overlapping version; the result is then the reciprocal of
    :func:`activity_signature_tt`.

    Raises
    ------
    DegeneratePath
        If either power variation is zero.
    """
    p = _check_power(p)
    return _SignatureKernel(path, nu, order, subsampling, phase)(p)


def roughness_signature_curve(
    path: Path,
    p_grid: Sequence[float] = DEFAULT_P_GRID,
    nu: int = 2,
    *,
    order: int = 1,
    subsampling: Literal["overlapping", "decimated"] = "overlapping",
    phase: int = 0,
    label: str = "",
) -> SignatureCurve:
    grid = _check_grid(p_grid)
    kernel = _SignatureKernel(path, nu, order, subsampling, phase)
    values = [kernel(p) for p in grid.tolist()]
    return SignatureCurve(grid, values, kernel.nu, order, label, subsampling)


def activity_signature_tt(path: Path, p: float, k: int = 2, *, phase: int = 0) -> float:
    """Two-scale activity estimate with decimated (discard-style) sampling.

    ``p log k / (log k + log V(p, k dt) - log V(p, dt))``; for a continuous
    martingale this is close to 2.
    """
    p = _check_power(p)
    kernel = _SignatureKernel(path, k, 1, "decimated", phase)
    denominator = kernel.numerator(p)
    if denominator == 0.0:
        raise IndeterminateActivity(f"activity denominator is exactly zero at p={p:g}")
    return (p * kernel.log_nu) / denominator


def _stack(curves: Iterable[SignatureCurve]) -> tuple[SignatureCurve, np.ndarray]:
    curves = list(curves)
    if not curves:
        raise EmptyPanel("no curves to aggregate")
    first = curves[0]
    for c in curves[1:]:
        if not np.array_equal(c.p_grid, first.p_grid):
            raise GridMismatch(f"curve {c.label!r} uses a different p grid")
        if (c.nu, c.order, c.subsampling) != (first.nu, first.order, first.subsampling):
            raise GridMismatch(f"curve {c.label!r} uses a different lag or increment order")
    return first, np.vstack([c.values for c in curves])


def _check_quantiles(q) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=np.float64))
    if q.ndim != 1 or q.size == 0 or not np.all((q > 0) & (q < 1)):
        raise InvalidParameter(f"quantile levels must lie in (0, 1), got {q.tolist()}")
    return q


def quantile_label(q: float) -> str:
    return f"q{q:g}"


def quantile_values(curves: Iterable[SignatureCurve], q) -> tuple[SignatureCurve, np.ndarray]:
    """Pointwise quantiles, shape ``(len(q), len(p_grid))``.

    Linear interpolation between order statistics; the result only depends
    on the sorted values at each p, so curve order does not matter.
    """
    q = _check_quantiles(q)
    first, stack = _stack(curves)
    return first, np.quantile(stack, q, axis=0, method="linear")


def quantile_signature(curves: Iterable[SignatureCurve], q=DEFAULT_QUANTILES) -> list[SignatureCurve]:
    q = _check_quantiles(q)
    first, table = quantile_values(curves, q)
    return [
        SignatureCurve(first.p_grid, row, first.nu, first.order, quantile_label(level), first.subsampling)
        for level, row in zip(q.tolist(), table)
    ]


@dataclass(frozen=True)
class PointEstimate:
    h_hat: float
    tau: float
    upper_limit: float
    clipped: bool = False
    n_nodes: int = 0


def point_estimate(
    curve_provider: Callable,
    tau: float = 0.5,
    step: float = 0.01,
    *,
    p_max: float | None = None,
    vectorized: bool = False,
) -> PointEstimate:
    """Average of the signature over ``[tau, 1/H(tau)]``.

    The integral uses the composite trapezoid rule on an equispaced grid with
    spacing at most ``step`` and both endpoints included. If the curve is only
    known up to ``p_max`` and the upper limit exceeds it, the limit is clipped
    with a warning.

    ``curve_provider`` maps a power to the signature value; pass
    ``vectorized=True`` if it also accepts an array of powers.
    """
    tau = float(tau)
    if not (math.isfinite(tau) and tau > 0):
        raise InvalidTau(f"tau must be positive, got {tau!r}")
    if not (math.isfinite(step) and step > 0):
        raise InvalidParameter(f"integration step must be positive, got {step!r}")
    h_tau = float(curve_provider(tau))
    if not h_tau > 0:
        raise InvalidTau(f"signature at tau={tau:g} is {h_tau:g}; the upper limit 1/H(tau) is undefined")
    upper = 1.0 / h_tau
    clipped = False
    if p_max is not None and upper > p_max:
        warnings.warn(
            f"upper limit {upper:.4g} exceeds the largest available power {p_max:g}; clipping",
            RuntimeWarning,
            stacklevel=2,
        )
        upper = float(p_max)
        clipped = True
    if not upper > tau:
        raise InvalidTau(
            f"upper limit 1/H(tau) = {upper:.4g} does not exceed tau = {tau:g}; "
            "the signature is too high at tau for a flat low-power region"
        )
    m = max(1, math.ceil((upper - tau) / step - 1e-9))
    nodes = np.linspace(tau, upper, m + 1)
    if vectorized:
        values = np.asarray(curve_provider(nodes), dtype=np.float64)
    else:
        values = np.array([float(curve_provider(p)) for p in nodes.tolist()])
    h_hat = float(np.trapezoid(values, nodes)) / (upper - tau)
    return PointEstimate(h_hat, tau, upper, clipped, nodes.size)


def point_estimate_H(curve_provider: Callable, tau: float = 0.5, step: float = 0.01, **kwargs) -> float:
    return point_estimate(curve_provider, tau, step, **kwargs).h_hat


def path_provider(path: Path, nu: int = 2, *, order: int = 1) -> Callable:
    """Vectorized signature provider evaluating the path at any power."""
    kernel = _SignatureKernel(path, nu, order, "overlapping")

    def provider(p):
        if np.ndim(p) == 0:
            return kernel(_check_power(p))
        return np.array([kernel(_check_power(x)) for x in np.asarray(p, dtype=np.float64).tolist()])

    return provider


def median_provider(paths: Sequence[Path], nu: int = 2, *, order: int = 1) -> Callable:
    """Pointwise median across several paths (periods) of their signatures."""
    if not paths:
        raise EmptyPanel("no paths supplied")
    providers = [path_provider(path, nu, order=order) for path in paths]

    def provider(p):
        rows = np.array([np.atleast_1d(f(p)) for f in providers])
        med = np.quantile(rows, 0.5, axis=0, method="linear")
        return float(med[0]) if np.ndim(p) == 0 else med

    return provider


def curve_provider(curve: SignatureCurve) -> Callable:
    """Linear interpolation of a tabulated curve (constant beyond the ends)."""
    grid, values = curve.p_grid, curve.values
    return lambda p: np.interp(p, grid, values)


LimitKind = Literal["continuous", "pure_jump", "continuous_plus_jumps"]


@dataclass(frozen=True)
class TheoreticalLimit:
    """Infill limit of the signature for one of the three model classes.

    ``parameter`` is the roughness index H for ``continuous`` and
    ``continuous_plus_jumps`` and the Blumenthal-Getoor index beta for
    ``pure_jump``.
    """

    kind: LimitKind
    parameter: float

    def __post_init__(self):
        x = float(self.parameter)
        object.__setattr__(self, "parameter", x)
        if self.kind == "continuous":
            ok = 0 < x < 1
            bound = "H in (0, 1)"
        elif self.kind == "pure_jump":
            ok = 0 < x < 2
            bound = "beta in (0, 2)"
        elif self.kind == "continuous_plus_jumps":
            ok = 0 < x <= 0.5
            bound = "H in (0, 1/2]"
        else:
            raise InvalidParameter(f"unknown limit kind {self.kind!r}")
        if not ok:
            raise InvalidParameter(f"{self.kind} limit needs {bound}, got {x!r}")

    @property
    def kink(self) -> float | None:
        if self.kind == "pure_jump":
            return self.parameter
        if self.kind == "continuous_plus_jumps":
            return 1.0 / self.parameter
        return None

    @property
    def level(self) -> float:
        """Value of the flat low-power part."""
        return 1.0 / self.parameter if self.kind == "pure_jump" else self.parameter

    def __call__(self, p):
        p = np.asarray(p, dtype=np.float64)
        if self.kind == "continuous":
            out = np.full_like(p, self.parameter)
        else:
            out = np.where(p <= self.kink, self.level, 1.0 / np.where(p > 0, p, 1.0))
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        symbol = "beta" if self.kind == "pure_jump" else "H"
        return f"{self.kind}({symbol}={self.parameter:g})"


def theoretical_limit(limit: TheoreticalLimit, p_grid: Sequence[float] = DEFAULT_P_GRID) -> SignatureCurve:
    grid = _check_grid(p_grid)
    return SignatureCurve(grid, limit(grid), 2, 1, "limit")
