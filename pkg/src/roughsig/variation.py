"""Realized power variation of an equidistantly sampled path.

The power variation at lag ``nu`` is

    V(X, p, nu) = sum_i |X_i - X_{i-nu}|^p,

optionally on second-order increments and either over all (overlapping)
lag-``nu`` increments or over the non-overlapping increments of a single
decimated phase.

Summands are evaluated as ``exp(p * log|x|)`` (zero increments contribute an
exact zero) and each phase is summed with ``math.fsum``, i.e. correctly
rounded. Overlapping variations are the correctly rounded sum of their phase
sums. Because of this the result does not depend on the order of the
increments, so reversing a path, splitting the sum by phase or evaluating the
grid of powers in any order gives bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidParameter, InvalidPower, PathTooShort

Subsampling = Literal["overlapping", "decimated"]


@dataclass(frozen=True, eq=False)
class Path:
    """Equidistant observations ``values[i]`` taken at ``origin + i * delta``."""

    values: np.ndarray
    delta: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 1:
            raise InvalidParameter(f"path values must be one-dimensional, got shape {values.shape}")
        if values.size < 3:
            raise PathTooShort(f"a path needs at least 3 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise InvalidParameter("path values must all be finite")
        delta = float(self.delta)
        if not (math.isfinite(delta) and delta > 0):
            raise InvalidParameter(f"delta must be positive and finite, got {self.delta!r}")
        origin = float(self.origin)
        if not math.isfinite(origin):
            raise InvalidParameter("origin must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "origin", origin)

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def horizon(self) -> float:
        """Time spanned by the observations, ``(n - 1) * delta``."""
        return (self.n - 1) * self.delta

    @property
    def times(self) -> np.ndarray:
        return self.origin + self.delta * np.arange(self.n)

    def with_values(self, values) -> "Path":
        return Path(values, self.delta, self.origin)


@dataclass(frozen=True)
class IncrementScheme:
    """Which increments enter a power variation.

    ``nu`` is the subsampling lag and ``order`` selects first or second
    differences. ``overlapping`` uses every lag-``nu`` increment;
    ``decimated`` keeps only the observations ``phase, phase + nu, ...`` and
    differences those.
    """

    nu: int = 1
    order: int = 1
    subsampling: Subsampling = "overlapping"
    phase: int = 0

    def __post_init__(self):
        if isinstance(self.nu, bool) or int(self.nu) != self.nu or self.nu < 1:
            raise InvalidParameter(f"nu must be a positive integer, got {self.nu!r}")
        object.__setattr__(self, "nu", int(self.nu))
        if self.order not in (1, 2):
            raise InvalidParameter(f"order must be 1 or 2, got {self.order!r}")
        if self.subsampling not in ("overlapping", "decimated"):
            raise InvalidParameter(f"unknown subsampling {self.subsampling!r}")
        if self.subsampling == "decimated" and self.nu < 2:
            raise InvalidParameter("decimated subsampling requires nu >= 2")
        if self.subsampling == "overlapping" and self.phase != 0:
            raise InvalidParameter("phase only applies to decimated subsampling")
        if not 0 <= self.phase < self.nu:
            raise InvalidParameter(f"phase must lie in [0, nu), got {self.phase!r}")

    @property
    def phases(self) -> tuple[int, ...]:
        if self.subsampling == "decimated":
            return (self.phase,)
        return tuple(range(self.nu))


FIRST_ORDER = IncrementScheme()


def _as_values(path) -> np.ndarray:
    return path.values if isinstance(path, Path) else np.asarray(path, dtype=np.float64)


def increments(path: Path, scheme: IncrementScheme = FIRST_ORDER) -> np.ndarray:
    """Increments selected by ``scheme``, in time order.

    Overlapping order-1 increments are ``X[i] - X[i-nu]`` for
    ``i = nu, ..., n-1``; order 2 takes the lag-``nu`` differences of those.
    Decimated increments difference ``X[phase::nu]`` once or twice.
    """
    values = _as_values(path)
    n = values.size
    nu, order = scheme.nu, scheme.order
    if scheme.subsampling == "overlapping":
        if n < order * nu + 1:
            raise PathTooShort(
                f"order-{order} lag-{nu} increments need at least {order * nu + 1} points, got {n}"
            )
        d = values[nu:] - values[:-nu]
        if order == 2:
            d = d[nu:] - d[:-nu]
        return d
    sub = values[scheme.phase :: nu]
    if sub.size < order + 1:
        raise PathTooShort(
            f"decimated phase {scheme.phase} at lag {nu} keeps {sub.size} points; "
            f"order-{order} increments need {order + 1}"
        )
    return np.diff(sub, n=order)


def _check_power(p) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError) as exc:
        raise InvalidPower(f"power must be a real number, got {p!r}") from exc
    if not (math.isfinite(p) and p > 0):
        raise InvalidPower(f"power must be positive and finite, got {p!r}")
    return p


def _check_grid(p_grid) -> np.ndarray:
    grid = np.asarray(p_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidPower("the grid of powers must be a nonempty 1-d sequence")
    for p in grid:
        _check_power(p)
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise InvalidPower("the grid of powers must be strictly increasing")
    return grid


class _PhaseLogs:
    """log|increment| split by phase, ready for repeated evaluation in p."""

    __slots__ = ("logs",)

    def __init__(self, path, scheme: IncrementScheme):
        d = increments(path, scheme)
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(d))
        if scheme.subsampling == "overlapping" and scheme.nu > 1:
            # element m of the overlapping array ends at index m + order*nu,
            # so its decimated phase is m mod nu
            self.logs = [np.ascontiguousarray(la[phi :: scheme.nu]) for phi in range(scheme.nu)]
        else:
            self.logs = [la]

    def variation(self, p: float) -> float:
        # exp(p * -inf) == 0.0 covers zero increments without a branch
        sums = [math.fsum(np.exp(p * la).tolist()) for la in self.logs]
        return math.fsum(sums)


def power_variation(path: Path, p: float, scheme: IncrementScheme = FIRST_ORDER) -> float:
    """Realized ``p``-th power variation; exactly 0.0 for a constant path."""
    p = _check_power(p)
    return _PhaseLogs(path, scheme).variation(p)


def power_variation_curve(
    path: Path, p_grid: Sequence[float], scheme: IncrementScheme = FIRST_ORDER
) -> np.ndarray:
    """``power_variation`` over a strictly increasing grid, sharing the log pass.

    Bit-identical to calling :func:`power_variation` once per grid point.
    """
    grid = _check_grid(p_grid)
    logs = _PhaseLogs(path, scheme)
    return np.array([logs.variation(p) for p in grid.tolist()], dtype=np.float64)
