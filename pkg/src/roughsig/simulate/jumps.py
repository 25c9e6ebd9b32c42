"""Pure-jump generators: tempered stable (series representation) and compound Poisson.

Tempered stable jumps on one half-line with Levy density
``c * exp(-lam x) * x**(-1-beta)`` over a horizon ``T`` are generated as

    J_j = min((beta * Gamma_j / (c T))**(-1/beta), e_j * u_j**(1/beta) / lam),

at uniform times ``V_j`` on ``[0, T]``, with ``Gamma_j`` the arrival times of
a unit-rate Poisson process, ``e_j`` standard exponential and ``u_j``
uniform. The series is cut once ``Gamma_j > gamma_max * T``, which drops
the jumps below ``x_c = (beta * gamma_max / c)**(-1/beta)``. By default
(``small_jumps="gaussian"``) the dropped part is replaced by a Brownian
motion with the same variance, plus its mean when ``beta < 1``. Without
that, the increments at the finest scale are visibly too narrow for
``beta`` near 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from ..errors import InvalidParameter
from ..seeding import rng_for
from ..variation import Path
from ._common import check_grid, jump_cells, jumps_on_grid
from .params import ConstantJumps, PoissonParams, TemperedStableParams

BLOCK = 1 << 16
SMALL_JUMP_KEY = 2


@dataclass(frozen=True)
class SeriesConfig:
    """Series truncation: arrivals up to ``gamma_max`` per unit time on each side."""

    gamma_max: float = 1e6
    small_jumps: str = "gaussian"

    def __post_init__(self):
        g = float(self.gamma_max)
        if not (math.isfinite(g) and g > 0):
            raise InvalidParameter(f"gamma_max must be positive and finite, got {self.gamma_max!r}")
        if self.small_jumps not in ("gaussian", "drop"):
            raise InvalidParameter(f"small_jumps must be 'gaussian' or 'drop', got {self.small_jumps!r}")
        object.__setattr__(self, "gamma_max", g)


def series_cutoff(beta: float, c: float, gamma_max: float) -> float:
    """Jump size below which the truncated series keeps nothing."""
    return (beta * gamma_max / c) ** (-1.0 / beta)


def small_jump_moments(params: TemperedStableParams, gamma_max: float) -> tuple[float, float]:
    """Mean and variance per unit time of the jumps the series drops.

    Uses the Levy measure restricted to ``|x| < x_c``; the mean is only
    defined (and only needed) for ``beta < 1``.
    """
    beta = params.beta
    mean = var = 0.0
    for sign, c, lam in params.sides():
        xc = series_cutoff(beta, c, gamma_max)
        var += c * lam ** (beta - 2) * math.gamma(2 - beta) * scipy.special.gammainc(2 - beta, lam * xc)
        if beta < 1:
            mean += sign * c * lam ** (beta - 1) * math.gamma(1 - beta) * scipy.special.gammainc(1 - beta, lam * xc)
    return mean, var


def _side_blocks(rng: np.random.Generator, beta: float, c: float, lam: float, horizon: float, cutoff: float):
    """Yield ``(times, sizes)`` block by block until the arrivals pass ``cutoff``.

    Draws come in fixed-size blocks so that a larger cutoff extends the same
    sequence instead of reshuffling it.
    """
    last = 0.0
    while last <= cutoff:
        gamma = last + np.cumsum(rng.standard_exponential(BLOCK))
        e = rng.standard_exponential(BLOCK)
        u = rng.random(BLOCK)
        v = rng.random(BLOCK) * horizon
        last = gamma[-1]
        keep = gamma <= cutoff
        stable = (beta * gamma[keep] / (c * horizon)) ** (-1.0 / beta)
        tempered = e[keep] * u[keep] ** (1.0 / beta) / lam
        yield v[keep], np.minimum(stable, tempered)


def _sides(params: TemperedStableParams, horizon: float, seed: int, config: SeriesConfig | None):
    horizon = float(horizon)
    if not (math.isfinite(horizon) and horizon > 0):
        raise InvalidParameter(f"horizon must be positive, got {horizon!r}")
    cutoff = (config or SeriesConfig()).gamma_max * horizon
    sides = ((1.0, params.c_pos, params.lambda_pos), (-1.0, params.c_neg, params.lambda_neg))
    for key, (sign, c, lam) in enumerate(sides):
        if c > 0:
            yield sign, _side_blocks(rng_for(seed, key), params.beta, c, lam, horizon, cutoff)


def tempered_stable_jumps(
    params: TemperedStableParams,
    horizon: float,
    seed: int,
    config: SeriesConfig | None = None,
):
    """Jump times and signed sizes on ``[0, horizon]``, positive side first.

    Side ``k`` (0 positive, 1 negative) draws from its own stream keyed by
    ``(seed, k)``.
    """
    times, sizes = [], []
    for sign, blocks in _sides(params, horizon, seed, config):
        for t, s in blocks:
            times.append(t)
            sizes.append(sign * s)
    return np.concatenate(times), np.concatenate(sizes)


def simulate_tempered_stable(
    params: TemperedStableParams,
    n: int,
    delta: float,
    seed: int,
    config: SeriesConfig | None = None,
) -> Path:
    """Zero-drift tempered stable path on ``i * delta``, starting at 0.

    For ``beta >= 1`` the parameters are symmetric, so the two sides'
    compensators cancel and the paired sum needs no centering. Jumps are
    binned onto the grid one block at a time, so memory stays O(n) however
    large ``gamma_max`` is.
    """
    n, delta = check_grid(n, delta)
    config = config or SeriesConfig()
    per_cell = np.zeros(n)
    for sign, blocks in _sides(params, (n - 1) * delta, seed, config):
        for t, s in blocks:
            per_cell += jump_cells(t, sign * s, n, delta)
    if config.small_jumps == "gaussian":
        mean, var = small_jump_moments(params, config.gamma_max)
        steps = mean * delta + math.sqrt(var * delta) * rng_for(seed, SMALL_JUMP_KEY).standard_normal(n - 1)
        per_cell[1:] += steps
    return Path(np.cumsum(per_cell), delta)


def poisson_jumps(params: PoissonParams, horizon: float, seed: int):
    rng = rng_for(seed)
    count = rng.poisson(params.rate * horizon)
    times = rng.random(count) * horizon
    js = params.jump_sizes
    if isinstance(js, ConstantJumps):
        sizes = np.full(count, js.size)
    else:
        sizes = js.mean + js.sd * rng.standard_normal(count)
    return times, sizes


def simulate_poisson(params: PoissonParams, n: int, delta: float, seed: int) -> Path:
    """Compound Poisson path on ``i * delta``, starting at 0."""
    n, delta = check_grid(n, delta)
    times, sizes = poisson_jumps(params, (n - 1) * delta, seed)
    return Path(jumps_on_grid(times, sizes, n, delta), delta)
