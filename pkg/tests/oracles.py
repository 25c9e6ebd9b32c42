"""Independent reference values and Monte Carlo checks for the simulators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from roughsig.seeding import derive_seed
from roughsig.simulate import (
    FbmParams,
    GammaBssParams,
    SeriesConfig,
    TemperedStableParams,
    simulate_fbm,
    simulate_gamma_bss,
    tempered_stable_jumps,
)


@dataclass
class Comparison:
    label: str
    estimate: float
    se: float
    target: float

    @property
    def z(self) -> float:
        return (self.estimate - self.target) / self.se

    def ok(self, k: float = 3.0) -> bool:
        return abs(self.z) < k

    def __str__(self):
        return f"{self.label}: {self.estimate:.6g} vs {self.target:.6g} (z={self.z:+.2f})"


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def gamma_bss_correlation_tricomi(params: GammaBssParams, t: float) -> float:
    """r(t) from int_0^inf u^a (u+t)^a e^{-2 lam u} du = Gamma(a+1) t^{2a+1} U(a+1, 2a+2, 2 lam t)."""
    a, lam = params.alpha, params.lam
    norm = math.gamma(2 * a + 1) / (2 * lam) ** (2 * a + 1)
    cross = math.exp(-lam * t) * math.gamma(a + 1) * t ** (2 * a + 1) * scipy.special.hyperu(a + 1, 2 * a + 2, 2 * lam * t)
    return cross / norm


def tempered_stable_tail_mass(params: TemperedStableParams, eps: float) -> float:
    """Levy measure of {|x| > eps}, by quadrature of the density."""
    total = 0.0
    for _, c, lam in params.sides():
        val, _ = scipy.integrate.quad(lambda x: c * math.exp(-lam * x) * x ** (-1 - params.beta), eps, math.inf, epsrel=1e-12)
        total += val
    return total


def _lag_means(values: np.ndarray, lags) -> list[float]:
    return [float(np.mean((values[k:] - values[:-k]) ** 2)) for k in lags]


def gamma_bss_variogram_check(params: GammaBssParams, seed: int, paths: int = 2000, n: int = 32, delta: float = 1 / 2000):
    """Per-path average squared lag-k increments against R(k delta), k = 1..5."""
    from roughsig.simulate import variogram_gamma_bss

    lags = range(1, 6)
    stats = np.array([_lag_means(simulate_gamma_bss(params, n, delta, derive_seed(seed, i)).values, lags) for i in range(paths)])
    out = []
    for j, k in enumerate(lags):
        m, se = mean_se(stats[:, j])
        out.append(Comparison(f"alpha={params.alpha:g} lag {k}", m, se, variogram_gamma_bss(params, k * delta)))
    return out


def fbm_moment_check(hurst: float, seed: int, paths: int = 10_000, n: int = 64, delta: float = 1 / 64):
    lags = range(1, 6)
    params = FbmParams(hurst)
    stats = np.array([_lag_means(simulate_fbm(params, n, delta, derive_seed(seed, i)).values, lags) for i in range(paths)])
    out = []
    for j, k in enumerate(lags):
        m, se = mean_se(stats[:, j])
        out.append(Comparison(f"H={hurst:g} lag {k}", m, se, (k * delta) ** (2 * hurst)))
    return out


def tempered_stable_count_check(beta: float, seed: int, eps: float = 0.1, paths: int = 2000):
    """Number of jumps with |J| > eps on [0, 1].

    A series cut at gamma_max only drops jumps below its cutoff, so a small
    gamma_max is exact for this count as long as the cutoff is below eps.
    """
    params = TemperedStableParams.symmetric(beta)
    config = SeriesConfig(1e3)
    assert (beta * config.gamma_max) ** (-1 / beta) < eps
    counts = [np.count_nonzero(np.abs(tempered_stable_jumps(params, 1.0, derive_seed(seed, i), config)[1]) > eps) for i in range(paths)]
    m, se = mean_se(counts)
    return Comparison(f"beta={beta:g} jumps above {eps:g}", m, se, tempered_stable_tail_mass(params, eps))
