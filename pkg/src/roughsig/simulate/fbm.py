"""Exact simulation of fractional Brownian motion.

Increments (fractional Gaussian noise) are drawn from their exact
stationary Gaussian law: by Cholesky factorization of the Toeplitz
covariance for up to ``EXACT_MAX`` increments and by circulant embedding
(Davies-Harte) beyond that. Both are exact in distribution.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg

from ..errors import NumericalFailure
from ..seeding import rng_for
from ..variation import Path
from ._common import check_grid
from .params import FbmParams

EXACT_MAX = 4096


def fgn_autocovariance(m: int, hurst: float) -> np.ndarray:
    """Autocovariance of unit-step fractional Gaussian noise at lags 0..m-1."""
    k = np.arange(m, dtype=np.float64)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k**h2 + np.abs(k - 1) ** h2)


def fgn_covariance(m: int, hurst: float) -> np.ndarray:
    cov = scipy.linalg.toeplitz(fgn_autocovariance(m, hurst))
    # stationarity of the increments is exactly Toeplitz structure
    if not (np.array_equal(cov[1:, 1:], cov[:-1, :-1]) and np.array_equal(cov, cov.T)):
        raise NumericalFailure("fGn covariance is not symmetric Toeplitz")
    return cov


@lru_cache(maxsize=8)
def _cholesky_factor(m: int, hurst: float) -> np.ndarray:
    try:
        factor = np.linalg.cholesky(fgn_covariance(m, hurst))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Cholesky factorization failed for m={m}, H={hurst}") from exc
    factor.flags.writeable = False
    return factor


@lru_cache(maxsize=8)
def _circulant_sqrt_eigs(m: int, hurst: float) -> np.ndarray:
    gamma = fgn_autocovariance(m + 1, hurst)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigs = np.fft.fft(row).real
    if eigs.min() < -1e-10 * eigs.max():
        raise NumericalFailure(f"circulant embedding is not nonnegative definite (min eig {eigs.min():.3g})")
    out = np.sqrt(np.clip(eigs, 0.0, None) / row.size)
    out.flags.writeable = False
    return out


def fgn(m: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """``m`` unit-step fGn samples."""
    if m <= EXACT_MAX:
        return _cholesky_factor(m, hurst) @ rng.standard_normal(m)
    sqrt_eigs = _circulant_sqrt_eigs(m, hurst)
    size = sqrt_eigs.size
    w = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return np.fft.fft(sqrt_eigs * w)[:m].real


def simulate_fbm(params: FbmParams, n: int, delta: float, seed: int) -> Path:
    """``n`` observations of ``scale * B^H`` on the grid ``i * delta``, starting at 0."""
    n, delta = check_grid(n, delta)
    rng = rng_for(seed)
    steps = fgn(n - 1, params.hurst, rng) * (params.scale * delta**params.hurst)
    return Path(np.concatenate([[0.0], np.cumsum(steps)]), delta)
