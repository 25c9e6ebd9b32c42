"""Gamma Brownian semi-stationary process via the hybrid scheme.

The process is ``X_t = sigma * int_{-inf}^t g(t - s) dW_s`` with the gamma
kernel ``g(x) = x**alpha * exp(-lam * x)``. On the grid ``t_i = i * delta``
the hybrid scheme writes

    X_i = sigma * [ sum_{k=1}^{kappa} exp(-lam k delta) * Wtilde_{i-k}^{(k)}
                  + sum_{k=kappa+1}^{N} g(b_k delta) * dW_{i-k} ],

where ``dW_j`` is the Brownian increment over ``[j delta, (j+1) delta]``,
``Wtilde_j^{(k)} = int_{j delta}^{(j+1) delta} ((j+k) delta - s)**alpha dW_s``
is drawn jointly with ``dW_j`` from its exact Gaussian law, and ``b_k`` are
the optimal evaluation points

    b_k = ((k**(alpha+1) - (k-1)**(alpha+1)) / (alpha+1))**(1/alpha).

The first ``N`` increments before time 0 are simulated too, so the path
starts in (approximate) stationarity instead of at zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.integrate
import scipy.signal
import scipy.special

from ..errors import InvalidParameter, NumericalFailure, QuadratureFailure, TruncationTooShort
from ..seeding import rng_for
from ..variation import Path
from ._common import check_grid
from .params import GammaBssParams

TRUNCATION_RATIO = 1e-8


@dataclass(frozen=True)
class HybridConfig:
    """``kappa`` near-zero terms handled exactly; ``n_trunc`` lagged increments kept.

    ``n_trunc=None`` picks the smallest N with ``g(N delta) / g(delta) < 1e-8``.
    """

    kappa: int = 3
    n_trunc: int | None = None

    def __post_init__(self):
        if isinstance(self.kappa, bool) or int(self.kappa) != self.kappa or self.kappa < 1:
            raise InvalidParameter(f"kappa must be a positive integer, got {self.kappa!r}")
        if self.n_trunc is not None and (int(self.n_trunc) != self.n_trunc or self.n_trunc < 1):
            raise InvalidParameter(f"n_trunc must be a positive integer, got {self.n_trunc!r}")


def gamma_kernel(x, alpha: float, lam: float):
    x = np.asarray(x, dtype=np.float64)
    return x**alpha * np.exp(-lam * x)


def default_truncation(alpha: float, lam: float, delta: float, ratio: float = TRUNCATION_RATIO) -> int:
    """Smallest N with ``g(N delta) / g(delta) = N**alpha exp(-lam (N-1) delta) < ratio``.

    Solves ``alpha log N - lam delta (N - 1) = log ratio`` by the fixed-point
    iteration ``N = 1 + (alpha log N - log ratio) / (lam delta)``, which
    contracts because ``|alpha| / N`` is tiny next to ``lam delta`` near the root.
    """
    rate = lam * delta
    target = -math.log(ratio)
    n_est = 1.0 + target / rate
    for _ in range(100):
        nxt = 1.0 + (target + alpha * math.log(n_est)) / rate
        if abs(nxt - n_est) < 0.5:
            n_est = nxt
            break
        n_est = max(nxt, 2.0)
    n = max(2, math.floor(n_est) - 2)
    while n**alpha * math.exp(-rate * (n - 1)) >= ratio:
        n += 1
    return n


def optimal_points(k: np.ndarray, alpha: float) -> np.ndarray:
    """``b_k`` for integer ``k >= 2``, computed without cancellation."""
    k = np.asarray(k, dtype=np.float64)
    # k**(a+1) - (k-1)**(a+1) = -k**(a+1) * expm1((a+1) * log1p(-1/k))
    diff = -(k ** (alpha + 1)) * np.expm1((alpha + 1) * np.log1p(-1.0 / k))
    return (diff / (alpha + 1)) ** (1.0 / alpha)


def _cross_moment(j: int, k: int, alpha: float) -> float:
    """``int_0^1 (j-1+u)**alpha (k-1+u)**alpha du`` for ``j != k``."""
    lo, hi = min(j, k) - 1, max(j, k) - 1
    if lo == 0:
        val, err, *rest = scipy.integrate.quad(
            lambda u: (hi + u) ** alpha, 0.0, 1.0, weight="alg", wvar=(alpha, 0.0), full_output=1
        )
    else:
        val, err, *rest = scipy.integrate.quad(
            lambda u: (lo + u) ** alpha * (hi + u) ** alpha, 0.0, 1.0, full_output=1
        )
    if len(rest) > 1 or err > 1e-10 * abs(val):
        raise QuadratureFailure(f"hybrid covariance entry ({j},{k}) did not converge")
    return val


@lru_cache(maxsize=32)
def hybrid_covariance(alpha: float, delta: float, kappa: int) -> np.ndarray:
    """Covariance of ``(dW_j, Wtilde_j^{(1)}, ..., Wtilde_j^{(kappa)})``."""
    cov = np.empty((kappa + 1, kappa + 1))
    cov[0, 0] = delta
    for k in range(1, kappa + 1):
        cov[0, k] = cov[k, 0] = delta ** (alpha + 1) * (k ** (alpha + 1) - (k - 1) ** (alpha + 1)) / (alpha + 1)
        cov[k, k] = delta ** (2 * alpha + 1) * (k ** (2 * alpha + 1) - (k - 1) ** (2 * alpha + 1)) / (2 * alpha + 1)
        for j in range(1, k):
            cov[j, k] = cov[k, j] = delta ** (2 * alpha + 1) * _cross_moment(j, k, alpha)
    cov.flags.writeable = False
    return cov


@lru_cache(maxsize=32)
def _hybrid_factor(alpha: float, delta: float, kappa: int) -> np.ndarray:
    try:
        factor = np.linalg.cholesky(hybrid_covariance(alpha, delta, kappa))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"hybrid covariance not positive definite (kappa={kappa})") from exc
    factor.flags.writeable = False
    return factor


def hybrid_weights(params: GammaBssParams, delta: float, kappa: int, n_trunc: int):
    """Near-term weights ``exp(-lam k delta)``, k=1..kappa, and the far kernel.

    The far kernel has length ``n_trunc + 1`` with zeros at lags ``0..kappa``.
    """
    if n_trunc < kappa + 1:
        raise TruncationTooShort(f"n_trunc={n_trunc} must be at least kappa + 1 = {kappa + 1}")
    near = np.exp(-params.lam * delta * np.arange(1, kappa + 1))
    far = np.zeros(n_trunc + 1)
    k = np.arange(kappa + 1, n_trunc + 1)
    far[kappa + 1 :] = gamma_kernel(optimal_points(k, params.alpha) * delta, params.alpha, params.lam)
    return near, far


def simulate_gamma_bss(
    params: GammaBssParams,
    n: int,
    delta: float,
    seed: int,
    config: HybridConfig | None = None,
) -> Path:
    n, delta = check_grid(n, delta)
    config = config or HybridConfig()
    kappa = config.kappa
    n_trunc = config.n_trunc or default_truncation(params.alpha, params.lam, delta)
    near, far = hybrid_weights(params, delta, kappa, n_trunc)

    # intervals j = -n_trunc, ..., n-2 stored at offset j + n_trunc
    m = n_trunc + n - 1
    rng = rng_for(seed)
    gauss = rng.standard_normal((m, kappa + 1)) @ _hybrid_factor(params.alpha, delta, kappa).T
    dw = np.ascontiguousarray(gauss[:, 0])

    x = scipy.signal.fftconvolve(dw, far)[n_trunc : n_trunc + n]
    i = np.arange(n)
    for k in range(1, kappa + 1):
        x += near[k - 1] * gauss[i - k + n_trunc, k]
    return Path(params.sigma * x, delta)


def kernel_norm_sq(params: GammaBssParams) -> float:
    """``||g||^2 = Gamma(2 alpha + 1) / (2 lam)**(2 alpha + 1)``."""
    a = params.alpha
    return math.gamma(2 * a + 1) / (2 * params.lam) ** (2 * a + 1)


def _quad(f, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            val, _ = scipy.integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-10, limit=500, **kw)
        except scipy.integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    return val


def _scaled_difference_sq(s, alpha: float, lam_t: float) -> float:
    """``((s+1)**a e^{-lt(s+1)} - s**a e^{-lt s})**2`` without cancellation."""
    return (s**alpha * math.exp(-lam_t * s) * math.expm1(alpha * math.log1p(1.0 / s) - lam_t)) ** 2


def variogram_gamma_bss(params: GammaBssParams, t: float) -> float:
    """Variogram ``R(t) = E[(G_{s+t} - G_s)^2] = 2 ||g||^2 (1 - r(t))`` of the Gaussian core.

    Evaluated through the equivalent form
    ``int_0^t g(u)^2 du + int_0^inf (g(u+t) - g(u))^2 du``, which avoids the
    cancellation in ``1 - r(t)`` at small lags. The second integral is taken
    in ``s = u / t`` over decades up to where the tempering has killed it.
    """
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise InvalidParameter(f"lag must be positive, got {t!r}")
    a, lam = params.alpha, params.lam
    lam_t = lam * t
    head = kernel_norm_sq(params) * scipy.special.gammainc(2 * a + 1, 2 * lam_t)

    def f(s):
        return _scaled_difference_sq(s, a, lam_t)

    if a < 0:
        # near 0 the integrand is s**(2a) times a bounded factor
        first = _quad(lambda s: f(s) * s ** (-2 * a) if s > 0 else 1.0, 0.0, 1.0, weight="alg", wvar=(2 * a, 0.0))
    else:
        first = _quad(f, 0.0, 1.0)
    edges = [1.0]
    while edges[-1] * lam_t < 50.0:
        edges.append(edges[-1] * 10.0)
    # past lam * t * s = 50 the integrand is below exp(-100) and is dropped
    parts = [first] + [_quad(f, lo, hi) for lo, hi in zip(edges, edges[1:])]
    return params.sigma**2 * (head + t ** (2 * a + 1) * math.fsum(parts))


def correlation_gamma_bss(params: GammaBssParams, t: float) -> float:
    """Correlation kernel ``r(t) = int_0^inf g(u) g(u+t) du / ||g||^2``."""
    t = float(t)
    if not (math.isfinite(t) and t >= 0):
        raise InvalidParameter(f"lag must be non-negative, got {t!r}")
    if t == 0:
        return 1.0
    a, lam = params.alpha, params.lam

    def prod(u):
        return (u + t) ** a * math.exp(-lam * (2 * u + t))

    total = _quad(prod, 0.0, t, weight="alg", wvar=(a, 0.0)) + _quad(lambda u: u**a * prod(u), t, math.inf)
    return total / kernel_norm_sq(params)
