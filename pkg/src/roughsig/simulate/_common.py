from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidParameter, PathTooShort


def check_grid(n, delta) -> tuple[int, float]:
    if isinstance(n, bool) or int(n) != n:
        raise InvalidParameter(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise PathTooShort(f"need at least 3 observations, got {n}")
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise InvalidParameter(f"delta must be positive and finite, got {delta!r}")
    return n, delta


def jump_cells(times: np.ndarray, sizes: np.ndarray, n: int, delta: float) -> np.ndarray:
    """Total jump size first seen at each grid time: a jump at v counts from the first ``i * delta >= v``."""
    idx = np.minimum(np.ceil(times / delta), n - 1).astype(np.intp)
    return np.bincount(idx, weights=sizes, minlength=n)


def jumps_on_grid(times: np.ndarray, sizes: np.ndarray, n: int, delta: float) -> np.ndarray:
    """Cumulative jump sum observed at ``i * delta``."""
    return np.cumsum(jump_cells(times, sizes, n, delta))
