import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from roughsig.variation import Path

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance criteria report their outcome here; printed at the end of the run
CRITERIA: dict[int, list[tuple[bool, str]]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    CRITERIA.setdefault(number, []).append((bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        for ok, detail in CRITERIA[number]:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def brownian(n: int, seed: int, delta: float | None = None) -> Path:
    delta = 1.0 / n if delta is None else delta
    rng = np.random.default_rng(seed)
    steps = math.sqrt(delta) * rng.standard_normal(n - 1)
    return Path(np.concatenate([[0.0], np.cumsum(steps)]), delta)


def naive_variation(values, p: float, nu: int = 1) -> float:
    """Reference loop: one correctly rounded sum per phase, then over phases."""
    phases = [[] for _ in range(nu)]
    for i in range(nu, len(values)):
        x = abs(values[i] - values[i - nu])
        phases[(i - nu) % nu].append(0.0 if x == 0 else float(np.exp(p * np.log(x))))
    return math.fsum(math.fsum(terms) for terms in phases)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
