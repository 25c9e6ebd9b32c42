"""Model specifications.

The leaf parameter classes double as model specifications; ``Mixture`` and
``ExpTransform`` compose them. Every class validates itself on
construction and round-trips through plain dictionaries (``to_dict`` /
:func:`spec_from_dict`) for run manifests.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Union

from ..errors import AsymmetricHighActivity, InvalidParameter


def _positive(name: str, value) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameter(f"{name} must be positive and finite, got {value!r}")
    return value


def _set(obj, **values):
    for k, v in values.items():
        object.__setattr__(obj, k, v)


@dataclass(frozen=True)
class GammaBssParams:
    """Gamma kernel ``g(x) = x**alpha * exp(-lam * x)`` with constant volatility."""

    alpha: float
    lam: float = 1.0
    sigma: float = 1.0

    model = "gbss"

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (-0.5 < alpha < 0.5) or alpha == 0.0:
            raise InvalidParameter(
                f"alpha must lie in (-1/2, 1/2) excluding 0, got {self.alpha!r}"
            )
        _set(self, alpha=alpha, lam=_positive("lambda", self.lam), sigma=_positive("sigma", self.sigma))

    @property
    def hurst(self) -> float:
        return self.alpha + 0.5

    @property
    def stationary_sd(self) -> float:
        """Standard deviation of the stationary process, sigma * ||g||."""
        a, lam = self.alpha, self.lam
        return self.sigma * math.sqrt(math.gamma(2 * a + 1) / (2 * lam) ** (2 * a + 1))

    def to_dict(self) -> dict:
        return {"model": self.model, **asdict(self)}


@dataclass(frozen=True)
class FbmParams:
    hurst: float
    scale: float = 1.0

    model = "fbm"

    def __post_init__(self):
        hurst = float(self.hurst)
        if not 0 < hurst < 1:
            raise InvalidParameter(f"hurst must lie in (0, 1), got {self.hurst!r}")
        _set(self, hurst=hurst, scale=_positive("scale", self.scale))

    def to_dict(self) -> dict:
        return {"model": self.model, **asdict(self)}


@dataclass(frozen=True)
class TemperedStableParams:
    """Levy density ``c * exp(-lam |x|) |x|**(-1-beta)`` on each half-line."""

    beta: float
    c_pos: float = 1.0
    c_neg: float = 1.0
    lambda_pos: float = 1.0
    lambda_neg: float = 1.0

    model = "ts"

    def __post_init__(self):
        beta = float(self.beta)
        if not 0 < beta < 2:
            raise InvalidParameter(f"beta must lie in (0, 2), got {self.beta!r}")
        c_pos, c_neg = float(self.c_pos), float(self.c_neg)
        if not (math.isfinite(c_pos) and math.isfinite(c_neg)) or c_pos < 0 or c_neg < 0:
            raise InvalidParameter("c_pos and c_neg must be non-negative")
        if c_pos + c_neg <= 0:
            raise InvalidParameter("c_pos + c_neg must be positive")
        lp, ln = _positive("lambda_pos", self.lambda_pos), _positive("lambda_neg", self.lambda_neg)
        if beta >= 1 and (c_pos != c_neg or lp != ln):
            raise AsymmetricHighActivity(
                f"beta={beta:g} >= 1 requires symmetric parameters (c_pos == c_neg, "
                "lambda_pos == lambda_neg) so that the compensators cancel"
            )
        _set(self, beta=beta, c_pos=c_pos, c_neg=c_neg, lambda_pos=lp, lambda_neg=ln)

    @classmethod
    def symmetric(cls, beta: float, c: float = 1.0, lam: float = 1.0) -> "TemperedStableParams":
        return cls(beta, c, c, lam, lam)

    def sides(self):
        """``(sign, c, lambda)`` for each half-line with positive mass."""
        out = []
        if self.c_pos > 0:
            out.append((1.0, self.c_pos, self.lambda_pos))
        if self.c_neg > 0:
            out.append((-1.0, self.c_neg, self.lambda_neg))
        return out

    def to_dict(self) -> dict:
        return {"model": self.model, **asdict(self)}


@dataclass(frozen=True)
class ConstantJumps:
    size: float

    def __post_init__(self):
        if not math.isfinite(float(self.size)):
            raise InvalidParameter("jump size must be finite")
        _set(self, size=float(self.size))


@dataclass(frozen=True)
class NormalJumps:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        mean, sd = float(self.mean), float(self.sd)
        if not (math.isfinite(mean) and math.isfinite(sd)) or sd < 0:
            raise InvalidParameter(f"normal jump sizes need a finite mean and sd >= 0, got sd={sd!r}")
        _set(self, mean=mean, sd=sd)


JumpSizes = Union[ConstantJumps, NormalJumps]


@dataclass(frozen=True)
class PoissonParams:
    rate: float
    jump_sizes: JumpSizes = field(default_factory=NormalJumps)

    model = "poisson"

    def __post_init__(self):
        _set(self, rate=_positive("rate", self.rate))
        if not isinstance(self.jump_sizes, (ConstantJumps, NormalJumps)):
            raise InvalidParameter(f"unsupported jump size law {self.jump_sizes!r}")

    def to_dict(self) -> dict:
        js = self.jump_sizes
        if isinstance(js, ConstantJumps):
            sizes = {"law": "constant", "size": js.size}
        else:
            sizes = {"law": "normal", "mean": js.mean, "sd": js.sd}
        return {"model": self.model, "rate": self.rate, "jump_sizes": sizes}


CONTINUOUS = (GammaBssParams, FbmParams)
JUMP = (TemperedStableParams, PoissonParams)


@dataclass(frozen=True)
class ExpTransform:
    """Pointwise ``exp`` of the inner model, e.g. exponential fBm volatility."""

    inner: "ModelSpec"

    model = "exp"

    def __post_init__(self):
        if not isinstance(self.inner, MODEL_TYPES):
            raise InvalidParameter(f"ExpTransform needs a model spec, got {self.inner!r}")

    def to_dict(self) -> dict:
        return {"model": self.model, "inner": self.inner.to_dict()}


def _is_continuous(spec) -> bool:
    if isinstance(spec, ExpTransform):
        return _is_continuous(spec.inner)
    return isinstance(spec, CONTINUOUS)


@dataclass(frozen=True)
class Mixture:
    """Continuous model plus an independent jump model, ``Z = X + Y``."""

    continuous: "ModelSpec"
    jump: "ModelSpec"

    model = "mix"

    def __post_init__(self):
        if not _is_continuous(self.continuous):
            raise InvalidParameter(
                f"the first mixture member must be a continuous model, got {type(self.continuous).__name__}"
            )
        if not isinstance(self.jump, JUMP):
            raise InvalidParameter(
                f"the second mixture member must be a jump model, got {type(self.jump).__name__}"
            )

    def to_dict(self) -> dict:
        return {"model": self.model, "continuous": self.continuous.to_dict(), "jump": self.jump.to_dict()}


ModelSpec = Union[GammaBssParams, FbmParams, TemperedStableParams, PoissonParams, Mixture, ExpTransform]
MODEL_TYPES = (GammaBssParams, FbmParams, TemperedStableParams, PoissonParams, Mixture, ExpTransform)


def spec_from_dict(data: dict) -> ModelSpec:
    data = dict(data)
    model = data.pop("model", None)
    if model == "gbss":
        return GammaBssParams(**data)
    if model == "fbm":
        return FbmParams(**data)
    if model == "ts":
        return TemperedStableParams(**data)
    if model == "poisson":
        sizes = dict(data.pop("jump_sizes"))
        law = sizes.pop("law")
        if law == "constant":
            js = ConstantJumps(**sizes)
        elif law == "normal":
            js = NormalJumps(**sizes)
        else:
            raise InvalidParameter(f"unknown jump size law {law!r}")
        return PoissonParams(jump_sizes=js, **data)
    if model == "mix":
        return Mixture(spec_from_dict(data["continuous"]), spec_from_dict(data["jump"]))
    if model == "exp":
        return ExpTransform(spec_from_dict(data["inner"]))
    raise InvalidParameter(f"unknown model {model!r}")


def describe(spec: ModelSpec) -> str:
    if isinstance(spec, GammaBssParams):
        return f"gamma-BSS(alpha={spec.alpha:g}, lambda={spec.lam:g}, sigma={spec.sigma:g})"
    if isinstance(spec, FbmParams):
        return f"fBm(H={spec.hurst:g}, scale={spec.scale:g})"
    if isinstance(spec, TemperedStableParams):
        return (
            f"tempered-stable(beta={spec.beta:g}, c=({spec.c_pos:g},{spec.c_neg:g}), "
            f"lambda=({spec.lambda_pos:g},{spec.lambda_neg:g}))"
        )
    if isinstance(spec, PoissonParams):
        js = spec.jump_sizes
        law = f"const({js.size:g})" if isinstance(js, ConstantJumps) else f"N({js.mean:g},{js.sd:g}^2)"
        return f"poisson(rate={spec.rate:g}, sizes={law})"
    if isinstance(spec, Mixture):
        return f"{describe(spec.continuous)} + {describe(spec.jump)}"
    if isinstance(spec, ExpTransform):
        return f"exp[{describe(spec.inner)}]"
    raise InvalidParameter(f"not a model spec: {spec!r}")
