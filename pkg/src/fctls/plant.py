"""Benchmark plant: second-order stable LTI system with first-order filters.

The plant is x1' = x2, x2' = -theta1 x1 - theta2 x2 + theta3 u.  Passing both
sides of the x2 equation through the filter 1/(p + lambda) (zero initial
filter states) turns it into the regression identity y = phi' theta with

    phi = (H[-x1], H[-x2], H[u])        (filter states f1, f2, f3)
    y   = x2 - lambda * H[x2]           (filter state fy)

so no measured signal is ever differentiated.  Measurement noise, when
enabled, is added to y only and held constant over each integration step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputDataError
from .regression import RegressorSample, as_param_vector

INPUT_KINDS = ("constant", "custom")


@dataclass(frozen=True)
class NoiseConfig:
    enabled: bool = False
    std_dev: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.std_dev) or self.std_dev < 0.0:
            raise ConfigurationError(f"noise std_dev must be >= 0, got {self.std_dev}")


@dataclass(frozen=True)
class PlantConfig:
    """Plant parameters, filter pole, input signal and noise model."""

    theta_true: np.ndarray
    lam: float = 1.0
    input_kind: str = "constant"
    u_level: float = 5.0
    waveform: Optional[Callable[[float], float]] = None
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        theta = as_param_vector(self.theta_true, "plant.theta")
        if theta.shape[0] != 3:
            raise ConfigurationError(
                f"the benchmark plant has exactly 3 parameters, got {theta.shape[0]}"
            )
        theta.setflags(write=False)
        object.__setattr__(self, "theta_true", theta)
        if not np.isfinite(self.lam) or self.lam <= 0.0:
            raise ConfigurationError(f"filter pole lambda must be > 0, got {self.lam}")
        if self.input_kind not in INPUT_KINDS:
            raise ConfigurationError(
                f"plant.input must be one of {INPUT_KINDS}, got {self.input_kind!r}"
            )
        if self.input_kind == "custom" and self.waveform is None:
            raise ConfigurationError("custom input requires a waveform callable")
        if not np.isfinite(self.u_level):
            raise ConfigurationError(f"u_level must be finite, got {self.u_level}")

    def input_fn(self) -> Callable[[float], float]:
        if self.input_kind == "constant":
            level = self.u_level
            return lambda t: level
        return self.waveform


@dataclass(frozen=True)
class PlantState:
    """Plant states (x1, x2), regressor filter states (f1, f2, f3) and the
    output filter state fy.  All start at zero."""

    x1: float = 0.0
    x2: float = 0.0
    f1: float = 0.0
    f2: float = 0.0
    f3: float = 0.0
    fy: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.f1, self.f2, self.f3, self.fy])

    @classmethod
    def from_array(cls, arr) -> "PlantState":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (6,):
            raise ConfigurationError(f"plant state needs 6 entries, got shape {arr.shape}")
        return cls(*arr)


def plant_derivative(state: PlantState, config: PlantConfig, t: float) -> PlantState:
    """Time derivative of the plant/filter state under the configured input."""
    arr = state.as_array()
    if not np.all(np.isfinite(arr)):
        raise InputDataError("plant state has non-finite entries")
    u = config.input_fn()(t)
    rates = kernels.plant_rates(arr, config.theta_true, config.lam, float(u))
    return PlantState.from_array(rates)


def emit_sample(
    state: PlantState, config: PlantConfig, t: float, noise_draw: float = 0.0
) -> RegressorSample:
    """Measured sample at time t; the held noise draw is added to y."""
    arr = state.as_array()
    y, phi = kernels.plant_emit(arr, config.lam)
    if config.noise.enabled:
        y = y + noise_draw
    return RegressorSample(t=t, y=float(y), phi=phi)


def noise_stream(config: NoiseConfig, step_count: int) -> np.ndarray:
    """Seeded zero-mean Gaussian draws, one per integration step."""
    if not config.enabled:
        raise ConfigurationError("noise_stream requires noise to be enabled")
    if step_count < 0:
        raise ConfigurationError(f"step_count must be >= 0, got {step_count}")
    rng = np.random.default_rng(config.seed)
    return rng.normal(0.0, config.std_dev, step_count)
