"""Deterministic fixed-step integration over a flat state vector.

No adaptive stepping: reproducible traces matter more than efficiency here,
and the benchmark dynamics are mild enough for classical RK4 at the default
step.  The scenario runner fuses this exact stepping arithmetic into a
compiled loop; this module is the reference form and the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, NumericalIntegrityError

METHODS = ("rk4", "euler")


@dataclass(frozen=True)
class OdeSystem:
    """A pure, time-varying vector field x' = rhs(t, x) of fixed dimension."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError(f"system dimension must be >= 1, got {self.dimension}")


@dataclass(frozen=True)
class IntegrationConfig:
    step: float
    t_end: float
    method: str = "rk4"

    def __post_init__(self):
        if not np.isfinite(self.step) or self.step <= 0.0:
            raise ConfigurationError(f"step must be finite and > 0, got {self.step}")
        if not np.isfinite(self.t_end) or self.t_end <= self.step:
            raise ConfigurationError(
                f"t_end must exceed the step, got t_end={self.t_end}, step={self.step}"
            )
        if self.method not in METHODS:
            raise ConfigurationError(f"method must be one of {METHODS}, got {self.method!r}")

    @property
    def n_steps(self) -> int:
        """Step count; the horizon is padded up to an integer multiple of step."""
        return int(math.ceil(self.t_end / self.step - 1e-9))

    @property
    def t_end_padded(self) -> float:
        return self.n_steps * self.step

    @property
    def padded(self) -> bool:
        return self.t_end_padded > self.t_end + 1e-12 * self.t_end


def _check_stage(k: np.ndarray, t: float, stage: int) -> np.ndarray:
    if not np.all(np.isfinite(k)):
        raise NumericalIntegrityError(
            f"non-finite derivative at t={t!r}, stage {stage}"
        )
    return k


def step_rk4(system: OdeSystem, t: float, x: np.ndarray, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta update."""
    if h <= 0.0:
        raise ConfigurationError(f"step size must be > 0, got {h}")
    k1 = _check_stage(system.rhs(t, x), t, 1)
    k2 = _check_stage(system.rhs(t + 0.5 * h, x + (0.5 * h) * k1), t, 2)
    k3 = _check_stage(system.rhs(t + 0.5 * h, x + (0.5 * h) * k2), t, 3)
    k4 = _check_stage(system.rhs(t + h, x + h * k3), t, 4)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_euler(system: OdeSystem, t: float, x: np.ndarray, h: float) -> np.ndarray:
    if h <= 0.0:
        raise ConfigurationError(f"step size must be > 0, got {h}")
    k1 = _check_stage(system.rhs(t, x), t, 1)
    return x + h * k1


def integrate(
    system: OdeSystem,
    x0,
    config: IntegrationConfig,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
) -> np.ndarray:
    """Advance from t=0 to the (padded) horizon; observer runs after each step."""
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (system.dimension,):
        raise ConfigurationError(
            f"x0 shape {x.shape} does not match system dimension {system.dimension}"
        )
    if not np.all(np.isfinite(x)):
        raise NumericalIntegrityError("initial state has non-finite entries")
    stepper = step_rk4 if config.method == "rk4" else step_euler
    h = config.step
    for i in range(config.n_steps):
        x = stepper(system, i * h, x, h)
        if observer is not None:
            observer((i + 1) * h, x)
    return x
