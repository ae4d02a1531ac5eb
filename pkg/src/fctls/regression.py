"""Data model of the linear regression equation and the excitation monitor.

The regression identity is ``y(t) = phi(t)' theta`` with theta constant and
unknown.  Identifiability is certified by interval excitation: the running
Gram integral of the regressor must dominate ``rho * I`` at some finite time.
The monitor accumulates that integral by trapezoidal quadrature and records
the first crossing time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputDataError
from .linalg import min_eigenvalue

DEFAULT_RHO_THRESHOLD = 1e-3


def as_param_vector(values, name: str = "parameter vector") -> np.ndarray:
    """Validate and return a finite 1-D float vector (q >= 1)."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigurationError(f"{name} must be a 1-D vector with q >= 1")
    if not np.all(np.isfinite(arr)):
        raise InputDataError(f"{name} has non-finite entries: {arr!r}")
    return arr


@dataclass(frozen=True)
class RegressorSample:
    """One timestamped evaluation (y, phi) of the regression equation."""

    t: float
    y: float
    phi: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t < 0.0:
            raise InputDataError(f"sample time must be finite and >= 0, got {self.t}")
        if not np.isfinite(self.y):
            raise InputDataError(f"sample output must be finite, got {self.y}")
        phi = as_param_vector(self.phi, "regressor phi")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def dimension(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True)
class ExcitationRecord:
    """Snapshot of the interval-excitation monitor.

    ``gram`` is the trapezoidal accumulation of the integral of phi phi' from
    time zero up to ``t``; ``t_c`` is set exactly once, at the first sample
    where ``min_eig`` reaches ``rho_threshold``.  ``last_outer`` carries the
    integrand at ``t`` so the next trapezoid has its left endpoint.
    """

    gram: np.ndarray
    min_eig: float
    rho_threshold: float
    t_c: Optional[float]
    t: float
    last_outer: np.ndarray

    @classmethod
    def from_first_sample(
        cls, sample: RegressorSample, rho_threshold: float = DEFAULT_RHO_THRESHOLD
    ) -> "ExcitationRecord":
        if rho_threshold <= 0.0:
            raise ConfigurationError(f"rho_threshold must be > 0, got {rho_threshold}")
        q = sample.dimension
        gram = np.zeros((q, q))
        outer = kernels.outer_product(sample.phi)
        return cls(
            gram=gram,
            min_eig=0.0,
            rho_threshold=rho_threshold,
            t_c=None,
            t=sample.t,
            last_outer=outer,
        )

    @property
    def dimension(self) -> int:
        return self.gram.shape[0]


def gram_update(record: ExcitationRecord, sample: RegressorSample, dt: float) -> ExcitationRecord:
    """Advance the monitor by one sample, integrating phi phi' over [t, t+dt]."""
    if not np.isfinite(dt) or dt <= 0.0:
        raise ConfigurationError(f"dt must be finite and > 0, got {dt}")
    if sample.dimension != record.dimension:
        raise ConfigurationError(
            f"sample dimension {sample.dimension} != monitor dimension {record.dimension}"
        )
    new_outer = kernels.outer_product(sample.phi)
    gram = kernels.gram_step(record.gram, record.last_outer, new_outer, dt)
    low = min_eigenvalue(gram)
    t_new = record.t + dt
    t_c = record.t_c
    if t_c is None and low >= record.rho_threshold:
        t_c = t_new
    return replace(
        record, gram=gram, min_eig=low, t_c=t_c, t=t_new, last_outer=new_outer
    )


def is_identifiable(record: ExcitationRecord) -> bool:
    """True iff the accumulated excitation certifies identifiability."""
    return record.min_eig >= record.rho_threshold


class ExcitationMonitor:
    """Single-writer convenience wrapper around :class:`ExcitationRecord`.

    One update stream feeds it; the returned records are immutable snapshots
    that may be shared freely.
    """

    def __init__(self, first_sample: RegressorSample,
                 rho_threshold: float = DEFAULT_RHO_THRESHOLD):
        self._record = ExcitationRecord.from_first_sample(first_sample, rho_threshold)

    @property
    def record(self) -> ExcitationRecord:
        return self._record

    def update(self, sample: RegressorSample, dt: float) -> ExcitationRecord:
        self._record = gram_update(self._record, sample, dt)
        return self._record
