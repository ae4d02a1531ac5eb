"""Continuous-time least-squares estimators and the algebraic reconstruction.

Two differential estimators are provided behind one (state, sample) ->
state-derivative convention, so integrators treat them uniformly and further
estimators can be plugged in later:

* ``ls_ff_derivative`` -- least squares with a covariance-norm-driven
  forgetting factor,
* ``ls_standard_derivative`` -- the classical no-forgetting specialization,
* ``gradient_derivative`` -- a plain gradient baseline for comparison runs.

``fct_reconstruct`` is purely algebraic: once the regressor has been
intervally exciting, the matrix ``I - z*f0*F`` becomes invertible and solving
``(I - z*f0*F) x = theta_hat - z*f0*F theta0`` returns the true parameter
vector exactly, not merely asymptotically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputDataError, NumericalIntegrityError
from .linalg import SYMMETRY_TOL, asymmetry, min_eigenvalue, symmetrize
from .regression import RegressorSample, as_param_vector

DEFAULT_DELTA_FCT = 1e-3

MATRIX_NORMS = ("spectral", "frobenius")


@dataclass(frozen=True)
class LsGains:
    """Tuning gains of the forgetting-factor estimator.

    ``k`` caps the covariance norm; it must be at least ``1/f0`` so the cap
    already holds at the initial covariance ``F(0) = (1/f0) I``.
    """

    gamma_f: float
    f0: float
    chi0: float
    k: float
    matrix_norm: str = "spectral"

    def __post_init__(self):
        for name in ("gamma_f", "f0", "chi0", "k"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise ConfigurationError(f"gain {name} must be finite and > 0, got {value}")
        if self.k < 1.0 / self.f0:
            raise ConfigurationError(
                f"gains must satisfy k >= 1/f0; got k={self.k}, 1/f0={1.0 / self.f0}"
            )
        if self.matrix_norm not in MATRIX_NORMS:
            raise ConfigurationError(
                f"matrix_norm must be one of {MATRIX_NORMS}, got {self.matrix_norm!r}"
            )

    @property
    def use_frobenius(self) -> bool:
        return self.matrix_norm == "frobenius"


@dataclass
class LsState:
    """State of either LS estimator: estimate, covariance, forgetting integral."""

    theta_hat: np.ndarray
    F: np.ndarray
    z: float = 1.0
    t: float = 0.0

    @classmethod
    def initial(cls, gains: LsGains, theta_hat0) -> "LsState":
        theta0 = as_param_vector(theta_hat0, "theta_hat0")
        q = theta0.shape[0]
        return cls(theta_hat=theta0.copy(), F=np.eye(q) / gains.f0, z=1.0, t=0.0)

    @property
    def dimension(self) -> int:
        return self.theta_hat.shape[0]

    def validate(self) -> None:
        """Check the invariants the dynamics are supposed to preserve."""
        if not np.all(np.isfinite(self.theta_hat)) or not np.all(np.isfinite(self.F)):
            raise NumericalIntegrityError("estimator state has non-finite entries")
        if asymmetry(self.F) > SYMMETRY_TOL:
            raise NumericalIntegrityError(
                f"covariance asymmetry {asymmetry(self.F):.3e} exceeds {SYMMETRY_TOL:.0e}"
            )
        if min_eigenvalue(symmetrize(self.F)) <= 0.0:
            raise NumericalIntegrityError("covariance is not positive definite")
        if not (0.0 < self.z <= 1.0):
            raise NumericalIntegrityError(f"z must lie in (0, 1], got {self.z}")


@dataclass(frozen=True)
class FctResult:
    """Outcome of one reconstruction attempt.

    ``value`` is present iff ``determinant >= threshold``; the determinant is
    always reported so callers can watch the gate approach from below.
    """

    value: Optional[np.ndarray]
    determinant: float
    threshold: float

    def __post_init__(self):
        if (self.value is not None) != (self.determinant >= self.threshold):
            raise NumericalIntegrityError(
                "FctResult value must be present exactly when the gate is open"
            )


def _check_pair(state: LsState, sample: RegressorSample) -> None:
    if sample.dimension != state.dimension:
        raise ConfigurationError(
            f"sample dimension {sample.dimension} != state dimension {state.dimension}"
        )
    if not np.all(np.isfinite(state.theta_hat)) or not np.all(np.isfinite(state.F)):
        raise InputDataError("estimator state has non-finite entries")


def ls_ff_derivative(
    state: LsState, gains: LsGains, sample: RegressorSample
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Forgetting-factor LS rates (d theta_hat, d F, d z).

    d theta_hat = gamma_f F phi (y - phi' theta_hat)
    d F         = -gamma_f F phi phi' F + chi F
    d z         = -chi z,   chi = chi0 (1 - ||F|| / k)
    """
    _check_pair(state, sample)
    d_theta, d_cov, d_z = kernels.ls_ff_rates(
        np.ascontiguousarray(state.theta_hat),
        np.ascontiguousarray(state.F),
        state.z,
        sample.phi,
        sample.y,
        gains.gamma_f,
        gains.chi0,
        gains.k,
        gains.use_frobenius,
    )
    return d_theta, d_cov, float(d_z)


def ls_standard_derivative(
    state: LsState, sample: RegressorSample
) -> Tuple[np.ndarray, np.ndarray]:
    """No-forgetting LS rates: d theta_hat = F phi (y - phi' theta_hat),
    d F = -F phi phi' F."""
    _check_pair(state, sample)
    return kernels.ls_standard_rates(
        np.ascontiguousarray(state.theta_hat),
        np.ascontiguousarray(state.F),
        sample.phi,
        sample.y,
    )


def gradient_derivative(theta_hat, gamma: float, sample: RegressorSample) -> np.ndarray:
    """Plain gradient baseline: d theta_hat = gamma phi (y - phi' theta_hat)."""
    theta_hat = as_param_vector(theta_hat, "theta_hat")
    if gamma <= 0.0 or not np.isfinite(gamma):
        raise ConfigurationError(f"gradient gain must be finite and > 0, got {gamma}")
    if sample.dimension != theta_hat.shape[0]:
        raise ConfigurationError(
            f"sample dimension {sample.dimension} != estimate dimension {theta_hat.shape[0]}"
        )
    return kernels.gradient_rate(theta_hat, sample.phi, sample.y, gamma)


def fct_reconstruct(
    state: LsState,
    gains: LsGains,
    theta0,
    delta_fct: float = DEFAULT_DELTA_FCT,
) -> FctResult:
    """Attempt the algebraic reconstruction from the current LS-FF state.

    ``theta0`` must be the same initial estimate the estimator was started
    from.  Below the determinant gate no value is returned; the determinant
    itself is always reported for diagnostics.
    """
    if delta_fct <= 0.0 or not np.isfinite(delta_fct):
        raise ConfigurationError(f"delta_fct must be finite and > 0, got {delta_fct}")
    theta0 = as_param_vector(theta0, "theta0")
    if theta0.shape[0] != state.dimension:
        raise ConfigurationError(
            f"theta0 dimension {theta0.shape[0]} != state dimension {state.dimension}"
        )
    try:
        ok, det, value = kernels.fct_evaluate(
            np.ascontiguousarray(state.theta_hat),
            np.ascontiguousarray(state.F),
            state.z,
            gains.f0,
            theta0,
            delta_fct,
            False,
        )
    except np.linalg.LinAlgError as exc:
        gate = np.eye(state.dimension) - state.z * gains.f0 * state.F
        raise NumericalIntegrityError(
            f"reconstruction solve failed despite open gate "
            f"(condition estimate {np.linalg.cond(gate):.3e})"
        ) from exc
    return FctResult(value=value if ok else None, determinant=float(det), threshold=delta_fct)


def parameter_error(theta_hat, theta_true) -> float:
    """Euclidean norm of the estimation error theta_hat - theta_true."""
    a = as_param_vector(theta_hat, "theta_hat")
    b = as_param_vector(theta_true, "theta_true")
    if a.shape != b.shape:
        raise ConfigurationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))
