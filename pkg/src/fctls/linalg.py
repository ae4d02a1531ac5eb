"""Small symmetric-matrix helpers used by the excitation monitor and tests."""

import numpy as np

from . import kernels
from .errors import NumericalIntegrityError

SYMMETRY_TOL = 1e-10


def symmetrize(m: np.ndarray) -> np.ndarray:
    """(m + m.T)/2 -- applied before every eigenvalue evaluation."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def asymmetry(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(m - m.T))) if m.size else 0.0


def min_eigenvalue(m: np.ndarray, symmetry_tol: float = SYMMETRY_TOL) -> float:
    """Smallest eigenvalue of a (nominally) symmetric matrix.

    The input is symmetrized before evaluation; asymmetry beyond
    ``symmetry_tol`` (entrywise) means some upstream accumulation went wrong
    and raises :class:`NumericalIntegrityError` instead of guessing.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NumericalIntegrityError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalIntegrityError("matrix has non-finite entries")
    skew = asymmetry(m)
    if skew > symmetry_tol:
        raise NumericalIntegrityError(
            f"matrix asymmetry {skew:.3e} exceeds tolerance {symmetry_tol:.3e}"
        )
    lo, _ = kernels.sym_eig_bounds(np.ascontiguousarray(m))
    return float(lo)


def spectral_norm(m: np.ndarray, symmetry_tol: float = SYMMETRY_TOL) -> float:
    """Induced-2 norm of a symmetric matrix (largest |eigenvalue|)."""
    m = np.asarray(m, dtype=float)
    skew = asymmetry(m)
    if skew > symmetry_tol:
        raise NumericalIntegrityError(
            f"matrix asymmetry {skew:.3e} exceeds tolerance {symmetry_tol:.3e}"
        )
    return float(kernels.spectral_norm_sym(np.ascontiguousarray(m)))
