import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fctls import NumericalIntegrityError, min_eigenvalue, spectral_norm, symmetrize


def charpoly_min_eig_3x3(m):
    """Independent oracle: smallest real root of the characteristic cubic.

    Coefficients are assembled by hand (trace, principal 2x2 minors, Sarrus
    determinant), so no eigenvalue routine is involved.
    """
    a, b, c = m[0]
    _, d, e = m[1]
    f = m[2, 2]
    trace = a + d + f
    minors = (a * d - b * b) + (a * f - c * c) + (d * f - e * e)
    det = (
        a * (d * f - e * e)
        - b * (b * f - e * c)
        + c * (b * e - d * c)
    )
    roots = np.roots([1.0, -trace, minors, -det])
    return float(np.min(roots.real))


def sym_entries(q):
    finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
    return st.lists(finite, min_size=q * (q + 1) // 2, max_size=q * (q + 1) // 2)


def build_sym(entries, q):
    m = np.zeros((q, q))
    k = 0
    for i in range(q):
        for j in range(i, q):
            m[i, j] = entries[k]
            m[j, i] = entries[k]
            k += 1
    return m


def test_identity():
    assert min_eigenvalue(np.eye(3)) == pytest.approx(1.0, abs=1e-14)


def test_diagonal():
    assert min_eigenvalue(np.diag([2.0, 3.0, 1.0])) == pytest.approx(1.0, abs=1e-14)


def test_one_by_one():
    assert min_eigenvalue(np.array([[-4.5]])) == pytest.approx(-4.5, abs=1e-14)


def test_two_by_two_closed_form():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert min_eigenvalue(m) == pytest.approx(1.0, abs=1e-12)


@settings(deadline=None, max_examples=100)
@given(sym_entries(3))
def test_matches_characteristic_polynomial_oracle(entries):
    m = build_sym(entries, 3)
    # the polynomial-root oracle itself loses ~sqrt(eps) accuracy at repeated
    # roots, so restrict the comparison to well-separated spectra (judged from
    # the oracle's own roots, independent of the path under test)
    a, b, c = m[0]
    _, d, e = m[1]
    f = m[2, 2]
    roots = np.sort(
        np.roots([
            1.0,
            -(a + d + f),
            (a * d - b * b) + (a * f - c * c) + (d * f - e * e),
            -(a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)),
        ]).real
    )
    assume(float(np.min(np.diff(roots))) > 1e-2)
    assert min_eigenvalue(m) == pytest.approx(charpoly_min_eig_3x3(m), abs=1e-10)


def test_exact_value_at_repeated_eigenvalue():
    # eigenvalues {-1, -1, 1}: the implementation must not inherit the
    # polynomial oracle's degraded accuracy at double roots
    m = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
    assert min_eigenvalue(m) == pytest.approx(-1.0, abs=1e-12)


def test_fixed_oracle_case():
    m = np.array([[1.0, 0.3, -0.2], [0.3, 2.0, 0.5], [-0.2, 0.5, -1.0]])
    assert min_eigenvalue(m) == pytest.approx(charpoly_min_eig_3x3(m), abs=1e-12)


def test_symmetrizes_small_asymmetry():
    m = np.array([[1.0, 0.5], [0.5 + 5e-11, 2.0]])
    sym = symmetrize(m)
    assert min_eigenvalue(m) == pytest.approx(float(np.linalg.eigvalsh(sym)[0]), abs=1e-14)


def test_rejects_large_asymmetry():
    m = np.array([[1.0, 0.5], [0.5 + 1e-8, 2.0]])
    with pytest.raises(NumericalIntegrityError):
        min_eigenvalue(m)


def test_rejects_non_square():
    with pytest.raises(NumericalIntegrityError):
        min_eigenvalue(np.ones((2, 3)))


def test_rejects_non_finite():
    m = np.array([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(NumericalIntegrityError):
        min_eigenvalue(m)


@settings(deadline=None, max_examples=50)
@given(sym_entries(3))
def test_spectral_norm_matches_numpy(entries):
    m = build_sym(entries, 3)
    assert spectral_norm(m) == pytest.approx(float(np.linalg.norm(m, 2)), abs=1e-10)
