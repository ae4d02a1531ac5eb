import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fctls import (
    ConfigurationError,
    FctResult,
    IntegrationConfig,
    LsGains,
    LsState,
    NumericalIntegrityError,
    OdeSystem,
    RegressorSample,
    fct_reconstruct,
    gradient_derivative,
    integrate,
    ls_ff_derivative,
    ls_standard_derivative,
    parameter_error,
)

BENCH_GAINS = LsGains(gamma_f=30.3, f0=4.0, chi0=6.0, k=10.0)


def sample(phi, y, t=0.0):
    return RegressorSample(t=t, y=y, phi=np.asarray(phi, dtype=float))


class TestGains:
    def test_cap_below_inverse_f0_rejected(self):
        with pytest.raises(ConfigurationError):
            LsGains(gamma_f=1.0, f0=4.0, chi0=6.0, k=0.1)

    def test_cap_at_inverse_f0_accepted(self):
        gains = LsGains(gamma_f=1.0, f0=4.0, chi0=6.0, k=0.25)
        assert gains.k == 0.25

    @pytest.mark.parametrize("bad", [dict(gamma_f=0.0), dict(f0=-1.0), dict(chi0=0.0)])
    def test_nonpositive_gains_rejected(self, bad):
        params = dict(gamma_f=1.0, f0=4.0, chi0=6.0, k=10.0)
        params.update(bad)
        with pytest.raises(ConfigurationError):
            LsGains(**params)

    def test_unknown_norm_rejected(self):
        with pytest.raises(ConfigurationError):
            LsGains(gamma_f=1.0, f0=4.0, chi0=6.0, k=10.0, matrix_norm="nuclear")


class TestForgettingFactorDerivative:
    def test_zero_regressor_is_pure_forgetting_drift(self):
        gains = LsGains(gamma_f=2.0, f0=4.0, chi0=6.0, k=10.0)
        state = LsState.initial(gains, [0.3, -0.1, 0.7])
        d_theta, d_cov, d_z = ls_ff_derivative(state, gains, sample([0.0, 0.0, 0.0], 1.0))
        chi = 6.0 * (1.0 - 0.25 / 10.0)
        assert np.all(d_theta == 0.0)
        np.testing.assert_allclose(d_cov, chi * state.F, rtol=1e-15)
        assert d_z == pytest.approx(-chi, rel=1e-15)

    def test_forgetting_rate_at_benchmark_initial_condition(self):
        # F(0) = (1/4) I with spectral norm 1/4, so chi = 6 (1 - 0.25/10) = 5.85
        state = LsState.initial(BENCH_GAINS, [0.1, 0.1, 0.1])
        _, _, d_z = ls_ff_derivative(state, BENCH_GAINS, sample([0.0, 0.0, 0.0], 0.0))
        assert -d_z / state.z == pytest.approx(5.85, abs=1e-12)

    def test_scalar_example_without_forgetting(self):
        # k = 1/f0 makes chi vanish exactly at the initial covariance
        gains = LsGains(gamma_f=1.0, f0=4.0, chi0=6.0, k=0.25)
        state = LsState(theta_hat=np.array([0.0]), F=np.array([[0.25]]), z=1.0)
        d_theta, d_cov, d_z = ls_ff_derivative(state, gains, sample([2.0], y=2.0))
        assert d_theta[0] == pytest.approx(1.0, abs=0.0)
        assert d_cov[0, 0] == pytest.approx(-0.25, abs=0.0)
        assert d_z == 0.0

    def test_frobenius_norm_option(self):
        gains = LsGains(gamma_f=1.0, f0=1.0, chi0=1.0, k=10.0, matrix_norm="frobenius")
        state = LsState.initial(gains, [0.0, 0.0, 0.0])
        _, d_cov, _ = ls_ff_derivative(state, gains, sample([0.0, 0.0, 0.0], 0.0))
        chi = 1.0 * (1.0 - np.sqrt(3.0) / 10.0)
        np.testing.assert_allclose(d_cov, chi * state.F, rtol=1e-15)

    def test_non_finite_state_rejected(self):
        state = LsState(theta_hat=np.array([np.nan]), F=np.array([[1.0]]))
        with pytest.raises(Exception):
            ls_ff_derivative(state, LsGains(1.0, 1.0, 1.0, 10.0), sample([1.0], 0.0))


class TestStandardDerivative:
    def test_zero_regressor_freezes_everything(self):
        gains = LsGains(gamma_f=1.0, f0=4.0, chi0=1.0, k=10.0)
        state = LsState.initial(gains, [1.0, 2.0, 3.0])
        d_theta, d_cov = ls_standard_derivative(state, sample([0.0, 0.0, 0.0], 5.0))
        assert np.all(d_theta == 0.0)
        assert np.all(d_cov == 0.0)

    def test_scalar_riccati_closed_form(self):
        # q=1, constant phi=c: F(t) = F0 / (1 + F0 c^2 t)
        c, f_zero, theta_true, theta0 = 2.0, 0.25, 1.3, -0.4
        y = c * theta_true

        def rhs(t, x):
            state = LsState(theta_hat=x[0:1], F=x[1:2].reshape(1, 1))
            d_theta, d_cov = ls_standard_derivative(state, sample([c], y, t=t))
            return np.array([d_theta[0], d_cov[0, 0]])

        seen = []
        integrate(
            OdeSystem(2, rhs),
            np.array([theta0, f_zero]),
            IntegrationConfig(step=1e-3, t_end=1.0),
            observer=lambda t, x: seen.append((t, x.copy())),
        )
        worst_f = 0.0
        worst_theta = 0.0
        for t, x in seen:
            f_exact = f_zero / (1.0 + f_zero * c * c * t)
            worst_f = max(worst_f, abs(x[1] - f_exact))
            # conservation: theta_tilde(t) = F(t)/F(0) * theta_tilde(0)
            theta_exact = theta_true + (f_exact / f_zero) * (theta0 - theta_true)
            worst_theta = max(worst_theta, abs(x[0] - theta_exact))
        assert worst_f <= 1e-8
        assert worst_theta <= 1e-8

    def test_conservation_along_trajectory(self):
        # F^{-1} theta_tilde is a constant of motion of the no-forgetting flow
        theta_true = np.array([1.0, -2.0])
        f_zero = 0.5

        def phi_of(t):
            return np.array([1.0 + 0.5 * np.sin(t), np.cos(2.0 * t)])

        def rhs(t, x):
            phi = phi_of(t)
            state = LsState(theta_hat=x[0:2], F=x[2:6].reshape(2, 2))
            d_theta, d_cov = ls_standard_derivative(
                state, sample(phi, float(phi @ theta_true), t=t)
            )
            return np.concatenate([d_theta, d_cov.ravel()])

        x0 = np.concatenate([np.zeros(2), (f_zero * np.eye(2)).ravel()])
        conserved = np.linalg.solve(f_zero * np.eye(2), -theta_true)
        worst = [0.0]

        def observer(t, x):
            value = np.linalg.solve(x[2:6].reshape(2, 2), x[0:2] - theta_true)
            worst[0] = max(worst[0], float(np.linalg.norm(value - conserved)))

        integrate(OdeSystem(6, rhs), x0, IntegrationConfig(step=1e-3, t_end=2.0), observer)
        assert worst[0] <= 1e-6 * (1.0 + float(np.linalg.norm(conserved)))


class TestFctReconstruct:
    def test_singular_at_initial_condition(self):
        state = LsState.initial(BENCH_GAINS, [0.1, 0.1, 0.1])
        result = fct_reconstruct(state, BENCH_GAINS, [0.1, 0.1, 0.1])
        assert result.value is None
        assert result.determinant == 0.0

    def test_scalar_reconstruction(self):
        gains = LsGains(gamma_f=1.0, f0=4.0, chi0=1.0, k=10.0)
        state = LsState(theta_hat=np.array([1.0]), F=np.array([[0.1]]), z=0.5)
        result = fct_reconstruct(state, gains, [0.2], delta_fct=1e-3)
        assert result.determinant == pytest.approx(0.8, rel=1e-15)
        assert result.value[0] == pytest.approx(1.2, rel=1e-15)

    def test_below_gate_reports_determinant_only(self):
        gains = LsGains(gamma_f=1.0, f0=4.0, chi0=1.0, k=10.0)
        state = LsState(theta_hat=np.array([1.0]), F=np.array([[0.2499]]), z=1.0)
        result = fct_reconstruct(state, gains, [0.2], delta_fct=1e-3)
        assert result.value is None
        assert result.determinant == pytest.approx(1.0 - 4.0 * 0.2499, rel=1e-12)

    def test_result_invariant_enforced(self):
        with pytest.raises(NumericalIntegrityError):
            FctResult(value=None, determinant=0.5, threshold=1e-3)

    def test_bad_delta_rejected(self):
        state = LsState.initial(BENCH_GAINS, [0.0, 0.0, 0.0])
        with pytest.raises(ConfigurationError):
            fct_reconstruct(state, BENCH_GAINS, [0.0, 0.0, 0.0], delta_fct=0.0)


class TestGradient:
    def test_zero_prediction_error(self):
        theta = np.array([1.0, 2.0])
        phi = np.array([0.5, -0.3])
        d = gradient_derivative(theta, 2.0, sample(phi, float(phi @ theta)))
        assert np.all(d == 0.0)

    def test_scalar_arithmetic(self):
        d = gradient_derivative([1.0], 2.0, sample([1.0], 3.0))
        assert d[0] == pytest.approx(4.0, abs=0.0)

    def test_unexcited_direction_never_moves(self):
        # phi always along e1: the orthogonal components are exactly constant
        theta_true = np.array([2.0, -1.0, 0.5])

        def rhs(t, x):
            phi = np.array([1.5, 0.0, 0.0])
            return gradient_derivative(x, 2.0, sample(phi, float(phi @ theta_true), t=t))

        x0 = np.array([0.3, 0.7, -0.2])
        tail = []
        final = integrate(
            OdeSystem(3, rhs),
            x0,
            IntegrationConfig(step=1e-2, t_end=3.0),
            observer=lambda t, x: tail.append(x[1:].copy()),
        )
        assert all(np.array_equal(v, x0[1:]) for v in tail)
        assert abs(final[0] - theta_true[0]) < 1e-3


class TestParameterError:
    def test_zero_for_exact_estimate(self):
        assert parameter_error([2.0, 3.0, 1.0], [2.0, 3.0, 1.0]) == 0.0

    def test_benchmark_initial_error(self):
        expected = np.sqrt(1.9**2 + 2.9**2 + 0.9**2)
        assert parameter_error([0.1, 0.1, 0.1], [2.0, 3.0, 1.0]) == pytest.approx(
            expected, rel=1e-15
        )

    @settings(deadline=None, max_examples=50)
    @given(
        st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3),
        st.permutations([0, 1, 2]),
    )
    def test_permutation_invariance(self, a, b, perm):
        a, b = np.array(a), np.array(b)
        perm = list(perm)
        assert parameter_error(a, b) == pytest.approx(
            parameter_error(a[perm], b[perm]), rel=1e-12, abs=1e-12
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            parameter_error([1.0, 2.0], [1.0, 2.0, 3.0])


class TestStateValidation:
    def test_initial_state_is_valid(self):
        state = LsState.initial(BENCH_GAINS, [0.1, 0.1, 0.1])
        state.validate()
        assert np.all(state.F == np.eye(3) / 4.0)
        assert state.z == 1.0

    def test_asymmetric_covariance_rejected(self):
        state = LsState(theta_hat=np.zeros(2), F=np.array([[1.0, 0.1], [0.2, 1.0]]))
        with pytest.raises(NumericalIntegrityError):
            state.validate()

    def test_indefinite_covariance_rejected(self):
        state = LsState(theta_hat=np.zeros(2), F=np.diag([1.0, -0.1]))
        with pytest.raises(NumericalIntegrityError):
            state.validate()

    def test_z_out_of_range_rejected(self):
        state = LsState(theta_hat=np.zeros(1), F=np.eye(1), z=1.5)
        with pytest.raises(NumericalIntegrityError):
            state.validate()
