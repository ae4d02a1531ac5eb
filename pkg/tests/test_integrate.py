import math
from dataclasses import replace

import numpy as np
import pytest

from fctls import (
    ConfigurationError,
    IntegrationConfig,
    NumericalIntegrityError,
    OdeSystem,
    integrate,
    preset,
    simulate_scenario,
    step_euler,
    step_rk4,
)

EXP_SYSTEM = OdeSystem(1, lambda t, x: x)


def exp_error(h, method="rk4"):
    final = integrate(EXP_SYSTEM, np.array([1.0]), IntegrationConfig(h, 1.0, method))
    return abs(final[0] - math.e)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(step=0.0, t_end=1.0), dict(step=0.1, t_end=0.1), dict(step=0.1, t_end=1.0, method="rk5")],
    )
    def test_invalid_configs(self, kwargs):
        with pytest.raises(ConfigurationError):
            IntegrationConfig(**kwargs)

    def test_exact_multiple_is_not_padded(self):
        config = IntegrationConfig(step=0.1, t_end=1.0)
        assert config.n_steps == 10
        assert not config.padded

    def test_horizon_padded_up_to_step_multiple(self):
        config = IntegrationConfig(step=0.1, t_end=1.05)
        assert config.n_steps == 11
        assert config.padded
        assert config.t_end_padded == pytest.approx(1.1, rel=1e-12)

    def test_benchmark_step_count(self):
        assert IntegrationConfig(step=1e-4, t_end=10.0).n_steps == 100000


class TestStepping:
    def test_zero_field_keeps_state(self):
        system = OdeSystem(2, lambda t, x: np.zeros(2))
        x0 = np.array([1.5, -2.5])
        calls = []
        final = integrate(
            system, x0, IntegrationConfig(0.1, 1.0), observer=lambda t, x: calls.append(t)
        )
        assert np.array_equal(final, x0)
        assert len(calls) == 10

    def test_observer_times_strictly_increasing_constant_spacing(self):
        times = []
        integrate(
            EXP_SYSTEM,
            np.array([1.0]),
            IntegrationConfig(0.05, 0.5),
            observer=lambda t, x: times.append(t),
        )
        diffs = np.diff([0.0] + times)
        assert np.all(np.array(times[1:]) > np.array(times[:-1]))
        np.testing.assert_allclose(diffs, 0.05, rtol=1e-12)

    def test_single_rk4_step_matches_exponential(self):
        out = step_rk4(EXP_SYSTEM, 0.0, np.array([1.0]), 0.01)
        assert abs(out[0] - math.exp(0.01)) <= 1e-10

    def test_euler_step(self):
        out = step_euler(EXP_SYSTEM, 0.0, np.array([1.0]), 0.01)
        assert out[0] == pytest.approx(1.01, rel=1e-15)

    def test_determinism_bitwise(self):
        def rhs(t, x):
            return np.array([math.sin(t) - 0.3 * x[0]])

        system = OdeSystem(1, rhs)
        config = IntegrationConfig(1e-3, 1.0)
        a = integrate(system, np.array([0.2]), config)
        b = integrate(system, np.array([0.2]), config)
        assert np.array_equal(a, b)

    def test_non_finite_stage_reports_time_and_stage(self):
        def rhs(t, x):
            return np.array([np.nan]) if t > 0.5 else x

        with pytest.raises(NumericalIntegrityError, match="stage"):
            integrate(OdeSystem(1, rhs), np.array([1.0]), IntegrationConfig(0.1, 1.0))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            integrate(EXP_SYSTEM, np.array([1.0, 2.0]), IntegrationConfig(0.1, 1.0))


class TestAccuracy:
    def test_rk4_fourth_order_on_exponential(self):
        order = math.log2(exp_error(0.05) / exp_error(0.025))
        assert 3.7 <= order <= 4.3

    def test_euler_much_less_accurate_than_rk4(self):
        assert exp_error(0.01, "euler") > 1e3 * exp_error(0.01, "rk4")

    def test_benchmark_richardson_halving(self):
        # halving the step changes the final estimate by less than 16x the
        # change from the next halving (4th-order convergence ratio ~ 16)
        def final_theta(h):
            config = replace(
                preset("example5"), integration=IntegrationConfig(step=h, t_end=2.0)
            )
            return simulate_scenario(config).theta_ff[-1]

        coarse = final_theta(1e-3)
        mid = final_theta(5e-4)
        fine = final_theta(2.5e-4)
        d1 = np.linalg.norm(coarse - mid)
        d2 = np.linalg.norm(mid - fine)
        assert d1 < 16.0 * d2
        assert 3.5 <= math.log2(d1 / d2) <= 4.5
