"""Scenario runner: plant + estimators + excitation monitor in one integration.

A scenario is described by a flat key=value configuration (dotted section
keys, e.g. ``gains.gamma_F = 30.3``) or one of the built-in presets.  Running
it produces a CSV trace (the single source of truth), a JSON summary whose
embedded configuration echo is sufficient to reproduce the run, and optional
SVG plots.

Two engines compute identical trajectories: the default ``fused`` engine is
one compiled loop over the packed state vector; the ``reference`` engine
wires the public module operations together step by step and exists to
cross-check the fusion and to host pluggable estimators.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputDataError, NumericalIntegrityError
from .estimators import (
    LsGains,
    LsState,
    fct_reconstruct,
    gradient_derivative,
    ls_ff_derivative,
    ls_standard_derivative,
    parameter_error,
)
from .integrate import IntegrationConfig, OdeSystem, step_euler, step_rk4
from .plant import NoiseConfig, PlantConfig, PlantState, emit_sample, noise_stream, plant_derivative
from .regression import ExcitationMonitor, as_param_vector
from .trace import TraceRow, write_trace

ESTIMATOR_NAMES = ("ls_ff", "ls_standard", "gradient", "fct")
ENGINES = ("fused", "reference")

# Packed coupled-state layout (documented contract, shared by both engines):
# [plant x1 x2, filters f1 f2 f3 fy | theta_hat_ff(3), upper(F_ff)(6), z |
#  theta_hat_std(3), upper(F_std)(6) | theta_hat_grad(3)]


@dataclass(frozen=True)
class OutputConfig:
    trace: str = ""
    summary: str = ""
    plots_dir: str = ""

    def resolved(self, name: str) -> "OutputConfig":
        return OutputConfig(
            trace=self.trace or f"{name}_trace.csv",
            summary=self.summary or f"{name}_summary.json",
            plots_dir=self.plots_dir,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one experiment."""

    plant: PlantConfig
    gains: LsGains
    theta_hat0: np.ndarray
    integration: IntegrationConfig
    estimators: frozenset
    name: str = "scenario"
    delta_fct: float = 1e-3
    rho_threshold: float = 1e-3
    gradient_gain: float = 1.0
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        theta0 = as_param_vector(self.theta_hat0, "estimator.theta_hat0")
        if theta0.shape[0] != self.plant.theta_true.shape[0]:
            raise ConfigurationError(
                f"theta_hat0 dimension {theta0.shape[0]} != plant parameter "
                f"dimension {self.plant.theta_true.shape[0]}"
            )
        theta0.setflags(write=False)
        object.__setattr__(self, "theta_hat0", theta0)
        object.__setattr__(self, "estimators", frozenset(self.estimators))
        unknown = self.estimators - set(ESTIMATOR_NAMES)
        if unknown:
            raise ConfigurationError(
                f"unknown estimator(s) {sorted(unknown)}; valid names: {ESTIMATOR_NAMES}"
            )
        if not self.estimators:
            raise ConfigurationError("at least one estimator must be selected")
        if "fct" in self.estimators and "ls_ff" not in self.estimators:
            raise ConfigurationError("the fct reconstruction requires the ls_ff estimator")
        if self.delta_fct <= 0.0 or not np.isfinite(self.delta_fct):
            raise ConfigurationError(f"delta_fct must be > 0, got {self.delta_fct}")
        if self.rho_threshold <= 0.0 or not np.isfinite(self.rho_threshold):
            raise ConfigurationError(f"rho_threshold must be > 0, got {self.rho_threshold}")
        if self.gradient_gain <= 0.0 or not np.isfinite(self.gradient_gain):
            raise ConfigurationError(f"gradient_gain must be > 0, got {self.gradient_gain}")

    def run_flags(self) -> Tuple[bool, bool, bool, bool]:
        return (
            "ls_ff" in self.estimators,
            "ls_standard" in self.estimators,
            "gradient" in self.estimators,
            "fct" in self.estimators,
        )


# ---------------------------------------------------------------------------
# Flat key=value configuration format
# ---------------------------------------------------------------------------

_REQUIRED = object()


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean (true/false), got {text!r}")


def _parse_vector(text: str) -> tuple:
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    if not parts:
        raise ValueError("expected a comma-separated vector")
    return tuple(float(p) for p in parts)


def _parse_names(text: str) -> tuple:
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    if not parts:
        raise ValueError("expected a comma-separated list of names")
    return tuple(parts)


def _fmt_float(value: float) -> str:
    return repr(float(value))


def _fmt_vector(values) -> str:
    return ",".join(repr(float(v)) for v in values)


_KEY_SPECS = {
    "scenario.name": (str, "scenario"),
    "plant.theta": (_parse_vector, _REQUIRED),
    "plant.lambda": (_parse_float, 1.0),
    "plant.input": (str, "constant"),
    "plant.u_level": (_parse_float, 5.0),
    "noise.enabled": (_parse_bool, False),
    "noise.std_dev": (_parse_float, 0.01),
    "noise.seed": (_parse_int, 0),
    "gains.gamma_F": (_parse_float, 30.3),
    "gains.f0": (_parse_float, 4.0),
    "gains.chi0": (_parse_float, 6.0),
    "gains.k": (_parse_float, 10.0),
    "gains.matrix_norm": (str, "spectral"),
    "estimator.theta_hat0": (_parse_vector, (0.1, 0.1, 0.1)),
    "estimator.delta_fct": (_parse_float, 1e-3),
    "estimator.gradient_gain": (_parse_float, 1.0),
    "monitor.rho_threshold": (_parse_float, 1e-3),
    "integration.step": (_parse_float, 1e-4),
    "integration.t_end": (_parse_float, 10.0),
    "integration.method": (str, "rk4"),
    "estimators": (_parse_names, ("ls_ff", "fct")),
    "outputs.trace": (str, ""),
    "outputs.summary": (str, ""),
    "outputs.plots_dir": (str, ""),
}


def config_to_items(config: ScenarioConfig) -> Dict[str, str]:
    """Canonical flat key -> string-value mapping; parses back to the same config."""
    if config.plant.input_kind != "constant":
        raise ConfigurationError(
            "only constant-input scenarios are representable as key=value text"
        )
    return {
        "scenario.name": config.name,
        "plant.theta": _fmt_vector(config.plant.theta_true),
        "plant.lambda": _fmt_float(config.plant.lam),
        "plant.input": config.plant.input_kind,
        "plant.u_level": _fmt_float(config.plant.u_level),
        "noise.enabled": "true" if config.plant.noise.enabled else "false",
        "noise.std_dev": _fmt_float(config.plant.noise.std_dev),
        "noise.seed": str(config.plant.noise.seed),
        "gains.gamma_F": _fmt_float(config.gains.gamma_f),
        "gains.f0": _fmt_float(config.gains.f0),
        "gains.chi0": _fmt_float(config.gains.chi0),
        "gains.k": _fmt_float(config.gains.k),
        "gains.matrix_norm": config.gains.matrix_norm,
        "estimator.theta_hat0": _fmt_vector(config.theta_hat0),
        "estimator.delta_fct": _fmt_float(config.delta_fct),
        "estimator.gradient_gain": _fmt_float(config.gradient_gain),
        "monitor.rho_threshold": _fmt_float(config.rho_threshold),
        "integration.step": _fmt_float(config.integration.step),
        "integration.t_end": _fmt_float(config.integration.t_end),
        "integration.method": config.integration.method,
        "estimators": ",".join(sorted(config.estimators)),
        "outputs.trace": config.outputs.trace,
        "outputs.summary": config.outputs.summary,
        "outputs.plots_dir": config.outputs.plots_dir,
    }


def render_config(config: ScenarioConfig) -> str:
    lines = [f"{key} = {value}" for key, value in config_to_items(config).items()]
    return "\n".join(lines) + "\n"


def config_from_items(items: Dict[str, str], source: str = "<items>") -> ScenarioConfig:
    """Build a scenario from flat string values, applying documented defaults."""
    values = {}
    for key, (parser, default) in _KEY_SPECS.items():
        if key in items:
            raw = items[key]
            try:
                values[key] = parser(raw) if parser is not str else raw.strip()
            except ValueError as exc:
                raise ConfigurationError(f"{source}: key {key!r}: {exc}") from exc
        elif default is _REQUIRED:
            raise ConfigurationError(f"{source}: required key {key!r} is missing")
        else:
            values[key] = default
    unknown = set(items) - set(_KEY_SPECS)
    if unknown:
        raise ConfigurationError(f"{source}: unknown key(s): {sorted(unknown)}")

    noise = NoiseConfig(
        enabled=values["noise.enabled"],
        std_dev=values["noise.std_dev"],
        seed=values["noise.seed"],
    )
    if values["plant.input"] != "constant":
        raise ConfigurationError(
            f"{source}: plant.input must be 'constant' in configuration files "
            f"(custom waveforms are API-only), got {values['plant.input']!r}"
        )
    plant = PlantConfig(
        theta_true=np.array(values["plant.theta"], dtype=float),
        lam=values["plant.lambda"],
        input_kind="constant",
        u_level=values["plant.u_level"],
        noise=noise,
    )
    gains = LsGains(
        gamma_f=values["gains.gamma_F"],
        f0=values["gains.f0"],
        chi0=values["gains.chi0"],
        k=values["gains.k"],
        matrix_norm=values["gains.matrix_norm"],
    )
    integration = IntegrationConfig(
        step=values["integration.step"],
        t_end=values["integration.t_end"],
        method=values["integration.method"],
    )
    return ScenarioConfig(
        name=values["scenario.name"],
        plant=plant,
        gains=gains,
        theta_hat0=np.array(values["estimator.theta_hat0"], dtype=float),
        delta_fct=values["estimator.delta_fct"],
        rho_threshold=values["monitor.rho_threshold"],
        gradient_gain=values["estimator.gradient_gain"],
        integration=integration,
        estimators=frozenset(values["estimators"]),
        outputs=OutputConfig(
            trace=values["outputs.trace"],
            summary=values["outputs.summary"],
            plots_dir=values["outputs.plots_dir"],
        ),
    )


def parse_config(path) -> ScenarioConfig:
    """Parse a flat key=value file.  Unknown keys and duplicates are errors."""
    try:
        with open(path, "r") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    items: Dict[str, str] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{path}:{line_no}: expected 'key = value', got {line!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigurationError(f"{path}:{line_no}: empty key")
        if key not in _KEY_SPECS:
            raise ConfigurationError(f"{path}:{line_no}: unknown key {key!r}")
        if key in items:
            raise ConfigurationError(f"{path}:{line_no}: duplicate key {key!r}")
        items[key] = value
    return config_from_items(items, source=str(path))


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _benchmark_config(name: str, u_level: float, noise: NoiseConfig) -> ScenarioConfig:
    return ScenarioConfig(
        name=name,
        plant=PlantConfig(
            theta_true=np.array([2.0, 3.0, 1.0]),
            lam=1.0,
            input_kind="constant",
            u_level=u_level,
            noise=noise,
        ),
        gains=LsGains(gamma_f=30.3, f0=4.0, chi0=6.0, k=10.0),
        theta_hat0=np.array([0.1, 0.1, 0.1]),
        delta_fct=1e-3,
        rho_threshold=1e-3,
        gradient_gain=1.0,
        integration=IntegrationConfig(step=1e-4, t_end=10.0, method="rk4"),
        estimators=frozenset({"ls_ff", "fct"}),
    )


_PRESET_BUILDERS = {
    "example5": lambda: _benchmark_config("example5", 5.0, NoiseConfig(enabled=False)),
    "example5-noise": lambda: _benchmark_config(
        "example5-noise", 5.0, NoiseConfig(enabled=True, std_dev=0.01, seed=1234)
    ),
    "no-excitation": lambda: _benchmark_config(
        "no-excitation", 0.0, NoiseConfig(enabled=False)
    ),
}

PRESET_DESCRIPTIONS = {
    "example5": "second-order plant, constant input u=5 (interval-only excitation), noiseless",
    "example5-noise": "same benchmark with white measurement noise (std 0.01, seed 1234)",
    "no-excitation": "zero input: the regressor never excites, reconstruction never validates",
}


def preset_names() -> Tuple[str, ...]:
    return tuple(sorted(_PRESET_BUILDERS))


def preset(name: str) -> ScenarioConfig:
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
    return builder()


def load_scenario(name_or_path: str) -> ScenarioConfig:
    """Resolve a CLI scenario argument: preset name first, then file path."""
    if name_or_path in _PRESET_BUILDERS:
        return preset(name_or_path)
    return parse_config(name_or_path)


def apply_overrides(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    noise_std: Optional[float] = None,
    step: Optional[float] = None,
    t_end: Optional[float] = None,
    plots_dir: Optional[str] = None,
) -> ScenarioConfig:
    """CLI-style overrides.  Setting --noise-std > 0 enables noise."""
    plant = config.plant
    noise = plant.noise
    if seed is not None:
        noise = replace(noise, seed=seed)
    if noise_std is not None:
        noise = replace(noise, std_dev=noise_std, enabled=noise_std > 0.0)
    if noise is not plant.noise:
        plant = replace(plant, noise=noise)
    integration = config.integration
    if step is not None or t_end is not None:
        integration = IntegrationConfig(
            step=step if step is not None else integration.step,
            t_end=t_end if t_end is not None else integration.t_end,
            method=integration.method,
        )
    outputs = config.outputs
    if plots_dir is not None:
        outputs = replace(outputs, plots_dir=plots_dir)
    return replace(config, plant=plant, integration=integration, outputs=outputs)


# ---------------------------------------------------------------------------
# Simulation engines
# ---------------------------------------------------------------------------


@dataclass
class SimulationResult:
    """Full per-step trajectories of one run (more than the CSV carries)."""

    config: ScenarioConfig
    engine: str
    t: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    theta_ff: np.ndarray
    cov_ff_upper: np.ndarray
    z: np.ndarray
    theta_std: np.ndarray
    cov_std_upper: np.ndarray
    theta_grad: np.ndarray
    gram_upper: np.ndarray
    min_eig: np.ndarray
    det_m: np.ndarray
    fct: np.ndarray
    t_c: Optional[float]
    fct_first_valid: Optional[float]
    status: int = kernels.SIM_OK
    error_time: Optional[float] = None

    @property
    def rows(self) -> int:
        return self.t.shape[0]

    def primary_theta(self) -> Tuple[str, np.ndarray]:
        """The estimator whose estimate fills the trace theta_hat columns."""
        run_ff, run_std, run_grad, _ = self.config.run_flags()
        if run_ff:
            return "ls_ff", self.theta_ff
        if run_std:
            return "ls_standard", self.theta_std
        return "gradient", self.theta_grad


def _half_step_input_grid(config: ScenarioConfig) -> np.ndarray:
    n = config.integration.n_steps
    h = config.integration.step
    u_fn = config.plant.input_fn()
    j = np.arange(2 * n + 1)
    # even entries land exactly on i*h, odd entries on i*h + h/2, matching
    # the stage times the steppers compute
    times = (j // 2) * h + (j % 2) * (0.5 * h)
    return np.array([float(u_fn(t)) for t in times])


def _noise_draws(config: ScenarioConfig) -> np.ndarray:
    n = config.integration.n_steps
    if config.plant.noise.enabled:
        return noise_stream(config.plant.noise, n)
    return np.zeros(max(n, 1))


def _simulate_fused(config: ScenarioConfig) -> SimulationResult:
    run_ff, run_std, run_grad, run_fct = config.run_flags()
    n = config.integration.n_steps
    h = config.integration.step
    u_grid = _half_step_input_grid(config)
    noise = _noise_draws(config)
    out = kernels.simulate_benchmark(
        np.ascontiguousarray(config.plant.theta_true),
        config.plant.lam,
        u_grid,
        noise,
        np.ascontiguousarray(config.theta_hat0),
        config.gains.gamma_f,
        config.gains.f0,
        config.gains.chi0,
        config.gains.k,
        config.gains.use_frobenius,
        config.gradient_gain,
        run_ff,
        run_std,
        run_grad,
        run_fct,
        config.delta_fct,
        config.rho_threshold,
        h,
        n,
        config.integration.method == "euler",
    )
    (t_out, y_out, phi_out, theta_ff, cov_ff, z_out, theta_std, cov_std,
     theta_grad, gram_out, min_eig, det_m, fct_out,
     status, rows_filled, t_c, first_valid) = out
    sl = slice(0, rows_filled)
    return SimulationResult(
        config=config,
        engine="fused",
        t=t_out[sl],
        y=y_out[sl],
        phi=phi_out[sl],
        theta_ff=theta_ff[sl],
        cov_ff_upper=cov_ff[sl],
        z=z_out[sl],
        theta_std=theta_std[sl],
        cov_std_upper=cov_std[sl],
        theta_grad=theta_grad[sl],
        gram_upper=gram_out[sl],
        min_eig=min_eig[sl],
        det_m=det_m[sl],
        fct=fct_out[sl],
        t_c=t_c if t_c >= 0.0 else None,
        fct_first_valid=first_valid if first_valid >= 0.0 else None,
        status=int(status),
        error_time=(rows_filled - 1) * h if status != kernels.SIM_OK else None,
    )


def _simulate_reference(config: ScenarioConfig) -> SimulationResult:
    """Step-by-step engine built from the public module operations."""
    run_ff, run_std, run_grad, run_fct = config.run_flags()
    n = config.integration.n_steps
    h = config.integration.step
    use_euler = config.integration.method == "euler"
    u_fn = config.plant.input_fn()
    noise = _noise_draws(config)
    gains = config.gains
    theta0 = config.theta_hat0
    plant_cfg = config.plant

    rows = n + 1
    t_out = np.empty(rows)
    y_out = np.empty(rows)
    phi_out = np.empty((rows, 3))
    theta_ff = np.empty((rows, 3))
    cov_ff = np.empty((rows, 6))
    z_out = np.empty(rows)
    theta_std = np.empty((rows, 3))
    cov_std = np.empty((rows, 6))
    theta_grad = np.empty((rows, 3))
    gram_out = np.empty((rows, 6))
    min_eig = np.empty(rows)
    det_m = np.full(rows, np.nan)
    fct_out = np.full((rows, 3), np.nan)

    x = kernels.initial_state(np.ascontiguousarray(theta0), gains.f0)
    monitor: Optional[ExcitationMonitor] = None
    t_c: Optional[float] = None
    first_valid: Optional[float] = None
    status = kernels.SIM_OK
    error_time: Optional[float] = None
    rows_filled = 0

    def rhs_for_step(draw: float):
        def rhs(tt: float, xx: np.ndarray) -> np.ndarray:
            dx = np.zeros_like(xx)
            plant_state = PlantState.from_array(xx[0:6])
            dx[0:6] = plant_derivative(plant_state, plant_cfg, tt).as_array()
            sample = emit_sample(plant_state, plant_cfg, tt, draw)
            if run_ff:
                state = LsState(
                    theta_hat=xx[6:9], F=kernels.unpack_sym(xx[9:15], 3), z=xx[15], t=tt
                )
                d_theta, d_cov, d_z = ls_ff_derivative(state, gains, sample)
                dx[6:9] = d_theta
                dx[9:15] = kernels.pack_sym(d_cov)
                dx[15] = d_z
            if run_std:
                state = LsState(
                    theta_hat=xx[16:19], F=kernels.unpack_sym(xx[19:25], 3), z=1.0, t=tt
                )
                d_theta, d_cov = ls_standard_derivative(state, sample)
                dx[16:19] = d_theta
                dx[19:25] = kernels.pack_sym(d_cov)
            if run_grad:
                dx[25:28] = gradient_derivative(xx[25:28], config.gradient_gain, sample)
            return dx

        return rhs

    stepper = step_euler if use_euler else step_rk4
    system_dim = kernels.STATE_SIZE

    for i in range(rows):
        t = i * h
        plant_state = PlantState.from_array(x[0:6])
        draw = noise[i] if i < n else noise[n - 1]
        sample = emit_sample(plant_state, plant_cfg, t, draw)
        t_out[i] = t
        y_out[i] = sample.y
        phi_out[i] = sample.phi
        theta_ff[i] = x[6:9]
        cov_ff[i] = x[9:15]
        z_out[i] = x[15]
        theta_std[i] = x[16:19]
        cov_std[i] = x[19:25]
        theta_grad[i] = x[25:28]

        if monitor is None:
            monitor = ExcitationMonitor(sample, config.rho_threshold)
        else:
            monitor.update(sample, h)
        record = monitor.record
        gram_out[i] = kernels.pack_sym(np.ascontiguousarray(record.gram))
        min_eig[i] = record.min_eig
        if t_c is None and record.min_eig >= config.rho_threshold:
            t_c = t

        if run_ff and run_fct:
            if first_valid is None:
                state = LsState(
                    theta_hat=x[6:9], F=kernels.unpack_sym(x[9:15], 3), z=x[15], t=t
                )
                result = fct_reconstruct(state, gains, theta0, config.delta_fct)
                det_m[i] = result.determinant
                if result.value is not None:
                    first_valid = t
                    fct_out[i] = result.value
            else:
                # latched: keep publishing even if the determinant dips
                _, det, value = kernels.fct_evaluate(
                    np.ascontiguousarray(x[6:9]),
                    kernels.unpack_sym(x[9:15], 3),
                    x[15],
                    gains.f0,
                    theta0,
                    config.delta_fct,
                    True,
                )
                det_m[i] = det
                fct_out[i] = value

        rows_filled = i + 1
        if i == n:
            break

        try:
            x_new = stepper(OdeSystem(system_dim, rhs_for_step(draw)), t, x, h)
        except (NumericalIntegrityError, InputDataError):
            status = kernels.SIM_NON_FINITE
            error_time = t
            break
        if not np.all(np.isfinite(x_new)):
            status = kernels.SIM_NON_FINITE
            error_time = t
            break
        bad_cov = False
        if run_ff:
            lo, _ = kernels.sym_eig_bounds(kernels.unpack_sym(x_new[9:15], 3))
            bad_cov = lo < kernels.COV_MIN_EIG_FLOOR
        if run_std and not bad_cov:
            lo, _ = kernels.sym_eig_bounds(kernels.unpack_sym(x_new[19:25], 3))
            bad_cov = bad_cov or lo < kernels.COV_MIN_EIG_FLOOR
        if bad_cov:
            status = kernels.SIM_COV_NOT_PD
            error_time = t
            break
        x = x_new

    sl = slice(0, rows_filled)
    return SimulationResult(
        config=config,
        engine="reference",
        t=t_out[sl],
        y=y_out[sl],
        phi=phi_out[sl],
        theta_ff=theta_ff[sl],
        cov_ff_upper=cov_ff[sl],
        z=z_out[sl],
        theta_std=theta_std[sl],
        cov_std_upper=cov_std[sl],
        theta_grad=theta_grad[sl],
        gram_upper=gram_out[sl],
        min_eig=min_eig[sl],
        det_m=det_m[sl],
        fct=fct_out[sl],
        t_c=t_c,
        fct_first_valid=first_valid,
        status=status,
        error_time=error_time,
    )


def simulate_scenario(config: ScenarioConfig, engine: str = "fused") -> SimulationResult:
    """Integrate the coupled system and return the full trajectories.

    On a numerical-integrity failure the partial result is attached to the
    raised error (``exc.partial_result``) so callers can flush it.
    """
    if engine not in ENGINES:
        raise ConfigurationError(f"engine must be one of {ENGINES}, got {engine!r}")
    result = _simulate_fused(config) if engine == "fused" else _simulate_reference(config)
    if result.status != kernels.SIM_OK:
        reason = (
            "covariance lost positive definiteness"
            if result.status == kernels.SIM_COV_NOT_PD
            else "state became non-finite"
        )
        exc = NumericalIntegrityError(
            f"integration aborted at t={result.error_time}: {reason} "
            f"(scenario {config.name!r}, step {config.integration.step})"
        )
        exc.partial_result = result
        raise exc
    return result


# ---------------------------------------------------------------------------
# Summary and outputs
# ---------------------------------------------------------------------------


@dataclass
class RunSummary:
    """Key numbers of one run; every trace-backed value is recomputable from
    the CSV, and the embedded configuration echo re-runs the scenario."""

    scenario: str
    t_c: Optional[float]
    t_end_padded: float
    rows: int
    final_errors: Dict[str, float]
    fct_first_valid_time: Optional[float]
    max_abs_error_after_fct: Optional[float]
    fct_latched: Optional[List[float]]
    fct_det_dipped: bool
    wall_time_s: float
    config_echo: Dict[str, str]

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "t_c": self.t_c,
            "t_end_padded": self.t_end_padded,
            "rows": self.rows,
            "final_errors": self.final_errors,
            "fct_first_valid_time": self.fct_first_valid_time,
            "max_abs_error_after_fct": self.max_abs_error_after_fct,
            "fct_latched": self.fct_latched,
            "fct_det_dipped": self.fct_det_dipped,
            "wall_time_s": self.wall_time_s,
            "config": self.config_echo,
        }


def result_to_rows(result: SimulationResult) -> List[TraceRow]:
    """Build the trace rows; undefined cells are NaN (written as empty)."""
    cfg = result.config
    run_ff, _, _, run_fct = cfg.run_flags()
    theta_true = cfg.plant.theta_true
    _, theta_primary = result.primary_theta()
    rows: List[TraceRow] = []
    nan = float("nan")
    for i in range(result.rows):
        err_ls = float(np.linalg.norm(theta_primary[i] - theta_true))
        fct_i = result.fct[i]
        has_fct = run_fct and np.all(np.isfinite(fct_i))
        rows.append(
            TraceRow(
                t=float(result.t[i]),
                y=float(result.y[i]),
                phi1=float(result.phi[i, 0]),
                phi2=float(result.phi[i, 1]),
                phi3=float(result.phi[i, 2]),
                theta_hat1=float(theta_primary[i, 0]),
                theta_hat2=float(theta_primary[i, 1]),
                theta_hat3=float(theta_primary[i, 2]),
                z=float(result.z[i]) if run_ff else nan,
                detM=float(result.det_m[i]),
                min_eig=float(result.min_eig[i]),
                fct1=float(fct_i[0]) if has_fct else nan,
                fct2=float(fct_i[1]) if has_fct else nan,
                fct3=float(fct_i[2]) if has_fct else nan,
                err_ls=err_ls,
                err_fct=float(np.linalg.norm(fct_i - theta_true)) if has_fct else nan,
            )
        )
    return rows


def summarize(result: SimulationResult, wall_time_s: float) -> RunSummary:
    cfg = result.config
    run_ff, run_std, run_grad, run_fct = cfg.run_flags()
    theta_true = cfg.plant.theta_true
    final_errors: Dict[str, float] = {}
    if run_ff:
        final_errors["ls_ff"] = parameter_error(result.theta_ff[-1], theta_true)
    if run_std:
        final_errors["ls_standard"] = parameter_error(result.theta_std[-1], theta_true)
    if run_grad:
        final_errors["gradient"] = parameter_error(result.theta_grad[-1], theta_true)

    fct_latched: Optional[List[float]] = None
    max_abs_after: Optional[float] = None
    det_dipped = False
    if run_fct and result.fct_first_valid is not None:
        valid = result.t >= result.fct_first_valid
        errors = np.abs(result.fct[valid] - theta_true)
        max_abs_after = float(np.max(errors))
        final_errors["fct"] = parameter_error(result.fct[-1], theta_true)
        first_idx = int(np.argmax(valid))
        fct_latched = [float(v) for v in result.fct[first_idx]]
        det_dipped = bool(np.any(result.det_m[valid] < cfg.delta_fct))

    return RunSummary(
        scenario=cfg.name,
        t_c=result.t_c,
        t_end_padded=cfg.integration.t_end_padded,
        rows=result.rows,
        final_errors=final_errors,
        fct_first_valid_time=result.fct_first_valid,
        max_abs_error_after_fct=max_abs_after,
        fct_latched=fct_latched,
        fct_det_dipped=det_dipped,
        wall_time_s=wall_time_s,
        config_echo=config_to_items(cfg),
    )


def _resolve_path(path_str: str, out_dir) -> str:
    import os

    if os.path.isabs(path_str):
        return path_str
    return os.path.join(str(out_dir), path_str)


def run_scenario(
    config: ScenarioConfig, out_dir: str = ".", engine: str = "fused"
) -> RunSummary:
    """Simulate, write the CSV trace and JSON summary, render optional plots.

    Numerical-integrity failures still flush the partial trace before the
    error propagates.
    """
    import json
    import os

    outputs = config.outputs.resolved(config.name)
    trace_path = _resolve_path(outputs.trace, out_dir)
    summary_path = _resolve_path(outputs.summary, out_dir)
    os.makedirs(out_dir, exist_ok=True)

    started = time.perf_counter()
    try:
        result = simulate_scenario(config, engine=engine)
    except NumericalIntegrityError as exc:
        partial = getattr(exc, "partial_result", None)
        if partial is not None:
            write_trace(result_to_rows(partial), trace_path)
        raise
    wall = time.perf_counter() - started

    summary = summarize(result, wall)
    if summary.fct_det_dipped:
        warnings.warn(
            "determinant gate dipped below delta_fct after first validity; "
            "this signals numerical trouble with the current step size",
            RuntimeWarning,
            stacklevel=2,
        )
    write_trace(result_to_rows(result), trace_path)
    with open(summary_path, "w") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=False)
        fh.write("\n")

    if outputs.plots_dir:
        from .plots import render_plots

        render_plots(
            trace_path,
            _resolve_path(outputs.plots_dir, out_dir),
            theta_true=config.plant.theta_true,
        )
    return summary
