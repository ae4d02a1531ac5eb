"""Continuous-time least-squares parameter estimation for linear regressions.

The package estimates the constant parameter vector of ``y = phi' theta``
from measured signals:

* forgetting-factor LS dynamics whose covariance norm drives the forgetting
  rate, plus the classical no-forgetting variant and a gradient baseline;
* an interval-excitation monitor that certifies identifiability from the
  running regressor Gram integral;
* an algebraic reconstruction that returns the true parameters exactly once
  the excitation threshold has been met, not merely asymptotically;
* a benchmark plant, a deterministic RK4 scenario runner, CSV/JSON/SVG
  outputs and a CLI (``fctls run example5``).

Hot loops are numba-compiled by default; set ``FCTLS_BACKEND=numpy`` to run
the identical kernels as plain NumPy.
"""

from .errors import (
    ConfigurationError,
    EstimationError,
    InputDataError,
    NumericalIntegrityError,
    TraceIOError,
)
from .estimators import (
    FctResult,
    LsGains,
    LsState,
    fct_reconstruct,
    gradient_derivative,
    ls_ff_derivative,
    ls_standard_derivative,
    parameter_error,
)
from .integrate import IntegrationConfig, OdeSystem, integrate, step_euler, step_rk4
from .linalg import min_eigenvalue, spectral_norm, symmetrize
from .plant import (
    NoiseConfig,
    PlantConfig,
    PlantState,
    emit_sample,
    noise_stream,
    plant_derivative,
)
from .plots import render_plots
from .regression import (
    ExcitationMonitor,
    ExcitationRecord,
    RegressorSample,
    gram_update,
    is_identifiable,
)
from .scenario import (
    RunSummary,
    ScenarioConfig,
    SimulationResult,
    apply_overrides,
    parse_config,
    preset,
    preset_names,
    run_scenario,
    simulate_scenario,
)
from .trace import TRACE_COLUMNS, TRACE_HEADER, TraceRow, read_trace, write_trace

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EstimationError",
    "ConfigurationError",
    "InputDataError",
    "NumericalIntegrityError",
    "TraceIOError",
    "RegressorSample",
    "ExcitationRecord",
    "ExcitationMonitor",
    "gram_update",
    "is_identifiable",
    "min_eigenvalue",
    "spectral_norm",
    "symmetrize",
    "LsGains",
    "LsState",
    "FctResult",
    "ls_ff_derivative",
    "ls_standard_derivative",
    "fct_reconstruct",
    "gradient_derivative",
    "parameter_error",
    "OdeSystem",
    "IntegrationConfig",
    "integrate",
    "step_rk4",
    "step_euler",
    "PlantConfig",
    "PlantState",
    "NoiseConfig",
    "plant_derivative",
    "emit_sample",
    "noise_stream",
    "ScenarioConfig",
    "RunSummary",
    "SimulationResult",
    "parse_config",
    "preset",
    "preset_names",
    "apply_overrides",
    "run_scenario",
    "simulate_scenario",
    "TraceRow",
    "TRACE_COLUMNS",
    "TRACE_HEADER",
    "write_trace",
    "read_trace",
    "render_plots",
]
