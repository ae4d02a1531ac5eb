"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class EstimationError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigurationError(EstimationError):
    """Invalid configuration: bad file, unknown key, violated gain constraint."""

    exit_code = 2


class InputDataError(EstimationError):
    """Non-finite or dimensionally inconsistent measurement data."""

    exit_code = 3


class NumericalIntegrityError(EstimationError):
    """A quantity that is guaranteed finite/positive/symmetric stopped being so."""

    exit_code = 3


class TraceIOError(EstimationError):
    """Reading or writing a trace/summary/plot artifact failed."""

    exit_code = 4
