"""Static SVG plots derived from a CSV trace.

The trace alone does not carry the true parameter vector, so the error plots
need it from the caller: either explicitly, or recovered from the sibling
summary JSON a run writes next to its trace.  Plots are derived artifacts;
the CSV stays the source of truth.
"""

from __future__ import annotations

import json
import os
from typing import Optional

import numpy as np

from .errors import ConfigurationError, TraceIOError
from .trace import read_trace


def _theta_from_summary(summary_path) -> np.ndarray:
    try:
        with open(summary_path, "r") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise TraceIOError(f"cannot read summary {summary_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TraceIOError(f"summary {summary_path} is not valid JSON: {exc}") from exc
    try:
        text = payload["config"]["plant.theta"]
        return np.array([float(v) for v in text.split(",")])
    except (KeyError, ValueError, AttributeError) as exc:
        raise TraceIOError(
            f"summary {summary_path} has no usable config.plant.theta entry"
        ) from exc


def _sibling_summary(trace_path) -> Optional[str]:
    text = str(trace_path)
    if text.endswith("_trace.csv"):
        candidate = text[: -len("_trace.csv")] + "_summary.json"
        if os.path.exists(candidate):
            return candidate
    return None


def render_plots(
    trace_path,
    out_dir,
    theta_true=None,
    summary_path=None,
) -> list:
    """Render per-parameter error plots plus the gate and excitation curves.

    Returns the list of files written.  Gaps in the reconstruction columns
    (empty cells before first validity) stay gaps in the plot.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    columns = read_trace(trace_path)
    if theta_true is None:
        if summary_path is None:
            summary_path = _sibling_summary(trace_path)
        if summary_path is None:
            raise ConfigurationError(
                "the true parameter vector is needed for error plots; pass "
                "theta_true, a summary path, or keep the summary JSON next to "
                "the trace"
            )
        theta_true = _theta_from_summary(summary_path)
    theta_true = np.asarray(theta_true, dtype=float)
    if theta_true.shape != (3,):
        raise ConfigurationError(f"theta_true must have 3 entries, got {theta_true!r}")

    os.makedirs(out_dir, exist_ok=True)
    t = columns["t"]
    written = []

    for i in range(3):
        fig, ax = plt.subplots(figsize=(7, 3.2))
        ax.plot(t, columns[f"theta_hat{i + 1}"] - theta_true[i],
                label="LS estimate error", lw=1.0)
        ax.plot(t, columns[f"fct{i + 1}"] - theta_true[i],
                label="reconstruction error", lw=1.0)
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_xlabel("t [s]")
        ax.set_ylabel(f"estimate error, component {i + 1}")
        ax.legend(loc="best")
        fig.tight_layout()
        path = os.path.join(str(out_dir), f"theta_err_{i + 1}.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(t, columns["detM"], lw=1.0, label="det gate")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("det(I - z f0 F)")
    ax.legend(loc="best")
    fig.tight_layout()
    path = os.path.join(str(out_dir), "det_gate.svg")
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(t, columns["min_eig"], lw=1.0, label="Gram min eigenvalue")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("min eig of regressor Gram integral")
    ax.legend(loc="best")
    fig.tight_layout()
    path = os.path.join(str(out_dir), "excitation.svg")
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    return written
