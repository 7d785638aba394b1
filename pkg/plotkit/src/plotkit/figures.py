"""Render simulation artifacts into figures.

Strictly a reader: every plotted value comes from the CSV/JSON files the
simulator CLI emits (trace, metrics, boundary polylines, verdict JSON
with the config echo). Nothing dynamical is recomputed here.

Five figure kinds:

- ``trajectories``: agent paths in the plane with the target curve and
  both offset boundary polylines
- ``errors``: error magnitudes ``|e_k|`` against time
- ``controls``: applied turn rates ``u_k`` and feedback ``zeta_k``
- ``phases``: headings ``theta_k`` and curve phases ``psi_k``
- ``metrics``: order parameter, phase potential, phase spread and energy
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

KINDS = ("trajectories", "errors", "controls", "phases", "metrics")

TRACE_COLUMNS = ["t", "agent", "x", "y", "theta", "phi", "psi", "e_abs", "zeta", "u"]
METRICS_COLUMNS = ["t", "p_psi_abs", "Psi", "W", "H", "V"]
BOUNDARY_COLUMNS = ["phi", "x_curve", "y_curve", "x_exterior", "y_exterior",
                    "x_interior", "y_interior"]


class FigureError(ValueError):
    """Inputs are missing, malformed or inconsistent."""


@dataclass
class FigureSpec:
    """What to render: input artifact paths, the figure kind and the
    output image path."""

    kind: str
    out: str
    trace: str | None = None
    metrics: str | None = None
    boundaries: str | None = None
    verdict: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def _read_csv(path, required, what):
    if path is None:
        raise FigureError(f"{what} CSV is required for this figure kind")
    try:
        df = pd.read_csv(path)
    except (OSError, ValueError) as exc:
        raise FigureError(f"cannot parse {what} CSV {path}: {exc}") from None
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise FigureError(f"{what} CSV {path} is missing columns {missing}")
    return df


def _read_config_echo(path):
    if path is None:
        raise FigureError("verdict JSON (config echo) is required for this figure kind")
    try:
        with open(path) as fh:
            payload = json.load(fh)
        return payload["config"]
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise FigureError(f"cannot read config echo from {path}: {exc}") from None


def load_trace(spec):
    """Trace as per-agent matrices, refusing agent-count mismatches
    between the trace and the config echo."""
    df = _read_csv(spec.trace, TRACE_COLUMNS, "trace")
    config = _read_config_echo(spec.verdict)
    n_trace = int(df["agent"].max()) + 1 if len(df) else 0
    n_config = int(config["graph"]["n"])
    if n_trace != n_config:
        raise FigureError(
            f"trace holds {n_trace} agents but the config echo says {n_config}")
    wide = {
        col: df[col].to_numpy().reshape(-1, n_trace)
        for col in TRACE_COLUMNS if col not in ("t", "agent")
    }
    wide["t"] = df["t"].to_numpy()[::n_trace]
    return wide, config


def _agent_lines(ax, t, series, label):
    for k in range(series.shape[1]):
        ax.plot(t, series[:, k], lw=0.9)
    ax.set_ylabel(label)
    ax.grid(True, alpha=0.3)


def _fig_trajectories(spec):
    wide, config = load_trace(spec)
    bnd = _read_csv(spec.boundaries, BOUNDARY_COLUMNS, "boundaries")

    fig, ax = plt.subplots(figsize=(7, 7))
    for name, style, label in (
        (("x_curve", "y_curve"), dict(color="k", lw=1.4), "target curve"),
        (("x_exterior", "y_exterior"), dict(color="k", lw=1.0, ls="--"), "outer boundary"),
        (("x_interior", "y_interior"), dict(color="k", lw=1.0, ls=":"), "inner boundary"),
    ):
        xs = np.append(bnd[name[0]].to_numpy(), bnd[name[0]].iloc[0])
        ys = np.append(bnd[name[1]].to_numpy(), bnd[name[1]].iloc[0])
        ax.plot(xs, ys, label=label, **style)
    for k in range(wide["x"].shape[1]):
        ax.plot(wide["x"][:, k], wide["y"][:, k], lw=0.8)
        ax.plot(wide["x"][0, k], wide["y"][0, k], "o", ms=4)
        ax.plot(wide["x"][-1, k], wide["y"][-1, k], "s", ms=4)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("agent trajectories")
    return fig


def _fig_errors(spec):
    wide, _ = load_trace(spec)
    fig, ax = plt.subplots(figsize=(7, 4))
    _agent_lines(ax, wide["t"], wide["e_abs"], r"$|e_k|$ (m)")
    ax.set_xlabel("t (s)")
    ax.set_title("tracking errors")
    return fig


def _fig_controls(spec):
    wide, _ = load_trace(spec)
    fig, (ax_u, ax_z) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    _agent_lines(ax_u, wide["t"], wide["u"], r"$u_k$ (rad/s)")
    _agent_lines(ax_z, wide["t"], wide["zeta"], r"$\zeta_k$")
    ax_z.set_xlabel("t (s)")
    ax_u.set_title("turn rates and feedback")
    return fig


def _fig_phases(spec):
    wide, _ = load_trace(spec)
    fig, (ax_t, ax_p) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    _agent_lines(ax_t, wide["t"], wide["theta"], r"$\theta_k$ (rad)")
    _agent_lines(ax_p, wide["t"], wide["psi"], r"$\psi_k$ (rad)")
    ax_p.set_xlabel("t (s)")
    ax_t.set_title("headings and curve phases")
    return fig


def _fig_metrics(spec):
    df = _read_csv(spec.metrics, METRICS_COLUMNS, "metrics")
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = (
        ("p_psi_abs", r"$|p_\psi|$"),
        ("W", r"$W$"),
        ("H", r"$H$"),
        ("V", r"$V$"),
    )
    for ax, (col, label) in zip(axes.ravel(), panels):
        ax.plot(df["t"], df[col], lw=1.0)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("t (s)")
    fig.suptitle("swarm metrics")
    return fig


_RENDERERS = {
    "trajectories": _fig_trajectories,
    "errors": _fig_errors,
    "controls": _fig_controls,
    "phases": _fig_phases,
    "metrics": _fig_metrics,
}


def render(spec):
    """Render the figure described by ``spec`` and write the image file.

    Returns the output path. Raises :class:`FigureError` on missing or
    inconsistent inputs.
    """
    fig = _RENDERERS[spec.kind](spec)
    fig.savefig(spec.out, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return spec.out
