"""Flat-file artifact emission and parsing.

Schemas (all floats written with 17 significant digits so values
round-trip exactly):

- trace CSV, one row per (sample, agent):
  ``t,agent,x,y,theta,phi,psi,e_abs,zeta,u``
- metrics CSV, one row per sample: ``t,p_psi_abs,Psi,W,H,V``
- boundary CSV, one row per sample parameter:
  ``phi,x_curve,y_curve,x_exterior,y_exterior,x_interior,y_interior``
- verdict JSON: verdicts plus bounds and the config echo
- curve report JSON: the curve report fields plus the query context
"""

from __future__ import annotations

import json

import numpy as np
import pandas as pd

FLOAT_FMT = "%.17g"

TRACE_COLUMNS = ["t", "agent", "x", "y", "theta", "phi", "psi", "e_abs", "zeta", "u"]
METRICS_COLUMNS = ["t", "p_psi_abs", "Psi", "W", "H", "V"]


def trace_frame(trace):
    """Long-format DataFrame of the per-agent series."""
    m, n = trace.r.shape
    rep_t = np.repeat(trace.t, n)
    agent = np.tile(np.arange(n), m)
    return pd.DataFrame({
        "t": rep_t,
        "agent": agent,
        "x": trace.r.real.ravel(),
        "y": trace.r.imag.ravel(),
        "theta": trace.theta.ravel(),
        "phi": trace.phi.ravel(),
        "psi": trace.psi.ravel(),
        "e_abs": trace.e_abs.ravel(),
        "zeta": trace.zeta.ravel(),
        "u": trace.u.ravel(),
    })


def metrics_frame(trace):
    return pd.DataFrame({
        "t": trace.t,
        "p_psi_abs": trace.p_psi_abs,
        "Psi": trace.big_psi,
        "W": trace.W,
        "H": trace.H,
        "V": trace.V,
    })


def write_trace_csv(trace, path):
    trace_frame(trace).to_csv(path, index=False, float_format=FLOAT_FMT)


def write_metrics_csv(trace, path):
    metrics_frame(trace).to_csv(path, index=False, float_format=FLOAT_FMT)


def read_trace_csv(path):
    """Parse a trace CSV back into per-agent arrays.

    Returns a dict of arrays keyed by column, with per-agent columns
    reshaped to (samples, n).
    """
    df = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in TRACE_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"trace CSV is missing columns {missing}")
    n = int(df["agent"].max()) + 1 if len(df) else 0
    out = {}
    for col in TRACE_COLUMNS:
        if col == "t":
            out["t"] = df["t"].to_numpy()[::n] if n else np.array([])
        elif col == "agent":
            continue
        else:
            out[col] = df[col].to_numpy().reshape(-1, n) if n else np.empty((0, 0))
    return out


def read_metrics_csv(path):
    df = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in METRICS_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"metrics CSV is missing columns {missing}")
    return {c: df[c].to_numpy() for c in METRICS_COLUMNS}


def write_boundaries_csv(curve, delta, path, samples=None):
    """Curve and both offset polylines on a shared parameter grid."""
    from .curves import GRID_INTERVALS, TWO_PI

    samples = samples or GRID_INTERVALS
    phi = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    base = curve.point(phi)
    outer = curve.offset_boundary(delta, "exterior", samples)
    inner = curve.offset_boundary(delta, "interior", samples)
    pd.DataFrame({
        "phi": phi,
        "x_curve": base.real,
        "y_curve": base.imag,
        "x_exterior": outer.real,
        "y_exterior": outer.imag,
        "x_interior": inner.real,
        "y_interior": inner.imag,
    }).to_csv(path, index=False, float_format=FLOAT_FMT)


def write_verdict_json(verdict, bounds, config, path):
    payload = {
        "verdicts": verdict.to_dict(),
        "bounds": bounds.to_dict(),
        "config": config.to_dict(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    return payload


def write_report_json(report, curve_spec, delta, path):
    payload = report.to_dict()
    payload["delta"] = delta
    payload["curve"] = dict(curve_spec)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    return payload
