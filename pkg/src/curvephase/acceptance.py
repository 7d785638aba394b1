"""Verification checklist: every reference value the artifact must
reproduce, each with its frozen tolerance.

Geometry targets come from the standard scenario (six-petal rose,
scale 5, safe distance 12) and from closed-curve identities that hold
for every built-in family. Graph targets cover the seven-node circulant
topology with offsets {1, 2}. Closed-loop targets are the steady-state
and trajectory guarantees of the two bundled scenarios.

Used both by ``tests/test_acceptance.py`` and the ``verify`` CLI command
so there is a single source of truth for the numbers.
"""

from __future__ import annotations

import importlib.resources
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .control import bounds_report
from .curves import TWO_PI, Circle, ConvexLimacon, PolarRose
from .graphs import (
    InteractionGraph,
    phase_potential,
    phase_potential_gradient,
    phase_spread,
)
from .simulate import run, verify

ROSE = dict(a=10.0, b=6, s=5.0)
DELTA = 12.0

# Reference values for the standard rose scenario.
REF_PERIMETER = 340.82
REF_AREA = 7893.3
REF_OUTER_PERIMETER = 416.21
REF_INNER_PERIMETER = 265.43
REF_OUTER_AREA = 12435.4
REF_INNER_AREA = 4255.7
REF_KAPPA_MAX = 0.0776
REF_MIN_TURN_RADIUS = 12.87
REF_HALF_N_LAMBDA = 21.86
REF_SYNC_H_HI = 30.7
REF_BALANCE_H_LO = 25.1
REF_BALANCE_H_HI = 43.7
REF_U_MAX = 0.0786

GEOMETRY_BUDGET_S = 10.0
GRAPH_BUDGET_S = 1.0
SCENARIO_BUDGET_S = 60.0


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _rel_ok(value, target, rtol):
    return abs(value - target) <= rtol * abs(target)


def bundled_config(mode):
    """Load a bundled scenario config, ``mode`` in {"sync", "balance"}."""
    path = importlib.resources.files("curvephase") / "configs" / f"{mode}.json"
    return RunConfig.load(str(path))


def run_scenario(mode, dt=None, T=None, track_psi_ode=False):
    """Run a bundled scenario, optionally overriding step or horizon.

    Returns ``(trace, report, bounds, verdict, runtime_seconds)``.
    """
    config = bundled_config(mode)
    data = config.to_dict()
    if dt is not None:
        data["dt"] = dt
    if T is not None:
        data["T"] = T
    config = RunConfig.from_dict(data)
    curve, graph, cfg = config.build()
    t0 = time.perf_counter()
    trace = run(config, track_psi_ode=track_psi_ode)
    runtime = time.perf_counter() - t0
    report = curve.report(config.delta)
    bounds = bounds_report(float(trace.V[0]), cfg, graph, curve)
    verdict = verify(trace, report, bounds)
    trace.verdicts = verdict
    return trace, report, bounds, verdict, runtime


# -- geometry ----------------------------------------------------------


def geometry_checks():
    t0 = time.perf_counter()
    checks = []
    rose = PolarRose(**ROSE)
    report = rose.report(DELTA)

    checks.append(Check(
        "rose perimeter = 340.82 (0.5%)",
        _rel_ok(report.perimeter, REF_PERIMETER, 5e-3),
        f"perimeter={report.perimeter:.4f}"))
    checks.append(Check(
        "rose area = 7893.3 (0.5%)",
        _rel_ok(report.area, REF_AREA, 5e-3),
        f"area={report.area:.4f}"))

    gp = report.boundary_perimeters["exterior"]
    gm = report.boundary_perimeters["interior"]
    ap = report.boundary_areas["exterior"]
    am = report.boundary_areas["interior"]
    checks.append(Check(
        "outer boundary perimeter = 416.21 (1%)",
        _rel_ok(gp, REF_OUTER_PERIMETER, 1e-2), f"{gp:.4f}"))
    checks.append(Check(
        "inner boundary perimeter = 265.43 (1%)",
        _rel_ok(gm, REF_INNER_PERIMETER, 1e-2), f"{gm:.4f}"))
    checks.append(Check(
        "outer boundary area = 12435.4 (1%)",
        _rel_ok(ap, REF_OUTER_AREA, 1e-2), f"{ap:.4f}"))
    checks.append(Check(
        "inner boundary area = 4255.7 (1%)",
        _rel_ok(am, REF_INNER_AREA, 1e-2), f"{am:.4f}"))
    checks.append(Check(
        "boundary perimeters sum to twice the curve perimeter (1e-2 rel)",
        _rel_ok(gp + gm, 2.0 * report.perimeter, 1e-2),
        f"sum={gp + gm:.4f} vs {2 * report.perimeter:.4f}"))
    checks.append(Check(
        "boundary area difference = 2*delta*perimeter (1e-2 rel)",
        _rel_ok(ap - am, 2.0 * DELTA * report.perimeter, 1e-2),
        f"diff={ap - am:.4f} vs {2 * DELTA * report.perimeter:.4f}"))

    checks.append(Check(
        "rose max |kappa| = 0.0776 (+-1e-3)",
        abs(report.kappa_max - REF_KAPPA_MAX) <= 1e-3,
        f"kappa_max={report.kappa_max:.6f}"))
    checks.append(Check(
        "rose min turn radius = 12.87 (+-0.01)",
        abs(report.min_turn_radius - REF_MIN_TURN_RADIUS) <= 0.01,
        f"min_turn_radius={report.min_turn_radius:.5f}"))

    hopf_curves = [
        ("circle", Circle(10.0)),
        ("limacon", ConvexLimacon(2.0, 4.5)),
        ("unit rose", PolarRose(10.0, 6, 1.0)),
        ("scaled rose", rose),
    ]
    for name, curve in hopf_curves:
        tsc = curve.total_signed_curvature
        checks.append(Check(
            f"total signed curvature of {name} = 2*pi (+-1e-6)",
            abs(tsc - TWO_PI) <= 1e-6, f"{tsc:.9f}"))

    for name, curve in hopf_curves:
        per = curve.perimeter
        area = curve.enclosed_area()
        ok = per * per >= 4.0 * np.pi * area * (1.0 - 1e-12)
        if name == "circle":
            ok = ok and _rel_ok(per * per, 4.0 * np.pi * area, 1e-9)
        checks.append(Check(
            f"isoperimetric inequality for {name}"
            + (" (equality 1e-9 rel)" if name == "circle" else ""),
            bool(ok),
            f"perimeter^2={per * per:.4f}, 4*pi*area={4 * np.pi * area:.4f}"))

    runtime = time.perf_counter() - t0
    checks.append(Check(
        "geometry suite runtime < 10 s",
        runtime < GEOMETRY_BUDGET_S, f"{runtime:.2f} s"))
    return checks


# -- graph -------------------------------------------------------------


def _batch_potential(graph, psi_matrix):
    z = np.exp(1j * psi_matrix)
    diff = z[:, graph._ej] - z[:, graph._ek]
    return 0.5 * np.sum(diff.real**2 + diff.imag**2, axis=1)


def graph_checks(samples=10_000, seed=20260810):
    t0 = time.perf_counter()
    checks = []
    graph = InteractionGraph.circulant(7, (1, 2))

    half_n_lam = 0.5 * graph.n * graph.lambda_max
    checks.append(Check(
        "(n/2)*lambda_max = 21.86 (+-0.01)",
        abs(half_n_lam - REF_HALF_N_LAMBDA) <= 0.01, f"{half_n_lam:.5f}"))

    vecs, lams = graph.dft_modes()
    residual = max(
        float(np.linalg.norm(graph.laplacian @ v - lam * v))
        for v, lam in zip(vecs, lams))
    checks.append(Check(
        "DFT eigenvector residuals < 1e-10",
        residual < 1e-10, f"max residual={residual:.2e}"))

    rng = np.random.default_rng(seed)
    psi = rng.uniform(0.0, TWO_PI, size=(samples, graph.n))
    z = np.exp(1j * psi)
    grads = (np.conj(z) * (z @ graph.laplacian)).imag
    worst_sum = float(np.abs(grads.sum(axis=1)).max())
    checks.append(Check(
        "gradient orthogonal to the all-ones direction (1e-12)",
        worst_sum <= 1e-12, f"max |sum|={worst_sum:.2e}"))

    W = _batch_potential(graph, psi)
    ceiling = min(2.0 * graph.edge_count, half_n_lam)
    checks.append(Check(
        "0 <= W <= min(2|E|, (n/2)*lambda_max) + 1e-12",
        bool(np.all(W >= 0.0) and np.all(W <= ceiling + 1e-12)),
        f"W range [{W.min():.4f}, {W.max():.4f}], ceiling {ceiling:.4f}"))

    h = 1e-5
    fd = np.empty_like(grads)
    for k in range(graph.n):
        bump = np.zeros(graph.n)
        bump[k] = h
        fd[:, k] = (_batch_potential(graph, psi + bump)
                    - _batch_potential(graph, psi - bump)) / (2.0 * h)
    num = np.linalg.norm(fd - grads, axis=1)
    den = np.maximum(np.linalg.norm(grads, axis=1), 1e-8)
    worst = float((num / den).max())
    checks.append(Check(
        "gradient matches central finite differences (rel 1e-6)",
        worst < 1e-6, f"max rel err={worst:.2e}"))

    runtime = time.perf_counter() - t0
    checks.append(Check(
        "graph suite runtime < 1 s", runtime < GRAPH_BUDGET_S, f"{runtime:.2f} s"))
    return checks


# -- closed loop -------------------------------------------------------


def closed_loop_checks(mode, trace, report, bounds, runtime, fast=False):
    checks = []
    tag = mode
    cfg_delta = float(trace.config["delta"])
    u_limit = float(trace.config["u_max"])

    lo, hi = bounds.H_interval
    if mode == "sync":
        checks.append(Check(
            f"{tag}: phase-spread bound reproduces 30.7 (+-0.5)",
            abs(hi - REF_SYNC_H_HI) <= 0.5, f"bound={hi:.4f}"))
    else:
        checks.append(Check(
            f"{tag}: phase-spread lower bound reproduces 25.1 (+-0.5)",
            abs(lo - REF_BALANCE_H_LO) <= 0.5, f"bound={lo:.4f}"))
        checks.append(Check(
            f"{tag}: phase-spread upper bound reproduces 43.7 (+-0.5)",
            abs(hi - REF_BALANCE_H_HI) <= 0.5, f"bound={hi:.4f}"))

    h_ok = bool(np.all(trace.H >= lo - 0.5) and np.all(trace.H <= hi + 0.5))
    checks.append(Check(
        f"{tag}: H stays within the guaranteed interval (+-0.5) throughout",
        h_ok, f"H in [{trace.H.min():.3f}, {trace.H.max():.3f}], "
              f"interval [{lo:.3f}, {hi:.3f}]"))

    max_u = float(np.abs(trace.u).max())
    checks.append(Check(
        f"{tag}: |u| <= {u_limit:g} at every sample",
        max_u <= u_limit, f"max |u|={max_u:.6f}"))

    max_e = float(trace.e_abs.max())
    checks.append(Check(
        f"{tag}: |e| < {cfg_delta:g} at every sample",
        max_e < cfg_delta, f"max |e|={max_e:.4f}"))
    checks.append(Check(
        f"{tag}: max |e| below delta_eff + 1e-3",
        max_e < bounds.delta_eff + 1e-3,
        f"max |e|={max_e:.4f}, delta_eff={bounds.delta_eff:.6f}"))

    dV = np.diff(trace.V)
    checks.append(Check(
        f"{tag}: energy nonincreasing (per-step slack 1e-7)",
        bool(dV.max() <= 1e-7), f"max increase={dV.max():.2e}"))

    if not fast:
        final_p = float(trace.p_psi_abs[-1])
        final_W = float(trace.W[-1])
        final_zeta = float(np.abs(trace.zeta[-1]).max())
        if mode == "sync":
            checks.append(Check(
                "sync: final |p_psi| > 0.99", final_p > 0.99,
                f"|p_psi|={final_p:.6f}"))
            checks.append(Check(
                "sync: final W < 0.05", final_W < 0.05, f"W={final_W:.6f}"))
        else:
            checks.append(Check(
                "balance: final |p_psi| < 0.01", final_p < 0.01,
                f"|p_psi|={final_p:.2e}"))
            checks.append(Check(
                "balance: final W within 1% of 21.86",
                abs(final_W - REF_HALF_N_LAMBDA) <= 0.01 * REF_HALF_N_LAMBDA,
                f"W={final_W:.4f}"))
            psis = np.sort(trace.psi[-1] % TWO_PI)
            gaps = np.diff(np.concatenate([psis, [psis[0] + TWO_PI]]))
            dev = float(np.abs(gaps - TWO_PI / 7.0).max())
            checks.append(Check(
                "balance: sorted final phase gaps = 2*pi/7 (+-0.01)",
                dev <= 0.01, f"max gap deviation={dev:.5f}"))
        checks.append(Check(
            f"{tag}: final max |zeta| < 1e-3",
            final_zeta < 1e-3, f"max |zeta|={final_zeta:.2e}"))
        checks.append(Check(
            f"{tag}: scenario runtime < 60 s",
            runtime < SCENARIO_BUDGET_S, f"{runtime:.1f} s"))
    return checks


def refinement_checks(final_p, final_p_half, mode):
    diff = abs(final_p - final_p_half)
    return [Check(
        f"{mode}: halving dt changes final |p_psi| by < 1e-4",
        diff < 1e-4, f"delta={diff:.2e}")]


def circle_regression_checks():
    """On a circle the pipeline collapses to the classic special case:
    constant curvature 1/R and identical parameter and phase rates."""
    radius = 10.0
    data = {
        "curve": {"family": "circle", "radius": radius, "center": [0.0, 0.0]},
        "graph": {"n": 3, "circulant_offsets": [1]},
        "gains": {"K_C": 2.5, "K": -0.1},
        "delta": 5.0,
        "u_max": 0.2,
        "dt": 0.01,
        "T": 40.0,
        "initial_conditions": {"random": {"seed": 42, "count": 3}},
    }
    config = RunConfig.from_dict(data)
    curve, _, _ = config.build()
    trace = run(config)

    kappa_dev = float(np.abs(curve.curvature(trace.phi) - 1.0 / radius).max())
    dpsi = np.angle(np.exp(1j * np.diff(trace.psi, axis=0)))
    dphi = np.angle(np.exp(1j * np.diff(trace.phi, axis=0)))
    rate_dev = float(np.abs(dpsi - dphi).max())
    return [
        Check("circle regression: curvature constant at 1/R (1e-9)",
              kappa_dev <= 1e-9, f"max deviation={kappa_dev:.2e}"),
        Check("circle regression: phase rate equals parameter rate (1e-9)",
              rate_dev <= 1e-9, f"max deviation={rate_dev:.2e}"),
    ]


def full_checklist(fast=False):
    """Run everything; returns the complete list of checks."""
    checks = geometry_checks() + graph_checks()
    horizon = 150.0 if fast else None
    packs = {}
    for mode in ("sync", "balance"):
        trace, report, bounds, verdict, runtime = run_scenario(mode, T=horizon)
        packs[mode] = trace
        checks += closed_loop_checks(mode, trace, report, bounds, runtime, fast=fast)
    if not fast:
        for mode in ("sync", "balance"):
            half, *_ = run_scenario(mode, dt=0.005)
            checks += refinement_checks(
                float(packs[mode].p_psi_abs[-1]), float(half.p_psi_abs[-1]), mode)
    checks += circle_regression_checks()
    return checks
