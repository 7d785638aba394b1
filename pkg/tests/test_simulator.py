import copy

import numpy as np
import pytest

from curvephase import (
    BarrierBreached,
    Circle,
    ControlConfig,
    InteractionGraph,
    PolarRose,
    RunConfig,
    bounds_report,
    run,
    step,
    verify,
)
from curvephase.acceptance import bundled_config
from curvephase.control import effective_feedback, saturate, steering_feedback
from curvephase.simulate import SwarmState, _Stepper, initialize
from curvephase.control import sync_lyapunov

TWO_PI = 2.0 * np.pi


def small_config(T=5.0, k=-0.5, seed=7, n=3, dt=0.01):
    return RunConfig.from_dict({
        "curve": {"family": "circle", "radius": 10.0, "center": [0.0, 0.0]},
        "graph": {"n": n, "circulant_offsets": [1]},
        "gains": {"K_C": 2.5, "K": k},
        "delta": 5.0,
        "u_max": 0.2,
        "dt": dt,
        "T": T,
        "initial_conditions": {"random": {"seed": seed, "count": n}},
    })


def rose_config(T=3.0):
    data = bundled_config("sync").to_dict()
    data["T"] = T
    return RunConfig.from_dict(data)


# -- step ---------------------------------------------------------------------

def test_single_agent_stays_on_circle():
    curve = Circle(10.0)
    graph = InteractionGraph.from_edges(1, [])
    cfg = ControlConfig(kc=2.5, k=-0.1, delta=5.0, u_max=0.2, dt=0.01)
    phi = np.array([0.7])
    state = SwarmState(
        r=curve.point(phi).astype(complex),
        theta=np.angle(curve.tangent(phi)),
        phi=phi.copy(),
    )
    for _ in range(10):
        state = step(state, curve, graph, cfg)
    assert np.abs(np.abs(state.r - curve.center) - 10.0).max() < 1e-9


def test_zero_agents_identity(rose):
    graph = InteractionGraph.from_edges(0, [])
    cfg = ControlConfig(kc=2.5, k=-0.1, delta=5.0, u_max=0.2, dt=0.01)
    empty = SwarmState(r=np.zeros(0, dtype=complex), theta=np.zeros(0), phi=np.zeros(0))
    out = step(empty, rose, graph, cfg)
    assert out.n == 0


def test_step_rejects_breached_state(rose, seven_graph):
    cfg = ControlConfig(kc=2.5, k=-0.1, delta=12.0, u_max=0.0786, dt=0.01)
    phi = np.zeros(7)
    state = SwarmState(
        r=rose.point(phi) + 12.5,  # outside the barrier
        theta=np.zeros(7),
        phi=phi,
    )
    with pytest.raises(BarrierBreached):
        step(state, rose, seven_graph, cfg)


def test_sync_energy_decreases_over_one_step(seven_graph):
    config = bundled_config("sync")
    curve, graph, cfg = config.build()
    state = initialize(curve, config)

    def v1(s):
        e = np.abs(s.r - curve.center - curve.local_geometry(s.phi)[0])
        return sync_lyapunov(curve, graph, cfg, e, curve.curve_phase(s.phi))

    before = v1(state)
    after = v1(step(state, curve, graph, cfg))
    assert after < before


def test_fused_stage_matches_public_ops(rose, seven_graph, rng):
    """ The stepper's fused evaluation must agree with the composed
    public control functions. """
    cfg = ControlConfig(kc=2.5, k=-0.1, delta=12.0, u_max=0.0786, dt=0.01)
    stepper = _Stepper(rose, seven_graph, cfg)
    for _ in range(25):
        phi = rng.uniform(0.0, TWO_PI, 7)
        r = rose.point(phi) + (rng.uniform(-5, 5, 7) + 1j * rng.uniform(-5, 5, 7))
        theta = rng.uniform(0.0, TWO_PI, 7)
        dr, du, dphi, dpsi, (zeta, u, psi, e_abs) = stepper.derivatives(r, theta, phi)

        zeta_pub = steering_feedback(rose, seven_graph, cfg, r, theta, phi)
        kappa = rose.curvature(phi)
        u_pub = saturate(kappa, zeta_pub, cfg.u_max)
        zeff = effective_feedback(kappa, zeta_pub, cfg.u_max)

        assert np.array_equal(zeta, zeta_pub)
        assert np.array_equal(u, u_pub)
        assert np.array_equal(dphi, (1.0 + zeff) / rose.speed(phi))
        assert np.array_equal(dpsi, TWO_PI * (1.0 + zeff) / rose.perimeter)
        assert np.array_equal(psi, rose.curve_phase(phi))
        assert np.array_equal(dr, np.exp(1j * theta))


# -- run ------------------------------------------------------------------------

def test_trace_shapes_and_limits():
    config = small_config(T=2.0)
    trace = run(config)
    m = int(np.floor(2.0 / 0.01)) + 1
    assert trace.samples == m
    for series in (trace.r, trace.theta, trace.phi, trace.psi,
                   trace.e_abs, trace.zeta, trace.u):
        assert series.shape == (m, 3)
    for series in (trace.p_psi_abs, trace.big_psi, trace.W, trace.H, trace.V):
        assert series.shape == (m,)
    assert np.abs(trace.u).max() <= 0.2
    assert trace.e_abs.max() < 5.0
    assert np.array_equal(trace.H, 2.0 * trace.W)


def test_determinism():
    a = run(small_config(T=1.0))
    b = run(small_config(T=1.0))
    for name in ("r", "theta", "phi", "psi", "e_abs", "zeta", "u", "V"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name


def test_unit_speed():
    trace = run(rose_config(T=2.0))
    speeds = np.abs(np.diff(trace.r, axis=0)) / 0.01
    assert np.abs(speeds - 1.0).max() < 1e-4


def test_psi_sigma_consistency(rose):
    trace = run(rose_config(T=2.0))
    expected = TWO_PI * rose.arc_length(trace.phi.ravel()) / rose.perimeter
    assert np.abs(trace.psi.ravel() - expected).max() < 1e-9


def test_psi_ode_cross_check():
    # the phase integrated through the same stages as the dynamics must
    # match the arc-length definition over a saturation-heavy stretch
    trace = run(rose_config(T=60.0), track_psi_ode=True)
    dev = np.abs(np.angle(np.exp(1j * (trace.psi - trace.psi_ode))))
    assert dev.max() < 1e-6


def test_psi_ode_cross_check_full_horizon(sync_pack):
    trace = sync_pack[0]
    dev = np.abs(np.angle(np.exp(1j * (trace.psi - trace.psi_ode))))
    assert dev.max() < 1e-6


def test_trace_all_finite(sync_pack):
    trace = sync_pack[0]
    for name in ("r", "theta", "phi", "psi", "e_abs", "zeta", "u",
                 "p_psi_abs", "W", "H", "V"):
        series = getattr(trace, name)
        assert np.all(np.isfinite(series.view(float) if series.dtype == complex
                                  else series)), name


def test_theta_phi_wrapped():
    trace = run(rose_config(T=2.0))
    assert trace.theta.min() >= 0.0 and trace.theta.max() < TWO_PI
    assert trace.phi.min() >= 0.0 and trace.phi.max() < TWO_PI


# -- verify -----------------------------------------------------------------------

def _verified(config, trace):
    curve, graph, cfg = config.build()
    report = curve.report(config.delta)
    bounds = bounds_report(float(trace.V[0]), cfg, graph, curve)
    return verify(trace, report, bounds), bounds


def test_verify_clean_run():
    config = small_config(T=600.0, k=-0.5)
    trace = run(config)
    verdict, _ = _verified(config, trace)
    assert verdict.converged_to_curve
    assert verdict.phase_mode_achieved
    assert verdict.V_monotone
    assert verdict.confinement
    assert verdict.bounds_respected
    assert verdict.all_ok


def test_verify_flags_injected_error_violation():
    config = small_config(T=20.0)
    trace = run(config)
    _, bounds = _verified(config, trace)
    tampered = copy.deepcopy(trace)
    tampered.e_abs[len(tampered.t) // 2, 0] = bounds.delta_eff + 1.0
    verdict, _ = _verified(config, tampered)
    assert not verdict.bounds_respected


def test_verify_flags_escaped_agent():
    config = small_config(T=20.0)
    trace = run(config)
    tampered = copy.deepcopy(trace)
    tampered.r[5, 0] = 300.0 + 300.0j
    verdict, _ = _verified(config, tampered)
    assert not verdict.confinement


def test_verify_flags_energy_increase():
    config = small_config(T=20.0)
    trace = run(config)
    tampered = copy.deepcopy(trace)
    tampered.V[10] = tampered.V[9] + 1.0
    verdict, _ = _verified(config, tampered)
    assert not verdict.V_monotone
