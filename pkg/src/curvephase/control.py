"""Barrier-limited steering feedback for unicycle agents on a polar curve.

Each agent carries a tracking point ``rho(phi_k)`` on the target curve.
The scalar feedback ``zeta_k`` combines a logarithmic-barrier attraction
toward the curve (active while ``|e_k| < delta``) with a phase coupling
term over the interaction graph; the applied turn rate is the curvature
command ``kappa*(1 + zeta)`` clipped at ``u_max``. While the clip is
active, the tracking point follows the applied turn rate rather than the
raw command (``effective_feedback``), which keeps each agent's heading
identical to its tracking point's tangent for all time.

All functions are vectorized over agents and pure; per-agent evaluations
within one step are independent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import TWO_PI, wrap_angle
from .graphs import phase_potential, phase_potential_gradient

# Abort threshold: treat |e| >= delta*(1 - BARRIER_MARGIN) as a breach to
# avoid division blow-up from floating-point grazing of the boundary.
BARRIER_MARGIN = 1e-12

INIT_SCAN_POINTS = 4096
INIT_BISECT_TOL = 1e-10


class BarrierBreached(RuntimeError):
    """An agent reached the barrier distance; the run is invalid."""


class NoFeasibleBranch(RuntimeError):
    """No tangent-aligned curve parameter puts the initial error inside the barrier."""


@dataclass(frozen=True)
class AgentState:
    """Single-agent state: position (complex), heading, curve parameter
    and the derived curve phase."""

    r: complex
    theta: float
    phi: float
    psi: float


@dataclass
class ControlConfig:
    """Gains and limits: ``kc > 0`` barrier gain, ``k`` phase gain whose
    sign selects the pattern (negative synchronizes, positive balances),
    barrier distance ``delta``, turn-rate limit ``u_max``, step ``dt``."""

    kc: float
    k: float
    delta: float
    u_max: float
    dt: float = 0.01

    def __post_init__(self):
        if self.kc <= 0.0:
            raise ValueError("barrier gain kc must be positive")
        if self.k == 0.0:
            raise ValueError("phase gain k must be nonzero (sign selects the pattern)")
        if self.delta <= 0.0:
            raise ValueError("barrier distance delta must be positive")
        if self.u_max <= 0.0:
            raise ValueError("turn-rate limit u_max must be positive")
        if self.dt <= 0.0:
            raise ValueError("time step dt must be positive")

    @property
    def mode(self):
        return "sync" if self.k < 0.0 else "balance"

    def warn_if_saturation_infeasible(self, curve):
        """The limit should cover the curve's own curvature demand."""
        if self.u_max < curve.kappa_max:
            warnings.warn(
                f"u_max={self.u_max:g} is below the curve's maximum curvature "
                f"{curve.kappa_max:.6g}; convergence is not guaranteed",
                RuntimeWarning,
                stacklevel=2,
            )


def inner(z1, z2):
    """Real inner product of complex numbers, ``Re(conj(z1) * z2)``."""
    return (np.conj(z1) * z2).real


def tracking_error(curve, r, phi):
    """Error vector from the tracking point to the agent,
    ``e = r - center - rho(phi)``."""
    rho, _, _ = curve.local_geometry(phi)
    return np.asarray(r) - curve.center - rho


def barrier_gap(delta, e):
    """``delta^2 - |e|^2``, raising :class:`BarrierBreached` when an agent
    grazes the barrier."""
    e = np.asarray(e)
    e2 = e.real**2 + e.imag**2
    limit = (delta * (1.0 - BARRIER_MARGIN)) ** 2
    if np.any(e2 >= limit):
        worst = float(np.sqrt(np.max(e2)))
        raise BarrierBreached(f"|e| reached {worst:.6g} with barrier delta={delta:g}")
    return delta * delta - e2


def steering_feedback(curve, graph, cfg, r, theta, phi):
    """Feedback scalar per agent: barrier term plus phase-coupling term.

    The phase term is ``k`` times the phase-potential gradient component,
    evaluated on the curve phases of all agents.
    """
    e = tracking_error(curve, r, phi)
    gap = barrier_gap(cfg.delta, e)
    psi = curve.curve_phase(phi)
    heading = np.exp(1j * np.asarray(theta))
    return cfg.kc * inner(e, heading) / gap + cfg.k * phase_potential_gradient(graph, psi)


def saturate(kappa, zeta, u_max):
    """Applied turn rate: ``kappa*(1 + zeta)`` clipped at ``+/- u_max``.

    Exactly zero where ``kappa`` is zero (straight-line motion needs no
    turn rate and trivially satisfies the limit).
    """
    raw = np.asarray(kappa) * (1.0 + np.asarray(zeta))
    return np.where(np.abs(raw) <= u_max, raw, u_max * np.sign(raw))


def effective_feedback(kappa, zeta, u_max):
    """Feedback actually realized by the clipped turn rate.

    Where the clip is inactive this is ``zeta`` bit for bit; where it is
    active it solves ``kappa*(1 + zeta_eff) = +/- u_max`` so the tracking
    point advances at the rate the clipped turn can actually sustain.
    """
    kappa = np.asarray(kappa, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    raw = kappa * (1.0 + zeta)
    saturated = np.abs(raw) > u_max
    # kappa is nonzero wherever saturated holds, since |raw| > u_max > 0
    ratio = np.divide(u_max, np.abs(kappa), out=np.ones_like(kappa), where=saturated)
    return np.where(saturated, ratio * np.sign(1.0 + zeta) - 1.0, zeta)


def phi_rate(curve, phi, zeta):
    """Tracking-point parameter rate ``(1 + zeta) / sqrt(R'^2 + R^2)``."""
    return (1.0 + np.asarray(zeta)) / curve.speed(phi)


def psi_rate(curve, zeta):
    """Curve-phase rate ``(2*pi / perimeter) * (1 + zeta)``."""
    return TWO_PI * (1.0 + np.asarray(zeta)) / curve.perimeter


def _bisect_tangent_root(curve, heading, lo, hi, f_lo):
    """Refine a sign change of Im(conj(heading) * tangent) to INIT_BISECT_TOL."""
    while hi - lo > INIT_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = float((np.conj(heading) * curve.tangent(mid)).imag)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo = mid
            f_lo = f_mid
    return 0.5 * (lo + hi)


def initial_phi(curve, r0, theta0, delta, heading_tol=0.0):
    """Curve parameter whose tangent matches the initial heading.

    Scans the tangent-alignment mismatch on a uniform grid, bisects every
    sign change, keeps the aligned roots (mismatch zero mod 2*pi) whose
    error magnitude is below ``delta``, and returns the one minimizing
    ``|e|`` (ties broken by smaller ``phi``). Non-convex curves generally
    give several roots per heading.

    When no exact root is feasible and ``heading_tol > 0`` (radians), the
    nearest-to-aligned stationary points of the mismatch are considered:
    if one has mismatch below the tolerance and ``|e| < delta``, it is
    returned together with the exactly aligned heading at that parameter.
    This absorbs headings published with finite print precision.

    Returns ``(phi0, theta0_used)``; raises :class:`NoFeasibleBranch`
    otherwise.
    """
    r0 = complex(r0)
    heading = np.exp(1j * float(theta0))
    grid = np.linspace(0.0, TWO_PI, INIT_SCAN_POINTS, endpoint=False)
    mism = np.conj(heading) * curve.tangent(grid)
    f = mism.imag
    step = TWO_PI / INIT_SCAN_POINTS

    roots = []
    f_next = np.roll(f, -1)
    for i in np.nonzero((np.sign(f) * np.sign(f_next) < 0) | (f == 0.0))[0]:
        if f[i] == 0.0:
            root = grid[i]
        else:
            root = _bisect_tangent_root(curve, heading, grid[i], grid[i] + step, f[i])
        if float((np.conj(heading) * curve.tangent(root)).real) > 0.0:
            roots.append(wrap_angle(root))

    feasible = []
    for root in roots:
        e_abs = float(np.abs(tracking_error(curve, r0, root)))
        if e_abs < delta:
            feasible.append((e_abs, root, float(theta0)))

    if not feasible and heading_tol > 0.0:
        feasible = _near_aligned_candidates(
            curve, r0, float(theta0), grid, mism, delta, heading_tol)

    if not feasible:
        raise NoFeasibleBranch(
            f"no tangent-aligned parameter keeps |e(0)| below delta={delta:g} "
            f"for r0={r0:.6g}, theta0={float(theta0):.6g}"
        )
    feasible.sort(key=lambda t: (round(t[0] / 1e-12), t[1]))
    _, phi0, theta_used = feasible[0]
    return phi0, theta_used


def _near_aligned_candidates(curve, r0, theta0, grid, mism, delta, heading_tol):
    """Stationary points of the alignment mismatch within tolerance.

    Golden-section refinement of each local minimum of the absolute
    wrapped mismatch angle; the returned heading is snapped to the exact
    tangent direction there.
    """
    heading = np.exp(1j * theta0)
    angle = np.abs(np.angle(mism))
    n = len(grid)
    out = []
    invphi = (np.sqrt(5.0) - 1.0) / 2.0

    def mismatch_at(p):
        return abs(float(np.angle(np.conj(heading) * curve.tangent(p))))

    for i in range(n):
        if not (angle[i] <= angle[(i - 1) % n] and angle[i] <= angle[(i + 1) % n]):
            continue
        if angle[i] > heading_tol:
            continue
        lo, hi = grid[i] - TWO_PI / n, grid[i] + TWO_PI / n
        a, b = lo, hi
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = mismatch_at(c), mismatch_at(d)
        while b - a > INIT_BISECT_TOL:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = mismatch_at(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = mismatch_at(d)
        phi_star = wrap_angle(0.5 * (a + b))
        if mismatch_at(phi_star) > heading_tol:
            continue
        e_abs = float(np.abs(tracking_error(curve, r0, phi_star)))
        if e_abs < delta:
            # snapped heading expressed as the minimal shift of the input
            shift = float(np.angle(np.conj(heading) * curve.tangent(phi_star)))
            out.append((e_abs, phi_star, theta0 + shift))
    return out


def barrier_sum(delta, e_abs):
    """Total logarithmic barrier ``0.5 * sum ln(delta^2 / (delta^2 - |e|^2))``."""
    e_abs = np.asarray(e_abs, dtype=float)
    if np.any(e_abs >= delta):
        raise BarrierBreached(f"|e| reached {float(np.max(e_abs)):.6g}")
    return float(0.5 * np.sum(np.log(delta**2 / (delta**2 - e_abs**2))))


def sync_lyapunov(curve, graph, cfg, e_abs, psi):
    """Composite energy for the synchronizing mode (requires ``k < 0``):
    ``kc * S - k * (perimeter / 2*pi) * W``."""
    if cfg.k >= 0.0:
        raise ValueError("sync energy is only a Lyapunov function for k < 0")
    W = phase_potential(graph, psi)
    return cfg.kc * barrier_sum(cfg.delta, e_abs) - cfg.k * curve.perimeter / TWO_PI * W


def balance_lyapunov(curve, graph, cfg, e_abs, psi):
    """Composite energy for the balancing mode (requires ``k > 0`` and a
    circulant graph): ``kc * S + k * (perimeter / 2*pi) * ((n/2)*lambda_max - W)``."""
    if cfg.k <= 0.0:
        raise ValueError("balance energy is only a Lyapunov function for k > 0")
    if not graph.circulant:
        raise ValueError("balance energy requires a circulant graph")
    W = phase_potential(graph, psi)
    ceiling = 0.5 * graph.n * graph.lambda_max
    return cfg.kc * barrier_sum(cfg.delta, e_abs) + cfg.k * curve.perimeter / TWO_PI * (
        ceiling - W
    )


@dataclass(frozen=True)
class BoundsReport:
    """Trajectory-level guarantees derived from the initial energy ``V0``:
    ``delta_eff`` bounds every ``|e_k(t)|`` and ``H_interval`` bounds the
    phase spread for all time."""

    V0: float
    delta_eff: float
    H_interval: tuple

    def to_dict(self):
        return {
            "V0": self.V0,
            "delta_eff": self.delta_eff,
            "H_interval": list(self.H_interval),
        }


def bounds_report(v0, cfg, graph, curve, mode=None):
    """Signal bounds from the initial energy.

    ``delta_eff = delta * sqrt(1 - exp(-2*V0/kc))`` in both modes. The
    phase-spread interval is ``[0, min(-4*pi*V0/(k*perimeter), 4*|E|)]``
    when synchronizing and
    ``[max(0, n*lambda_max - 4*pi*V0/(k*perimeter)), n*lambda_max]``
    when balancing.
    """
    if v0 < 0.0:
        raise ValueError("initial energy must be nonnegative")
    mode = cfg.mode if mode is None else mode
    if (mode == "sync") != (cfg.k < 0.0):
        raise ValueError(f"mode {mode!r} is inconsistent with phase gain k={cfg.k:g}")
    delta_eff = cfg.delta * np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * v0 / cfg.kc)))
    if mode == "sync":
        hi = min(-(4.0 * np.pi * v0) / (cfg.k * curve.perimeter), 4.0 * graph.edge_count)
        interval = (0.0, float(hi))
    elif mode == "balance":
        top = graph.n * graph.lambda_max
        lo = max(0.0, top - (4.0 * np.pi * v0) / (cfg.k * curve.perimeter))
        interval = (float(lo), float(top))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return BoundsReport(V0=float(v0), delta_eff=float(delta_eff), H_interval=interval)
