"""curvephase: unicycle swarms on simple closed polar curves.

Deterministic simulation and verification of barrier-limited steering
that drives unit-speed agents onto a closed polar curve in synchronized
or balanced curve-phase patterns, plus the supporting differential
geometry (frames, curvature, arc length, offset boundaries) and graph
machinery (circulant Laplacians, phase potentials).
"""

from .config import ConfigError, RunConfig
from .control import (
    AgentState,
    BarrierBreached,
    BoundsReport,
    ControlConfig,
    NoFeasibleBranch,
    balance_lyapunov,
    barrier_sum,
    bounds_report,
    effective_feedback,
    initial_phi,
    phi_rate,
    psi_rate,
    saturate,
    steering_feedback,
    sync_lyapunov,
    tracking_error,
)
from .curves import (
    Circle,
    ConvexLimacon,
    CurveFrame,
    CurveReport,
    OffsetNotSimple,
    PolarCurve,
    PolarRose,
    VerticalTangent,
    curve_from_spec,
)
from .graphs import (
    DisconnectedGraph,
    InteractionGraph,
    graph_from_spec,
    order_parameter,
    phase_potential,
    phase_potential_gradient,
    phase_spread,
)
from .simulate import RunVerdict, SimulationTrace, SwarmState, run, step, verify

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "BarrierBreached",
    "BoundsReport",
    "Circle",
    "ConfigError",
    "ControlConfig",
    "ConvexLimacon",
    "CurveFrame",
    "CurveReport",
    "DisconnectedGraph",
    "InteractionGraph",
    "NoFeasibleBranch",
    "OffsetNotSimple",
    "PolarCurve",
    "PolarRose",
    "RunConfig",
    "RunVerdict",
    "SimulationTrace",
    "SwarmState",
    "VerticalTangent",
    "balance_lyapunov",
    "barrier_sum",
    "bounds_report",
    "curve_from_spec",
    "effective_feedback",
    "graph_from_spec",
    "initial_phi",
    "order_parameter",
    "phase_potential",
    "phase_potential_gradient",
    "phase_spread",
    "phi_rate",
    "psi_rate",
    "run",
    "saturate",
    "steering_feedback",
    "step",
    "sync_lyapunov",
    "tracking_error",
    "verify",
]
