"""Run configuration: JSON schema, validation and scenario assembly.

A run config is a JSON object with keys ``curve``, ``graph``, ``gains``
(``K_C`` and ``K``), ``delta``, ``u_max``, ``dt``, ``T``,
``initial_conditions`` and optional ``output_dir``. Initial conditions
are either explicit ``x``/``y`` lists with headings (``theta_deg`` or
``theta`` in radians), or ``{"random": {"seed": ..., "count": ...}}``
which draws feasible states inside the barrier tube.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .curves import TWO_PI, curve_from_spec
from .graphs import graph_from_spec
from .control import ControlConfig


class ConfigError(ValueError):
    """The run configuration is invalid."""


@dataclass
class RunConfig:
    curve: dict
    graph: dict
    gains: dict
    delta: float
    u_max: float
    dt: float
    T: float
    initial_conditions: dict
    output_dir: str | None = None
    _raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, data):
        try:
            cfg = cls(
                curve=dict(data["curve"]),
                graph=dict(data["graph"]),
                gains=dict(data["gains"]),
                delta=float(data["delta"]),
                u_max=float(data["u_max"]),
                dt=float(data["dt"]),
                T=float(data["T"]),
                initial_conditions=dict(data["initial_conditions"]),
                output_dir=data.get("output_dir"),
                _raw=dict(data),
            )
        except KeyError as exc:
            raise ConfigError(f"config is missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self):
        out = {
            "curve": dict(self.curve),
            "graph": dict(self.graph),
            "gains": dict(self.gains),
            "delta": self.delta,
            "u_max": self.u_max,
            "dt": self.dt,
            "T": self.T,
            "initial_conditions": dict(self.initial_conditions),
        }
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    # -- validation and assembly ---------------------------------------

    def validate(self):
        if "K_C" not in self.gains or "K" not in self.gains:
            raise ConfigError("gains must provide K_C and K")
        try:
            curve, graph, cfg = self.build()
        except ConfigError:
            raise
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from None
        if self.T <= self.dt:
            raise ConfigError("horizon T must exceed the step dt")
        if cfg.k > 0.0 and not graph.circulant:
            raise ConfigError("balancing (K > 0) requires a circulant graph")
        ic = self.initial_conditions
        if "random" in ic:
            rnd = ic["random"]
            if "seed" not in rnd or "count" not in rnd:
                raise ConfigError("random initial conditions need 'seed' and 'count'")
            if int(rnd["count"]) != graph.n:
                raise ConfigError("random count must match the graph size")
        else:
            x, y, theta, _ = self.initial_states()
            if not (len(x) == len(y) == len(theta) == graph.n):
                raise ConfigError(
                    f"initial-condition lists must all have length n={graph.n}")

    def build(self):
        """Instantiate (curve, graph, control config)."""
        try:
            curve = curve_from_spec(self.curve)
            graph = graph_from_spec(self.graph)
            cfg = ControlConfig(
                kc=float(self.gains["K_C"]),
                k=float(self.gains["K"]),
                delta=self.delta,
                u_max=self.u_max,
                dt=self.dt,
            )
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from None
        return curve, graph, cfg

    def initial_states(self):
        """Explicit (x, y, theta, heading_tol) lists, drawing random
        feasible states first when configured."""
        ic = self.initial_conditions
        tol_deg = float(ic.get("heading_snap_tol_deg", 0.0))
        if tol_deg < 0.0:
            raise ConfigError("heading_snap_tol_deg must be nonnegative")
        tol = np.deg2rad(tol_deg)
        if "random" in ic:
            x, y, theta = self._draw_random(ic["random"])
            return x, y, theta, tol
        try:
            x = [float(v) for v in ic["x"]]
            y = [float(v) for v in ic["y"]]
        except KeyError as exc:
            raise ConfigError(f"initial_conditions missing {exc}") from None
        if "theta_deg" in ic:
            theta = [float(np.deg2rad(v)) for v in ic["theta_deg"]]
        elif "theta" in ic:
            theta = [float(v) for v in ic["theta"]]
        else:
            raise ConfigError("initial_conditions need theta_deg or theta")
        return x, y, theta, tol

    def _draw_random(self, spec):
        """Feasible random states: a point near the curve inside the
        barrier tube with the exactly aligned heading there."""
        rng = np.random.default_rng(int(spec["seed"]))
        count = int(spec["count"])
        frac = float(spec.get("error_fraction", 0.75))
        if not 0.0 < frac < 1.0:
            raise ConfigError("error_fraction must lie in (0, 1)")
        curve = curve_from_spec(self.curve)
        phi = rng.uniform(0.0, TWO_PI, count)
        radius = self.delta * frac * np.sqrt(rng.uniform(0.0, 1.0, count))
        angle = rng.uniform(0.0, TWO_PI, count)
        pos = curve.point(phi) + radius * np.exp(1j * angle)
        theta = np.angle(curve.tangent(phi))
        return list(pos.real), list(pos.imag), list(theta)
