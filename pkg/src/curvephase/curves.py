"""Differential geometry of simple closed polar curves.

A curve is the locus ``center + R(phi) * exp(i*phi)`` for ``phi`` in
``[0, 2*pi)`` with ``R > 0`` everywhere, traversed anticlockwise. Three
families are built in: circles, convex limacons ``R = b + a*sin(phi)``
(``b >= 2a``), and polar roses ``R = s*(a + cos(b*phi))``.

All per-curve tables (arc length, turning angle, curvature extrema) are
computed once at construction and are immutable afterwards, so curve
objects can be shared freely between threads. Every operation is a pure
function of its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicSpline
from shapely.geometry import LineString

TWO_PI = 2.0 * np.pi

# Quadrature/cache resolution: number of uniform intervals over [0, 2pi).
GRID_INTERVALS = 8192

# |R'(phi)*cos(phi) - R(phi)*sin(phi)| below this means the tangent line
# is vertical and its slope is undefined.
VERTICAL_TANGENT_EPS = 1e-12


class VerticalTangent(ValueError):
    """Tangent slope is undefined (vertical tangent line) at this parameter."""


class OffsetNotSimple(ValueError):
    """Offset locus at the requested distance is not a simple closed curve."""


def wrap_angle(phi):
    """Wrap angle(s) to [0, 2*pi)."""
    return np.mod(phi, TWO_PI)


def polyline_perimeter(points):
    """Total edge length of a closed polyline given as complex points."""
    return float(np.abs(np.diff(points, append=points[:1])).sum())


def shoelace_area(points):
    """Signed-area magnitude of a closed polyline given as complex points."""
    x, y = points.real, points.imag
    return float(0.5 * np.abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def polyline_is_simple(points):
    """True when the closed polyline has no self-intersections."""
    ring = np.column_stack([points.real, points.imag])
    ring = np.vstack([ring, ring[:1]])
    return bool(LineString(ring).is_simple)


@dataclass(frozen=True)
class CurveFrame:
    """Local geometry at parameter ``phi``: displacement from the center,
    unit tangent/exterior normal, tangent angle ``mu``, curvature, arc
    length from ``phi = 0`` and parametric speed ``|d rho / d phi|``."""

    phi: float
    rho: complex
    tangent: complex
    normal: complex
    mu: float
    kappa: float
    sigma: float
    speed: float


@dataclass(frozen=True)
class SafeDistanceCheck:
    """Outcome of the safe-distance admissibility test."""

    ok: bool
    min_turn_radius: float
    reason: str


@dataclass(frozen=True)
class CurveReport:
    """Geometric summary of a curve and its offset boundaries at distance
    ``delta``. Boundary perimeters are chord sums and boundary areas are
    shoelace areas of the sampled offset polylines, so the closed-form
    identities they satisfy are genuine numerical checks."""

    perimeter: float
    area: float
    kappa_max: float
    min_turn_radius: float
    total_signed_curvature: float
    boundary_perimeters: dict
    boundary_areas: dict
    assumption1_ok: bool

    def to_dict(self):
        return {
            "perimeter": self.perimeter,
            "area": self.area,
            "kappa_max": self.kappa_max,
            "min_turn_radius": self.min_turn_radius,
            "total_signed_curvature": self.total_signed_curvature,
            "boundary_perimeters": dict(self.boundary_perimeters),
            "boundary_areas": dict(self.boundary_areas),
            "assumption1_ok": self.assumption1_ok,
        }


class PolarCurve:
    """Base class for simple closed polar curves.

    Subclasses provide :meth:`radius_derivs` returning ``(R, R', R'')``
    for the family. Construction validates ``R > 0`` and periodicity on
    the cache grid and precomputes cumulative arc length and turning.
    """

    def __init__(self, center=0j):
        self.center = complex(center)
        self._build_tables()

    def radius_derivs(self, phi):
        """Radius and its first two parametric derivatives at ``phi``."""
        raise NotImplementedError

    # -- construction-time caches ------------------------------------

    def _build_tables(self):
        grid = np.linspace(0.0, TWO_PI, GRID_INTERVALS + 1)
        R, R1, R2 = self.radius_derivs(grid)
        if np.min(R) <= 0.0:
            raise ValueError(f"{type(self).__name__}: radius must stay positive")
        for name, vals in (("R", R), ("R'", R1), ("R''", R2)):
            if abs(vals[0] - vals[-1]) > 1e-12 * max(1.0, abs(vals[0])):
                raise ValueError(f"{type(self).__name__}: {name} is not 2pi-periodic")

        speed2 = R1 * R1 + R * R
        speed = np.sqrt(speed2)
        kappa = (2.0 * R1 * R1 - R * R2 + R * R) / (speed2 * speed)

        sigma = cumulative_simpson(speed, x=grid, initial=0.0)
        self._phi_grid = grid
        # Cubic interpolation keeps off-node arc length accurate to ~1e-9,
        # which linear interpolation cannot do at this grid resolution.
        self._sigma_spline = CubicSpline(grid, sigma)
        self.perimeter = float(sigma[-1])
        # Dense linear table for the hot-path phase lookup (np.interp is
        # several times cheaper than a spline call on small batches).
        self._phase_grid = np.linspace(0.0, TWO_PI, (1 << 18) + 1)
        self._phase_table = (
            TWO_PI * self._sigma_spline(self._phase_grid) / self.perimeter
        )
        self.total_signed_curvature = float(
            cumulative_simpson(kappa * speed, x=grid, initial=0.0)[-1]
        )
        self.kappa_max = self._refine_abs_kappa_max(grid, kappa)
        self.min_turn_radius = 1.0 / self.kappa_max

    def _refine_abs_kappa_max(self, grid, kappa):
        y = np.abs(kappa[:-1])
        i = int(np.argmax(y))
        n = len(y)
        ym, y0, yp = y[(i - 1) % n], y[i], y[(i + 1) % n]
        denom = ym - 2.0 * y0 + yp
        best = y0
        if denom < 0.0:
            # parabolic vertex through the three samples around the max
            step = 0.5 * (ym - yp) / denom
            phi_star = grid[i] + step * (grid[1] - grid[0])
            best = max(best, float(np.abs(self.curvature(wrap_angle(phi_star)))))
        return float(best)

    # -- pointwise geometry -------------------------------------------

    def point(self, phi):
        """Absolute position on the curve at ``phi``."""
        R, _, _ = self.radius_derivs(phi)
        return self.center + R * np.exp(1j * np.asarray(phi))

    def local_geometry(self, phi):
        """Displacement from center, parametric speed and curvature at ``phi``.

        Single evaluation shared by the feedback law and the integrator so
        the same curvature sample drives both the turn rate and the
        tracking-point rate.
        """
        R, R1, R2 = self.radius_derivs(phi)
        speed2 = R1 * R1 + R * R
        speed = np.sqrt(speed2)
        kappa = (2.0 * R1 * R1 - R * R2 + R * R) / (speed2 * speed)
        rho = R * np.exp(1j * np.asarray(phi))
        return rho, speed, kappa

    def speed(self, phi):
        R, R1, _ = self.radius_derivs(phi)
        return np.sqrt(R1 * R1 + R * R)

    def curvature(self, phi):
        R, R1, R2 = self.radius_derivs(phi)
        speed2 = R1 * R1 + R * R
        return (2.0 * R1 * R1 - R * R2 + R * R) / (speed2 * np.sqrt(speed2))

    def tangent(self, phi):
        """Unit tangent, pointing along increasing ``phi`` (anticlockwise)."""
        R, R1, _ = self.radius_derivs(phi)
        return (R1 + 1j * R) * np.exp(1j * np.asarray(phi)) / np.sqrt(R1 * R1 + R * R)

    def normal(self, phi):
        """Exterior unit normal (tangent rotated clockwise by pi/2)."""
        return -1j * self.tangent(phi)

    def frame(self, phi):
        """Full local frame at ``phi`` (accepts scalars or arrays)."""
        rho, speed, kappa = self.local_geometry(phi)
        tangent = self.tangent(phi)
        return CurveFrame(
            phi=phi,
            rho=rho,
            tangent=tangent,
            normal=-1j * tangent,
            mu=np.angle(tangent),
            kappa=kappa,
            sigma=self.arc_length(phi),
            speed=speed,
        )

    def arc_length(self, phi):
        """Arc length from ``phi = 0``; requires ``0 <= phi <= 2*pi``."""
        phi = np.asarray(phi, dtype=float)
        if np.any(phi < -1e-12) or np.any(phi > TWO_PI + 1e-12):
            raise ValueError("arc_length expects phi in [0, 2*pi]")
        return self._sigma_spline(np.clip(phi, 0.0, TWO_PI))

    def curve_phase(self, phi):
        """Normalized arc-length phase ``2*pi*sigma(phi)/perimeter``, any phi."""
        return np.interp(wrap_angle(phi), self._phase_grid, self._phase_table)

    def tangent_slope(self, phi):
        """Slope dy/dx of the tangent line at scalar ``phi``.

        Raises :class:`VerticalTangent` where the denominator vanishes.
        """
        R, R1, _ = self.radius_derivs(phi)
        denom = R1 * np.cos(phi) - R * np.sin(phi)
        if abs(denom) <= VERTICAL_TANGENT_EPS:
            raise VerticalTangent(f"tangent line is vertical at phi={phi!r}")
        return (R1 * np.sin(phi) + R * np.cos(phi)) / denom

    # -- integral quantities and offsets -------------------------------

    def enclosed_area(self):
        """Area enclosed by the curve, ``0.5 * integral of R^2``."""
        R, _, _ = self.radius_derivs(self._phi_grid)
        return float(0.5 * simpson(R * R, x=self._phi_grid))

    def offset_boundary(self, delta, side, samples=GRID_INTERVALS):
        """Closed polyline of the offset locus at distance ``delta``.

        ``side`` is ``"exterior"`` (along the exterior normal) or
        ``"interior"``. The interior offset requires the safe-distance
        check to pass, otherwise the locus is not a simple closed curve.
        Returns ``samples`` complex points; the closing edge is implied.
        """
        if delta <= 0.0:
            raise ValueError("offset distance must be positive")
        if side not in ("exterior", "interior"):
            raise ValueError(f"unknown side {side!r}")
        if side == "interior":
            check = self.check_safe_distance(delta)
            if not check.ok:
                raise OffsetNotSimple(check.reason)
        phi = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        sign = 1.0 if side == "exterior" else -1.0
        rho, _, _ = self.local_geometry(phi)
        return self.center + rho + sign * delta * self.normal(phi)

    def check_safe_distance(self, delta):
        """Test whether both offset loci at ``delta`` are simple closed curves.

        Sufficient condition ``delta < min turn radius``, backed by a
        polyline self-intersection sweep on both sampled offsets.
        """
        if delta <= 0.0:
            raise ValueError("offset distance must be positive")
        if delta >= self.min_turn_radius:
            return SafeDistanceCheck(
                ok=False,
                min_turn_radius=self.min_turn_radius,
                reason=(
                    f"distance {delta:g} reaches the minimum turning radius "
                    f"{self.min_turn_radius:.6g}; interior offset degenerates"
                ),
            )
        phi = np.linspace(0.0, TWO_PI, GRID_INTERVALS, endpoint=False)
        rho, _, _ = self.local_geometry(phi)
        normal = self.normal(phi)
        for sign, side in ((1.0, "exterior"), (-1.0, "interior")):
            if not polyline_is_simple(self.center + rho + sign * delta * normal):
                return SafeDistanceCheck(
                    ok=False,
                    min_turn_radius=self.min_turn_radius,
                    reason=f"{side} offset polyline self-intersects at distance {delta:g}",
                )
        return SafeDistanceCheck(
            ok=True,
            min_turn_radius=self.min_turn_radius,
            reason="",
        )

    def report(self, delta, samples=GRID_INTERVALS):
        """Full :class:`CurveReport` for this curve and offset distance."""
        check = self.check_safe_distance(delta)
        if not check.ok:
            raise OffsetNotSimple(check.reason)
        outer = self.offset_boundary(delta, "exterior", samples)
        inner = self.offset_boundary(delta, "interior", samples)
        return CurveReport(
            perimeter=self.perimeter,
            area=self.enclosed_area(),
            kappa_max=self.kappa_max,
            min_turn_radius=self.min_turn_radius,
            total_signed_curvature=self.total_signed_curvature,
            boundary_perimeters={
                "exterior": polyline_perimeter(outer),
                "interior": polyline_perimeter(inner),
            },
            boundary_areas={
                "exterior": shoelace_area(outer),
                "interior": shoelace_area(inner),
            },
            assumption1_ok=check.ok,
        )


class Circle(PolarCurve):
    """Circle of constant radius."""

    def __init__(self, radius, center=0j):
        if radius <= 0.0:
            raise ValueError("circle radius must be positive")
        self.radius = float(radius)
        super().__init__(center)

    def radius_derivs(self, phi):
        phi = np.asarray(phi, dtype=float)
        R = np.full_like(phi, self.radius)
        zero = np.zeros_like(phi)
        return R, zero, zero


class ConvexLimacon(PolarCurve):
    """Convex limacon ``R = b + a*sin(phi)`` with ``b >= 2a > 0``."""

    def __init__(self, a, b, center=0j):
        if a <= 0.0:
            raise ValueError("limacon parameter a must be positive")
        if b < 2.0 * a:
            raise ValueError("limacon requires b >= 2a for a simple convex curve")
        self.a = float(a)
        self.b = float(b)
        super().__init__(center)

    def radius_derivs(self, phi):
        phi = np.asarray(phi, dtype=float)
        return (
            self.b + self.a * np.sin(phi),
            self.a * np.cos(phi),
            -self.a * np.sin(phi),
        )


class PolarRose(PolarCurve):
    """Polar rose ``R = s*(a + cos(b*phi))`` with integer lobe count ``b``."""

    def __init__(self, a, b, s, center=0j):
        if a <= 1.0:
            raise ValueError("rose requires a > 1 so the radius stays positive")
        if s <= 0.0:
            raise ValueError("rose scale s must be positive")
        if b != int(b) or b <= 0:
            raise ValueError("rose lobe count b must be a positive integer")
        self.a = float(a)
        self.b = float(int(b))
        self.s = float(s)
        super().__init__(center)

    def radius_derivs(self, phi):
        phi = np.asarray(phi, dtype=float)
        c = np.cos(self.b * phi)
        return (
            self.s * (self.a + c),
            -self.s * self.b * np.sin(self.b * phi),
            -self.s * self.b * self.b * c,
        )


_FAMILIES = {
    "circle": lambda p, c: Circle(p["radius"], c),
    "convex_limacon": lambda p, c: ConvexLimacon(p["a"], p["b"], c),
    "polar_rose": lambda p, c: PolarRose(p["a"], p["b"], p["s"], c),
}


def curve_from_spec(spec):
    """Build a curve from a config mapping, e.g.
    ``{"family": "polar_rose", "a": 10, "b": 6, "s": 5, "center": [0, 0]}``.
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    if family not in _FAMILIES:
        raise ValueError(f"unknown curve family {family!r}; expected one of {sorted(_FAMILIES)}")
    cx, cy = spec.pop("center", (0.0, 0.0))
    try:
        return _FAMILIES[family](spec, complex(float(cx), float(cy)))
    except KeyError as exc:
        raise ValueError(f"curve family {family!r} is missing parameter {exc}") from None
