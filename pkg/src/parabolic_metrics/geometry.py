"""Core types for the paraboloid ``u^2 + v^2 = 4 f w + 4 f^2``.

The focus sits at the origin, the focal plane is ``w = 0`` and the director
plane (the image plane of the orthogonal projection) is ``w = -2 f``.
All angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLineThroughFocus, DegenerateOrigin

DEFAULT_TOL_REL = 1e-9
DEFAULT_TOL_ABS_PER_F = 1e-12


@dataclass(frozen=True)
class Point3:
    u: float
    v: float
    w: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v) and math.isfinite(self.w)):
            raise ValueError(f"non-finite coordinates {self.u, self.v, self.w}")

    @property
    def r(self) -> float:
        """Distance from the w-axis."""
        return math.hypot(self.u, self.v)

    @property
    def phi(self) -> float:
        """Azimuth of the orthogonal footprint, measured from the u-axis."""
        return polar_angle(self.u, self.v)

    @property
    def theta(self) -> float:
        """Inclination of the ray from the focus to the focal plane."""
        return math.atan2(self.w, self.r)

    @property
    def norm(self) -> float:
        return math.sqrt(self.u * self.u + self.v * self.v + self.w * self.w)

    def __add__(self, other: Point3) -> Point3:
        return Point3(self.u + other.u, self.v + other.v, self.w + other.w)

    def __sub__(self, other: Point3) -> Point3:
        return Point3(self.u - other.u, self.v - other.v, self.w - other.w)

    def scale(self, s: float) -> Point3:
        return Point3(s * self.u, s * self.v, s * self.w)

    def dot(self, other: Point3) -> float:
        return self.u * other.u + self.v * other.v + self.w * other.w

    def cross(self, other: Point3) -> Point3:
        return Point3(
            self.v * other.w - self.w * other.v,
            self.w * other.u - self.u * other.w,
            self.u * other.v - self.v * other.u,
        )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.u, self.v, self.w)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w])


@dataclass(frozen=True)
class Point2:
    """A point of the director plane; its ``w`` is implicitly ``-2 f``."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"non-finite coordinates {self.u, self.v}")

    @property
    def r(self) -> float:
        return math.hypot(self.u, self.v)

    def lift(self, model: ParaboloidModel) -> Point3:
        return Point3(self.u, self.v, model.director_w)

    def as_tuple(self) -> tuple[float, float]:
        return (self.u, self.v)


@dataclass(frozen=True)
class ParaboloidModel:
    """The mirror surface and the tolerance policy used by every predicate.

    ``tol_abs`` defaults to ``1e-12 * f`` so that the policy is scale free.
    """

    f: float
    tol_rel: float = DEFAULT_TOL_REL
    tol_abs: float | None = field(default=None)

    def __post_init__(self):
        if not (math.isfinite(self.f) and self.f > 0):
            raise ValueError(f"focal parameter must be positive, got {self.f}")
        if self.tol_abs is None:
            object.__setattr__(self, "tol_abs", DEFAULT_TOL_ABS_PER_F * self.f)
        if not (0 < self.tol_rel <= 1e-6):
            raise ValueError(f"tol_rel must lie in (0, 1e-6], got {self.tol_rel}")
        if not self.tol_abs > 0:
            raise ValueError(f"tol_abs must be positive, got {self.tol_abs}")

    @property
    def focus(self) -> Point3:
        return Point3(0.0, 0.0, 0.0)

    @property
    def vertex(self) -> Point3:
        return Point3(0.0, 0.0, -self.f)

    @property
    def director_w(self) -> float:
        return -2.0 * self.f


@dataclass(frozen=True)
class FocalPlane:
    """Plane ``l u + m v + n w = 0`` through the focus, with a unit normal."""

    l: float
    m: float
    n: float

    def __post_init__(self):
        norm2 = self.l * self.l + self.m * self.m + self.n * self.n
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"normal ({self.l}, {self.m}, {self.n}) is not unit length")

    @property
    def normal(self) -> Point3:
        return Point3(self.l, self.m, self.n)

    @property
    def horizontal_norm(self) -> float:
        """``sqrt(l^2 + m^2)``, the sine of the plane's tilt."""
        return math.hypot(self.l, self.m)

    def evaluate(self, p: Point3) -> float:
        return self.l * p.u + self.m * p.v + self.n * p.w

    @classmethod
    def from_normal(cls, l: float, m: float, n: float) -> FocalPlane:
        """Normalize an arbitrary normal and apply the canonical sign."""
        norm = math.sqrt(l * l + m * m + n * n)
        if norm == 0.0:
            raise ValueError("zero normal")
        l, m, n = l / norm, m / norm, n / norm
        if n < 0 or (n == 0 and (m < 0 or (m == 0 and l < 0))):
            l, m, n = -l, -m, -n
        return cls(l + 0.0, m + 0.0, n + 0.0)


def surface_w(model: ParaboloidModel, u: float, v: float) -> float:
    return (u * u + v * v - 4.0 * model.f * model.f) / (4.0 * model.f)


def surface_residual(model: ParaboloidModel, p: Point3) -> float:
    f = model.f
    return p.u * p.u + p.v * p.v - 4.0 * f * p.w - 4.0 * f * f


def on_surface(model: ParaboloidModel, p: Point3) -> bool:
    scale = p.u * p.u + p.v * p.v + 4.0 * model.f * model.f
    return abs(surface_residual(model, p)) <= model.tol_abs + model.tol_rel * scale


def polar_angle(u: float, v: float) -> float:
    """Full-quadrant azimuth of ``(u, v)`` in ``(-pi, pi]``."""
    if u == 0.0 and v == 0.0:
        raise DegenerateOrigin("the azimuth of the origin is undefined")
    angle = math.atan2(v, u)
    # atan2 returns -pi for (negative u, -0.0)
    return math.pi if angle == -math.pi else angle


def rotate_about_w(p: Point3, phi: float) -> Point3:
    c, s = math.cos(phi), math.sin(phi)
    return Point3(c * p.u + s * p.v, -s * p.u + c * p.v, p.w)


def plane_through_focus(a: Point3, b: Point3, model: ParaboloidModel | None = None) -> FocalPlane:
    """Plane spanned by the focus and the line through ``a`` and ``b``.

    The normal is ``a x b`` normalized, signed so that ``n >= 0`` (then
    ``m >= 0``, then ``l > 0``).
    """
    tol = model.tol_abs if model is not None else DEFAULT_TOL_ABS_PER_F
    if a.norm <= tol or b.norm <= tol:
        raise DegenerateLineThroughFocus("an endpoint coincides with the focus")
    c = a.cross(b)
    # relative to |a||b| so the test is scale free
    if c.norm <= tol * max(1.0, a.norm * b.norm):
        raise DegenerateLineThroughFocus("the line passes through the focus")
    return FocalPlane.from_normal(c.u, c.v, c.w)
