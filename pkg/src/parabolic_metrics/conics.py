"""Sections of the paraboloid by planes through its focus.

A plane ``l u + m v + n w = 0`` cuts the surface in

* the focal circle of radius ``2 f`` when it is horizontal (``|n| = 1``),
* a parabola when it is vertical (``n = 0``),
* an ellipse otherwise.

Substituting the plane into the surface equation shows that the orthogonal
image of every elliptic section is the circle of radius ``2 f / |n|``
centred on ``(-2 f l / n, -2 f m / n)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NotElliptic, NotOnPlane
from .geometry import FocalPlane, ParaboloidModel, Point2, Point3, polar_angle, rotate_about_w


class ConicKind(enum.Enum):
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    PARABOLA = "parabola"


@dataclass(frozen=True)
class CircleSection:
    radius: float


@dataclass(frozen=True)
class EllipseSection:
    center: Point3
    a: float
    b: float
    j_dir: Point3
    k_dir: Point3
    phi_oe: float

    @property
    def projected_center(self) -> Point2:
        return Point2(self.center.u, self.center.v)

    @property
    def projected_radius(self) -> float:
        """Radius of the circle the section projects to on the director plane."""
        return self.b


@dataclass(frozen=True)
class ParabolaSection:
    phi: float
    x_dir: Point3


@dataclass(frozen=True)
class ConicSection:
    kind: ConicKind
    plane: FocalPlane
    circle: CircleSection | None = None
    ellipse: EllipseSection | None = None
    parabola: ParabolaSection | None = None

    def projected_circle(self) -> tuple[Point2, float]:
        """Centre and radius of the section's image on the director plane.

        Only defined for circles and ellipses; a parabolic section projects
        to a line through the origin.
        """
        if self.kind is ConicKind.CIRCLE:
            return Point2(0.0, 0.0), self.circle.radius
        if self.kind is ConicKind.ELLIPSE:
            return self.ellipse.projected_center, self.ellipse.projected_radius
        raise NotElliptic("a parabolic section projects to a straight line")


@dataclass(frozen=True)
class LocalPoint:
    j: float
    k: float
    t: float


def _kind(model: ParaboloidModel, plane: FocalPlane) -> ConicKind:
    n = abs(plane.n)
    if abs(n - 1.0) <= model.tol_rel:
        return ConicKind.CIRCLE
    if n <= model.tol_rel:
        return ConicKind.PARABOLA
    return ConicKind.ELLIPSE


def _require_elliptic(model: ParaboloidModel, plane: FocalPlane) -> None:
    kind = _kind(model, plane)
    if kind is not ConicKind.ELLIPSE:
        raise NotElliptic(f"plane {plane} cuts a {kind.value}, not an ellipse")


def ellipse_center(model: ParaboloidModel, plane: FocalPlane) -> Point3:
    _require_elliptic(model, plane)
    f, l, m, n = model.f, plane.l, plane.m, plane.n
    return Point3(-2.0 * f * l / n, -2.0 * f * m / n, 2.0 * f * (l * l + m * m) / (n * n))


def ellipse_axes(model: ParaboloidModel, plane: FocalPlane) -> tuple[float, float]:
    """Semi-axes ``(a, b)``: ``2a = 4f(1 + q)``, ``2b = 4f sqrt(1 + q)``.

    ``q`` is the squared ratio of the centre's height to its distance from
    the axis. It equals ``(l^2 + m^2) / n^2``, so ``1 + q = 1 / n^2`` and we
    evaluate it that way to stay finite for nearly horizontal planes.
    """
    _require_elliptic(model, plane)
    one_plus_q = 1.0 / (plane.n * plane.n)
    return 2.0 * model.f * one_plus_q, 2.0 * model.f * math.sqrt(one_plus_q)


def ellipse_frame(model: ParaboloidModel, plane: FocalPlane) -> ConicSection:
    """Ellipse with its in-plane frame.

    ``j_dir`` runs up the line of steepest slope (the major axis), ``k_dir``
    is horizontal (the minor axis) and ``(j_dir, k_dir, normal)`` is
    right-handed.
    """
    _require_elliptic(model, plane)
    center = ellipse_center(model, plane)
    a, b = ellipse_axes(model, plane)
    l, m, n = plane.l, plane.m, plane.n
    s = plane.horizontal_norm
    j_dir = Point3(-n * l / s, -n * m / s, s)
    k_dir = plane.normal.cross(j_dir)
    phi_oe = math.atan2(l, m)
    return ConicSection(
        kind=ConicKind.ELLIPSE,
        plane=plane,
        ellipse=EllipseSection(center=center, a=a, b=b, j_dir=j_dir, k_dir=k_dir, phi_oe=phi_oe),
    )


def classify_section(model: ParaboloidModel, plane: FocalPlane) -> ConicSection:
    kind = _kind(model, plane)
    if kind is ConicKind.CIRCLE:
        return ConicSection(kind=kind, plane=plane, circle=CircleSection(radius=2.0 * model.f))
    if kind is ConicKind.PARABOLA:
        # horizontal direction inside the vertical plane
        x_dir = Point3(-plane.m, plane.l, 0.0).scale(1.0 / plane.horizontal_norm)
        return ConicSection(
            kind=kind,
            plane=plane,
            parabola=ParabolaSection(phi=polar_angle(x_dir.u, x_dir.v), x_dir=x_dir),
        )
    return ellipse_frame(model, plane)


def edge_view(section: ConicSection, p: Point3) -> Point3:
    """Rotate ``p`` about the w-axis so the section plane is seen edge-on in x-z.

    The rotation angle is the azimuth of the plane normal, i.e. the
    complement of ``phi_oe``; afterwards the minor axis is parallel to y.
    """
    return rotate_about_w(p, math.pi / 2 - section.ellipse.phi_oe)


def to_local(section: ConicSection, p: Point3, model: ParaboloidModel | None = None) -> LocalPoint:
    """Signed coordinates of ``p`` along the major and minor axes.

    ``t`` is the eccentric anomaly, so ``j = a cos t`` and ``k = b sin t``
    when ``p`` lies on the ellipse.
    """
    if section.kind is not ConicKind.ELLIPSE:
        raise NotElliptic(f"local ellipse coordinates requested for a {section.kind.value}")
    e = section.ellipse
    tol_rel = model.tol_rel if model is not None else 1e-9
    tol_abs = model.tol_abs if model is not None else 0.0
    dist = section.plane.evaluate(p)
    if abs(dist) > tol_abs + 10 * tol_rel * max(p.norm, e.a):
        raise NotOnPlane(f"point {p.as_tuple()} is {dist:.3e} away from the section plane")
    d = p - e.center
    j = d.dot(e.j_dir)
    k = d.dot(e.k_dir)
    return LocalPoint(j=j, k=k, t=math.atan2(k / e.b, j / e.a))


def from_local(section: ConicSection, t: float) -> Point3:
    e = section.ellipse
    return e.center + e.j_dir.scale(e.a * math.cos(t)) + e.k_dir.scale(e.b * math.sin(t))


def parabola_abscissa(section: ConicSection, p: Point3) -> float:
    """Signed horizontal coordinate of ``p`` inside a vertical section plane."""
    x = section.parabola.x_dir
    return p.u * x.u + p.v * x.v
