"""The double projection: central projection from the focus onto the mirror,
orthogonal projection onto the director plane, and the perspective of that
orthogonal image."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateOnAxis
from .geometry import ParaboloidModel, Point2, Point3


@dataclass(frozen=True)
class ProjectionBundle:
    source: Point3
    a1: Point3
    a_prime: Point2
    a1_prime: Point2
    a2: Point3
    a2_prime: Point2

    @property
    def r(self) -> float:
        return self.source.r


def ray_parameter(model: ParaboloidModel, a: Point3) -> float:
    """Scale ``t > 0`` such that ``t * a`` lies on the surface.

    Substituting ``t * a`` into the surface equation gives
    ``t = 2 f (w + sqrt(w^2 + r^2)) / r^2``; the positive root is the one on
    the ray from the focus through ``a``.
    """
    r2 = a.u * a.u + a.v * a.v
    if math.sqrt(r2) <= model.tol_abs:
        raise DegenerateOnAxis(f"point {a.as_tuple()} lies on the optical axis")
    rho = math.sqrt(a.w * a.w + r2)
    if a.w >= 0:
        return 2.0 * model.f * (a.w + rho) / r2
    # same root, rationalized to avoid cancellation for w < 0
    return 2.0 * model.f / (rho - a.w)


def central_project(model: ParaboloidModel, a: Point3) -> Point3:
    return a.scale(ray_parameter(model, a))


def ortho_to_director(model: ParaboloidModel, p: Point3) -> Point2:
    return Point2(p.u, p.v)


def second_perspective(model: ParaboloidModel, a_prime: Point2) -> Point3:
    return central_project(model, a_prime.lift(model))


def double_project(model: ParaboloidModel, a: Point3) -> ProjectionBundle:
    a1 = central_project(model, a)
    a_prime = ortho_to_director(model, a)
    a2 = second_perspective(model, a_prime)
    return ProjectionBundle(
        source=a,
        a1=a1,
        a_prime=a_prime,
        a1_prime=ortho_to_director(model, a1),
        a2=a2,
        a2_prime=ortho_to_director(model, a2),
    )
