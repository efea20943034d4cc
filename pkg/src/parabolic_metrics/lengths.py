"""True lengths of a space segment and of its images under the double projection.

Every curved image length is returned as an :class:`ArcResult` that pairs
the closed-form value with an adaptive-quadrature length of the same curve,
obtained by integrating along the projected segment directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import conics
from .conics import ConicKind, ConicSection
from .errors import DegenerateOnAxis, GeometryError, OutOfRange, SpanTooLarge
from .geometry import ParaboloidModel, Point2, Point3, plane_through_focus, polar_angle
from .projection import central_project, ortho_to_director
from .quadrature import arc_length_quadrature

TWO_PI = 2.0 * math.pi

# Relative residual each analytic route is expected to meet against its oracle.
BOUNDS = {
    "zero": 1e-9,
    "circle": 1e-9,
    "circle_abscissa": 1e-9,
    "parabola": 1e-9,
    "chord": 1e-9,
    "ellipse_composite": 1e-6,
}
DEFAULT_ELLIPSE_SPANS = 1024
ORACLE_TOL = 1e-11


@dataclass(frozen=True)
class ArcResult:
    analytic: float
    oracle: float
    rel_residual: float
    method: str
    kind: str

    @property
    def bound(self) -> float | None:
        return BOUNDS.get(self.method)

    @property
    def ok(self) -> bool:
        bound = self.bound
        return bound is None or self.rel_residual <= bound


@dataclass(frozen=True)
class LineImageLengths:
    L: float
    L_prime: float
    L1: ArcResult
    L1_prime: ArcResult
    L2: ArcResult
    L2_prime: ArcResult

    def arcs(self) -> dict[str, ArcResult]:
        return {"L1": self.L1, "L1_prime": self.L1_prime, "L2": self.L2, "L2_prime": self.L2_prime}


def _arc_result(analytic: float, oracle: float, method: str, kind: str, tol_abs: float) -> ArcResult:
    return ArcResult(
        analytic=analytic,
        oracle=oracle,
        rel_residual=abs(analytic - oracle) / max(oracle, tol_abs),
        method=method,
        kind=kind,
    )


def space_length(a: Point3, b: Point3) -> float:
    return (a - b).norm


def ortho_length(a: Point2, b: Point2) -> float:
    return math.hypot(a.u - b.u, a.v - b.v)


def wrap_angle(delta: float) -> float:
    """Absolute angular difference folded onto ``[0, pi]``."""
    d = math.fmod(abs(delta), TWO_PI)
    return TWO_PI - d if d > math.pi else d


def circle_arc_length(model: ParaboloidModel, phi_a: float, phi_b: float, major: bool = False) -> float:
    """Arc of the focal circle (radius ``2 f``) between two azimuths."""
    d = wrap_angle(phi_b - phi_a)
    if major:
        d = TWO_PI - d
    return 2.0 * model.f * d


def elliptic_arc_approx(a: float, b: float, t1: float, t2: float) -> float:
    """Chord-based approximation ``chord * dt / (2 sin(dt / 2))``.

    ``t1`` and ``t2`` are eccentric anomalies. Exact for a circle.
    """
    if not a >= b > 0:
        raise ValueError(f"need a >= b > 0, got a={a}, b={b}")
    d = abs(t1 - t2)
    if d >= TWO_PI:
        raise SpanTooLarge(f"parametric span {d} is not below 2*pi")
    # chord = 2 sin(dt/2) * hypot(a sin tm, b cos tm) by sum-to-product, so
    # the sine cancels against the correction factor without roundoff
    tm = 0.5 * (t1 + t2)
    return d * math.hypot(a * math.sin(tm), b * math.cos(tm))


def elliptic_arc_composite(a: float, b: float, t1: float, t2: float, spans: int) -> float:
    """Sum of :func:`elliptic_arc_approx` over ``spans`` equal parameter steps."""
    if spans < 1:
        raise ValueError("spans must be positive")
    h = (t2 - t1) / spans
    return math.fsum(elliptic_arc_approx(a, b, t1 + i * h, t1 + (i + 1) * h) for i in range(spans))


def _clamped_ratio(x: float, r: float, tol: float) -> float:
    q = x / r
    if abs(q) > 1.0 + tol:
        raise OutOfRange(f"abscissa offset {x} lies outside a circle of radius {r}")
    return max(-1.0, min(1.0, q))


def _asin_sweep(s1: float, s2: float) -> float:
    return abs(math.asin(s2) - math.asin(s1))


def circular_arc_by_abscissa(center_u: float, r: float, u1: float, u2: float, tol: float = 1e-9) -> float:
    """Length of a circular arc that is monotone in ``u``, from its end abscissae."""
    return r * _asin_sweep(_clamped_ratio(u1 - center_u, r, tol), _clamped_ratio(u2 - center_u, r, tol))


def arc_sweep(theta_p: float, theta_q: float, theta_via: float | None) -> float:
    """Signed sweep from ``theta_p`` to ``theta_q`` passing through ``theta_via``.

    Without ``via`` the shorter way round is taken.
    """
    ccw = (theta_q - theta_p) % TWO_PI
    if theta_via is None:
        return ccw if ccw <= math.pi else ccw - TWO_PI
    via = (theta_via - theta_p) % TWO_PI
    return ccw if via <= ccw else ccw - TWO_PI


def circular_arc_between(
    center: Point2, r: float, p: Point2, q: Point2, via: Point2 | None = None, tol: float = 1e-9
) -> float:
    """Arc length between two points of a circle, through ``via`` if given.

    The arc is cut where it turns back in ``u`` (angles ``0`` and ``pi``
    about the centre) and the abscissa form is applied to each piece.
    """
    theta_p = polar_angle(p.u - center.u, p.v - center.v)
    theta_q = polar_angle(q.u - center.u, q.v - center.v)
    theta_via = None if via is None else polar_angle(via.u - center.u, via.v - center.v)
    sweep = arc_sweep(theta_p, theta_q, theta_via)
    start, end = (p, q) if sweep >= 0 else (q, p)
    lo, hi = sorted((theta_p, theta_p + sweep))
    ks = range(math.floor(lo / math.pi) + 1, math.ceil(hi / math.pi))
    # the turning points sit exactly at asin(+-1)
    angles = [_abscissa_angle(start, center, r, tol)]
    angles += [math.pi / 2 if k % 2 == 0 else -math.pi / 2 for k in ks]
    angles.append(_abscissa_angle(end, center, r, tol))
    return r * math.fsum(abs(angles[i + 1] - angles[i]) for i in range(len(angles) - 1))


def _abscissa_angle(p: Point2, center: Point2, r: float, tol: float) -> float:
    """``asin((u - u_c) / r)``, switched to the ordinate near the turning points.

    asin loses half the digits as its argument nears 1; there the same angle
    is ``+-acos(|v - v_c| / r)``, which is well conditioned.
    """
    x = _clamped_ratio(p.u - center.u, r, tol)
    if abs(x) <= math.sqrt(0.5):
        return math.asin(x)
    y = min(abs(p.v - center.v) / r, 1.0)
    return math.copysign(math.acos(y), x)


def parabola_chord_proj(x_a: float, x_b: float) -> float:
    return abs(x_a - x_b)


def parabola_arc_antiderivative(f: float, x: float) -> float:
    """``f asinh(x / 2f) + x sqrt(x^2 + 4 f^2) / (4 f)``.

    Antiderivative of ``sqrt(1 + (x / 2f)^2)``, the speed of the section
    ``z = (x^2 - 4 f^2) / 4f`` of a vertical plane through the focus.
    """
    return f * math.asinh(x / (2.0 * f)) + x * math.sqrt(x * x + 4.0 * f * f) / (4.0 * f)


def parabola_arc_length(model: ParaboloidModel, x_a: float, x_b: float) -> float:
    return abs(parabola_arc_antiderivative(model.f, x_a) - parabola_arc_antiderivative(model.f, x_b))


def perspective_path(model: ParaboloidModel, a: Point3, b: Point3):
    """Central image of the segment ``a + s (b - a)``, ``s`` in ``[0, 1]``.

    Returns ``(path, derivative)``. The ray scale is written as ``2f / g``
    with ``g = |P| - w`` evaluated without cancellation, and both are
    differentiated in closed form.
    """
    f2 = 2.0 * model.f
    du, dv, dw = b.u - a.u, b.v - a.v, b.w - a.w

    def parts(s: float):
        u, v, w = a.u + s * du, a.v + s * dv, a.w + s * dw
        r2 = u * u + v * v
        rho = math.sqrt(r2 + w * w)
        g = rho - w if w < 0 else r2 / (rho + w)
        return u, v, w, rho, g

    def path(s: float) -> tuple[float, float, float]:
        u, v, w, _, g = parts(s)
        k = f2 / g
        return (k * u, k * v, k * w)

    def derivative(s: float) -> tuple[float, float, float]:
        u, v, w, rho, g = parts(s)
        g_dot = (u * du + v * dv - g * dw) / rho
        k = f2 / g
        k_dot = -f2 * g_dot / (g * g)
        return (k * du + k_dot * u, k * dv + k_dot * v, k * dw + k_dot * w)

    return path, derivative


def _check_axis_crossing(model: ParaboloidModel, a: Point3, b: Point3) -> None:
    """Reject segments whose line meets the axis above the focus."""
    du, dv = b.u - a.u, b.v - a.v
    cross = a.u * dv - a.v * du
    if abs(cross) > model.tol_abs * max(1.0, a.r * math.hypot(du, dv)):
        return
    # footprint line passes through the axis; find where the segment does
    d2 = du * du + dv * dv
    if d2 == 0.0:
        return
    s = -(a.u * du + a.v * dv) / d2
    if 0.0 <= s <= 1.0 and a.w + s * (b.w - a.w) > 0.0:
        raise DegenerateOnAxis("the segment crosses the axis above the focus; its image is unbounded")


def _section_lengths(
    model: ParaboloidModel, p: Point3, q: Point3, ellipse_spans: int
) -> tuple[ArcResult, ArcResult, ConicSection]:
    """Lengths of the central image of segment ``pq`` and of that image's footprint."""
    _check_axis_crossing(model, p, q)
    section = conics.classify_section(model, plane_through_focus(p, q, model))
    p1 = central_project(model, p)
    q1 = central_project(model, q)
    m1 = central_project(model, p + (q - p).scale(0.5))
    kind = section.kind.value

    if section.kind is ConicKind.CIRCLE:
        arc = circle_arc_length(model, polar_angle(p1.u, p1.v), polar_angle(q1.u, q1.v))
        length, length_prime = arc, arc
        method, method_prime = "circle", "circle"
    elif section.kind is ConicKind.ELLIPSE:
        e = section.ellipse
        tp = conics.to_local(section, p1, model).t
        tq = conics.to_local(section, q1, model).t
        tm = conics.to_local(section, m1, model).t
        sweep = arc_sweep(tp, tq, tm)
        t1, t2 = sorted((tp, tp + sweep))
        length = elliptic_arc_composite(e.a, e.b, t1, t2, ellipse_spans)
        method = "ellipse_composite" if ellipse_spans > 1 else "ellipse_chord"
        center, radius = section.projected_circle()
        length_prime = circular_arc_between(
            center,
            radius,
            ortho_to_director(model, p1),
            ortho_to_director(model, q1),
            via=ortho_to_director(model, m1),
        )
        method_prime = "circle_abscissa"
    else:
        xp = conics.parabola_abscissa(section, p1)
        xq = conics.parabola_abscissa(section, q1)
        length = parabola_arc_length(model, xp, xq)
        length_prime = parabola_chord_proj(xp, xq)
        method, method_prime = "parabola", "chord"

    path, deriv = perspective_path(model, p, q)
    oracle = arc_length_quadrature(path, 0.0, 1.0, tol=ORACLE_TOL, derivative=deriv)
    oracle_prime = arc_length_quadrature(
        lambda s: path(s)[:2], 0.0, 1.0, tol=ORACLE_TOL, derivative=lambda s: deriv(s)[:2]
    )
    return (
        _arc_result(length, oracle, method, kind, model.tol_abs),
        _arc_result(length_prime, oracle_prime, method_prime, kind, model.tol_abs),
        section,
    )


def ellipse_spans_for(model: ParaboloidModel, p: Point3, q: Point3, base: int = DEFAULT_ELLIPSE_SPANS) -> int:
    """Sub-span count for the composite chord formula.

    The midpoint-type error grows like ``h^2 a / b``, so the count scales
    with ``sqrt(a / b) = 1 / sqrt(|n|)``.
    """
    try:
        n = abs(plane_through_focus(p, q, model).n)
    except GeometryError:
        return base
    if n <= 0.0:
        return base
    return int(base * math.ceil(1.0 / math.sqrt(n)))


def line_image_lengths(
    model: ParaboloidModel, a: Point3, b: Point3, ellipse_spans: int | None = None
) -> LineImageLengths:
    """All six lengths tied to the segment ``ab``.

    ``L1``/``L1_prime`` come from the central image of ``ab`` and its
    footprint; ``L2``/``L2_prime`` repeat the construction for the footprint
    segment lifted to the director plane. ``ellipse_spans=1`` reproduces the
    single chord formula for elliptic images; by default the span count is
    chosen from the section's eccentricity.
    """
    a_prime = ortho_to_director(model, a)
    b_prime = ortho_to_director(model, b)
    L = space_length(a, b)
    L_prime = ortho_length(a_prime, b_prime)
    if L == 0.0:
        # still validates that the point has a perspective
        central_project(model, a)
        zero = ArcResult(0.0, 0.0, 0.0, "zero", "none")
        return LineImageLengths(L, L_prime, zero, zero, zero, zero)

    spans1 = ellipse_spans or ellipse_spans_for(model, a, b)
    L1, L1_prime, _ = _section_lengths(model, a, b, spans1)

    if L_prime == 0.0:
        zero = ArcResult(0.0, 0.0, 0.0, "zero", "none")
        return LineImageLengths(L, L_prime, L1, L1_prime, zero, zero)
    lifted_a, lifted_b = a_prime.lift(model), b_prime.lift(model)
    spans2 = ellipse_spans or ellipse_spans_for(model, lifted_a, lifted_b)
    L2, L2_prime, _ = _section_lengths(model, lifted_a, lifted_b, spans2)
    return LineImageLengths(L, L_prime, L1, L1_prime, L2, L2_prime)
