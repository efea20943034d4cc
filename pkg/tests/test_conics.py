import math

import numpy as np
import pytest

from parabolic_metrics.conics import (
    ConicKind,
    classify_section,
    edge_view,
    ellipse_axes,
    ellipse_center,
    from_local,
    parabola_abscissa,
    to_local,
)
from parabolic_metrics.errors import NotElliptic, NotOnPlane
from parabolic_metrics.geometry import FocalPlane, ParaboloidModel, Point3, on_surface
from parabolic_metrics.projection import central_project

from .conftest import close

TILTED = FocalPlane(0.6, 0.0, 0.8)


def test_classification_examples(unit):
    circle = classify_section(unit, FocalPlane(0, 0, 1))
    assert circle.kind is ConicKind.CIRCLE and circle.circle.radius == 2
    assert classify_section(unit, TILTED).kind is ConicKind.ELLIPSE
    parabola = classify_section(unit, FocalPlane(1, 0, 0))
    assert parabola.kind is ConicKind.PARABOLA
    assert close(parabola.parabola.x_dir.as_tuple(), (0, 1, 0))


def test_worked_ellipse(unit):
    e = classify_section(unit, TILTED).ellipse
    assert close(e.center.as_tuple(), (-1.5, 0, 1.125), 1e-12)
    assert math.isclose(e.a, 3.125, rel_tol=1e-12) and math.isclose(e.b, 2.5, rel_tol=1e-12)
    assert close(e.j_dir.as_tuple(), (-0.8, 0, 0.6), 1e-15)
    assert close(e.k_dir.as_tuple(), (0, -1, 0), 1e-15)
    # (j, k, normal) is right-handed
    assert close(e.j_dir.cross(e.k_dir).as_tuple(), TILTED.normal.as_tuple(), 1e-15)
    assert math.isclose(e.phi_oe, math.pi / 2)


def test_ellipse_center_symmetry_and_scaling(unit):
    assert close(ellipse_center(unit, FocalPlane(0, 0.6, 0.8)).as_tuple(), (0, -1.5, 1.125), 1e-12)
    a, b = ellipse_axes(ParaboloidModel(2.0), TILTED)
    assert math.isclose(a, 6.25) and math.isclose(b, 5.0)


def test_ellipse_helpers_reject_other_kinds(unit):
    with pytest.raises(NotElliptic):
        ellipse_center(unit, FocalPlane(0, 0, 1))
    with pytest.raises(NotElliptic):
        ellipse_axes(unit, FocalPlane(0, 1, 0))
    with pytest.raises(NotElliptic):
        classify_section(unit, FocalPlane(0, 1, 0)).projected_circle()


def test_axis_endpoints_lie_on_surface_and_plane(unit):
    sec = classify_section(unit, TILTED)
    e = sec.ellipse
    for direction, length in ((e.j_dir, e.a), (e.k_dir, e.b)):
        for sign in (1, -1):
            p = e.center + direction.scale(sign * length)
            assert on_surface(unit, p)
            assert abs(TILTED.evaluate(p)) < 1e-12


def test_local_coordinates(unit):
    sec = classify_section(unit, TILTED)
    e = sec.ellipse
    top = to_local(sec, e.center + e.j_dir.scale(e.a), unit)
    assert close((top.j, top.k, top.t), (3.125, 0, 0), 1e-12)
    side = to_local(sec, e.center + e.k_dir.scale(e.b), unit)
    assert close((side.j, side.k, side.t), (0, 2.5, math.pi / 2), 1e-12)
    with pytest.raises(NotOnPlane):
        to_local(sec, Point3(0, 0, 5), unit)


def test_edge_view_puts_minor_axis_along_y(unit):
    sec = classify_section(unit, FocalPlane.from_normal(0.3, -0.4, 0.6))
    e = sec.ellipse
    k = edge_view(sec, e.k_dir)
    assert abs(k.u) < 1e-15 and abs(k.w) < 1e-15
    n = edge_view(sec, sec.plane.normal)
    assert abs(n.v) < 1e-15


def test_parabola_abscissa(unit):
    sec = classify_section(unit, FocalPlane(0, 1, 0))
    assert math.isclose(abs(parabola_abscissa(sec, Point3(3, 0, 1.25))), 3)


def _random_planes(rng, count):
    normals = rng.normal(size=(count, 3))
    return [FocalPlane.from_normal(*n) for n in normals]


def test_trichotomy_and_identities():
    rng = np.random.default_rng(11)
    for f in (0.5, 1.0, 3.0):
        model = ParaboloidModel(f)
        planes = _random_planes(rng, 300) + [FocalPlane(0, 0, 1), FocalPlane(0, 1, 0), FocalPlane(1, 0, 0)]
        for plane in planes:
            sec = classify_section(model, plane)
            populated = [x is not None for x in (sec.circle, sec.ellipse, sec.parabola)]
            assert sum(populated) == 1
            if sec.kind is not ConicKind.ELLIPSE:
                continue
            e = sec.ellipse
            assert math.isclose(e.b * e.b, 2 * f * e.a, rel_tol=1e-9)
            assert plane.evaluate(e.center) == pytest.approx(0, abs=1e-12 * e.center.norm)
            for t in rng.uniform(-math.pi, math.pi, 20):
                loc = to_local(sec, from_local(sec, t), model)
                assert math.isclose(loc.j**2 / e.a**2 + loc.k**2 / e.b**2, 1, rel_tol=1e-8)


def test_projected_points_satisfy_ellipse_equation(unit):
    sec = classify_section(unit, TILTED)
    e = sec.ellipse
    rng = np.random.default_rng(5)
    # points of the plane 0.6u + 0.8w = 0 away from the axis
    for u, v in rng.uniform(-4, 4, size=(100, 2)):
        if math.hypot(u, v) < 0.1:
            continue
        p1 = central_project(unit, Point3(u, v, -0.75 * u))
        loc = to_local(sec, p1, unit)
        assert math.isclose(loc.j**2 / e.a**2 + loc.k**2 / e.b**2, 1, rel_tol=1e-9)
    center, radius = sec.projected_circle()
    assert close(center.as_tuple(), (-1.5, 0)) and radius == pytest.approx(2.5)
