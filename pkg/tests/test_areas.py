import math

import numpy as np
import pytest

from parabolic_metrics.areas import (
    MeshSpec,
    VerticalRect,
    annular_sector_area,
    annular_sector_result,
    cylindrical_patch_area,
    cylindrical_patch_result,
    monte_carlo_surface_area,
    paraboloid_mesh_area,
    paraboloid_patch_area_closed,
    polar_mesh_area,
    quad_patch_area,
    vertical_rect_projected_area,
    vertical_rect_surface_area,
)
from parabolic_metrics.errors import DegenerateOnAxis, NoConvergence, ValidationError
from parabolic_metrics.geometry import ParaboloidModel, Point2, Point3

from .conftest import rel_err

# 30-digit quadrature of the radial area integrals over the rect's image
RECT_PROJECTED = 7.33007031599847708297
RECT_SURFACE = 13.0122557989367137912
SECTOR_1_2_QUARTER = 2.9968377796108516
DISC_2 = 15.317795260605168


@pytest.fixture
def rect():
    return VerticalRect(Point3(2, 0, 1), Point3(0, 2, 1), Point3(0, 2, 0), Point3(2, 0, 0))


def test_cylindrical_patch_area():
    assert cylindrical_patch_area(2, 1, 0, math.pi / 2) == math.pi
    assert cylindrical_patch_area(3, 1.5, 1.5, 2.0) == 0
    assert cylindrical_patch_area(1, 2, 0, math.pi) == 2 * math.pi
    with pytest.raises(ValueError):
        cylindrical_patch_area(1, 0, 1, 1)


def test_annular_sector_area():
    assert annular_sector_area(2, 1, math.pi / 2) == 3 * math.pi / 4
    assert annular_sector_area(1.5, 1.5, 1.0) == 0
    assert annular_sector_area(2, 1, 2 * math.pi) == 3 * math.pi
    with pytest.raises(ValueError):
        annular_sector_area(1, 2, 1)


def test_sector_and_cylinder_oracles():
    res = annular_sector_result(1, 2, -0.3, 1.2, 1e-12)
    assert res.ok and res.rel_residual < 1e-12
    res = cylindrical_patch_result(2, 1, 0, math.pi / 2, 1e-12)
    assert res.ok and res.analytic_or_mesh == math.pi


def test_quad_patch_area():
    o, x, y = Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)
    assert quad_patch_area(o, x, Point3(1, 1, 0), y) == pytest.approx(1)
    assert quad_patch_area(o, x, Point3(2, 0, 0), Point3(3, 0, 0)) == 0
    assert quad_patch_area(o, x, Point3(1, 1, 1), Point3(0, 1, 1)) == pytest.approx(math.sqrt(2))


def test_closed_form_patch():
    unit = ParaboloidModel(1)
    assert rel_err(paraboloid_patch_area_closed(unit, 1, 2, math.pi / 2), SECTOR_1_2_QUARTER) < 1e-15
    assert rel_err(paraboloid_patch_area_closed(unit, 0, 2, 2 * math.pi), DISC_2) < 1e-15
    assert paraboloid_patch_area_closed(unit, 1.2, 1.2, 1.0) == 0
    # nearly flat surface keeps full precision
    flat = paraboloid_patch_area_closed(ParaboloidModel(1e8), 1, 2, math.pi / 2)
    assert rel_err(flat, 3 * math.pi / 4) < 1e-15


def test_mesh_area_example():
    res = paraboloid_mesh_area(ParaboloidModel(1), 1, 2, 0, math.pi / 2, MeshSpec(64, 64, 1e-4))
    assert rel_err(res.analytic_or_mesh, SECTOR_1_2_QUARTER) <= 1e-3
    assert res.ok and res.method == "mesh"
    assert paraboloid_mesh_area(ParaboloidModel(1), 1.5, 1.5, 0, 1).analytic_or_mesh == 0


def test_mesh_refinement_is_monotone():
    unit = ParaboloidModel(1)
    values = [polar_mesh_area(unit, 1, 2, 0, math.pi / 2, n, n) for n in (5, 9, 17, 33, 65, 129)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] < SECTOR_1_2_QUARTER


def test_mesh_flat_limit():
    res = paraboloid_mesh_area(ParaboloidModel(1000), 1, 2, 0, math.pi / 2, MeshSpec(64, 64, 1e-6))
    assert rel_err(res.analytic_or_mesh, 3 * math.pi / 4) <= 1e-6


def test_mesh_refinement_can_give_up():
    with pytest.raises(NoConvergence):
        paraboloid_mesh_area(ParaboloidModel(1), 1, 2, 0, 1, MeshSpec(2, 2, 1e-14, max_refines=1))


def test_mesh_spec_validation():
    with pytest.raises(ValueError):
        MeshSpec(1, 5)
    assert MeshSpec(3, 5).refined() == MeshSpec(5, 9)


def test_vertical_rect_validation():
    with pytest.raises(ValidationError):
        VerticalRect(Point3(2, 0, 1), Point3(0, 2, 1), Point3(0, 2, 0), Point3(2, 0.1, 0))
    with pytest.raises(ValidationError):
        VerticalRect(Point3(2, 0, 0), Point3(0, 2, 0), Point3(0, 2, 1), Point3(2, 0, 1))


def test_projected_area_worked_rect(unit, rect):
    res = vertical_rect_projected_area(unit, rect)
    assert rel_err(res.analytic_or_mesh, RECT_PROJECTED) < 1e-12
    assert res.rel_residual <= 1e-9
    # bottom edge images onto the focal circle
    assert res.parts["inner_segment"] == pytest.approx(-(math.pi - 2))


def test_degenerate_rects(unit):
    flat = VerticalRect.from_footprint(Point2(2, 0), Point2(2, 0), 1, 0)
    assert vertical_rect_projected_area(unit, flat).analytic_or_mesh == 0
    assert vertical_rect_surface_area(unit, flat).analytic_or_mesh == 0
    radial = VerticalRect.from_footprint(Point2(1, 1), Point2(2, 2), 1, 0)
    assert vertical_rect_projected_area(unit, radial).analytic_or_mesh == 0
    across = VerticalRect.from_footprint(Point2(1, 0), Point2(-1, 0), 1, 0)
    with pytest.raises(DegenerateOnAxis):
        vertical_rect_projected_area(unit, across)


def test_orientation_does_not_matter(unit, rect):
    mirrored = VerticalRect(rect.b, rect.a, rect.d, rect.c)
    a = vertical_rect_projected_area(unit, rect).analytic_or_mesh
    assert vertical_rect_projected_area(unit, mirrored).analytic_or_mesh == pytest.approx(a, rel=1e-12)


def test_projected_area_is_rotation_invariant(unit, rect):
    ref = vertical_rect_projected_area(unit, rect).analytic_or_mesh
    for phi in np.linspace(-3, 3, 13):
        got = vertical_rect_projected_area(unit, rect.rotated(phi)).analytic_or_mesh
        assert rel_err(got, ref) <= 1e-9


def test_random_rects_against_green_oracle():
    rng = np.random.default_rng(8)
    for _ in range(30):
        f = rng.choice([0.5, 1.0, 3.0])
        model = ParaboloidModel(f)
        phi = rng.uniform(-math.pi, math.pi)
        span = rng.uniform(0.05, 2.5)
        a = Point2(*(rng.uniform(0.3, 5) * f * np.array([math.cos(phi + span), math.sin(phi + span)])))
        b = Point2(*(rng.uniform(0.3, 5) * f * np.array([math.cos(phi), math.sin(phi)])))
        top = rng.uniform(-3, 3) * f
        res = vertical_rect_projected_area(model, VerticalRect.from_footprint(a, b, top, top - rng.uniform(0.1, 3) * f))
        assert res.rel_residual <= 1e-9, res


def test_surface_area_worked_rect(unit, rect):
    res = vertical_rect_surface_area(unit, rect, MeshSpec(128, 128), samples=2_000_000)
    assert rel_err(res.analytic_or_mesh, RECT_SURFACE) < 1e-4
    assert abs(res.analytic_or_mesh - res.oracle) <= 3 * res.std_error
    assert rel_err(res.oracle, RECT_SURFACE) <= 5e-3
    assert res.analytic_or_mesh >= vertical_rect_projected_area(unit, rect).analytic_or_mesh


def test_monte_carlo_is_seeded(unit, rect):
    a = monte_carlo_surface_area(unit, rect, samples=100_000, seed=7)
    b = monte_carlo_surface_area(unit, rect, samples=100_000, seed=7)
    c = monte_carlo_surface_area(unit, rect, samples=100_000, seed=8)
    assert a == b and a != c
    assert abs(a[0] - RECT_SURFACE) <= 4 * a[1]
