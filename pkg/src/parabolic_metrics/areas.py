"""Areas on the mirror surface and on the director plane.

Two families of regions are handled:

* patches over an annular sector centred on the axis (the image of a piece
  of vertical cylinder), and
* the image of a vertical rectangle, bounded by two radial lines and two
  circular arcs on the director plane.

Surface areas are computed by lifting a quadrilateral mesh of the director
plane region onto the paraboloid and summing two triangles per cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import conics
from .errors import DegenerateOnAxis, NoConvergence, RegionInverted, ValidationError
from .geometry import ParaboloidModel, Point2, Point3, plane_through_focus, polar_angle
from .lengths import arc_sweep, perspective_path
from .projection import central_project, ortho_to_director
from .quadrature import adaptive_simpson, boundary_area

DEFAULT_MC_SAMPLES = 10_000_000
DEFAULT_SEED = 20240607
MC_BATCH = 1_000_000
ROW_CHUNK = 256
# validation bound for Monte-Carlo comparisons, in standard errors
MC_SIGMAS = 4.0
GREEN_BOUND = 1e-9


@dataclass(frozen=True)
class MeshSpec:
    rows: int = 64
    cols: int = 64
    refine_tol: float = 1e-4
    max_refines: int = 6

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError(f"mesh needs at least 2x2 nodes, got {self.rows}x{self.cols}")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if self.max_refines < 0:
            raise ValueError("max_refines must be non-negative")

    def refined(self) -> MeshSpec:
        """Halve every cell: ``n`` nodes become ``2 (n - 1) + 1``."""
        return MeshSpec(2 * self.rows - 1, 2 * self.cols - 1, self.refine_tol, self.max_refines)


@dataclass(frozen=True)
class VerticalRect:
    """Rectangle in a vertical plane: ``a``, ``b`` on top, ``d`` under ``a``, ``c`` under ``b``."""

    a: Point3
    b: Point3
    c: Point3
    d: Point3

    def __post_init__(self):
        tol = 1e-12 * max(1.0, self.a.norm, self.b.norm)
        if abs(self.a.u - self.d.u) > tol or abs(self.a.v - self.d.v) > tol:
            raise ValidationError(None, "edge AD must be vertical")
        if abs(self.b.u - self.c.u) > tol or abs(self.b.v - self.c.v) > tol:
            raise ValidationError(None, "edge BC must be vertical")
        if abs(self.a.w - self.b.w) > tol or abs(self.d.w - self.c.w) > tol:
            raise ValidationError(None, "edges AB and DC must be horizontal")
        if not self.a.w > self.d.w:
            raise ValidationError(None, "top edge AB must lie above DC")

    @classmethod
    def from_footprint(cls, a: Point2, b: Point2, w_top: float, w_bottom: float) -> VerticalRect:
        return cls(
            a=Point3(a.u, a.v, w_top),
            b=Point3(b.u, b.v, w_top),
            c=Point3(b.u, b.v, w_bottom),
            d=Point3(a.u, a.v, w_bottom),
        )

    def rotated(self, phi: float) -> VerticalRect:
        from .geometry import rotate_about_w

        return VerticalRect(*(rotate_about_w(p, phi) for p in (self.a, self.b, self.c, self.d)))


@dataclass(frozen=True)
class AreaResult:
    analytic_or_mesh: float
    oracle: float
    rel_residual: float
    method: str
    bound: float | None = None
    std_error: float | None = None
    parts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.bound is None or self.rel_residual <= self.bound


def _result(value: float, oracle: float, method: str, tol_abs: float, **kw) -> AreaResult:
    return AreaResult(
        analytic_or_mesh=value,
        oracle=oracle,
        rel_residual=abs(value - oracle) / max(abs(oracle), tol_abs),
        method=method,
        **kw,
    )


def cylindrical_patch_area(r: float, w_top: float, w_bottom: float, dphi: float) -> float:
    """Lateral area of a vertical cylinder piece of radius ``r``."""
    if r <= 0 or w_top < w_bottom or not 0 <= dphi <= 2 * math.pi:
        raise ValueError("need r > 0, w_top >= w_bottom and 0 <= dphi <= 2*pi")
    return (w_top - w_bottom) * r * dphi


def annular_sector_area(r_outer: float, r_inner: float, dphi: float) -> float:
    if not r_outer >= r_inner >= 0 or not 0 <= dphi <= 2 * math.pi:
        raise ValueError("need r_outer >= r_inner >= 0 and 0 <= dphi <= 2*pi")
    return 0.5 * (r_outer * r_outer - r_inner * r_inner) * dphi


def _triangle_areas(p: np.ndarray, q: np.ndarray, s: np.ndarray) -> np.ndarray:
    return 0.5 * np.linalg.norm(np.cross(q - p, s - p), axis=-1)


def quad_patch_area(p1: Point3, p2: Point3, p3: Point3, p4: Point3) -> float:
    """Area of a mesh cell given in cyclic order, as two triangles.

    The cell is split along the diagonal ``p2``-``p4``: triangles
    ``(p1, p2, p4)`` and ``(p3, p2, p4)``.
    """
    a, b, c, d = (np.asarray(p.as_tuple(), dtype=float) for p in (p1, p2, p3, p4))
    return float(_triangle_areas(a, b, d) + _triangle_areas(c, b, d))


def _lift(model: ParaboloidModel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    w = (u * u + v * v - 4.0 * model.f * model.f) / (4.0 * model.f)
    return np.stack([u, v, w], axis=-1)


def grid_area(model: ParaboloidModel, u: np.ndarray, v: np.ndarray) -> list[float]:
    """Per-row sums of cell areas of a structured grid lifted to the surface.

    ``u`` and ``v`` have shape ``(rows, cols)``; each cell with corners
    ``(i, j)``, ``(i, j+1)``, ``(i+1, j+1)``, ``(i+1, j)`` contributes two
    triangles sharing the ``(i, j+1)``-``(i+1, j)`` diagonal.
    """
    nodes = _lift(model, u, v)
    p11 = nodes[:-1, :-1]
    p12 = nodes[:-1, 1:]
    p21 = nodes[1:, :-1]
    p22 = nodes[1:, 1:]
    cells = _triangle_areas(p22, p21, p12) + _triangle_areas(p11, p21, p12)
    return [math.fsum(row) for row in cells]


def polar_mesh_area(
    model: ParaboloidModel, r_inner: float, r_outer: float, phi_from: float, phi_to: float, rows: int, cols: int
) -> float:
    """Surface area over a polar grid of ``rows`` radii by ``cols`` azimuths."""
    radii = np.linspace(r_inner, r_outer, rows)
    phis = np.linspace(phi_from, phi_to, cols)
    cos, sin = np.cos(phis), np.sin(phis)
    row_sums: list[float] = []
    for start in range(0, rows - 1, ROW_CHUNK):
        rr = radii[start : min(start + ROW_CHUNK + 1, rows), None]
        row_sums.extend(grid_area(model, rr * cos, rr * sin))
    return math.fsum(row_sums)


def paraboloid_patch_area_closed(model: ParaboloidModel, r_inner: float, r_outer: float, dphi: float) -> float:
    """Exact surface area above an annular sector.

    Integrates ``sqrt(1 + r^2 / 4f^2) r dr dphi``.
    """
    if not r_outer >= r_inner >= 0 or not 0 <= dphi <= 2 * math.pi:
        raise ValueError("need r_outer >= r_inner >= 0 and 0 <= dphi <= 2*pi")
    f2 = 4.0 * model.f * model.f

    def primitive(r: float) -> float:
        return (1.0 + r * r / f2) ** 1.5

    # primitive difference loses digits when the surface is nearly flat
    x_in, x_out = r_inner * r_inner / f2, r_outer * r_outer / f2
    diff = math.expm1(1.5 * (math.log1p(x_out) - math.log1p(x_in))) * primitive(r_inner)
    return dphi * f2 / 3.0 * diff


def _refine(compute, spec: MeshSpec):
    """Evaluate ``compute(spec)`` on successively halved meshes.

    Returns ``(value, spec_used, history)``.
    """
    current = spec
    history = [compute(current)]
    for _ in range(spec.max_refines):
        current = current.refined()
        history.append(compute(current))
        prev, last = history[-2], history[-1]
        if abs(last - prev) <= spec.refine_tol * max(abs(last), 1e-300):
            return last, current, history
    if len(history) == 1:
        return history[0], current, history
    raise NoConvergence(
        f"mesh area still changing by {abs(history[-1] - history[-2]) / abs(history[-1]):.3e} "
        f"after {spec.max_refines} refinements"
    )


def paraboloid_mesh_area(
    model: ParaboloidModel,
    r_inner: float,
    r_outer: float,
    phi_b: float,
    phi_a: float,
    spec: MeshSpec | None = None,
    refine: bool = True,
) -> AreaResult:
    """Surface area above the annular sector ``r_inner..r_outer``, ``phi_b..phi_a``.

    With ``refine`` the mesh is halved until two successive totals agree to
    ``spec.refine_tol``; otherwise the single mesh ``spec`` is used.
    """
    spec = spec or MeshSpec()
    dphi = phi_a - phi_b
    if not r_outer >= r_inner >= 0:
        raise ValueError(f"need r_outer >= r_inner >= 0, got {r_outer}, {r_inner}")
    if not 0 <= dphi <= 2 * math.pi + 1e-12:
        raise ValueError(f"need 0 <= phi_a - phi_b <= 2*pi, got {dphi}")
    oracle = paraboloid_patch_area_closed(model, r_inner, r_outer, min(dphi, 2 * math.pi))
    if r_outer == r_inner or dphi == 0:
        return _result(0.0, oracle, "mesh", model.tol_abs, bound=spec.refine_tol)

    def compute(s: MeshSpec) -> float:
        return polar_mesh_area(model, r_inner, r_outer, phi_b, phi_a, s.rows, s.cols)

    if refine:
        value, used, history = _refine(compute, spec)
    else:
        value, used, history = compute(spec), spec, None
    # the error is O(h^2), so once a halving moves the total by at most
    # refine_tol the remaining gap is about a third of that
    return _result(
        value,
        oracle,
        "mesh",
        model.tol_abs,
        bound=spec.refine_tol if refine else None,
        parts={"rows": used.rows, "cols": used.cols, "history": history},
    )


# -- vertical rectangles ----------------------------------------------------


@dataclass(frozen=True)
class _Arc:
    """Image on the director plane of a horizontal rectangle edge."""

    start: Point2
    end: Point2
    center: Point2
    radius: float
    sweep: float  # signed, about the centre

    def theta(self, s: np.ndarray | float):
        t0 = polar_angle(self.start.u - self.center.u, self.start.v - self.center.v)
        return t0 + s * self.sweep

    def points(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        t = self.theta(np.linspace(0.0, 1.0, n))
        return self.center.u + self.radius * np.cos(t), self.center.v + self.radius * np.sin(t)

    def signed_fan(self) -> float:
        """Signed area swept by the ray from the origin along the arc."""
        tri = 0.5 * (self.start.u * self.end.v - self.start.v * self.end.u)
        theta = abs(self.sweep)
        segment = 0.5 * self.radius**2 * (theta - math.sin(theta))
        return tri + math.copysign(segment, self.sweep)

    def radial_extremes(self) -> tuple[float, float]:
        """Smallest and largest distance from the origin along the arc."""
        rs = [self.start.r, self.end.r]
        c = math.hypot(self.center.u, self.center.v)
        if c > 0:
            # farthest and nearest circle points lie on the line through the centre
            for sign in (1.0, -1.0):
                theta = polar_angle(sign * self.center.u, sign * self.center.v)
                t0 = polar_angle(self.start.u - self.center.u, self.start.v - self.center.v)
                offset = (theta - t0) % (2 * math.pi) if self.sweep >= 0 else (t0 - theta) % (2 * math.pi)
                if offset <= abs(self.sweep):
                    rs.append(c + sign * self.radius)
        return min(rs), max(rs)


def _edge_arc(model: ParaboloidModel, p: Point3, q: Point3) -> _Arc:
    """Director-plane image of the perspective of horizontal edge ``pq``."""
    section = conics.classify_section(model, plane_through_focus(p, q, model))
    center, radius = section.projected_circle()
    p1 = ortho_to_director(model, central_project(model, p))
    q1 = ortho_to_director(model, central_project(model, q))
    m1 = ortho_to_director(model, central_project(model, p + (q - p).scale(0.5)))

    def ang(x: Point2) -> float:
        return polar_angle(x.u - center.u, x.v - center.v)

    sweep = arc_sweep(ang(p1), ang(q1), ang(m1))
    return _Arc(start=p1, end=q1, center=center, radius=radius, sweep=sweep)


def _wedge(model: ParaboloidModel, rect: VerticalRect) -> float:
    """Signed azimuth swept from ``b`` to ``a``; zero when the rect is radial."""
    cross = rect.b.u * rect.a.v - rect.b.v * rect.a.u
    dot = rect.b.u * rect.a.u + rect.b.v * rect.a.v
    scale = rect.a.r * rect.b.r
    if rect.a.r <= model.tol_abs or rect.b.r <= model.tol_abs:
        raise DegenerateOnAxis("a rectangle side lies on the optical axis")
    if abs(cross) <= model.tol_rel * scale:
        if dot < 0:
            raise DegenerateOnAxis("the rectangle straddles the optical axis")
        return 0.0
    return math.atan2(cross, dot)


def vertical_rect_projected_area(model: ParaboloidModel, rect: VerticalRect) -> AreaResult:
    """Director-plane area of the image of a vertical rectangle.

    The image is bounded by the radial segments ``A1'D1'`` and ``B1'C1'``
    and by the circular images of the horizontal edges. It is assembled
    from three closed-form pieces: the straight-sided quadrilateral, the
    circular segment cut off by the outer chord ``B1'A1'`` (added) and the
    one cut off by the inner chord ``C1'D1'`` (removed). The oracle
    integrates ``(u dv - v du) / 2`` around the images of the four edges.
    """
    wedge = _wedge(model, rect)
    if wedge == 0.0:
        return _result(0.0, 0.0, "three_region", model.tol_abs, bound=GREEN_BOUND)
    orientation = math.copysign(1.0, wedge)

    top = _edge_arc(model, rect.b, rect.a)
    bottom = _edge_arc(model, rect.c, rect.d)
    a1, b1, c1, d1 = (ortho_to_director(model, central_project(model, p)) for p in (rect.a, rect.b, rect.c, rect.d))
    quad = 0.5 * ((b1.u * a1.v - b1.v * a1.u) - (c1.u * d1.v - c1.v * d1.u))
    outer_segment = top.signed_fan() - 0.5 * (b1.u * a1.v - b1.v * a1.u)
    inner_segment = bottom.signed_fan() - 0.5 * (c1.u * d1.v - c1.v * d1.u)
    parts = {
        "quadrilateral": orientation * quad,
        "outer_segment": orientation * outer_segment,
        "inner_segment": -orientation * inner_segment,
    }
    area = math.fsum(parts.values())
    scale = abs(quad) + abs(outer_segment) + abs(inner_segment)
    if area < -1e-12 * max(scale, model.tol_abs):
        raise RegionInverted(f"region orientation is inconsistent (area {area:.3e})")
    area = max(area, 0.0)

    oracle = orientation * _green_oracle(model, rect)
    return _result(area, oracle, "three_region", model.tol_abs, bound=GREEN_BOUND, parts=parts)


def _green_oracle(model: ParaboloidModel, rect: VerticalRect) -> float:
    """Signed area enclosed by the images of ``b -> a -> d -> c -> b``."""
    pieces = []
    for p, q in ((rect.b, rect.a), (rect.a, rect.d), (rect.d, rect.c), (rect.c, rect.b)):
        path, deriv = perspective_path(model, p, q)
        pieces.append((path, deriv, 0.0, 1.0))
    return boundary_area(pieces)


def _side_mesh(model: ParaboloidModel, arc: _Arc, r_far: float, rows: int, cols: int) -> float:
    """Surface area between an arc image and the circle ``r = r_far``.

    Nodes along the arc are spaced evenly in the angle about the arc's own
    centre; each is joined radially to the circle ``r_far``.
    """
    au, av = arc.points(cols)
    ar = np.hypot(au, av)
    s = np.linspace(0.0, 1.0, rows)[:, None]
    radius = ar[None, :] + s * (r_far - ar[None, :])
    scale = radius / ar[None, :]
    return math.fsum(grid_area(model, scale * au[None, :], scale * av[None, :]))


@dataclass(frozen=True)
class _RectLayout:
    top: _Arc
    bottom: _Arc
    r_min: float
    r_max: float
    phi_from: float
    phi_to: float


def _layout(model: ParaboloidModel, rect: VerticalRect, wedge: float) -> _RectLayout:
    top = _edge_arc(model, rect.b, rect.a)
    bottom = _edge_arc(model, rect.c, rect.d)
    r_min = bottom.radial_extremes()[0]
    r_max = top.radial_extremes()[1]
    phi_b = polar_angle(rect.b.u, rect.b.v)
    return _RectLayout(top, bottom, r_min, r_max, phi_b, phi_b + wedge)


def vertical_rect_surface_area(
    model: ParaboloidModel,
    rect: VerticalRect,
    spec: MeshSpec | None = None,
    samples: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> AreaResult:
    """Area of the perspective image of a vertical rectangle on the surface.

    The bounding annular sector ``r_min..r_max`` over the wedge is meshed as
    a whole; the two side regions between it and the arc images (outside
    the top arc, inside the bottom arc) are meshed separately and
    subtracted. The oracle is a Monte-Carlo estimate over the same
    director-plane region, reported with its standard error.
    """
    spec = spec or MeshSpec()
    wedge = _wedge(model, rect)
    if wedge == 0.0:
        return _result(0.0, 0.0, "mesh_subtraction", model.tol_abs, bound=0.0, std_error=0.0)
    lay = _layout(model, rect, wedge)
    lo, hi = sorted((lay.phi_from, lay.phi_to))

    def compute(s: MeshSpec) -> float:
        total = polar_mesh_area(model, lay.r_min, lay.r_max, lo, hi, s.rows, s.cols)
        outer = _side_mesh(model, lay.top, lay.r_max, s.rows, s.cols)
        inner = _side_mesh(model, lay.bottom, lay.r_min, s.rows, s.cols)
        return total - outer - inner

    value, used, history = _refine(compute, spec)
    oracle, std_error = monte_carlo_surface_area(model, rect, samples=samples, seed=seed)
    bound = (MC_SIGMAS * std_error) / max(oracle, model.tol_abs) + spec.refine_tol
    return _result(
        value,
        oracle,
        "mesh_subtraction",
        model.tol_abs,
        bound=bound,
        std_error=std_error,
        parts={"rows": used.rows, "cols": used.cols, "r_min": lay.r_min, "r_max": lay.r_max},
    )


def _edge_radius(model: ParaboloidModel, p: Point3, q: Point3, cos: np.ndarray, sin: np.ndarray) -> np.ndarray:
    """Director-plane radius of the image of horizontal edge ``pq`` at each azimuth.

    Intersects the azimuth ray with the edge footprint and projects the
    space point found there; the conic description is not used.
    """
    du, dv = q.u - p.u, q.v - p.v
    s = -(cos * p.v - sin * p.u) / (cos * dv - sin * du)
    u = p.u + s * du
    v = p.v + s * dv
    r = np.hypot(u, v)
    rho = np.hypot(r, p.w)
    g = rho - p.w if p.w < 0 else r * r / (rho + p.w)
    return 2.0 * model.f * r / g


def monte_carlo_surface_area(
    model: ParaboloidModel, rect: VerticalRect, samples: int = DEFAULT_MC_SAMPLES, seed: int = DEFAULT_SEED
) -> tuple[float, float]:
    """Monte-Carlo surface area of the rectangle's image and its standard error.

    Samples are uniform over the bounding annular sector; each contributes
    ``sqrt(1 + r^2 / 4f^2)`` when it falls between the images of the bottom
    and top edges.
    """
    wedge = _wedge(model, rect)
    if wedge == 0.0:
        return 0.0, 0.0
    lay = _layout(model, rect, wedge)
    r2_lo, r2_hi = lay.r_min**2, lay.r_max**2
    sector = 0.5 * (r2_hi - r2_lo) * abs(wedge)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    f2 = 4.0 * model.f * model.f
    while done < samples:
        n = min(MC_BATCH, samples - done)
        x = rng.random((2, n))
        r2 = r2_lo + x[0] * (r2_hi - r2_lo)
        phi = lay.phi_from + x[1] * wedge
        cos, sin = np.cos(phi), np.sin(phi)
        top = _edge_radius(model, rect.a, rect.b, cos, sin)
        bottom = _edge_radius(model, rect.d, rect.c, cos, sin)
        inside = (r2 <= top * top) & (r2 >= bottom * bottom)
        values = np.where(inside, np.sqrt(1.0 + r2 / f2), 0.0)
        total += math.fsum(values)
        total_sq += math.fsum(values * values)
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return sector * mean, sector * math.sqrt(var / samples)


# -- annular sectors and cylinder patches ----------------------------------


def annular_sector_green(r_inner: float, r_outer: float, phi_from: float, phi_to: float) -> float:
    """Boundary-integral area of an annular sector, for checking the closed form."""
    dphi = phi_to - phi_from

    def arc(r, t0, sweep):
        return (
            lambda s: (r * math.cos(t0 + s * sweep), r * math.sin(t0 + s * sweep)),
            lambda s: (-r * sweep * math.sin(t0 + s * sweep), r * sweep * math.cos(t0 + s * sweep)),
            0.0,
            1.0,
        )

    def radial(t, r0, r1):
        c, s_ = math.cos(t), math.sin(t)
        return (
            lambda s: ((r0 + s * (r1 - r0)) * c, (r0 + s * (r1 - r0)) * s_),
            lambda s: ((r1 - r0) * c, (r1 - r0) * s_),
            0.0,
            1.0,
        )

    pieces = [
        radial(phi_from, r_inner, r_outer),
        arc(r_outer, phi_from, dphi),
        radial(phi_to, r_outer, r_inner),
        arc(r_inner, phi_to, -dphi),
    ]
    return boundary_area(pieces)


def annular_sector_result(r_inner: float, r_outer: float, phi_from: float, phi_to: float, tol_abs: float) -> AreaResult:
    value = annular_sector_area(r_outer, r_inner, phi_to - phi_from)
    oracle = annular_sector_green(r_inner, r_outer, phi_from, phi_to)
    return _result(value, oracle, "annular_sector", tol_abs, bound=GREEN_BOUND)


def cylindrical_patch_result(r: float, w_top: float, w_bottom: float, dphi: float, tol_abs: float) -> AreaResult:
    """Cylinder piece area checked against quadrature of its lateral area element."""
    value = cylindrical_patch_area(r, w_top, w_bottom, dphi)
    height = w_top - w_bottom
    oracle = adaptive_simpson(
        lambda t: height * math.hypot(-r * math.sin(t), r * math.cos(t)), 0.0, dphi, rel_tol=1e-12
    ) if dphi > 0 else 0.0
    return _result(value, oracle, "cylinder", tol_abs, bound=GREEN_BOUND)
