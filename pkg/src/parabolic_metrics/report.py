"""Run scene entities through the metrics and serialize the results.

Every entity of the scene appears exactly once in a report: with results,
as ``skipped`` when the command does not apply to its type, or as
``degenerate`` with the reason when the geometry is outside the model.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__, areas, conics
from .areas import AreaResult, MeshSpec
from .conics import ConicKind, ConicSection
from .errors import GeometryError, NoConvergence
from .geometry import ParaboloidModel, Point2, Point3, plane_through_focus
from .lengths import ArcResult, line_image_lengths
from .projection import double_project, ray_parameter
from .scene import CylinderEntity, Entity, PointEntity, RectEntity, Scene, SectorEntity, SegmentEntity

COMMANDS = ("project", "classify", "length", "area", "validate")
PROJECTION_BOUND = 1e-9
CSV_COLUMNS = ("id", "type", "status", "quantity", "value", "oracle", "rel_residual", "bound", "diagnostic")


@dataclass(frozen=True)
class ReportConfig:
    command: str = "validate"
    focal: float | None = None
    tol_rel: float | None = None
    mesh: MeshSpec = field(default_factory=MeshSpec)
    degrees: bool = False
    seed: int = areas.DEFAULT_SEED
    mc_samples: int = areas.DEFAULT_MC_SAMPLES
    jobs: int = 1


@dataclass
class EntityReport:
    id: str
    type: str
    status: str
    results: dict = field(default_factory=dict)
    diagnostic: str | None = None

    def failures(self) -> list[str]:
        return [name for name, check in _checks(self.results) if check["rel_residual"] > check["bound"]]


@dataclass
class MetricReport:
    metadata: dict
    entities: list[EntityReport] = field(default_factory=list)

    def failures(self) -> list[tuple[str, str]]:
        return [(e.id, name) for e in self.entities for name in e.failures()]


def _checks(results: dict, prefix: str = ""):
    for key, value in results.items():
        if isinstance(value, dict):
            if "rel_residual" in value and value.get("bound") is not None:
                yield prefix + key, value
            else:
                yield from _checks(value, prefix + key + ".")


# -- result encoders ---------------------------------------------------------


def _p3(p: Point3) -> list[float]:
    return [p.u, p.v, p.w]


def _p2(p: Point2) -> list[float]:
    return [p.u, p.v]


def _angle(value: float, degrees: bool) -> float:
    return math.degrees(value) if degrees else value


def _arc(res: ArcResult) -> dict:
    return {
        "analytic": res.analytic,
        "oracle": res.oracle,
        "rel_residual": res.rel_residual,
        "bound": res.bound,
        "method": res.method,
        "kind": res.kind,
    }


def _area(res: AreaResult) -> dict:
    out = {
        "value": res.analytic_or_mesh,
        "oracle": res.oracle,
        "rel_residual": res.rel_residual,
        "bound": res.bound,
        "method": res.method,
    }
    if res.std_error is not None:
        out["std_error"] = res.std_error
    for key in ("rows", "cols"):
        if key in res.parts:
            out[key] = res.parts[key]
    for key in ("quadrilateral", "outer_segment", "inner_segment"):
        if key in res.parts:
            out.setdefault("regions", {})[key] = res.parts[key]
    return out


def _section(sec: ConicSection, degrees: bool) -> dict:
    out: dict[str, Any] = {
        "kind": sec.kind.value,
        "plane": {"l": sec.plane.l, "m": sec.plane.m, "n": sec.plane.n},
    }
    if sec.kind is ConicKind.CIRCLE:
        out["circle"] = {"radius": sec.circle.radius}
    elif sec.kind is ConicKind.ELLIPSE:
        e = sec.ellipse
        out["ellipse"] = {
            "center": _p3(e.center),
            "a": e.a,
            "b": e.b,
            "j_dir": _p3(e.j_dir),
            "k_dir": _p3(e.k_dir),
            "phi_oe": _angle(e.phi_oe, degrees),
        }
    else:
        out["parabola"] = {"phi": _angle(sec.parabola.phi, degrees)}
    return out


# -- per-command computations -------------------------------------------------


def _bundle(model: ParaboloidModel, p: Point3, degrees: bool, with_checks: bool) -> dict:
    b = double_project(model, p)
    out: dict[str, Any] = {
        "source": _p3(p),
        "a1": _p3(b.a1),
        "a_prime": _p2(b.a_prime),
        "a1_prime": _p2(b.a1_prime),
        "a2": _p3(b.a2),
        "a2_prime": _p2(b.a2_prime),
        "phi": _angle(p.phi, degrees),
        "theta": _angle(p.theta, degrees),
    }
    if with_checks:
        f = model.f
        for name, q, src in (("a1", b.a1, p), ("a2", b.a2, b.a_prime.lift(model))):
            scale = q.u * q.u + q.v * q.v + 4 * f * f
            res = abs(q.u * q.u + q.v * q.v - 4 * f * q.w - 4 * f * f) / scale
            out[f"{name}_on_surface"] = {"value": res, "rel_residual": res, "bound": PROJECTION_BOUND}
            ray = src.cross(q).norm / (src.norm * q.norm)
            same_side = src.dot(q) > 0
            ray_res = ray if same_side else 1.0
            out[f"{name}_on_ray"] = {"value": ray, "rel_residual": ray_res, "bound": PROJECTION_BOUND}
    return out


def _project(model, ent, cfg, validate=False) -> dict:
    if isinstance(ent, PointEntity):
        return _bundle(model, ent.p, cfg.degrees, validate)
    if isinstance(ent, SegmentEntity):
        return {"a": _bundle(model, ent.a, cfg.degrees, validate), "b": _bundle(model, ent.b, cfg.degrees, validate)}
    if isinstance(ent, RectEntity):
        return {k: _bundle(model, getattr(ent.rect, k), cfg.degrees, validate) for k in "abcd"}
    return None


def _classify(model, ent, cfg) -> dict:
    deg = cfg.degrees
    if isinstance(ent, SegmentEntity):
        out = {"alpha": _section(conics.classify_section(model, plane_through_focus(ent.a, ent.b, model)), deg)}
        a_lift = Point3(ent.a.u, ent.a.v, model.director_w)
        b_lift = Point3(ent.b.u, ent.b.v, model.director_w)
        if a_lift != b_lift:
            sec = conics.classify_section(model, plane_through_focus(a_lift, b_lift, model))
            out["alpha_prime"] = _section(sec, deg)
        return out
    if isinstance(ent, RectEntity):
        r = ent.rect
        return {
            "top": _section(conics.classify_section(model, plane_through_focus(r.a, r.b, model)), deg),
            "bottom": _section(conics.classify_section(model, plane_through_focus(r.d, r.c, model)), deg),
        }
    return None


def _length(model, ent, cfg) -> dict:
    if not isinstance(ent, SegmentEntity):
        return None
    res = line_image_lengths(model, ent.a, ent.b)
    return {"L": res.L, "L_prime": res.L_prime, **{k: _arc(v) for k, v in res.arcs().items()}}


def _image_radius(model: ParaboloidModel, r: float, w: float) -> float:
    """Director-plane radius of the image of a horizontal circle about the axis."""
    return ray_parameter(model, Point3(r, 0.0, w)) * r


def _area_results(model, ent, cfg, scene: Scene) -> dict:
    if isinstance(ent, RectEntity):
        return {
            "projected": _area(areas.vertical_rect_projected_area(model, ent.rect)),
            "surface": _area(
                areas.vertical_rect_surface_area(model, ent.rect, cfg.mesh, samples=cfg.mc_samples, seed=cfg.seed)
            ),
        }
    default_unit = "degrees" if cfg.degrees else "radians"
    if isinstance(ent, CylinderEntity):
        phi_from = scene.angle(ent.phi_from, default_unit)
        phi_to = scene.angle(ent.phi_to, default_unit)
        dphi = phi_to - phi_from
        r_outer = _image_radius(model, ent.r, ent.w_top)
        r_inner = _image_radius(model, ent.r, ent.w_bottom)
        return {
            "cylinder": _area(areas.cylindrical_patch_result(ent.r, ent.w_top, ent.w_bottom, dphi, model.tol_abs)),
            "projected": _area(areas.annular_sector_result(r_inner, r_outer, phi_from, phi_to, model.tol_abs)),
            "surface": _area(areas.paraboloid_mesh_area(model, r_inner, r_outer, phi_from, phi_to, cfg.mesh)),
            "image_radii": {"outer": r_outer, "inner": r_inner},
        }
    if isinstance(ent, SectorEntity):
        phi_from = scene.angle(ent.phi_from, default_unit)
        phi_to = scene.angle(ent.phi_to, default_unit)
        return {
            "projected": _area(areas.annular_sector_result(ent.r_inner, ent.r_outer, phi_from, phi_to, model.tol_abs)),
            "surface": _area(areas.paraboloid_mesh_area(model, ent.r_inner, ent.r_outer, phi_from, phi_to, cfg.mesh)),
        }
    return None


def _validate(model, ent, cfg, scene) -> dict:
    if isinstance(ent, PointEntity):
        return _project(model, ent, cfg, validate=True)
    if isinstance(ent, SegmentEntity):
        return _length(model, ent, cfg)
    return _area_results(model, ent, cfg, scene)


def evaluate_entity(scene: Scene, ent: Entity, cfg: ReportConfig) -> EntityReport:
    model = scene.model(cfg.focal, cfg.tol_rel)
    try:
        if cfg.command == "project":
            results = _project(model, ent, cfg)
        elif cfg.command == "classify":
            results = _classify(model, ent, cfg)
        elif cfg.command == "length":
            results = _length(model, ent, cfg)
        elif cfg.command == "area":
            results = _area_results(model, ent, cfg, scene)
        elif cfg.command == "validate":
            results = _validate(model, ent, cfg, scene)
        else:
            raise ValueError(f"unknown command {cfg.command!r}")
    except (GeometryError, NoConvergence) as exc:
        return EntityReport(ent.id, ent.type, "degenerate", diagnostic=f"{type(exc).__name__}: {exc}")
    if results is None:
        return EntityReport(ent.id, ent.type, "skipped", diagnostic=f"not applicable to {cfg.command}")
    return EntityReport(ent.id, ent.type, "ok", results=results)


def _evaluate_star(args):
    return evaluate_entity(*args)


def metadata(scene: Scene, cfg: ReportConfig) -> dict:
    model = scene.model(cfg.focal, cfg.tol_rel)
    return {
        "tool": "parabolic-metrics",
        "version": __version__,
        "command": cfg.command,
        "f": model.f,
        "tol_rel": model.tol_rel,
        "tol_abs": model.tol_abs,
        "mesh": {
            "rows": cfg.mesh.rows,
            "cols": cfg.mesh.cols,
            "refine_tol": cfg.mesh.refine_tol,
            "max_refines": cfg.mesh.max_refines,
        },
        "mc_samples": cfg.mc_samples,
        "seed": cfg.seed,
        "angle_unit": "degrees" if cfg.degrees else "radians",
    }


def compute_report(scene: Scene, cfg: ReportConfig) -> MetricReport:
    """Evaluate every entity; results keep the scene order whatever ``jobs`` is."""
    if cfg.command not in COMMANDS:
        raise ValueError(f"unknown command {cfg.command!r}")
    report = MetricReport(metadata(scene, cfg))
    work = [(scene, ent, cfg) for ent in scene.entities]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            report.entities = list(pool.map(_evaluate_star, work))
    else:
        report.entities = [_evaluate_star(w) for w in work]
    return report


# -- serialization -----------------------------------------------------------


def report_to_dict(report: MetricReport) -> dict:
    entities = []
    for e in report.entities:
        item = asdict(e)
        if item["diagnostic"] is None:
            del item["diagnostic"]
        entities.append(item)
    return {"metadata": report.metadata, "entities": entities}


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows(prefix: str, value: Any):
    """Flatten one result into ``(quantity, value, oracle, rel_residual, bound)`` rows."""
    if isinstance(value, dict):
        if "rel_residual" in value:
            main = value.get("analytic", value.get("value"))
            yield prefix, main, value.get("oracle"), value["rel_residual"], value.get("bound")
            return
        for key in sorted(value):
            yield from _rows(f"{prefix}.{key}" if prefix else key, value[key])
    elif isinstance(value, list):
        names = "uvw" if len(value) in (2, 3) else None
        for i, x in enumerate(value):
            yield f"{prefix}.{names[i] if names else i}", x, None, None, None
    else:
        yield prefix, value, None, None, None


def emit_report(report: MetricReport, fmt: str = "json") -> str:
    """Serialize deterministically: sorted keys, shortest round-trip floats."""
    if fmt == "json":
        return json.dumps(report_to_dict(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for e in report.entities:
        if e.status != "ok":
            writer.writerow([e.id, e.type, e.status, "", "", "", "", "", e.diagnostic or ""])
            continue
        for quantity, value, oracle, residual, bound in _rows("", e.results):
            writer.writerow([e.id, e.type, e.status, quantity, *map(_fmt, (value, oracle, residual, bound)), ""])
    return buf.getvalue()


def parse_report(text: str) -> dict:
    return json.loads(text)
