"""Scene documents: a focal block plus a list of tagged entities.

A scene is a JSON object::

    {
      "focal": {"f": 1.0, "tolerances": {"rel": 1e-9, "abs": 1e-12}},
      "angle_unit": "radians",
      "entities": [
        {"type": "point", "id": "p1", "u": 2.0, "v": 0.0, "w": 5.0},
        {"type": "segment", "id": "s1", "a": [2, 0, 0], "b": [0, 2, 0]},
        ...
      ]
    }

Angles are kept in the unit the document declares; :meth:`Scene.angle`
converts to radians at the point of use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Union

from .areas import VerticalRect
from .errors import ParseError, ValidationError
from .geometry import ParaboloidModel, Point3

ANGLE_UNITS = ("radians", "degrees")


@dataclass(frozen=True)
class PointEntity:
    id: str
    p: Point3
    type: str = "point"


@dataclass(frozen=True)
class SegmentEntity:
    id: str
    a: Point3
    b: Point3
    type: str = "segment"


@dataclass(frozen=True)
class RectEntity:
    id: str
    rect: VerticalRect
    type: str = "vertical_rect"


@dataclass(frozen=True)
class CylinderEntity:
    id: str
    r: float
    w_top: float
    w_bottom: float
    phi_from: float
    phi_to: float
    type: str = "cylindrical_patch"


@dataclass(frozen=True)
class SectorEntity:
    id: str
    r_inner: float
    r_outer: float
    phi_from: float
    phi_to: float
    type: str = "annular_sector"


Entity = Union[PointEntity, SegmentEntity, RectEntity, CylinderEntity, SectorEntity]


@dataclass(frozen=True)
class Scene:
    f: float
    entities: tuple[Entity, ...]
    tol_rel: float | None = None
    tol_abs: float | None = None
    angle_unit: str | None = None

    def model(self, f: float | None = None, tol_rel: float | None = None) -> ParaboloidModel:
        f = self.f if f is None else f
        kwargs: dict[str, Any] = {}
        if (tol_rel or self.tol_rel) is not None:
            kwargs["tol_rel"] = tol_rel or self.tol_rel
        if self.tol_abs is not None:
            kwargs["tol_abs"] = self.tol_abs * f / self.f
        return ParaboloidModel(f, **kwargs)

    def angle(self, value: float, default_unit: str = "radians") -> float:
        unit = self.angle_unit or default_unit
        return math.radians(value) if unit == "degrees" else value


def _fail_on_keys(obj: dict, allowed: set[str], required: set[str], entity_id: str | None, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(entity_id, f"unknown field(s) in {where}: {', '.join(sorted(unknown))}")
    missing = required - set(obj)
    if missing:
        raise ValidationError(entity_id, f"missing field(s) in {where}: {', '.join(sorted(missing))}")


def _number(value: Any, entity_id: str | None, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(entity_id, f"{name} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(entity_id, f"{name} must be finite")
    return value


def _point(value: Any, entity_id: str, name: str) -> Point3:
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(entity_id, f"{name} must be a list of three numbers")
    return Point3(*(_number(x, entity_id, f"{name}[{i}]") for i, x in enumerate(value)))


def _entity(obj: Any, angle_unit: str | None) -> Entity:
    if not isinstance(obj, dict):
        raise ValidationError(None, "every entity must be an object")
    eid = obj.get("id")
    if not isinstance(eid, str) or not eid:
        raise ValidationError(None, "every entity needs a non-empty string id")
    kind = obj.get("type")
    num = lambda key: _number(obj[key], eid, key)  # noqa: E731

    if kind == "point":
        _fail_on_keys(obj, {"type", "id", "u", "v", "w"}, {"u", "v", "w"}, eid, "point")
        return PointEntity(eid, Point3(num("u"), num("v"), num("w")))
    if kind == "segment":
        _fail_on_keys(obj, {"type", "id", "a", "b"}, {"a", "b"}, eid, "segment")
        return SegmentEntity(eid, _point(obj["a"], eid, "a"), _point(obj["b"], eid, "b"))
    if kind == "vertical_rect":
        _fail_on_keys(obj, {"type", "id", "corners"}, {"corners"}, eid, "vertical_rect")
        corners = obj["corners"]
        if not isinstance(corners, dict):
            raise ValidationError(eid, "corners must be an object with keys a, b, c, d")
        _fail_on_keys(corners, {"a", "b", "c", "d"}, {"a", "b", "c", "d"}, eid, "corners")
        pts = {k: _point(corners[k], eid, f"corners.{k}") for k in "abcd"}
        try:
            rect = VerticalRect(**pts)
        except ValidationError as exc:
            raise ValidationError(eid, exc.constraint) from None
        return RectEntity(eid, rect)
    if kind == "cylindrical_patch":
        keys = {"r", "w_top", "w_bottom", "phi_from", "phi_to"}
        _fail_on_keys(obj, keys | {"type", "id"}, keys, eid, "cylindrical_patch")
        ent = CylinderEntity(eid, *(num(k) for k in ("r", "w_top", "w_bottom", "phi_from", "phi_to")))
        if ent.r <= 0:
            raise ValidationError(eid, "r must be positive")
        if ent.w_top < ent.w_bottom:
            raise ValidationError(eid, "w_top must not be below w_bottom")
        _check_span(ent.phi_from, ent.phi_to, angle_unit, eid)
        return ent
    if kind == "annular_sector":
        keys = {"r_inner", "r_outer", "phi_from", "phi_to"}
        _fail_on_keys(obj, keys | {"type", "id"}, keys, eid, "annular_sector")
        ent = SectorEntity(eid, *(num(k) for k in ("r_inner", "r_outer", "phi_from", "phi_to")))
        if not ent.r_outer >= ent.r_inner >= 0:
            raise ValidationError(eid, "need r_outer >= r_inner >= 0")
        _check_span(ent.phi_from, ent.phi_to, angle_unit, eid)
        return ent
    raise ValidationError(eid, f"unknown entity type {kind!r}")


def _check_span(phi_from: float, phi_to: float, angle_unit: str | None, eid: str) -> None:
    full = 360.0 if angle_unit == "degrees" else 2 * math.pi
    if not 0 <= phi_to - phi_from <= full:
        raise ValidationError(eid, "need 0 <= phi_to - phi_from <= one full turn")


def parse_scene(text: str) -> Scene:
    """Parse and validate a scene document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict):
        raise ParseError(1, "the scene must be a JSON object")
    _fail_on_keys(doc, {"focal", "entities", "angle_unit"}, {"focal", "entities"}, None, "scene")

    focal = doc["focal"]
    if not isinstance(focal, dict):
        raise ValidationError(None, "focal must be an object")
    _fail_on_keys(focal, {"f", "tolerances"}, {"f"}, None, "focal")
    f = _number(focal["f"], None, "focal.f")
    if f <= 0:
        raise ValidationError(None, "focal.f must be positive")
    tol_rel = tol_abs = None
    if "tolerances" in focal:
        tols = focal["tolerances"]
        if not isinstance(tols, dict):
            raise ValidationError(None, "focal.tolerances must be an object")
        _fail_on_keys(tols, {"rel", "abs"}, set(), None, "focal.tolerances")
        if "rel" in tols:
            tol_rel = _number(tols["rel"], None, "tolerances.rel")
            if not 0 < tol_rel <= 1e-6:
                raise ValidationError(None, "tolerances.rel must lie in (0, 1e-6]")
        if "abs" in tols:
            tol_abs = _number(tols["abs"], None, "tolerances.abs")
            if tol_abs <= 0:
                raise ValidationError(None, "tolerances.abs must be positive")

    angle_unit = doc.get("angle_unit")
    if angle_unit is not None and angle_unit not in ANGLE_UNITS:
        raise ValidationError(None, f"angle_unit must be one of {ANGLE_UNITS}")

    raw = doc["entities"]
    if not isinstance(raw, list):
        raise ValidationError(None, "entities must be a list")
    entities = []
    seen: set[str] = set()
    for obj in raw:
        ent = _entity(obj, angle_unit)
        if ent.id in seen:
            raise ValidationError(ent.id, "duplicate entity id")
        seen.add(ent.id)
        entities.append(ent)
    return Scene(f=f, entities=tuple(entities), tol_rel=tol_rel, tol_abs=tol_abs, angle_unit=angle_unit)


def entity_to_dict(ent: Entity) -> dict:
    if isinstance(ent, PointEntity):
        return {"type": ent.type, "id": ent.id, "u": ent.p.u, "v": ent.p.v, "w": ent.p.w}
    if isinstance(ent, SegmentEntity):
        return {"type": ent.type, "id": ent.id, "a": list(ent.a.as_tuple()), "b": list(ent.b.as_tuple())}
    if isinstance(ent, RectEntity):
        corners = {k: list(getattr(ent.rect, k).as_tuple()) for k in "abcd"}
        return {"type": ent.type, "id": ent.id, "corners": corners}
    if isinstance(ent, CylinderEntity):
        keys = ("r", "w_top", "w_bottom", "phi_from", "phi_to")
    else:
        keys = ("r_inner", "r_outer", "phi_from", "phi_to")
    return {"type": ent.type, "id": ent.id, **{k: getattr(ent, k) for k in keys}}


def scene_to_dict(scene: Scene) -> dict:
    focal: dict[str, Any] = {"f": scene.f}
    tols = {k: v for k, v in (("rel", scene.tol_rel), ("abs", scene.tol_abs)) if v is not None}
    if tols:
        focal["tolerances"] = tols
    doc: dict[str, Any] = {"focal": focal}
    if scene.angle_unit is not None:
        doc["angle_unit"] = scene.angle_unit
    doc["entities"] = [entity_to_dict(e) for e in scene.entities]
    return doc


def dump_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2, allow_nan=False) + "\n"
