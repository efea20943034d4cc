"""Regenerate the shipped 100-entity reference scene.

    python tools/make_reference_scene.py > src/parabolic_metrics/data/reference_scene.json

Draws from a fixed seed and redraws any entity the kernel reports as
degenerate, so the scene exercises every entity type and every conic kind
without tripping the documented degeneracies.
"""

from __future__ import annotations

import math
import random
import sys

from parabolic_metrics.areas import MeshSpec, VerticalRect
from parabolic_metrics.geometry import Point2, Point3
from parabolic_metrics.report import ReportConfig, evaluate_entity
from parabolic_metrics.scene import (
    CylinderEntity,
    PointEntity,
    RectEntity,
    Scene,
    SectorEntity,
    SegmentEntity,
    dump_scene,
)

SEED = 20240607
COUNTS = {"point": 25, "segment": 35, "vertical_rect": 6, "cylindrical_patch": 17, "annular_sector": 17}
CHECK = ReportConfig(command="validate", mesh=MeshSpec(rows=16, cols=16, refine_tol=1e-2), mc_samples=10_000)


def _draw(rng: random.Random, kind: str, eid: str):
    u = rng.uniform
    if kind == "point":
        return PointEntity(eid, Point3(u(-10, 10), u(-10, 10), u(-10, 10)))
    if kind == "segment":
        return SegmentEntity(eid, Point3(u(-5, 5), u(-5, 5), u(-5, 5)), Point3(u(-5, 5), u(-5, 5), u(-5, 5)))
    if kind == "vertical_rect":
        phi = u(-math.pi, math.pi)
        span = u(0.2, 1.5)
        a = Point2(u(1, 4) * math.cos(phi + span), u(1, 4) * math.sin(phi + span))
        b = Point2(u(1, 4) * math.cos(phi), u(1, 4) * math.sin(phi))
        w_top = u(-1, 3)
        return RectEntity(eid, VerticalRect.from_footprint(a, b, w_top, w_top - u(0.5, 2)))
    if kind == "cylindrical_patch":
        w_bottom = u(-3, 2)
        phi = u(-math.pi, math.pi)
        return CylinderEntity(eid, u(0.5, 4), w_bottom + u(0.2, 3), w_bottom, phi, phi + u(0.1, 2 * math.pi))
    r_inner = u(0, 2)
    phi = u(-math.pi, math.pi)
    return SectorEntity(eid, r_inner, r_inner + u(0.2, 3), phi, phi + u(0.1, 2 * math.pi))


def build(seed: int = SEED) -> Scene:
    rng = random.Random(seed)
    fixed = [
        SegmentEntity("seg-circle", Point3(2, 0, 0), Point3(0, 2, 0)),
        SegmentEntity("seg-vertical", Point3(1, 0, 0), Point3(1, 0, 1)),
    ]
    entities = list(fixed)
    base = Scene(f=1.0, entities=())
    prefix = {"point": "pt", "segment": "seg", "vertical_rect": "rect", "cylindrical_patch": "cyl", "annular_sector": "sec"}
    for kind, count in COUNTS.items():
        have = sum(e.type == kind for e in entities)
        i = 0
        while have < count:
            ent = _draw(rng, kind, f"{prefix[kind]}-{i:02d}")
            i += 1
            if evaluate_entity(base, ent, CHECK).status != "ok":
                continue
            entities.append(ent)
            have += 1
    return Scene(f=1.0, entities=tuple(entities))


if __name__ == "__main__":
    sys.stdout.write(dump_scene(build()))
