import json
import math
from importlib import resources

import jsonschema
import pytest

from parabolic_metrics.errors import ParseError, ValidationError
from parabolic_metrics.report import MetricReport, ReportConfig, compute_report, emit_report, metadata
from parabolic_metrics.scene import PointEntity, Scene, dump_scene, parse_scene

SCHEMAS = resources.files("parabolic_metrics") / "schemas"
SCENE_SCHEMA = json.loads((SCHEMAS / "scene.schema.json").read_text())
REPORT_SCHEMA = json.loads((SCHEMAS / "report.schema.json").read_text())
REFERENCE = (resources.files("parabolic_metrics") / "data" / "reference_scene.json").read_text()

MIXED = {
    "focal": {"f": 1.0, "tolerances": {"rel": 1e-9, "abs": 1e-12}},
    "entities": [
        {"type": "point", "id": "p", "u": 2, "v": 0, "w": 5},
        {"type": "point", "id": "axis", "u": 0, "v": 0, "w": 5},
        {"type": "segment", "id": "s", "a": [2, 0, 0], "b": [0, 2, 0]},
        {"type": "vertical_rect", "id": "r", "corners": {"a": [2, 0.5, 1], "b": [2, 2, 1], "c": [2, 2, -0.5], "d": [2, 0.5, -0.5]}},
        {"type": "cylindrical_patch", "id": "c", "r": 2, "w_top": 1, "w_bottom": 0, "phi_from": 0, "phi_to": 1.5},
        {"type": "annular_sector", "id": "a", "r_inner": 1, "r_outer": 2, "phi_from": 0, "phi_to": 1.5},
    ],
}
FAST = dict(mc_samples=20_000)


def test_minimal_scene():
    scene = parse_scene('{"focal": {"f": 1}, "entities": [{"type": "point", "id": "p", "u": 1, "v": 2, "w": 3}]}')
    assert scene.f == 1 and len(scene.entities) == 1
    assert isinstance(scene.entities[0], PointEntity)


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"entities": []}, "focal"),
        ({"focal": {"f": 1}, "entities": [{"type": "point", "id": "p", "u": 0, "v": 0, "w": 0}] * 2}, "duplicate"),
        ({"focal": {"f": -1}, "entities": []}, "positive"),
        ({"focal": {"f": 1}, "entities": [{"type": "blob", "id": "x"}]}, "unknown entity type"),
        ({"focal": {"f": 1}, "entities": [{"type": "point", "id": "p", "u": 0, "v": 0}]}, "missing"),
        ({"focal": {"f": 1}, "entities": [{"type": "point", "id": "p", "u": 0, "v": 0, "w": 0, "z": 1}]}, "unknown field"),
        ({"focal": {"f": 1}, "entities": [{"type": "segment", "id": "s", "a": [0, 0], "b": [1, 1, 1]}]}, "three numbers"),
        ({"focal": {"f": 1}, "entities": [{"type": "point", "id": "p", "u": True, "v": 0, "w": 0}]}, "number"),
        ({"focal": {"f": 1}, "angle_unit": "gradians", "entities": []}, "angle_unit"),
        ({"focal": {"f": 1, "tolerances": {"rel": 0.1}}, "entities": []}, "tolerances.rel"),
        (
            {"focal": {"f": 1}, "entities": [{"type": "annular_sector", "id": "a", "r_inner": 3, "r_outer": 2, "phi_from": 0, "phi_to": 1}]},
            "r_outer",
        ),
        (
            {"focal": {"f": 1}, "entities": [{"type": "vertical_rect", "id": "r", "corners": {"a": [2, 0, 0], "b": [0, 2, 0], "c": [0, 2, 1], "d": [2, 0, 1]}}]},
            "above",
        ),
    ],
)
def test_invalid_scenes(doc, message):
    with pytest.raises(ValidationError, match=message):
        parse_scene(json.dumps(doc))


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as info:
        parse_scene('{\n  "focal": {"f": 1},\n  "entities": [,]\n}')
    assert info.value.line == 3


def test_degrees_scene():
    scene = parse_scene(
        '{"focal": {"f": 1}, "angle_unit": "degrees", "entities": '
        '[{"type": "annular_sector", "id": "a", "r_inner": 1, "r_outer": 2, "phi_from": 0, "phi_to": 90}]}'
    )
    report = compute_report(scene, ReportConfig(command="area"))
    assert report.entities[0].results["projected"]["value"] == pytest.approx(3 * math.pi / 4, rel=1e-15)


def test_scene_echo_round_trip():
    scene = parse_scene(json.dumps(MIXED))
    again = parse_scene(dump_scene(scene))
    assert again == scene
    jsonschema.validate(json.loads(dump_scene(scene)), SCENE_SCHEMA)


def test_reference_scene_matches_schema():
    doc = json.loads(REFERENCE)
    jsonschema.validate(doc, SCENE_SCHEMA)
    scene = parse_scene(REFERENCE)
    assert len(scene.entities) == 100
    assert {e.type for e in scene.entities} == {"point", "segment", "vertical_rect", "cylindrical_patch", "annular_sector"}


def test_empty_report():
    scene = Scene(f=1.0, entities=())
    cfg = ReportConfig()
    text = emit_report(MetricReport(metadata(scene, cfg)), "json")
    doc = json.loads(text)
    assert doc["entities"] == [] and doc["metadata"]["f"] == 1.0
    assert emit_report(MetricReport(metadata(scene, cfg)), "csv").count("\n") == 1


@pytest.mark.parametrize("command", ["project", "classify", "length", "area", "validate"])
def test_every_entity_reported_once(command):
    scene = parse_scene(json.dumps(MIXED))
    report = compute_report(scene, ReportConfig(command=command, **FAST))
    assert [e.id for e in report.entities] == [e.id for e in scene.entities]
    doc = json.loads(emit_report(report, "json"))
    jsonschema.validate(doc, REPORT_SCHEMA)
    statuses = {e.id: e.status for e in report.entities}
    assert statuses["axis"] in ("degenerate", "skipped")
    if command in ("project", "validate"):
        assert statuses["axis"] == "degenerate"


def test_report_numbers_round_trip():
    scene = parse_scene(json.dumps(MIXED))
    report = compute_report(scene, ReportConfig(command="validate", **FAST))
    doc = json.loads(emit_report(report, "json"))
    for mine, theirs in zip(report.entities, doc["entities"]):
        assert mine.results == theirs["results"]


def test_csv_floats_round_trip():
    scene = parse_scene(json.dumps(MIXED))
    report = compute_report(scene, ReportConfig(command="length"))
    rows = [line.split(",") for line in emit_report(report, "csv").splitlines()[1:]]
    l1 = next(r for r in rows if r[0] == "s" and r[3] == "L1")
    assert float(l1[4]) == report.entities[2].results["L1"]["analytic"] == math.pi


def test_reports_are_deterministic():
    scene = parse_scene(json.dumps(MIXED))
    cfg = ReportConfig(command="validate", **FAST)
    for fmt in ("json", "csv"):
        assert emit_report(compute_report(scene, cfg), fmt) == emit_report(compute_report(scene, cfg), fmt)


def test_parallel_matches_serial():
    scene = parse_scene(json.dumps(MIXED))
    serial = emit_report(compute_report(scene, ReportConfig(command="validate", **FAST)))
    parallel = emit_report(compute_report(scene, ReportConfig(command="validate", jobs=2, **FAST)))
    assert serial == parallel


def test_focal_override_scales_lengths():
    scene = parse_scene(json.dumps(MIXED))
    report = compute_report(scene, ReportConfig(command="length", focal=2.0))
    # same quarter turn of a focal circle twice as large
    assert report.entities[2].results["L1"]["analytic"] == 2 * math.pi
    assert report.metadata["f"] == 2.0
