"""Command-line front end: ``parabolic-metrics <command> --scene PATH``.

Reports go to standard output, log lines to standard error. Exit status is
0 on success, 1 when ``validate`` finds a residual above its bound, and 2
for usage or parse errors.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import replace

from .areas import DEFAULT_MC_SAMPLES, DEFAULT_SEED, MeshSpec
from .errors import ParseError, ValidationError
from .report import COMMANDS, ReportConfig, compute_report, emit_report
from .scene import parse_scene

log = logging.getLogger("parabolic_metrics")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse's exit code but route through one place
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _mesh(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)[xX](\d+)", text.strip())
    if not m or int(m.group(1)) < 2 or int(m.group(2)) < 2:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS with both at least 2, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _positive(kind):
    def convert(text: str):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return value

    return convert


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", required=True, metavar="PATH", help="scene JSON file ('-' for stdin)")
    common.add_argument("--focal", type=_positive(float), metavar="F", help="override the scene's focal length")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--mesh", type=_mesh, metavar="ROWSxCOLS", help="initial surface mesh (default 64x64)")
    common.add_argument("--tol-rel", type=_positive(float), metavar="X", help="relative geometric tolerance")
    common.add_argument("--degrees", action="store_true", help="read and write angles in degrees")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Monte-Carlo seed")
    common.add_argument(
        "--mc-samples", type=_positive(int), default=DEFAULT_MC_SAMPLES, metavar="N", help="Monte-Carlo sample count"
    )
    common.add_argument("--jobs", type=_positive(int), default=1, metavar="N", help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="parabolic-metrics", description="Metric properties of the paraboloidal double projection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "project": "double projection of points, segment ends and rect corners",
        "classify": "conic section cut by each segment's focal plane",
        "length": "lengths of every image of each segment",
        "area": "areas of rects, cylindrical patches and annular sectors",
        "validate": "every analytic result against its oracle; exit 1 on any failure",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s"
    )

    try:
        if args.scene == "-":
            text = sys.stdin.read()
        else:
            with open(args.scene, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        parser.print_usage(sys.stderr)
        print(f"parabolic-metrics: error: cannot read scene: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        scene = parse_scene(text)
    except (ParseError, ValidationError) as exc:
        print(f"parabolic-metrics: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cfg = ReportConfig(
        command=args.command,
        focal=args.focal,
        tol_rel=args.tol_rel,
        degrees=args.degrees,
        seed=args.seed,
        mc_samples=args.mc_samples,
        jobs=args.jobs,
    )
    if args.mesh:
        cfg = replace(cfg, mesh=MeshSpec(rows=args.mesh[0], cols=args.mesh[1]))

    log.info("%s: %d entities", args.command, len(scene.entities))
    report = compute_report(scene, cfg)
    sys.stdout.write(emit_report(report, args.format))
    sys.stdout.flush()

    for e in report.entities:
        if e.status == "degenerate":
            log.warning("%s (%s): %s", e.id, e.type, e.diagnostic)
    if args.command == "validate":
        failures = report.failures()
        for eid, name in failures:
            log.error("validation failed: %s %s", eid, name)
        if failures:
            return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
