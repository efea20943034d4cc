"""Metric properties of the paraboloidal double projection.

The mirror is the paraboloid ``u^2 + v^2 = 4 f w + 4 f^2`` with its focus at
the origin. A space point is projected centrally onto the mirror, dropped
orthogonally to the director plane ``w = -2 f``, and that footprint is
projected centrally once more. The subpackages compute lengths of the
images of segments and areas of the images of simple regions, each paired
with an independent numerical oracle.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateLineThroughFocus,
    DegenerateOnAxis,
    DegenerateOrigin,
    GeometryError,
    NoConvergence,
    NotElliptic,
    NotOnPlane,
    OutOfRange,
    ParseError,
    RegionInverted,
    SpanTooLarge,
    ValidationError,
)
from .geometry import FocalPlane, ParaboloidModel, Point2, Point3  # noqa: E402
from .projection import double_project  # noqa: E402

__all__ = [
    "__version__",
    "DegenerateLineThroughFocus",
    "DegenerateOnAxis",
    "DegenerateOrigin",
    "FocalPlane",
    "GeometryError",
    "NoConvergence",
    "NotElliptic",
    "NotOnPlane",
    "OutOfRange",
    "ParaboloidModel",
    "ParseError",
    "Point2",
    "Point3",
    "RegionInverted",
    "SpanTooLarge",
    "ValidationError",
    "double_project",
]
