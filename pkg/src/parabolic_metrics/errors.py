"""Exception hierarchy shared by the kernel, the metrics and the scene reader."""


class GeometryError(ValueError):
    """Base class for configurations the projection model cannot handle."""


class DegenerateOrigin(GeometryError):
    pass


class DegenerateOnAxis(GeometryError):
    """Point lies on the optical (w) axis; its perspective is undefined."""


class DegenerateLineThroughFocus(GeometryError):
    """The line passes through the focus, so it spans no plane with it."""


class NotElliptic(GeometryError):
    pass


class NotOnPlane(GeometryError):
    pass


class OutOfRange(GeometryError):
    pass


class SpanTooLarge(GeometryError):
    pass


class RegionInverted(GeometryError):
    pass


class NoConvergence(ArithmeticError):
    """A refinement loop exhausted its budget before meeting its tolerance."""


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(ValueError):
    def __init__(self, entity_id: str | None, constraint: str):
        where = f"entity {entity_id!r}" if entity_id is not None else "scene"
        super().__init__(f"{where}: {constraint}")
        self.entity_id = entity_id
        self.constraint = constraint
