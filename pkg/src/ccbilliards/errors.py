"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid geometric input (off-model point, zero vector, ...)."""


class PolygonError(ValueError):
    """Polygon construction or validation failure."""


class SpecFileError(ValueError):
    """Polygon spec file parse failure; carries line and field context."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)


class DegenerateStateError(RuntimeError):
    """Collision dynamics hit a grazing or otherwise degenerate state."""


class SingularFieldError(ValueError):
    """Vertex field evaluated on the singular circle r = 0."""


class ChartExitError(RuntimeError):
    """Closed-form flow left the chart; carries the exit time and state."""

    def __init__(self, message, exit_time, state):
        super().__init__(message)
        self.exit_time = exit_time
        self.state = state
