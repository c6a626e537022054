"""Exception types raised by :mod:`fracnoether`."""


class FracNoetherError(Exception):
    """Base class for library errors."""


class OrderOutOfRange(FracNoetherError, ValueError):
    pass


class GridMismatch(FracNoetherError, ValueError):
    pass


class ConstraintViolation(FracNoetherError, ValueError):
    """A problem parameter violates a documented constraint (e.g. order bounds)."""


class NotAutonomous(FracNoetherError, ValueError):
    pass


class UnsupportedGenerator(FracNoetherError, ValueError):
    """The transformation would need off-grid resampling."""


class NonConvergence(FracNoetherError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NodeSolveError(FracNoetherError, RuntimeError):
    def __init__(self, message, node):
        super().__init__(f"{message} (node {node})")
        self.node = node
