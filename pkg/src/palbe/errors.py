"""Exception hierarchy shared by all palbe modules.

Two failure families map onto the CLI exit-code contract:
validation/consistency problems (exit 1) and numerical failures (exit 2).
"""


class PalbeError(Exception):
    """Base class for all palbe errors."""


class ValidationError(PalbeError, ValueError):
    """Malformed or out-of-contract input (bad shapes, non-unit vectors,
    structure violations, inadmissible ansatz vectors, ...)."""


class InconsistencyError(ValidationError):
    """A constraint that the structure forces cannot be met by the data,
    e.g. a structurally-zero inner product that is numerically nonzero."""


class NumericalError(PalbeError, RuntimeError):
    """A numerical procedure failed to converge or lost all accuracy."""


class RootFindingError(NumericalError):
    """Simultaneous root iteration did not converge.

    Carries the partial roots so callers can inspect what was found.
    """

    def __init__(self, message, partial_roots=None):
        super().__init__(message)
        self.partial_roots = [] if partial_roots is None else list(partial_roots)
