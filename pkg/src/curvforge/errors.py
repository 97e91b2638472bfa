"""Exception hierarchy for curvforge.

All library-raised exceptions derive from :class:`CurvforgeError`, so callers
can catch one base class.  Input-shape and input-value problems additionally
derive from :class:`ValueError` (via :class:`MalformedInputError`) to stay
friendly to generic callers.
"""


class CurvforgeError(Exception):
    """Base class for every error raised by this package."""


class MalformedInputError(CurvforgeError, ValueError):
    """An input array has the wrong shape, dtype, symmetry, or range."""


class NotSPDError(MalformedInputError):
    """A matrix that must be symmetric positive definite is not."""


class SubalgebraError(MalformedInputError):
    """A claimed subalgebra is not closed under the bracket."""


class UnsupportedModeError(CurvforgeError):
    """A computation mode is not available for the given data."""


class UnknownScenarioError(CurvforgeError, KeyError):
    """A scenario name is not in the catalog and is not a readable file."""

    def __str__(self) -> str:
        # KeyError.__str__ would repr-quote the message; keep it plain.
        return str(self.args[0]) if self.args else ""


class ScenarioValidationError(CurvforgeError):
    """A scenario file failed validation.

    ``paths`` holds JSON-pointer-style locations of the offending fields.
    """

    def __init__(self, message: str, paths: tuple[str, ...] = ()):
        super().__init__(message)
        self.paths = tuple(paths)


class CertificationError(CurvforgeError):
    """A certification run could not reach a positive verdict."""


class NumericalError(CurvforgeError):
    """An internal numerical cross-check failed beyond tolerance."""
