"""Exception hierarchy shared by every revlab module."""

from __future__ import annotations


class RevlabError(Exception):
    """Base class for all revlab domain errors."""


class ArgumentError(RevlabError, ValueError):
    """Raised when an argument lies outside its documented range."""


class DimensionError(RevlabError, ValueError):
    """Raised when operands disagree on the number of sites or representation size."""


class UnsupportedRepresentationError(RevlabError):
    """Raised when an operation needs the full 2^n representation but got a collective-spin state."""


class DimensionLimitError(RevlabError):
    """Raised when a request exceeds the configured dense, iterative or linear-solve limits."""


class NotConvergedError(RevlabError):
    """Raised when an iterative eigensolver stagnates."""


class GaplessError(RevlabError):
    """Raised when a filter is requested for a non-positive spectral gap."""


class VacuousBoundError(RevlabError):
    """Raised when the disturbance overlap falls below the overlap floor."""


class DegenerateGroundStateError(RevlabError):
    """Raised when an operation needs a unique ground state."""


class NotAProjectorError(RevlabError):
    """Raised when an operator fails the P^2 = P check on the supplied state."""


class DegenerateDecompositionError(RevlabError):
    """Raised when one branch of a projector decomposition has vanishing weight."""


class NoLogicalError(RevlabError):
    """Raised when a logical loop is requested for a lattice without non-contractible loops."""


class FilterRangeError(RevlabError):
    """Raised when the Chebyshev recurrence leaves the representable range."""


class ManifestError(RevlabError):
    """Raised when an experiment manifest violates its schema.

    Attributes:
        key: Dotted path of the offending key, when known
    """

    def __init__(self, message: str, key: str | None = None) -> None:
        """Initialize with a message and the offending key."""
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class ArtifactWriteError(RevlabError):
    """Raised when run artifacts cannot be written; no partial artifact is left behind."""
