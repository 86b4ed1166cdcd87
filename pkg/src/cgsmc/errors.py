"""Exception types used across the package."""


class CgsmcError(Exception):
    """Base class for all package errors."""


class InvalidAdjacencyError(CgsmcError):
    """Adjacency matrix violates the code/diagonal/symmetry rules."""


class NotChainGraphError(CgsmcError):
    """Adjacency encodes a graph with a semi-directed cycle."""


class StructuralZeroError(CgsmcError):
    """Parameter matrix has a nonzero entry where the graph forces a zero."""


class AsymmetricMatrixError(CgsmcError):
    """Matrix expected to be symmetric is not."""


class NotPositiveDefiniteError(CgsmcError):
    """Matrix expected to be positive definite is not."""


class SingularMatrixError(CgsmcError):
    """I - coefficient matrix is numerically singular."""


class InitializationError(CgsmcError):
    """Rejection-sampling initialization exhausted its attempt budget."""


class ScheduleCapError(CgsmcError):
    """Temperature schedule exceeded the step cap without reaching 1."""


class IngestionError(CgsmcError):
    """Data file is empty, ragged, or contains non-numeric cells."""


class ConfigError(CgsmcError):
    """Run configuration is missing, malformed, or inconsistent."""
