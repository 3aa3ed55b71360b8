"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, ClosureError -> 3,
QuadratureError -> 4, MeshError -> 5.
"""


class HarmsurfError(Exception):
    """Base class for all package errors."""


class DomainError(HarmsurfError):
    """Invalid domain data (coincident branch points, puncture on a slit, ...)."""


class SlitError(HarmsurfError):
    """Evaluation requested exactly on a slit with no side chosen."""


class PoleError(HarmsurfError):
    """Evaluation at (or a contour through) a pole or branch point."""


class QuadratureError(HarmsurfError):
    """Requested tolerance not reached, or a singularity inside a segment."""


class ClosureError(HarmsurfError):
    """Period closure failed (residual above tolerance, solver breakdown)."""


class RankDeficiencyError(ClosureError):
    """Period system is rank deficient."""

    def __init__(self, rank, nullity, message=None):
        self.rank = rank
        self.nullity = nullity
        super().__init__(message or f"rank-deficient period system (rank {rank}, nullity {nullity})")


class MeshError(HarmsurfError):
    """Tessellation failure (empty patch, weld mismatch, unreachable point)."""


class PathRoutingError(MeshError):
    """No puncture/slit avoiding path between two parameter points."""


class ConfigError(HarmsurfError):
    """Bad family specification or CLI usage."""
