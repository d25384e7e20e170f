"""Exception types shared across the package.

Everything raised on purpose derives from LpbmError so callers can catch
one base class at API boundaries (the CLI maps them to exit code 2).
"""


class LpbmError(Exception):
    """Base class for all package errors."""


class InvalidSupportVector(LpbmError):
    """A support-vector tuple violates a structural invariant."""


class NotSymmetric(InvalidSupportVector):
    """Normals/heights are not antipodally paired."""


class BadParameter(LpbmError):
    """A scalar argument is outside its documented domain."""


class NormalSetMismatch(LpbmError):
    """Two bodies do not share the same ordered normal list."""


class Unbounded(LpbmError):
    """The intersection of half-spaces is not bounded."""


class DegenerateVertex(LpbmError):
    """More than n facets meet at a vertex (within tolerance), or a
    vertex figure could not be resolved; the polytope is not simple."""


class NearParallelFacets(LpbmError):
    """Two adjacent facet normals are too close to parallel for the
    angle-based ridge formulas to be stable."""


class EmptyFacet(LpbmError):
    """An operation that needs every facet nonempty met an empty one."""


class EigenFailure(LpbmError):
    """The symmetric eigensolver did not converge."""


class NeighborhoodNotFound(LpbmError):
    """Could not find a perturbation preserving the a-type after the
    retry budget was exhausted."""


class GenerationFailed(LpbmError):
    """Random body generation exhausted its retry budget."""


class TooManyEvents(LpbmError):
    """A scan detected more candidate events than the safeguard cap."""


class FileFormatError(LpbmError):
    """A JSON/CSV payload is malformed or fails validation."""
