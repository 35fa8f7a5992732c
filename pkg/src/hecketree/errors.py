"""Exception hierarchy shared by all hecketree modules."""


class HecketreeError(Exception):
    """Base class for all library-specific errors."""


# --- local ring arithmetic ---

class FieldMismatch(HecketreeError):
    """Operands belong to different local fields or precisions."""


class NonUnit(HecketreeError):
    """Inversion (or a unit-only operation) was attempted on a non-unit."""


class NoSolution(HecketreeError):
    """An equation that must be solvable over the unramified extension was not."""


# --- lattices ---

class RankDeficient(HecketreeError):
    """Generators do not span a full-rank lattice."""


class PrecisionExhausted(HecketreeError):
    """A pivot or valuation is indistinguishable from zero at the known precision."""


class NotHyperspecial(HecketreeError):
    """Operation requires a self-dual lattice."""


# --- building / operators ---

class RadiusExceeded(HecketreeError):
    """Lazy generation would leave the configured radius budget."""


class NonUniquePredecessor(HecketreeError):
    """Tree structure violated: more than one neighbor strictly closer to the origin."""


class AmbiguousProjection(HecketreeError):
    """Nearest-point projection onto the embedded subtree is not unique."""


# --- distribution / norm families ---

class UnsupportedSupport(HecketreeError):
    """A formal sum contains basis vertices outside the domain of the trace map."""


class NotARoot(HecketreeError):
    """A claimed root fails to satisfy its defining polynomial."""


class NonUnitParameters(HecketreeError):
    """Unipotent parameters must be units of the quadratic extension."""
