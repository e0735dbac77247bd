"""Exception hierarchy shared by all engines."""


class BoundGenError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(BoundGenError):
    pass


class NotUnitary(BoundGenError):
    pass


class NotAProjection(BoundGenError):
    pass


class NoConvergence(BoundGenError):
    pass


class DimensionMismatch(BoundGenError):
    pass


class RankMismatch(BoundGenError):
    pass


class NotSubprojection(BoundGenError):
    pass


class NotInCorner(BoundGenError):
    pass


class TraceMismatch(BoundGenError):
    pass


class NumericalDegeneracy(BoundGenError):
    pass


class OddCornerRank(BoundGenError):
    pass


class DivisibilityError(BoundGenError):
    pass


class NotAPartition(BoundGenError):
    pass


class NotInfinite(BoundGenError):
    pass


class DegenerateOrientation(BoundGenError):
    pass


class DensityMismatch(BoundGenError):
    """Two residue-class sets cannot be matched by an eventual translation."""


class NotReversible(BoundGenError):
    """The permutation is not conjugate to its inverse inside the tail class."""


class MixedPayloads(BoundGenError):
    pass


class OracleExhausted(BoundGenError):
    pass


class IncompatibleProjections(BoundGenError):
    pass


class MissingWitness(BoundGenError):
    pass


class InvalidInput(BoundGenError):
    """Malformed serialized data."""
