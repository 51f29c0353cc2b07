"""Exception hierarchy shared by all ncdist modules.

The CLI maps these onto exit codes: invalid input -> 1, numerical
failure -> 2, empty-set / infeasible outcomes -> 3.
"""


class NcdistError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(NcdistError, ValueError):
    """Malformed or inconsistent input data (shapes, schemas, invariants)."""


class ShapeMismatchError(InvalidInputError):
    """Block shapes do not match the algebra they claim to live on."""


class UnsupportedKindError(InvalidInputError):
    """Operation applied to a state-set kind it does not support."""


class EmptySetError(NcdistError):
    """A set required to be nonempty turned out empty (or infeasible)."""


class NumericalFailureError(NcdistError):
    """A solver failed to converge or returned an unusable status."""
