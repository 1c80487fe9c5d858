"""Exception types shared across the package.

Plain ``ValueError`` is used for out-of-range scalar arguments; the classes
below mark structural failures that callers may want to catch separately.
All of them subclass ``ValueError`` so a broad ``except ValueError`` still
works.
"""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes or tensor-factor dimensions."""


class NotHermitianError(ValueError):
    """Matrix handed to a Hermitian-only routine is not Hermitian."""


class NoConvergenceError(ValueError):
    """Iterative eigensolver exceeded its iteration cap."""


class BadSettingError(ValueError):
    """Measurement-setting index is invalid for the given behavior."""


class TooManyVerticesError(ValueError):
    """Deterministic-vertex enumeration would exceed the documented cap."""


class UnboundedError(ValueError):
    """Linear program has an unbounded objective."""


class InfeasibleError(ValueError):
    """Linear program has an empty feasible region."""


class NumericalFailureError(ValueError):
    """Numerical routine failed to terminate within its safeguards."""


class AlphabetTooLargeError(ValueError):
    """Eve alphabet exceeds the supported size after exact reduction."""


class NoViolationError(ValueError):
    """Requested construction needs a CHSH violation but the noise is too high."""


class GridMismatchError(ValueError):
    """Bound curves do not share a common parameter grid."""
