"""Exception types raised by gaussepi."""

import numpy as np


class ValidationError(ValueError):
    """Input is not a valid covariance matrix, state or parameter set."""


class DecompositionError(np.linalg.LinAlgError):
    """A matrix could not be brought into Williamson normal form."""


class PureModeError(ValueError):
    """A formula needing an inverse temperature met a pure (lambda = 1) mode."""


class PreconditionError(ValueError):
    """A perturbative check was requested outside its regime of validity."""


class InvariantViolation(AssertionError):
    """A proven inequality or identity failed numerically."""
