"""Shared exception types."""


class ParameterError(ValueError):
    """A parameter violates its documented precondition."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but degenerate for the operation
    (e.g. edgeless graph, zero-variance sample)."""


class SingularDesignError(ValueError):
    """Regression design matrix is rank deficient."""


class NoIdentificationError(ValueError):
    """Fixed-effects regressor has no within-group variation left."""
