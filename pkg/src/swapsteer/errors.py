"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes do not match the declared subsystem structure."""


class InconsistencyError(ArithmeticError):
    """Two routes to the same quantity disagree beyond tolerance."""


class FullRankError(ValueError):
    """A reduced state that must be full rank is rank deficient."""


class SeparableSourceError(ValueError):
    """A source eigenvector has Schmidt rank below 2."""


class DegenerateTermError(ValueError):
    """A decomposition term has zero normalization."""


class CertificationGateError(RuntimeError):
    """The realization does not reach the maximal witness value."""
