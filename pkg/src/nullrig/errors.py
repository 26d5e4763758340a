"""Exception hierarchy.  Numerical failures map to CLI exit code 3,
configuration problems to exit code 2."""


class NullRigError(Exception):
    """Base class for all package errors."""


class NumericalError(NullRigError):
    """A degeneracy occurred where the construction expects none."""


class DegeneracyError(NumericalError):
    """Singular ambient metric."""


class ImmersionError(NumericalError):
    """Jacobian of the immersion is rank deficient."""


class NotNullError(NumericalError):
    """The induced metric is nondegenerate (no radical)."""


class RechartError(NumericalError):
    """Rank is not locally constant or the fixed pivot pattern broke down."""


class ScreenSelectionError(NumericalError):
    """Gram-Schmidt met a (numerically) null candidate."""


class TransversalConstructionError(NumericalError):
    """No seed subset pairs invertibly with the radical basis."""


class ContradictionError(NumericalError):
    """The rigged metric came out degenerate, i.e. the frame is invalid."""


class EvaluationError(NumericalError):
    """A function produced non-finite values."""


class ConfigurationError(NullRigError):
    """Bad input: unknown example, unsupported classification, bad flag."""


class UnsupportedError(ConfigurationError):
    """The requested computation does not apply to this input."""
