"""Exception taxonomy shared across the library.

Two broad families matter to callers: modelling errors (the request is
outside what the model or measure can represent) and numerical errors
(the request is representable but a numerical routine failed to deliver
the target accuracy).  The CLI and the HTTP service map these families
to distinct exit codes / status codes, so new exceptions should subclass
one of the two intermediate bases below.
"""


class LevyDualError(Exception):
    """Base class for all library errors."""


class ModelError(LevyDualError):
    """The request lies outside the domain of the model or measure."""


class NumericalError(LevyDualError):
    """A numerical routine failed to reach its accuracy target."""


class DomainError(ModelError):
    """An argument left the exponential-moment domain or a parameter cone."""


class DimensionMismatch(ModelError):
    """Vector or matrix shapes are inconsistent with the triplet dimension."""


class UnsupportedMeasure(ModelError):
    """The jump-measure backend does not support the requested operation."""


class UnsupportedModel(ModelError):
    """The model backend does not support the requested operation."""


class UnavailableDrift(ModelError):
    """No closed-form drift is available for this model/frame combination."""


class DegenerateDirection(ModelError):
    """The projection direction is zero or numerically degenerate."""


class ContourError(NumericalError):
    """The integration contour leaves the admissible analyticity strip."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to converge within its budget."""
