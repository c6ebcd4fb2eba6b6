"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: precondition failures exit 2,
inconclusive-at-precision results exit 3 and internal contradictions exit 4.
"""


class K3GermError(Exception):
    """Base class for all library errors."""


class PreconditionError(K3GermError, ValueError):
    """An operation was called outside its documented domain."""


class FieldMismatchError(PreconditionError):
    pass


class FieldError(PreconditionError):
    """The requested value does not live in the working field."""


class VariableMismatchError(PreconditionError):
    pass


class NotAUnitError(PreconditionError, ZeroDivisionError):
    pass


class NotInvertibleError(PreconditionError):
    pass


class BasePointError(PreconditionError):
    pass


class ContractionError(PreconditionError):
    """The double cover contracts a curve, so the involution is undefined."""


class NoPreimageError(PreconditionError):
    pass


class InconclusiveError(K3GermError):
    """The answer cannot be decided from the data at hand."""


class PrecisionError(InconclusiveError):
    """The truncation order is too low for the requested check."""


class CoincidentCurvesError(InconclusiveError):
    """Two curve germs agree to the working precision."""


class ContradictionError(K3GermError):
    """A computed value disagrees with a proven statement or a second route."""
