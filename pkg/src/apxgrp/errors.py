"""Exception hierarchy shared by every module of the toolkit."""


class ApxError(Exception):
    """Base class for all toolkit errors."""


class SpecMismatchError(ApxError, ValueError):
    """Operands live in different groups."""


class GroupOverflowError(ApxError, OverflowError):
    """A free coordinate left the signed 64-bit range."""


class EmptySetError(ApxError, ValueError):
    pass


class DomainError(ApxError, ValueError):
    """An argument is outside the domain where the operation is defined."""


class ThresholdError(DomainError):
    """``h`` is below the threshold the construction needs."""

    def __init__(self, h, h_min, message=None):
        self.h = h
        self.h_min = h_min
        super().__init__(message or f"h={h} is below the construction threshold h_min={h_min}")


class MembershipError(ApxError, ValueError):
    """A vector is not in the lattice it was expected to belong to."""


class HomomorphismError(ApxError, ValueError):
    pass


class ParameterError(ApxError, ValueError):
    pass


class ResourceError(ApxError, RuntimeError):
    """A configured size cap would be exceeded; no answer is given."""
