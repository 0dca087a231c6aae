"""Exception types raised across the package."""


class CascadeDimError(Exception):
    """Base class for all package errors."""


class DomainError(CascadeDimError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeError(CascadeDimError, ValueError):
    """The weight model is not subcritical."""


class DepthError(CascadeDimError, ValueError):
    """A dyadic path is deeper than the truncation depth."""


class GridError(CascadeDimError, ValueError):
    """A point does not lie on the dyadic grid of the truncation depth."""


class WindowError(CascadeDimError, ValueError):
    """A regression window holds too few scales."""


class ShapeError(CascadeDimError, ValueError):
    """A sequence does not have the required monotone shape."""


class ConsistencyError(CascadeDimError, ArithmeticError):
    """A closed-form evaluation left its region of validity."""


class ResourceError(CascadeDimError, RuntimeError):
    """A request would exceed the memory or runtime guard."""
