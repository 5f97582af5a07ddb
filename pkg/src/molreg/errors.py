"""Exception types raised by the library."""


class MolregError(Exception):
    """Base class for all library errors."""


class InvalidFieldError(MolregError, ValueError):
    """A field holds non-finite values or has the wrong shape."""


class DimensionError(MolregError, ValueError):
    """Two objects live on incompatible grids."""


class DomainError(MolregError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class NoiseDominatedError(MolregError):
    """The data violate ``delta + delta**r <= ||g_delta|| / 2``.

    No discrepancy-based parameter exists in that case.
    """


class NonConvergenceError(MolregError):
    """An iterative procedure exhausted its iteration budget."""
