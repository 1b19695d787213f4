"""Exception types raised by the geometry routines."""


class HypSurfError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HypSurfError, ValueError):
    """A scalar argument lies outside the domain of the requested function."""


class DegenerateError(HypSurfError, ValueError):
    """The requested polygon does not exist (degenerate or impossible data)."""


class NotHyperbolic(HypSurfError, ValueError):
    """An isometry expected to be hyperbolic is elliptic or parabolic."""


class NoRealSolution(HypSurfError, ValueError):
    pass


class NonTermination(HypSurfError, RuntimeError):
    pass


class GluingError(HypSurfError, ValueError):
    """Gluing data is inconsistent, or an involution lift does not exist."""


class ParityError(HypSurfError, ValueError):
    pass


class AlignmentError(HypSurfError, ValueError):
    pass


class InvalidGenus(HypSurfError, ValueError):
    pass


class NoSolution(HypSurfError, RuntimeError):
    """An iterative solver failed to converge from every restart."""


class ConfigError(HypSurfError, ValueError):
    pass
