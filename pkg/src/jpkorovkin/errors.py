"""Exception hierarchy shared by the numerical modules and the CLI."""


class JpError(Exception):
    """Base class for all library errors."""


class BudgetExceeded(JpError):
    """A truncated series could not meet its tolerance within the term budget."""


class MissingBound(JpError):
    """A transform needs a uniform bound or explicit truncation orders."""


class QuadratureError(JpError):
    """Quadrature resolution is too small (or too large) for the request."""


class CutoffExceeded(JpError):
    """A partial sum or damping was requested beyond the coefficient cutoff."""


class NoAdmissibleDelta(JpError):
    """No ladder value of delta satisfies the modulus condition."""
