"""Exception and warning types shared across the package."""


class SingularOriginError(ValueError):
    """Fractional derivative requested at the first node of a series that
    does not vanish there, where the quadrature's boundary term diverges."""


class NonzeroOriginError(ValueError):
    """A binomial-weight derivative was applied to a series whose first
    sample is nonzero.  The scheme is only equivalent to the integral
    definition when the series starts at zero."""


class SingularInversionError(ArithmeticError):
    """The pivot of the node-by-node Abel inversion vanished, so the
    current node value cannot be recovered."""


class UnsupportedProblemError(ValueError):
    """The problem falls outside what the requested routine can handle."""


class BabenkoTailWarning(RuntimeWarning):
    """The last retained term of the truncated inversion series is still
    large, so the returned series is likely inaccurate."""
