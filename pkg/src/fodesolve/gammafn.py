"""Gamma function via the Lanczos approximation.

Every quadrature weight and closed-form coefficient in this package goes
through this one routine, so it is kept self-contained and is checked
against high-precision references in the test suite.
"""

import math

__all__ = ["gamma", "GAMMA_MAX"]

# Largest argument for which the result fits in a double.
GAMMA_MAX = 171.624376956302725

# Lanczos coefficients for g = 7, n = 9 (Godfrey's set).  Gives close to
# full double precision on the positive axis.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma(x) for real x.

    Raises ValueError at the poles (x a non-positive integer) and
    OverflowError when the result exceeds double range (x > ~171.62).
    Arguments below 1/2 are routed through the reflection formula, which
    also covers negative non-integer x.
    """
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"gamma argument must be finite, got {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x!r}")
    if x > GAMMA_MAX:
        raise OverflowError(f"gamma({x!r}) exceeds double range")
    if x < 0.5:
        # Reflection: gamma(x) gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # t**(z+0.5) alone can overflow even when the result is finite, so
    # split the power and interleave with exp(-t).
    p = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * acc * p * math.exp(-t) * p
