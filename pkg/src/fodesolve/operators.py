"""Discrete fractional integral and derivative operators on uniform grids.

All operators act on series sampled at t_i = i*h with the lower terminal
of the underlying integrals fixed at t = 0, and all of them are causal:
the value at node i depends on samples 0..i only.

Three quadratures cover the whole order range (the first two follow
Oldham & Spanier's product-rule constructions, the third uses the
binomial weights of the backward-difference definition):

* fractional integral of any positive order,
* fractional derivative of order in [0, 1), which carries an explicit
  boundary term so a nonzero first sample is tolerated away from t = 0,
* binomial-weight derivative for orders >= 1, valid for series whose
  first sample is zero.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import gammafn
from .errors import NonzeroOriginError, SingularOriginError

__all__ = [
    "DEFAULT_ORDER_CAP",
    "SampleSeries",
    "OperatorOrder",
    "WeightTable",
    "weight_table",
    "frac_integral",
    "frac_derivative01",
    "frac_derivative_general",
    "apply_operator",
]

# Orders beyond this are almost certainly misparsed input, not physics.
DEFAULT_ORDER_CAP = 10.0

_WEIGHT_CACHE_SIZE = 256


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """A real-valued signal sampled uniformly at t_i = i*h, i = 0..n-1.

    The sample array is stored read-only; build a new series instead of
    mutating one in place.  Series entering a common computation must
    share the same h.
    """

    h: float
    values: np.ndarray

    def __post_init__(self):
        h = float(self.h)
        if not np.isfinite(h) or h <= 0.0:
            raise ValueError(f"step must be positive and finite, got {h!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a non-empty 1-D array")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.h


@dataclass(frozen=True)
class OperatorOrder:
    """Signed operator order: negative integrates, positive differentiates,
    zero is the identity.  The magnitude cap rejects wild orders that are
    usually a sign of a misread input file."""

    mu: float
    cap: float = DEFAULT_ORDER_CAP

    def __post_init__(self):
        mu = float(self.mu)
        if not np.isfinite(mu):
            raise ValueError(f"operator order must be finite, got {mu!r}")
        if abs(mu) >= self.cap:
            raise ValueError(
                f"operator order {mu!r} exceeds the cap {self.cap!r}"
            )
        object.__setattr__(self, "mu", mu)

    @property
    def is_identity(self) -> bool:
        return self.mu == 0.0


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Grid-independent quadrature weights for one (kind, order) pair.

    kind is one of "integral", "derivative01", "binomial".  Weights carry
    no h factor; the caller applies the h**(+-order) prefactor.
    """

    order: float
    kind: str
    weights: np.ndarray = field(repr=False)


@functools.lru_cache(maxsize=_WEIGHT_CACHE_SIZE)
def _integral_weights(alpha: float, n: int) -> np.ndarray:
    # Interior weights (j+1)^a - (j-1)^a for j >= 1; slot 0 is unused and
    # kept zero so the table can be convolved directly.  The subtraction
    # loses at most ~j*eps relative accuracy, far below quadrature error
    # at any grid this package targets.
    j = np.arange(n, dtype=np.float64)
    w = (j + 1.0) ** alpha - np.maximum(j - 1.0, 0.0) ** alpha
    w[0] = 0.0
    w.setflags(write=False)
    return w


@functools.lru_cache(maxsize=_WEIGHT_CACHE_SIZE)
def _d01_weights(alpha: float, n: int) -> np.ndarray:
    j = np.arange(n, dtype=np.float64)
    w = (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)
    w.setflags(write=False)
    return w


@functools.lru_cache(maxsize=_WEIGHT_CACHE_SIZE)
def _gl_weights(alpha: float, n: int) -> np.ndarray:
    # w_0 = 1, w_j = w_{j-1} * (1 - (alpha+1)/j).  For integer alpha the
    # factor hits zero at j = alpha+1 and the weights terminate exactly.
    w = np.empty(n, dtype=np.float64)
    w[0] = 1.0
    if n > 1:
        j = np.arange(1, n, dtype=np.float64)
        w[1:] = np.cumprod(1.0 - (alpha + 1.0) / j)
    w.setflags(write=False)
    return w


@functools.lru_cache(maxsize=_WEIGHT_CACHE_SIZE)
def weight_table(kind: str, order: float, n: int) -> WeightTable:
    """Fetch (building and caching on first use) the weight table of the
    given kind and order, long enough for an n-sample series.

    Repeated calls with the same arguments return the same table object;
    the weight array inside is read-only."""
    order = float(order)
    if n < 1:
        raise ValueError("table length must be at least 1")
    if kind == "integral":
        if order <= 0.0:
            raise ValueError("integral order must be positive")
        w = _integral_weights(order, n)
    elif kind == "derivative01":
        if not 0.0 <= order < 1.0:
            raise ValueError("derivative01 order must lie in [0, 1)")
        w = _d01_weights(order, n)
    elif kind == "binomial":
        if order < 1.0:
            raise ValueError("binomial order must be at least 1")
        w = _gl_weights(order, n)
    else:
        raise ValueError(f"unknown weight kind {kind!r}")
    return WeightTable(order=order, kind=kind, weights=w)


def _check_node(z: SampleSeries, i: int) -> int:
    i = int(i)
    if not 0 <= i < len(z):
        raise IndexError(f"node {i} outside series of length {len(z)}")
    return i


# The node kernels below are also the series kernels' inner loop, so a
# whole-series application and a node-by-node one agree bitwise, and the
# output at node i depends only on samples 0..i (causality holds exactly,
# not just to rounding).  Summation therefore runs per node over slices
# whose content is independent of the container length; a convolution
# would reassociate the sums differently for different lengths.


def _integral_pref(h: float, alpha: float) -> float:
    return h ** alpha / (2.0 * gammafn.gamma(1.0 + alpha))


def _d01_pref(h: float, alpha: float) -> float:
    return h ** (-alpha) / gammafn.gamma(2.0 - alpha)


def _integral_node(values: np.ndarray, alpha: float, i: int,
                   weights: np.ndarray, pref: float) -> float:
    if i == 0:
        return 0.0
    acc = values[0] * (float(i) ** alpha - float(i - 1) ** alpha) + values[i]
    if i > 1:
        acc += np.dot(values[i - 1:0:-1], weights[1:i])
    return float(pref * acc)


def _d01_node(values: np.ndarray, dz: np.ndarray, alpha: float, i: int,
              weights: np.ndarray, pref: float) -> float:
    if i == 0:
        if values[0] == 0.0:
            return 0.0
        raise SingularOriginError(
            "derivative at t = 0 of a series with nonzero first sample"
        )
    if alpha == 0.0:
        return float(values[i])
    acc = np.dot(dz[i:0:-1], weights[0:i])
    acc += (1.0 - alpha) * values[0] / float(i) ** alpha
    return float(pref * acc)


def _gl_node(values: np.ndarray, alpha: float, i: int,
             weights: np.ndarray, pref: float) -> float:
    if values[0] != 0.0:
        raise NonzeroOriginError(
            "binomial-weight derivative needs a series starting at zero"
        )
    return float(pref * np.dot(weights[0:i + 1], values[i::-1]))


def _sample_diffs(values: np.ndarray) -> np.ndarray:
    dz = np.empty_like(values)
    dz[0] = 0.0
    dz[1:] = np.diff(values)
    return dz


def frac_integral(z: SampleSeries, alpha: float, i: int) -> float:
    """Fractional integral of order alpha > 0 of z, evaluated at node i.

    Trapezoid-like product quadrature: the current and first samples get
    boundary weights, interior samples the weights (j+1)^a - (j-1)^a.
    Node 0 is the empty integral and returns 0.  Reduces to the composite
    trapezoid rule at alpha = 1.
    """
    alpha = float(alpha)
    if alpha <= 0.0:
        raise ValueError("integral order must be positive")
    i = _check_node(z, i)
    w = weight_table("integral", alpha, len(z)).weights
    return _integral_node(z.values, alpha, i, w, _integral_pref(z.h, alpha))


def frac_derivative01(z: SampleSeries, alpha: float, i: int) -> float:
    """Fractional derivative of order alpha in [0, 1) of z at node i.

    First-order difference quadrature with an explicit boundary term
    (1-alpha) z_0 / i**alpha, so a series with nonzero first sample is
    handled for i >= 1.  At i = 0 the boundary term diverges: the routine
    returns 0 when z_0 = 0 and raises SingularOriginError otherwise.
    alpha = 0 returns z_i exactly for i >= 1.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("derivative01 order must lie in [0, 1)")
    i = _check_node(z, i)
    if alpha == 0.0 and i > 0:
        return float(z.values[i])
    w = weight_table("derivative01", alpha, len(z)).weights
    return _d01_node(z.values, _sample_diffs(z.values), alpha, i, w,
                     _d01_pref(z.h, alpha))


def frac_derivative_general(z: SampleSeries, alpha: float, i: int) -> float:
    """Fractional derivative of order alpha >= 1 of z at node i, using the
    binomial weights of the backward-difference definition.

    Requires z_0 = 0 (raises NonzeroOriginError otherwise); under that
    condition the scheme agrees with the integral definition of the
    derivative, which is exactly the situation the solver produces for
    its internal series.  At alpha = 1 this is the plain backward
    difference.
    """
    alpha = float(alpha)
    if alpha < 1.0:
        raise ValueError("general derivative order must be at least 1")
    i = _check_node(z, i)
    w = weight_table("binomial", alpha, len(z)).weights
    return _gl_node(z.values, alpha, i, w, z.h ** (-alpha))


def _integral_series(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    n = values.size
    w = _integral_weights(alpha, n)
    pref = _integral_pref(h, alpha)
    out = np.empty(n, dtype=np.float64)
    out[0] = 0.0
    for i in range(1, n):
        out[i] = _integral_node(values, alpha, i, w, pref)
    return out


def _d01_series(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    n = values.size
    if alpha == 0.0:
        out = values.copy()
        if values[0] != 0.0:
            out[0] = np.nan
        return out
    w = _d01_weights(alpha, n)
    pref = _d01_pref(h, alpha)
    dz = _sample_diffs(values)
    out = np.empty(n, dtype=np.float64)
    # The derivative of a non-vanishing series is singular at t = 0;
    # report that sample as nan rather than inventing a number.
    out[0] = 0.0 if values[0] == 0.0 else np.nan
    for i in range(1, n):
        out[i] = _d01_node(values, dz, alpha, i, w, pref)
    return out


def _gl_series(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    if values[0] != 0.0:
        raise NonzeroOriginError(
            "binomial-weight derivative needs a series starting at zero"
        )
    n = values.size
    w = _gl_weights(alpha, n)
    pref = h ** (-alpha)
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = _gl_node(values, alpha, i, w, pref)
    return out


def apply_operator(z: SampleSeries, mu) -> SampleSeries:
    """Apply the operator of signed order mu to a whole series.

    mu < 0 integrates with order |mu|, mu = 0 returns the input
    unchanged, 0 < mu < 1 uses the difference quadrature, mu >= 1 the
    binomial weights (which require z_0 = 0).  The output is causal node
    by node.  For 0 < mu < 1 and z_0 != 0 the first output sample is nan,
    since the derivative is singular at t = 0; all later nodes are fine.
    """
    if not isinstance(mu, OperatorOrder):
        mu = OperatorOrder(float(mu))
    if mu.is_identity:
        return z
    m = mu.mu
    if m < 0.0:
        out = _integral_series(z.values, z.h, -m)
    elif m < 1.0:
        out = _d01_series(z.values, z.h, m)
    else:
        out = _gl_series(z.values, z.h, m)
    return SampleSeries(z.h, out)
