"""Problem description and its reduction to one integer-order equation.

A problem is a sum of fractional derivative terms plus a polynomial
nonlinearity, driven by piecewise-polynomial forcing:

    sum_i  a_i D^(alpha_i) y  +  g(y)  =  f(t),   orders strictly decreasing.

The reduction rewrites the leading term through a temporary series
z1 = I^(m1 - alpha1)[y - ic polynomial], where m1 is the smallest integer
not below alpha1.  z1 and its first m1 - 1 derivatives start at zero, the
original unknown is recovered as y = ic polynomial + D^(nu) z1 with
nu = m1 - alpha1, and every remaining term becomes a derivative of z1 of
order nu + alpha_i, which is always below m1.  What is left is a single
m1-th order equation for z1 driven by those lower-order couplings.

When several leading terms share the integer order m1 they are folded
into one combined series w = z1 + sum_j (a_j/a1) I^(alpha1-alpha_j) z1,
and the ODE advances w instead.  Each step then has to recover z1 from w
by inverting that Abel-type relation; two inverters are provided, a
truncated binomial-series expansion and a direct node-by-node solve of
the discrete system (the default, exact at the quadrature level).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import gammafn
from .errors import (
    BabenkoTailWarning,
    SingularInversionError,
    UnsupportedProblemError,
)
from .operators import (
    DEFAULT_ORDER_CAP,
    OperatorOrder,
    SampleSeries,
    _integral_series,
    _integral_weights,
)

__all__ = [
    "FracTerm",
    "Polynomial",
    "ForcingSegment",
    "PiecewiseForcing",
    "PowerSumForcing",
    "ProblemSpec",
    "SubclassKind",
    "Classification",
    "RhsLink",
    "WLink",
    "Babenko",
    "DirectVolterra",
    "DecomposedSystem",
    "integer_order",
    "classify",
    "build_system",
    "BabenkoResult",
    "babenko_invert",
    "volterra_direct_invert",
]


def integer_order(alpha: float) -> int:
    """Smallest integer m with m >= alpha (an integer order is its own m)."""
    return int(math.ceil(alpha))


@dataclass(frozen=True)
class FracTerm:
    """One term a * D^order applied to the unknown."""

    coefficient: float
    order: float

    def __post_init__(self):
        c = float(self.coefficient)
        a = float(self.order)
        if not math.isfinite(c):
            raise ValueError("term coefficient must be finite")
        if not math.isfinite(a) or a < 0.0:
            raise ValueError("term order must be finite and nonnegative")
        if a >= DEFAULT_ORDER_CAP:
            raise ValueError(
                f"term order {a!r} exceeds the supported cap {DEFAULT_ORDER_CAP}"
            )
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "order", a)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients indexed by power: p(y) = sum c_k y^k."""

    coefficients: tuple = ()

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if any(not math.isfinite(c) for c in coeffs):
            raise ValueError("polynomial coefficients must be finite")
        # Trailing zero coefficients carry no information; strip them so
        # equal polynomials compare equal.
        while coeffs and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coefficients)

    def monomials(self):
        """Nonzero (coefficient, power) pairs, ascending in power."""
        return tuple(
            (c, p) for p, c in enumerate(self.coefficients) if c != 0.0
        )

    def __call__(self, y):
        if not self.coefficients:
            return 0.0 * y
        return npoly.polyval(y, self.coefficients)


@dataclass(frozen=True)
class ForcingSegment:
    """Polynomial forcing on the half-open window [t_from, t_to)."""

    t_from: float
    t_to: float
    coefficients: tuple

    def __post_init__(self):
        t0 = float(self.t_from)
        t1 = float(self.t_to)
        coeffs = tuple(float(c) for c in self.coefficients)
        if not math.isfinite(t0) or t0 < 0.0:
            raise ValueError("segment start must be finite and nonnegative")
        if math.isnan(t1) or t1 <= t0:
            raise ValueError("segment end must exceed its start")
        if not coeffs or any(not math.isfinite(c) for c in coeffs):
            raise ValueError("segment needs at least one finite coefficient")
        object.__setattr__(self, "t_from", t0)
        object.__setattr__(self, "t_to", t1)
        object.__setattr__(self, "coefficients", coeffs)


# Nodes this close to a segment boundary (relative to the step) are taken
# to sit on the boundary, so grids whose node times carry float rounding
# still pick the intended segment.
_BOUNDARY_SLACK = 1e-9


@dataclass(frozen=True)
class PiecewiseForcing:
    """Forcing assembled from contiguous polynomial segments starting at 0.

    Each node t is evaluated on the segment with t_from <= t < t_to; a
    node exactly on a boundary belongs to the segment that starts there.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("forcing needs at least one segment")
        if segs[0].t_from != 0.0:
            raise ValueError("forcing must start at t = 0")
        for a, b in zip(segs, segs[1:]):
            if b.t_from != a.t_to:
                raise ValueError(
                    "forcing segments must be contiguous and ordered"
                )
        object.__setattr__(self, "segments", segs)

    @classmethod
    def zero(cls) -> "PiecewiseForcing":
        return cls((ForcingSegment(0.0, math.inf, (0.0,)),))

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_to

    def sample(self, h: float, n: int) -> np.ndarray:
        """Evaluate at t_i = i*h for i = 0..n-1."""
        t = np.arange(n) * float(h)
        end = self.t_end
        if not math.isinf(end) and t[-1] > end + _BOUNDARY_SLACK * h:
            raise ValueError(
                f"grid extends to t = {t[-1]:g} beyond the forcing coverage"
                f" ending at {end:g}"
            )
        froms = np.array([s.t_from for s in self.segments])
        idx = np.searchsorted(froms, t + _BOUNDARY_SLACK * h, side="right") - 1
        out = np.empty(n, dtype=np.float64)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            if mask.any():
                out[mask] = npoly.polyval(t[mask], seg.coefficients)
        return out

    def __call__(self, t: float) -> float:
        t = float(t)
        for seg in self.segments:
            if seg.t_from <= t < seg.t_to:
                return float(npoly.polyval(t, seg.coefficients))
        raise ValueError(f"t = {t:g} is outside the forcing coverage")


@dataclass(frozen=True)
class PowerSumForcing:
    """Forcing of the form sum_k c_k t^(e_k) with real exponents e_k >= 0.

    Fractional powers of t fall outside polynomial segments, so forcing
    synthesized for manufactured solutions is carried in this exact
    closed form and evaluated directly at whatever grid is requested.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(c), float(e)) for c, e in self.terms)
        for c, e in terms:
            if not math.isfinite(c) or not math.isfinite(e) or e < 0.0:
                raise ValueError("power-sum terms need finite c and e >= 0")
        object.__setattr__(self, "terms", terms)

    def sample(self, h: float, n: int) -> np.ndarray:
        t = np.arange(n) * float(h)
        out = np.zeros(n, dtype=np.float64)
        for c, e in self.terms:
            out += c * t ** e if e != 0.0 else c
        return out

    def __call__(self, t: float) -> float:
        t = float(t)
        return float(
            sum(c * t ** e if e != 0.0 else c for c, e in self.terms)
        )


@dataclass(frozen=True)
class ProblemSpec:
    """Full initial-value problem statement.

    The lower terminal of every fractional operator is t = 0.  The
    initial conditions are the integer derivatives y^(k)(0) for
    k = 0..m1-1 where m1 is the integer order of the leading term.
    """

    terms: tuple
    nonlinearity: Polynomial = Polynomial()
    forcing: object = field(default_factory=PiecewiseForcing.zero)
    initial_conditions: tuple = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("problem needs at least one term")
        if any(not isinstance(tm, FracTerm) for tm in terms):
            terms = tuple(
                tm if isinstance(tm, FracTerm) else FracTerm(*tm)
                for tm in terms
            )
        orders = [tm.order for tm in terms]
        if any(b >= a for a, b in zip(orders, orders[1:])):
            raise ValueError("orders must be strictly decreasing")
        if terms[0].coefficient == 0.0:
            raise ValueError("leading coefficient must be nonzero")
        ics = tuple(float(v) for v in self.initial_conditions)
        if any(not math.isfinite(v) for v in ics):
            raise ValueError("initial conditions must be finite")
        m1 = integer_order(terms[0].order)
        if len(ics) != m1:
            raise ValueError(
                f"need exactly {m1} initial conditions for leading order"
                f" {terms[0].order:g}, got {len(ics)}"
            )
        if not hasattr(self.forcing, "sample"):
            raise ValueError("forcing must provide sample(h, n)")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "initial_conditions", ics)

    @property
    def leading_order(self) -> float:
        return self.terms[0].order


class SubclassKind(enum.Enum):
    ONE_TERM = "one-term"
    DEPENDENT = "dependent"
    INDEPENDENT = "independent"


@dataclass(frozen=True)
class Classification:
    """Shape of the problem: one kind tag, the integer order m_i of every
    term, and the count r of leading terms sharing m1 (1 unless
    dependent)."""

    kind: SubclassKind
    integer_orders: tuple
    r: int


def classify(problem: ProblemSpec) -> Classification:
    """Classify a problem by how its terms share integer orders.

    A single term is one-term.  With several terms, the leading run of
    terms whose integer order equals m1 decides: a run of r >= 2 makes
    the problem dependent (those terms fold into one combined series),
    otherwise the terms are independent and couple only through the
    right-hand side.
    """
    ms = tuple(integer_order(tm.order) for tm in problem.terms)
    if len(ms) == 1:
        return Classification(SubclassKind.ONE_TERM, ms, 1)
    r = 1
    while r < len(ms) and ms[r] == ms[0]:
        r += 1
    if r >= 2:
        return Classification(SubclassKind.DEPENDENT, ms, r)
    return Classification(SubclassKind.INDEPENDENT, ms, 1)


@dataclass(frozen=True)
class RhsLink:
    """Right-hand-side coupling a * D^order applied to z1."""

    coefficient: float
    order: float


@dataclass(frozen=True)
class WLink:
    """One folded term of the combined series: ratio * I^order applied
    to z1 (order = alpha1 - alpha_j > 0)."""

    ratio: float
    order: float


@dataclass(frozen=True)
class Babenko:
    """Series inversion truncated after `terms` powers.  The sup norm of
    the last retained term is reported; above tail_tol a warning is
    raised because the truncation is then meaningful."""

    terms: int = 30
    tail_tol: float = 1e-8

    def __post_init__(self):
        if int(self.terms) < 1:
            raise ValueError("series inversion needs at least one term")
        object.__setattr__(self, "terms", int(self.terms))
        object.__setattr__(self, "tail_tol", float(self.tail_tol))


@dataclass(frozen=True)
class DirectVolterra:
    """Node-by-node direct inversion of the discrete relation (exact at
    the quadrature level)."""


@dataclass(frozen=True)
class DecomposedSystem:
    """Everything the stepper needs: the integer order m1 and leading
    coefficient a1 of the evolved equation, the couplings back onto z1,
    the reconstruction order nu, and the inversion strategy."""

    m1: int
    a1: float
    classification: Classification
    nu: float
    rhs_links: tuple
    w_links: tuple
    initial_conditions: tuple
    inversion: object


def build_system(problem: ProblemSpec, inversion=None) -> DecomposedSystem:
    """Reduce a problem to its integer-order form.

    Raises UnsupportedProblemError for shapes the reduction cannot
    express: a term of order zero (the plain-y contribution belongs in
    the nonlinearity, where it sees the full reconstructed solution),
    or a series inversion request with more than one folded term (the
    expansion implemented covers exactly two shared leading orders; the
    direct inverter has no such limit).
    """
    if inversion is None:
        inversion = DirectVolterra()
    if problem.terms[-1].order == 0.0:
        raise UnsupportedProblemError(
            "a term of order zero is outside the reduction; put the"
            " plain-y contribution in the nonlinearity instead"
        )
    cls = classify(problem)
    m1 = cls.integer_orders[0]
    lead = problem.terms[0]
    nu = float(m1) - lead.order
    w_links = ()
    tail_terms = problem.terms[1:]
    if cls.kind is SubclassKind.DEPENDENT:
        absorbed = problem.terms[1:cls.r]
        tail_terms = problem.terms[cls.r:]
        w_links = tuple(
            WLink(tm.coefficient / lead.coefficient, lead.order - tm.order)
            for tm in absorbed
        )
    rhs_links = tuple(
        RhsLink(tm.coefficient, nu + tm.order) for tm in tail_terms
    )
    # All coupling orders must stay below the evolved order m1; the
    # strictly decreasing term orders guarantee it, so a violation here
    # means the inputs were corrupted.
    for link in rhs_links:
        OperatorOrder(link.order)
        if link.order >= m1:
            raise UnsupportedProblemError(
                "coupling order reached the evolved order"
            )
    if isinstance(inversion, Babenko) and len(w_links) > 1:
        raise UnsupportedProblemError(
            "series inversion handles exactly two shared leading orders;"
            " use the direct inverter for more"
        )
    return DecomposedSystem(
        m1=m1,
        a1=lead.coefficient,
        classification=cls,
        nu=nu,
        rhs_links=rhs_links,
        w_links=w_links,
        initial_conditions=problem.initial_conditions,
        inversion=inversion,
    )


@dataclass(frozen=True, eq=False)
class BabenkoResult:
    """Series inversion output plus the sup norm of the last term kept."""

    series: SampleSeries
    tail_norm: float


def babenko_invert(w: SampleSeries, ratio: float, delta: float,
                   terms: int = 30, tail_tol: float = 1e-8) -> BabenkoResult:
    """Recover z1 from w = (1 + ratio * I^delta) z1 by the operator
    binomial series

        z1 = sum_{k=0..terms} (-ratio)^k I^(k*delta) w,

    each power applied as a single integral of order k*delta.  The series
    converges like (|ratio| t^delta)^k / Gamma(k delta + 1), so for a
    fixed truncation it is only trustworthy while |ratio| t^delta stays
    moderate; the sup norm of the k = terms term is returned as the
    truncation diagnostic and additionally raises BabenkoTailWarning when
    it exceeds tail_tol.
    """
    ratio = float(ratio)
    delta = float(delta)
    terms = int(terms)
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if terms < 1:
        raise ValueError("need at least one series term")
    if ratio == 0.0:
        return BabenkoResult(w, 0.0)
    acc = w.values.copy()
    sign_pow = 1.0
    tail = None
    for k in range(1, terms + 1):
        sign_pow *= -ratio
        tail = sign_pow * _integral_series(w.values, w.h, k * delta)
        acc += tail
    tail_norm = float(np.max(np.abs(tail)))
    if tail_norm > tail_tol:
        warnings.warn(
            f"series inversion truncated while its last term still has"
            f" sup norm {tail_norm:.3g}; the result is unreliable on this"
            f" horizon",
            BabenkoTailWarning,
            stacklevel=2,
        )
    return BabenkoResult(SampleSeries(w.h, acc), tail_norm)


def _volterra_pivot(h: float, w_links) -> float:
    pivot = 1.0
    for link in w_links:
        pivot += (
            link.ratio * h ** link.order
            / (2.0 * gammafn.gamma(1.0 + link.order))
        )
    return pivot


def _volterra_history(z1_values: np.ndarray, h: float, i: int,
                      w_links, tables) -> float:
    # Contribution of nodes 0..i-1 to sum_j ratio_j I^(delta_j) z1 at
    # node i, leaving out the current-node sample.
    acc = 0.0
    for link, weights in zip(w_links, tables):
        pref = (
            link.ratio * h ** link.order
            / (2.0 * gammafn.gamma(1.0 + link.order))
        )
        s = z1_values[0] * (
            float(i) ** link.order - float(i - 1) ** link.order
        )
        if i > 1:
            s += np.dot(z1_values[i - 1:0:-1], weights[1:i])
        acc += pref * s
    return acc


def volterra_direct_invert(w: SampleSeries, w_links, i: int,
                           z1_history: SampleSeries) -> float:
    """Recover z1 at node i from w = z1 + sum_j ratio_j I^(delta_j) z1,
    given z1 at nodes 0..i-1.

    The quadrature puts weight h^delta / (2 Gamma(1+delta)) on the
    current node, so the relation is a triangular system whose pivot is
    1 + sum_j ratio_j h^(delta_j) / (2 Gamma(1+delta_j)); the node value
    follows by one division.  Node 0 is 0 by construction.  A vanishing
    pivot raises SingularInversionError.
    """
    i = int(i)
    if i < 0 or i >= len(w):
        raise IndexError(f"node {i} outside series of length {len(w)}")
    if i == 0:
        return 0.0
    if len(z1_history) < i:
        raise ValueError("z1 history must cover nodes 0..i-1")
    if z1_history.h != w.h:
        raise ValueError("series must share the same step")
    h = w.h
    links = tuple(w_links)
    pivot = _volterra_pivot(h, links)
    scale = 1.0 + sum(
        abs(l.ratio * h ** l.order / (2.0 * gammafn.gamma(1.0 + l.order)))
        for l in links
    )
    if abs(pivot) < 1e-14 * scale:
        raise SingularInversionError(
            "inversion pivot vanished for this step and coupling"
        )
    tables = [
        _integral_weights(l.order, max(len(w), i + 1)) for l in links
    ]
    hist = _volterra_history(z1_history.values, h, i, links, tables)
    return float((w.values[i] - hist) / pivot)
