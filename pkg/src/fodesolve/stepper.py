"""Time stepper for the decomposed system.

One explicit Euler pass advances the state vector u = (s, s', ...,
s^(m1-1)) where s is the temporary series z1 (or the combined series w
when leading terms fold together).  The update is sequential from the
top: the highest component absorbs the right-hand side first and each
lower component then integrates the component above it in its already
updated form.  That ordering costs nothing extra and keeps the cubic
benchmark stable on coarse grids where the fully explicit ordering
blows up.

Every fractional coupling is evaluated by causal quadrature over the
nodes computed so far, which is what makes the whole solve O(N^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import gammafn
from .decompose import (
    Babenko,
    DirectVolterra,
    ProblemSpec,
    SubclassKind,
    build_system,
    _volterra_pivot,
)
from .errors import BabenkoTailWarning, SingularInversionError
from .operators import (
    SampleSeries,
    apply_operator,
    frac_derivative01,
    _d01_weights,
    _gl_weights,
    _integral_weights,
)

__all__ = [
    "SolverConfig",
    "Diagnostics",
    "Trajectory",
    "solve",
    "reconstruct_y",
    "reconstruct_derivatives",
]


def _num_steps(h: float, t_end: float) -> int:
    n = math.floor(t_end / h + 1e-9)
    while n * h > t_end * (1.0 + 1e-12):
        n -= 1
    if n < 2:
        raise ValueError(
            f"step {h:g} leaves fewer than two steps before t = {t_end:g}"
        )
    return n


@dataclass(frozen=True)
class SolverConfig:
    """Grid and inversion choices for one run.

    The grid is t_i = i*h for i = 0..N with N = floor(t_end/h), so the
    last node never passes t_end.  output_derivatives additionally
    reconstructs y', ..., y^(m1-1) from the computed series.
    """

    h: float
    t_end: float
    inversion: object = DirectVolterra()
    output_derivatives: bool = False

    def __post_init__(self):
        h = float(self.h)
        t_end = float(self.t_end)
        if not math.isfinite(h) or h <= 0.0:
            raise ValueError("step must be positive and finite")
        if not math.isfinite(t_end) or t_end <= 0.0:
            raise ValueError("t_end must be positive and finite")
        _num_steps(h, t_end)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "t_end", t_end)

    @property
    def num_steps(self) -> int:
        return _num_steps(self.h, self.t_end)


@dataclass(frozen=True)
class Diagnostics:
    """babenko_tail: largest sup of the truncated inversion's last term
    seen during the run (None when the direct inverter ran).  nan_node:
    index of the first node whose value came out non-finite (None for a
    clean run); the trajectory is cut just before that node."""

    babenko_tail: float | None = None
    nan_node: int | None = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    h: float
    num_steps: int
    y: SampleSeries
    z1: SampleSeries | None
    y_derivs: tuple | None
    diagnostics: Diagnostics

    @property
    def times(self) -> np.ndarray:
        return self.y.times


def _ic_poly_values(ics, t: np.ndarray) -> np.ndarray:
    """sum_k b_k t^k / k! evaluated on an array of times."""
    out = np.zeros_like(t)
    if not ics:
        return out
    fact = 1.0
    for k, b in enumerate(ics):
        if k > 0:
            fact *= k
        out += (b / fact) * t ** k
    return out


def reconstruct_y(z1: SampleSeries, ics, nu: float, i: int) -> float:
    """Recover the unknown at node i from the temporary series:
    y_i = sum_k b_k t_i^k / k!  +  D^nu z1 at node i (identity at nu = 0).
    """
    t = np.array([i * z1.h])
    poly = float(_ic_poly_values(tuple(float(b) for b in ics), t)[0])
    return poly + frac_derivative01(z1, nu, i)


def reconstruct_derivatives(z1: SampleSeries, ics, alpha1: float,
                            m1: int) -> tuple:
    """Derivative rows y^(k) for k = 1..m1-1 from the temporary series,
    obtained by differentiating the reconstruction k times:

        y^(k)_i = sum_{j=k..m1-1} b_j t_i^(j-k) / (j-k)!  +  D^(nu+k) z1,

    with nu = m1 - alpha1, so that row k starts exactly at b_k.  The
    fractional part always has order >= 1 here and z1 starts at zero,
    so the binomial-weight scheme applies.  Returns an empty tuple when
    m1 <= 1.
    """
    m1 = int(m1)
    nu = float(m1) - float(alpha1)
    ics = tuple(float(b) for b in ics)
    if len(ics) != m1:
        raise ValueError(f"need {m1} initial values, got {len(ics)}")
    out = []
    t = z1.times
    for k in range(1, m1):
        poly = np.zeros_like(t)
        for j in range(k, m1):
            poly += (ics[j] / math.factorial(j - k)) * t ** (j - k)
        frac = apply_operator(z1, nu + k)
        out.append(SampleSeries(z1.h, poly + frac.values))
    return tuple(out)


class _LinkEval:
    """Per-node evaluation of coefficient * D^order applied to z1, fed
    incrementally as z1 grows."""

    def __init__(self, coefficient, order, h, n):
        self.c = float(coefficient)
        self.mu = float(order)
        self.h = float(h)
        if self.mu == 0.0:
            self.kind = "identity"
        elif self.mu < 1.0:
            self.kind = "d01"
            self.w = _d01_weights(self.mu, n)
            self.pref = h ** (-self.mu) / gammafn.gamma(2.0 - self.mu)
        else:
            self.kind = "gl"
            self.w = _gl_weights(self.mu, n)

    def at(self, z1: np.ndarray, dz: np.ndarray, i: int) -> float:
        # z1[0] = 0 by construction, so the d01 boundary term drops out.
        if self.kind == "identity":
            return self.c * z1[i]
        if self.kind == "d01":
            if i == 0:
                return 0.0
            return self.c * self.pref * np.dot(dz[i:0:-1], self.w[:i])
        return self.c * self.h ** (-self.mu) * np.dot(
            self.w[: i + 1], z1[i::-1]
        )


def solve(problem: ProblemSpec, config: SolverConfig) -> Trajectory:
    """Integrate the problem over [0, t_end] and return the trajectory.

    Initial conditions enter through the polynomial part of the
    reconstruction, which makes every fractional term act on the
    solution minus that polynomial (for the leading term this is the
    regularised derivative commonly used for initial value problems).
    The nonlinearity, by contrast, sees the full reconstructed
    solution, so a plain linear reaction term belongs there.

    A non-finite value at some node stops the run: the returned series
    are cut to the nodes before it and diagnostics.nan_node records its
    index.  Inversion trouble (a vanished pivot) raises instead, since
    no node can be produced at all.
    """
    system = build_system(problem, config.inversion)
    h = config.h
    big_n = config.num_steps
    n = big_n + 1
    m1 = system.m1
    nu = system.nu
    dependent = system.classification.kind is SubclassKind.DEPENDENT

    t = np.arange(n) * h
    fvec = np.asarray(problem.forcing.sample(h, n), dtype=np.float64)
    ic_poly = _ic_poly_values(system.initial_conditions, t)
    monomials = problem.nonlinearity.monomials()

    links = [
        _LinkEval(l.coefficient, l.order, h, n) for l in system.rhs_links
    ]
    nu_eval = _LinkEval(1.0, nu, h, n) if nu > 0.0 else None

    use_babenko = isinstance(system.inversion, Babenko)
    if dependent and use_babenko:
        link = system.w_links[0]
        kcount = system.inversion.terms
        bab_tables = [
            (
                (-link.ratio) ** k,
                h ** (k * link.order)
                / (2.0 * gammafn.gamma(1.0 + k * link.order)),
                k * link.order,
                _integral_weights(k * link.order, n),
            )
            for k in range(1, kcount + 1)
        ]
    elif dependent:
        pivot = _volterra_pivot(h, system.w_links)
        scale = 1.0 + sum(
            abs(l.ratio * h ** l.order / (2.0 * gammafn.gamma(1.0 + l.order)))
            for l in system.w_links
        )
        if abs(pivot) < 1e-14 * scale:
            raise SingularInversionError(
                "inversion pivot vanished for this step and coupling"
            )
        w_tables = [
            (
                l.ratio * h ** l.order / (2.0 * gammafn.gamma(1.0 + l.order)),
                _integral_weights(l.order, n),
            )
            for l in system.w_links
        ]

    z1 = np.zeros(n, dtype=np.float64)
    dz = np.zeros(n, dtype=np.float64)
    wser = np.zeros(n, dtype=np.float64) if dependent else None
    y = np.zeros(n, dtype=np.float64)
    u = np.zeros(m1, dtype=np.float64)
    a1 = system.a1
    nan_node = None
    bab_tail = 0.0

    def _invert_direct(i):
        # z1[0] = 0, so the quadrature's first-sample boundary term is
        # absent and only the interior history contributes.
        acc = 0.0
        for pref, weights in w_tables:
            if i > 1:
                acc += pref * np.dot(z1[i - 1:0:-1], weights[1:i])
        return (wser[i] - acc) / pivot

    def _invert_babenko(i):
        nonlocal bab_tail
        val = wser[i]
        term = 0.0
        for sgn, pref, order, weights in bab_tables:
            s = wser[i] + wser[0] * (
                float(i) ** order - float(i - 1) ** order
            ) if i > 0 else 0.0
            if i > 1:
                s += np.dot(wser[i - 1:0:-1], weights[1:i])
            term = sgn * pref * s
            val += term
        if abs(term) > bab_tail:
            bab_tail = abs(term)
        return val

    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n):
            if dependent:
                wser[i] = u[0]
                z1[i] = _invert_babenko(i) if use_babenko else (
                    _invert_direct(i) if i > 0 else 0.0
                )
            else:
                z1[i] = u[0]
            dz[i] = z1[i] - z1[i - 1] if i > 0 else z1[0]
            dnu = z1[i] if nu_eval is None else nu_eval.at(z1, dz, i)
            yi = ic_poly[i] + dnu
            y[i] = yi
            if not (np.isfinite(yi) and np.isfinite(z1[i])):
                nan_node = i
                break
            acc = fvec[i]
            for link in links:
                acc -= link.at(z1, dz, i)
            for c, p in monomials:
                acc -= c * yi ** p
            rhs = acc / a1
            u[m1 - 1] += h * rhs
            for k in range(m1 - 2, -1, -1):
                u[k] += h * u[k + 1]

    if nan_node is not None:
        cut = nan_node
        y = y[:cut]
        z1 = z1[:cut]
        warnings.warn(
            f"run stopped at node {nan_node} (t = {nan_node * h:g}):"
            " non-finite value",
            RuntimeWarning,
            stacklevel=2,
        )

    y_series = SampleSeries(h, y)
    z1_series = SampleSeries(h, z1)
    derivs = None
    if config.output_derivatives and m1 > 1:
        derivs = reconstruct_derivatives(
            z1_series, system.initial_conditions, problem.leading_order, m1
        )
    tail = None
    if use_babenko and dependent:
        tail = bab_tail
        if tail > system.inversion.tail_tol:
            warnings.warn(
                f"truncated inversion's last term reached sup norm"
                f" {tail:.3g} during the run",
                BabenkoTailWarning,
                stacklevel=2,
            )
    return Trajectory(
        h=h,
        num_steps=len(y) - 1,
        y=y_series,
        z1=z1_series,
        y_derivs=derivs,
        diagnostics=Diagnostics(babenko_tail=tail, nan_node=nan_node),
    )
