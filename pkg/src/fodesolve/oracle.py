"""Independent checks: closed forms, manufactured problems, and a direct
one-shot solver that never goes through the decomposition.

The direct solver discretizes every term of a linear zero-start problem
with binomial weights on the same grid and solves the resulting lower
triangular system node by node.  Because it shares no code path with the
decomposition stepper beyond the weight recurrences, agreement between
the two is a meaningful cross-check rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import gammafn
from .decompose import (
    PowerSumForcing,
    ProblemSpec,
    integer_order,
)
from .errors import SingularInversionError, UnsupportedProblemError
from .operators import SampleSeries, _gl_weights
from .stepper import Diagnostics, SolverConfig, Trajectory, solve

__all__ = [
    "power_rule",
    "ManufacturedCase",
    "manufacture",
    "gl_direct_solve",
    "ConvergenceRow",
    "convergence_study",
]


def power_rule(alpha: float, p: int, t: float, kind: str) -> float:
    """Closed form of the fractional integral or derivative of t^p.

        integral:    Gamma(p+1) / Gamma(p+1+alpha) * t^(p+alpha)
        derivative:  Gamma(p+1) / Gamma(p+1-alpha) * t^(p-alpha)

    For the derivative, Gamma(p+1-alpha) sits at a pole whenever
    p+1-alpha is a nonpositive integer and a ValueError propagates.
    t = 0 with a negative result exponent is singular and raises too.
    """
    alpha = float(alpha)
    p = int(p)
    t = float(t)
    if alpha <= 0.0:
        raise ValueError("order must be positive")
    if p < 0:
        raise ValueError("power must be a nonnegative integer")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if kind == "integral":
        expo = p + alpha
        coef = gammafn.gamma(p + 1.0) / gammafn.gamma(p + 1.0 + alpha)
    elif kind == "derivative":
        expo = p - alpha
        coef = gammafn.gamma(p + 1.0) / gammafn.gamma(p + 1.0 - alpha)
    else:
        raise ValueError(f"kind must be 'integral' or 'derivative', got {kind!r}")
    if t == 0.0:
        if expo < 0.0:
            raise ValueError("singular at t = 0 for a negative exponent")
        return coef if expo == 0.0 else 0.0
    return coef * t ** expo


@dataclass(frozen=True)
class ManufacturedCase:
    """A problem rigged so the exact solution is y(t) = t^power."""

    problem: ProblemSpec
    power: int

    def exact(self, t):
        return np.asarray(t, dtype=np.float64) ** self.power

    def exact_series(self, h: float, n: int) -> SampleSeries:
        return SampleSeries(h, (np.arange(n) * h) ** self.power)


def manufacture(base: ProblemSpec, p: int) -> ManufacturedCase:
    """Forge the forcing that makes y(t) = t^p solve the given terms and
    nonlinearity:

        f(t) = sum_i a_i Gamma(p+1)/Gamma(p+1-alpha_i) t^(p-alpha_i)
               + g(t^p),

    kept in exact power-sum form so any grid samples it without error.
    Requires p >= m1 so all initial conditions are zero (they are
    replaced with zeros in the returned problem).
    """
    p = int(p)
    m1 = integer_order(base.terms[0].order)
    if p < m1:
        raise ValueError(
            f"power {p} is below the leading integer order {m1};"
            " the manufactured start values would not vanish"
        )
    terms = []
    gp1 = gammafn.gamma(p + 1.0)
    for tm in base.terms:
        coef = tm.coefficient * gp1 / gammafn.gamma(p + 1.0 - tm.order)
        terms.append((coef, p - tm.order))
    for c, q in base.nonlinearity.monomials():
        terms.append((c, float(p * q)))
    forcing = PowerSumForcing(tuple(terms))
    problem = replace(
        base, forcing=forcing, initial_conditions=(0.0,) * m1
    )
    return ManufacturedCase(problem=problem, power=p)


def gl_direct_solve(problem: ProblemSpec, config: SolverConfig) -> Trajectory:
    """Solve a linear zero-start problem by direct binomial-weight
    discretization of every term.

    Only problems with all initial conditions zero and nonlinearity of
    the exact form g(y) = c*y are supported (UnsupportedProblemError
    otherwise).  Node i >= 1 satisfies

        y_i (sum_k a_k h^(-alpha_k) + c)
            = f(t_i) - sum_k a_k h^(-alpha_k) sum_{j=1..i} w_j^(k) y_{i-j}

    and y_0 = 0 from the start values.  A vanishing pivot on the left
    raises SingularInversionError.
    """
    if any(v != 0.0 for v in problem.initial_conditions):
        raise UnsupportedProblemError(
            "direct discretization requires zero initial conditions"
        )
    coeffs = problem.nonlinearity.coefficients
    if any(c != 0.0 for k, c in enumerate(coeffs) if k != 1):
        raise UnsupportedProblemError(
            "direct discretization requires nonlinearity g(y) = c*y"
        )
    c_lin = coeffs[1] if len(coeffs) > 1 else 0.0

    h = config.h
    n = config.num_steps + 1
    fvec = np.asarray(problem.forcing.sample(h, n), dtype=np.float64)
    scales = [h ** (-tm.order) * tm.coefficient for tm in problem.terms]
    tables = [_gl_weights(tm.order, n) for tm in problem.terms]
    pivot = sum(scales) + c_lin
    if abs(pivot) < 1e-14 * (sum(abs(s) for s in scales) + abs(c_lin)):
        raise SingularInversionError(
            "direct discretization pivot vanished for this step"
        )

    y = np.zeros(n, dtype=np.float64)
    nan_node = None
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n):
            acc = fvec[i]
            for s, w in zip(scales, tables):
                acc -= s * np.dot(w[1:i + 1], y[:i][::-1])
            y[i] = acc / pivot
            if not np.isfinite(y[i]):
                nan_node = i
                break
    if nan_node is not None:
        y = y[:nan_node]
    return Trajectory(
        h=h,
        num_steps=len(y) - 1,
        y=SampleSeries(h, y),
        z1=None,
        y_derivs=None,
        diagnostics=Diagnostics(nan_node=nan_node),
    )


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    sup_error: float
    observed_order: float | None


def _common_stride(h: float, h_ref: float) -> int:
    ratio = h / h_ref
    stride = round(ratio)
    if stride < 1 or abs(ratio - stride) > 1e-6 * stride:
        raise ValueError(
            f"step {h:g} does not nest with the reference step {h_ref:g}"
        )
    return int(stride)


def convergence_study(problem: ProblemSpec, steps, t_end: float,
                      oracle: str = "self", inversion=None) -> list:
    """Refinement study: solve at every step and measure each run against
    a reference on their common nodes.

    oracle = "gl" compares against the direct binomial-weight solver run
    at the finest step (linear zero-start problems only); oracle = "self"
    uses the decomposition solve at the finest step as reference, in
    which case the finest step itself gets no row.  Rows come out coarse
    to fine; each row after the first carries the observed order
    log(e_prev/e_this) / log(h_prev/h_this).  Any run that dies with a
    non-finite node raises ArithmeticError.
    """
    steps = sorted({float(s) for s in steps}, reverse=True)
    if len(steps) < 2:
        raise ValueError("need at least two distinct steps")
    if oracle not in ("self", "gl"):
        raise ValueError(f"oracle must be 'self' or 'gl', got {oracle!r}")
    h_ref = steps[-1]

    def _run(h):
        if inversion is not None:
            cfg = SolverConfig(h=h, t_end=t_end, inversion=inversion)
        else:
            cfg = SolverConfig(h=h, t_end=t_end)
        traj = solve(problem, cfg)
        if traj.diagnostics.nan_node is not None:
            raise ArithmeticError(
                f"run at step {h:g} stopped at node"
                f" {traj.diagnostics.nan_node}"
            )
        return traj

    if oracle == "gl":
        ref_cfg = SolverConfig(h=h_ref, t_end=t_end)
        ref = gl_direct_solve(problem, ref_cfg)
        if ref.diagnostics.nan_node is not None:
            raise ArithmeticError("reference run stopped on a non-finite node")
        measured_steps = steps
    else:
        ref = _run(h_ref)
        measured_steps = steps[:-1]

    ref_values = ref.y.values
    rows = []
    prev = None
    for h in measured_steps:
        traj = _run(h)
        stride = _common_stride(h, h_ref)
        vals = traj.y.values
        k = (len(vals) - 1) * stride
        common_ref = ref_values[:k + 1:stride]
        err = float(np.max(np.abs(vals[: len(common_ref)] - common_ref)))
        order = None
        if prev is not None:
            ph, perr = prev
            if err > 0.0 and perr > 0.0:
                order = math.log(perr / err) / math.log(ph / h)
        rows.append(ConvergenceRow(h=h, sup_error=err, observed_order=order))
        prev = (h, err)
    return rows
