"""
Rigid plate in a Newtonian fluid, solved two independent ways
=============================================================

The benchmark problem

    y'' + 0.5 D^1.5 y + 0.5 y = f(t),   f = 8 on [0, 1), 0 after,
    y(0) = y'(0) = 0

is solved by the decomposition stepper and, independently, by a
whole-history scheme that discretises every fractional term directly.
The two solutions agree on the full horizon and the gap shrinks with
the step.
"""

import numpy as np

from fodesolve import SolverConfig, gl_direct_solve, solve
from fodesolve.problemfile import parse_problem

problem = parse_problem(open("problems/bagley_torvik.fode").read())

# cross-solver reference on a fine grid
ref = gl_direct_solve(problem, SolverConfig(h=1e-3, t_end=30.0)).y.values

print(f"{'h':>6}  {'sup |decomposition - reference|':>32}")
for h in (0.04, 0.02, 0.01):
    traj = solve(problem, SolverConfig(h=h, t_end=30.0))
    stride = round(h / 1e-3)
    gap = np.max(np.abs(traj.y.values - ref[::stride][: len(traj.y.values)]))
    print(f"{h:>6.2f}  {gap:>32.5f}")

# a few solution values along the way, h = 0.01
traj = solve(problem, SolverConfig(h=0.01, t_end=30.0))
print("\n   t      y(t)")
for t_mark in (1.0, 2.0, 5.0, 10.0, 20.0, 30.0):
    i = round(t_mark / 0.01)
    print(f"{t_mark:>5.1f}  {traj.y.values[i]:>9.5f}")
