"""
Cubic damping and the influence of the step
===========================================

Replacing the linear restoring term of the plate benchmark with
0.5 y^3 makes the discrete solution visibly step-dependent: coarse
grids distort the oscillation even though every run stays finite.
Successive step halvings show the runs settling toward a limit.
"""

import numpy as np

from fodesolve import SolverConfig, solve
from fodesolve.problemfile import parse_problem

problem = parse_problem(open("problems/bagley_torvik_cubic.fode").read())

runs = {}
for h in (0.1, 0.05, 0.01, 0.005, 0.0025):
    traj = solve(problem, SolverConfig(h=h, t_end=30.0))
    assert traj.diagnostics.nan_node is None
    runs[h] = traj.y.values

# sample the trajectory at a few times for each step
marks = (5.0, 10.0, 20.0, 30.0)
print("y(t) by step size")
print(f"{'h':>7}" + "".join(f"{f't={m:g}':>10}" for m in marks))
for h, y in runs.items():
    row = "".join(f"{y[round(m / h)]:>10.4f}" for m in marks)
    print(f"{h:>7.4f}{row}")

# gap between a run and its half-step refinement, on shared nodes
print("\nsup |y(h) - y(h/2)|")
for h in (0.1, 0.01, 0.005):
    coarse = runs[h]
    fine = runs[h / 2][::2][: len(coarse)]
    print(f"h = {h:<6g} {np.max(np.abs(coarse - fine)):.5f}")
