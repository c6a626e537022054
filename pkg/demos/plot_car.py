"""
A fractional car
================

Example 3 steers a kinematic car from the origin to ``(1, 0.3, 0.5)``.
The terminal co-state is found by shooting; finer grids start from an
extrapolation of two coarser solutions.
"""

import numpy as np

from fracnoether import Grid, autonomous_invariant, get_problem, solve_pontryagin

for alpha in (1.0, 0.8):
    triple = solve_pontryagin(get_problem("example3", alpha), Grid(0.0, 1.0, 200))
    inv = autonomous_invariant(triple).values[1:, 0]
    print(f"alpha={alpha}: q(b)={triple.q.values[-1]}, p(b)={triple.terminal_costate}")
    print(f"  residuals {triple.residual_report}")
    print(f"  invariant along the path: min {inv.min():.4f}, max {inv.max():.4f}, median {np.median(inv):.4f}")
