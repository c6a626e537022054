"""
Fractional derivatives on a uniform grid
========================================

Left and right Riemann-Liouville derivatives of power functions, compared
with their closed forms.
"""

import numpy as np

from fracnoether import Grid, SampledPath, left_rl_deriv, power_law_deriv, right_rl_deriv

grid = Grid(0.0, 1.0, 1024)
t = grid.nodes

# The derivative of a constant is not zero for fractional orders.
one = SampledPath(grid, np.ones_like(t))
d_one = left_rl_deriv(one, 0.5)
print("D^0.5 of 1 at t=0.25:", d_one.values[256, 0], "exact:", power_law_deriv(0.5, 0, grid).values[256, 0])

# Power laws: the error at N=1024 and N=2048 shows first-order convergence
# once the data is not affine (affine data is handled exactly).
for ups in (1, 2, 3):
    errs = []
    for N in (1024, 2048):
        g = Grid(0.0, 1.0, N)
        approx = left_rl_deriv(SampledPath(g, g.offsets**ups), 0.6)
        exact = power_law_deriv(0.6, ups, g)
        errs.append(np.max(np.abs(approx.values[1:] - exact.values[1:])))
    print(f"t^{ups}: error {errs[0]:.2e} -> {errs[1]:.2e}")

# Right derivatives integrate the future; (b - t)^1 mirrors the left case.
f = SampledPath(grid, 1.0 - t)
print("right D^0.6 of (1-t) at t=0.5:", right_rl_deriv(f, 0.6).values[512, 0],
      "exact:", power_law_deriv(0.6, 1, grid, side="right").values[512, 0])
