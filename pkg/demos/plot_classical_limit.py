"""
Order one: the classical linear-quadratic regulator
===================================================

At ``alpha = 1`` example 2 is an ordinary LQR problem. The sweep solution
is compared with a Riccati integration, and the Hamiltonian is checked to be
constant along the extremal.
"""

import numpy as np
from scipy.integrate import solve_ivp

from fracnoether import Grid, get_problem, make_hamiltonian, solve_pontryagin

problem = get_problem("example2", 1.0)
triple = solve_pontryagin(problem, Grid(0.0, 1.0, 2000))
t = triple.grid.nodes
print("sweep iterations:", triple.iterations, "residuals:", triple.residual_report)

# p = P q with -P' = 1 - 2P - P^2 and P(1) = 0
ric = solve_ivp(lambda s, P: -(1 - 2 * P - P**2), (1.0, 0.0), [0.0], rtol=1e-12, dense_output=True)
q = solve_ivp(lambda s, x: (-1 - ric.sol(s)[0]) * x, (0.0, 1.0), [1.0], t_eval=t, rtol=1e-12).y[0]
print("sup |q - q_riccati| =", np.max(np.abs(triple.q.values[:, 0] - q)))

H = make_hamiltonian(problem)
Hv = [H(t[j], triple.q.values[j], triple.u.values[j], triple.p.values[j]) for j in range(t.size)]
print("Hamiltonian range along the extremal:", np.ptp(Hv))
