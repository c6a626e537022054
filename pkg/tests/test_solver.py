import numpy as np
import pytest
from scipy.integrate import solve_ivp

from fracnoether import (
    Grid,
    NonConvergence,
    SampledPath,
    SolverConfig,
    euler_lagrange_residual,
    get_problem,
    hamiltonian_residual,
    make_hamiltonian,
    solve_pontryagin,
    stationary_control,
)


def riccati_oracle(t):
    """Classical LQR for example 2: p = P q with -P' = 1 - 2P - P^2, P(1) = 0."""
    back = solve_ivp(lambda s, P: -(1 - 2 * P - P**2), (1.0, 0.0), [0.0], rtol=1e-12, atol=1e-14, dense_output=True)
    P = lambda s: back.sol(s)[0]
    fwd = solve_ivp(lambda s, q: (-1 - P(s)) * q, (0.0, 1.0), [1.0], t_eval=t, rtol=1e-12, atol=1e-14)
    q = fwd.y[0]
    p = P(t) * q
    return q, -p, p


class TestSolverConfig:
    @pytest.mark.parametrize("kw", [{"max_iterations": 0}, {"tolerance": 0.0}, {"relaxation": 1.5}, {"anderson_memory": -1}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


class TestStationarity:
    def test_quadratic_control(self):
        H = make_hamiltonian(get_problem("example2", 0.8))
        u = stationary_control(H, 0.2, np.array([0.3]), np.array([1.7]))
        np.testing.assert_allclose(u, [-1.7], atol=1e-12)

    def test_car_controls(self):
        H = make_hamiltonian(get_problem("example3", 1.0))
        q, p = np.array([0.0, 0.0, 0.4]), np.array([1.0, 2.0, -0.6])
        u = stationary_control(H, 0.0, q, p)
        np.testing.assert_allclose(u, [-(np.cos(0.4) + 2 * np.sin(0.4)) / 2, 0.3], atol=1e-10)


class TestClassicalLimit:
    def test_riccati_oracle(self, solved):
        tr = solved("example2", 1.0, 2000)
        q, u, p = riccati_oracle(tr.grid.nodes)
        assert np.max(np.abs(tr.q.values[:, 0] - q)) <= 1e-3
        assert np.max(np.abs(tr.u.values[:, 0] - u)) <= 1e-3
        assert np.max(np.abs(tr.p.values[:, 0] - p)) <= 1e-3

    def test_oracle_error_is_first_order(self, solved):
        errs = []
        for N in (250, 500):
            tr = solved("example2", 1.0, N)
            errs.append(np.max(np.abs(tr.q.values[:, 0] - riccati_oracle(tr.grid.nodes)[0])))
        assert errs[0] / errs[1] > 1.8

    def test_straight_line_extremal(self, solved):
        tr = solved("example1", 1.0, 100)
        np.testing.assert_allclose(tr.q.values[:, 0], tr.grid.nodes, atol=1e-10)
        np.testing.assert_allclose(tr.p.values[:, 0], -1.0, atol=1e-10)


class TestFractionalSolves:
    @pytest.mark.parametrize("pid,N", [("example1", 200), ("example2", 200), ("example3", 60)])
    def test_residuals_at_solver_tolerance(self, solved, pid, N):
        tr = solved(pid, 0.75, N)
        assert tr.converged
        assert max(tr.residual_report) <= 1e-8

    @pytest.mark.parametrize("pid,N", [("example1", 200), ("example3", 60)])
    def test_terminal_target_hit(self, solved, pid, N):
        tr = solved(pid, 0.75, N)
        pr = tr.problem
        np.testing.assert_allclose(tr.q.values[-1], pr.terminal_state, atol=1e-8)

    def test_pointwise_residual_paths(self, solved):
        tr = solved("example2", 0.75, 200)
        r1, r2, r3 = hamiltonian_residual(tr)
        assert (r1.validity_start, r2.validity_end) == (1, tr.grid.N)
        assert r3.sup() <= 1e-8

    def test_euler_lagrange_residual_of_cov_problem(self, solved):
        tr = solved("example1", 0.75, 200)
        r = euler_lagrange_residual(lambda t, q, d: 0.5 * float(d @ d), tr.q, 0.75)
        assert r.sup() <= 1e-6

    def test_terminal_costate_override(self):
        pr = get_problem("example2", 0.75)
        tr = solve_pontryagin(pr, Grid(0, 1, 50), SolverConfig(terminal_costate=(0.5,)))
        assert tr.p.values[-1, 0] == 0.5


class TestFailures:
    def test_nonconvergence_carries_report(self):
        pr = get_problem("example2", 0.75)
        with pytest.raises(NonConvergence) as info:
            solve_pontryagin(pr, Grid(0, 1, 50), SolverConfig(max_iterations=1))
        assert info.value.report is not None and not info.value.report.converged

    def test_grid_must_match_interval(self):
        with pytest.raises(ValueError):
            solve_pontryagin(get_problem("example2", 0.75), Grid(0, 2, 50))

    def test_report_is_json_ready(self, solved):
        rep = solved("example2", 0.75, 200).report()
        assert rep["converged"] and rep["grid"]["N"] == 200
        assert set(rep["residual_report"]) == {"state_equation", "costate_equation", "stationarity"}


def test_euler_lagrange_default_partials_match_analytic():
    g = Grid(0, 1, 64)
    q = SampledPath(g, g.nodes**2)
    L = lambda t, x, d: float(0.5 * d @ d + x @ x)
    a = euler_lagrange_residual(L, q, 0.6)
    b = euler_lagrange_residual(L, q, 0.6, dL_dq=lambda t, x, d: 2 * x, dL_dd=lambda t, x, d: d)
    np.testing.assert_allclose(a.values[1:-1], b.values[1:-1], atol=1e-6)
