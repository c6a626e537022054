"""Fractional Pontryagin extremals by a forward-backward sweep.

The discrete Hamiltonian system

    aD^alpha q (t_j) = phi(t_j, q_j, u_j),            j = 1..N,   q_0 = q_a,
    tD_b^alpha p (t_j) = dH/dq(t_j, q_j, u_j, p_j),   j = 0..N-1, p_N given,
    dH/du(t_j, q_j, u_j, p_j) = 0,                    j = 0..N,

uses the same operators as :mod:`fracnoether.fracdiff`, so each node equation
of the left (right) derivative can be solved for its newest unknown while
marching forward (backward).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NodeSolveError, NonConvergence
from .fracdiff import Grid, SampledPath, left_rl_deriv, operator_weights, right_rl_deriv
from .model import ControlProblem, Hamiltonian, _fd_gradient, make_hamiltonian

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    tolerance: float = 1e-8
    relaxation: float = 1.0
    #: past iterates used for Anderson mixing of the sweep (0 = plain relaxation)
    anderson_memory: int = 5
    newton_iterations: int = 50
    newton_tolerance: float = 1e-12
    #: ``p(b)`` when the problem has no terminal state target; zeros if None
    terminal_costate: tuple | None = None
    shooting_iterations: int = 30
    shooting_tolerance: float = 1e-9

    def __post_init__(self):
        if self.max_iterations < 1 or self.newton_iterations < 1 or self.shooting_iterations < 1:
            raise ValueError("iteration budgets must be positive")
        if not (self.tolerance > 0 and self.newton_tolerance > 0 and self.shooting_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.anderson_memory < 0:
            raise ValueError("anderson_memory must be >= 0")
        if not (0.0 < self.relaxation <= 1.0):
            raise ValueError("relaxation must lie in (0, 1]")


@dataclass(eq=False)
class PontryaginTriple:
    q: SampledPath
    u: SampledPath
    p: SampledPath
    problem: ControlProblem
    residual_report: tuple[float, float, float] = (np.nan, np.nan, np.nan)
    iterations: int = 0
    converged: bool = True
    history: list = field(default_factory=list)
    terminal_costate: np.ndarray | None = None

    @property
    def grid(self) -> Grid:
        return self.q.grid

    def report(self) -> dict:
        """JSON-ready convergence report."""
        return {
            "problem": self.problem.name,
            "alpha": self.problem.alpha,
            "grid": {"a": self.grid.a, "b": self.grid.b, "N": self.grid.N},
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_report": {
                "state_equation": self.residual_report[0],
                "costate_equation": self.residual_report[1],
                "stationarity": self.residual_report[2],
            },
            "terminal_costate": None if self.terminal_costate is None else list(map(float, self.terminal_costate)),
            "history": self.history,
        }


def _stationary_node(H, t, q, p, u0, cfg, hess=None):
    """Damped (chord) Newton on ``dH/du = 0``; returns ``(u, hessian)``.

    A supplied ``hess`` is reused until it stops giving a contraction, then
    refreshed by finite differences.
    """
    u = np.array(u0, dtype=float)
    g = H.du(t, q, u, p)
    gnorm = np.abs(g).max()
    fresh = hess is None
    if fresh:
        hess = H.du_jacobian(t, q, u, p)
    for _ in range(cfg.newton_iterations):
        if gnorm <= cfg.newton_tolerance:
            return u, hess
        try:
            step = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError:
            if fresh:
                break
            hess, fresh = H.du_jacobian(t, q, u, p), True
            continue
        lam = 1.0
        for _ in range(30):
            u_try = u + lam * step
            g_try = H.du(t, q, u_try, p)
            n_try = np.abs(g_try).max()
            if n_try < gnorm or n_try <= cfg.newton_tolerance:
                break
            lam *= 0.5
        else:
            if fresh:
                break
            hess, fresh = H.du_jacobian(t, q, u, p), True
            continue
        if not fresh and n_try > 0.5 * gnorm:
            hess, fresh = H.du_jacobian(t, q, u_try, p), True
        tiny = np.abs(u_try - u).max() <= 1e-15 * (1.0 + np.abs(u).max())
        u, g, gnorm = u_try, g_try, n_try
        if tiny:
            break
    # accept rounding-level stationarity relative to the gradient's terms
    scale = 1.0 + np.abs(H.dL_du(t, q, u)).max() + np.abs(p).max()
    if gnorm <= max(cfg.newton_tolerance, 1e-13 * scale):
        return u, hess
    raise NonConvergence(f"stationary condition not met at t={t}: |dH/du|={gnorm:.3e}")


def stationary_control(H: Hamiltonian, t, q, p, u0=None, cfg: SolverConfig = SolverConfig()) -> np.ndarray:
    """Solve ``dH/du (t, q, u, p) = 0`` for ``u`` by damped Newton from ``u0`` (zero by default)."""
    u0 = np.zeros(H.problem.m) if u0 is None else u0
    return _stationary_node(H, t, np.asarray(q, float), np.asarray(p, float), u0, cfg)[0]


def _stationary_path(H, t, q, p, u_guess, cfg, hessians):
    out = np.empty_like(u_guess)
    for j in range(t.size):
        try:
            out[j], hessians[j] = _stationary_node(H, t[j], q[j], p[j], u_guess[j], cfg, hessians[j])
        except NonConvergence as exc:
            raise NodeSolveError(str(exc), j) from None
    return out


def _history(w, s0, s1, x, j):
    """Known part of the j-th corrected GL sum (x_j excluded)."""
    acc = w[1 : j + 1] @ x[j - 1 :: -1] + s0[j] * x[0]
    if j >= 2:
        acc = acc + s1[j] * x[1]
    return acc


def _solve_small(A, b):
    if A.shape == (1, 1):
        return b / A[0, 0]
    return np.linalg.solve(A, b)


def _march_state(H, t, u, q_a, alpha, h, weights, cfg, q_guess=None):
    """Forward march: solve each left-derivative node equation for ``q_j``."""
    w, s0, s1 = weights
    N = t.size - 1
    n = q_a.size
    scale = h**-alpha
    q = np.empty((N + 1, n))
    q[0] = q_a
    eye = np.eye(n)
    phi = H.problem.phi
    for j in range(1, N + 1):
        diag = w[0] + (s1[1] if j == 1 else 0.0)
        hist = _history(w, s0, s1, q, j)
        x = (q[j - 1] if q_guess is None else q_guess[j]).copy()
        for _ in range(cfg.newton_iterations):
            F = scale * (diag * x + hist) - phi(t[j], x, u[j])
            # rounding floor of the residual: terms of size scale * |x| and scale * |hist|
            if np.abs(F).max() <= 4e-16 * scale * (1.0 + np.abs(x).max() + np.abs(hist).max()):
                break
            J = scale * diag * eye - H.phi_q(t[j], x, u[j])
            try:
                dx = _solve_small(J, -F)
            except np.linalg.LinAlgError:
                raise NodeSolveError("singular state-equation Jacobian", j) from None
            x = x + dx
            if np.abs(dx).max() <= cfg.newton_tolerance * (1.0 + np.abs(x).max()):
                break
        else:
            raise NodeSolveError("state-equation Newton did not converge", j)
        q[j] = x
    return q


def _march_costate(H, t, q, u, p_b, alpha, h, weights):
    """Backward march on the reversed index; ``dH/dq`` is affine in ``p``."""
    w, s0, s1 = weights
    N = t.size - 1
    n = p_b.size
    scale = h**-alpha
    P = np.empty((N + 1, n))  # P[r] = p[N - r]
    P[0] = p_b
    eye = np.eye(n)
    for r in range(1, N + 1):
        j = N - r
        diag = w[0] + (s1[1] if r == 1 else 0.0)
        hist = _history(w, s0, s1, P, r)
        A = scale * diag * eye - H.phi_q(t[j], q[j], u[j]).T
        rhs = H.dL_dq(t[j], q[j], u[j]) - scale * hist
        try:
            P[r] = _solve_small(A, rhs)
        except np.linalg.LinAlgError:
            raise NodeSolveError("singular co-state equation", j) from None
    return P[::-1].copy()


def hamiltonian_residual(triple: PontryaginTriple, corrected: bool = True):
    """Pointwise residuals of the state equation, co-state equation and stationarity."""
    pr, grid = triple.problem, triple.grid
    H = make_hamiltonian(pr)
    t = grid.nodes
    q, u, p = triple.q.values, triple.u.values, triple.p.values
    Dq = left_rl_deriv(triple.q, pr.alpha, corrected).values
    Dp = right_rl_deriv(triple.p, pr.alpha, corrected).values
    phi = np.array([H.dp(t[j], q[j], u[j], p[j]) for j in range(t.size)])
    Hq = np.array([H.dq(t[j], q[j], u[j], p[j]) for j in range(t.size)])
    Hu = np.array([H.du(t[j], q[j], u[j], p[j]) for j in range(t.size)])
    N = grid.N
    r1 = SampledPath(grid, Dq - phi, validity_start=1)
    r2 = SampledPath(grid, Dp - Hq, validity_end=N)
    r3 = SampledPath(grid, Hu)
    return r1, r2, r3


def _residual_norms(triple):
    return tuple(r.sup() for r in hamiltonian_residual(triple))


def _sweep(problem, grid, cfg, p_b, u_init=None):
    """Fixed-point iteration ``u -> argstat H(q(u), p(u))`` with Anderson mixing."""
    H = make_hamiltonian(problem)
    t = grid.nodes
    h = grid.h
    weights = operator_weights(problem.alpha, grid.N)
    u = np.zeros((grid.N + 1, problem.m)) if u_init is None else np.array(u_init, dtype=float)
    hessians = [None] * (grid.N + 1)
    history = []
    converged = False
    it = 0
    omega = cfg.relaxation
    best = np.inf
    U_mem, F_mem = [], []
    q = None
    for it in range(1, cfg.max_iterations + 1):
        q = _march_state(H, t, u, problem.q_a, problem.alpha, h, weights, cfg, q)
        p = _march_costate(H, t, q, u, p_b, problem.alpha, h, weights)
        g = _stationary_path(H, t, q, p, u, cfg, hessians)
        f = g - u
        change = float(np.abs(f).max())
        history.append({"iteration": it, "change": change, "relaxation": omega})
        if change <= cfg.tolerance:
            u = g
            converged = True
            break
        if change > 2.0 * best:
            # mixing went astray: forget it and damp the plain update
            U_mem.clear()
            F_mem.clear()
            omega = max(omega * 0.5, 1.0 / 64)
        best = min(best, change)
        U_mem.append(u.ravel().copy())
        F_mem.append(f.ravel().copy())
        if len(U_mem) > cfg.anderson_memory + 1:
            U_mem.pop(0)
            F_mem.pop(0)
        step = omega * f.ravel()
        if len(U_mem) > 1:
            dU = np.diff(np.array(U_mem), axis=0).T
            dF = np.diff(np.array(F_mem), axis=0).T
            gamma = np.linalg.lstsq(dF, f.ravel(), rcond=None)[0]
            step = step - (dU + omega * dF) @ gamma
        u = u + step.reshape(u.shape)
    # final consistent pass with the accepted control
    q = _march_state(H, t, u, problem.q_a, problem.alpha, h, weights, cfg, q)
    p = _march_costate(H, t, q, u, p_b, problem.alpha, h, weights)
    triple = PontryaginTriple(
        SampledPath(grid, q, name="q"),
        SampledPath(grid, u, name="u"),
        SampledPath(grid, p, name="p"),
        problem,
        iterations=it,
        converged=converged,
        history=history,
        terminal_costate=np.array(p_b, dtype=float),
    )
    triple.residual_report = _residual_norms(triple)
    history[-1].update(zip(("state_residual", "costate_residual", "stationarity_residual"), triple.residual_report))
    return triple


def _check_grid(problem, grid):
    if not (np.isclose(grid.a, problem.a) and np.isclose(grid.b, problem.b)):
        raise ValueError(f"grid [{grid.a}, {grid.b}] does not match problem [{problem.a}, {problem.b}]")


def solve_pontryagin(problem: ControlProblem, grid: Grid, cfg: SolverConfig = SolverConfig(), u_init=None) -> PontryaginTriple:
    """Compute a fractional Pontryagin extremal on ``grid``.

    With a terminal state target the terminal co-state is found by Newton
    shooting (finite-difference Jacobian); otherwise ``p(b)`` is
    ``cfg.terminal_costate`` (default zero). Raises :class:`NonConvergence`
    with the last triple attached as ``report``.
    """
    _check_grid(problem, grid)
    n = problem.n
    if problem.terminal_state is None:
        p_b = np.zeros(n) if cfg.terminal_costate is None else np.asarray(cfg.terminal_costate, dtype=float)
        triple = _sweep(problem, grid, cfg, p_b, u_init)
        if not triple.converged:
            raise NonConvergence(f"sweep did not converge in {cfg.max_iterations} iterations", triple)
        return triple
    if cfg.terminal_costate is None and u_init is None and grid.N > _COARSE_N:
        p_b, u_init = _coarse_guess(problem, grid, cfg)
        cfg = replace(cfg, terminal_costate=tuple(p_b))
    return _shoot(problem, grid, cfg, u_init)


#: grids finer than this get a shooting guess from coarser solves
_COARSE_N = 64


def _coarse_guess(problem, grid, cfg):
    """Terminal co-state and control guesses from two coarser grids.

    For ``alpha < 1`` the discrete ``p(b)`` grows like a power of ``N``; the
    power is estimated from the two coarse levels and extrapolated.
    """
    n1 = -(-grid.N // 2)
    n2 = -(-n1 // 2)
    coarse = [solve_pontryagin(problem, Grid(grid.a, grid.b, k), cfg) for k in (n2, n1)]
    pb2, pb1 = (c.terminal_costate for c in coarse)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.log(pb1 / pb2) / np.log(n1 / n2)
    rate = np.where(np.isfinite(rate) & (np.sign(pb1) == np.sign(pb2)), rate, 0.0)
    p_b = pb1 * (grid.N / n1) ** rate
    u1 = coarse[1].u
    u = np.column_stack([np.interp(grid.nodes, u1.t, u1.component(i)) for i in range(problem.m)])
    return p_b, u


def _shoot(problem, grid, cfg, u_init):
    """Newton shooting on ``p(b)``: one forward-difference Jacobian, then Broyden updates."""
    inner = replace(cfg, tolerance=min(cfg.tolerance, 1e-11))
    target = problem.terminal_state
    if cfg.terminal_costate is not None:
        p_b = np.asarray(cfg.terminal_costate, dtype=float)
    else:
        p_b = np.asarray(problem.params.get("terminal_costate_guess", np.zeros(problem.n)), dtype=float)

    def run(pb, warm):
        tr = _sweep(problem, grid, inner, pb, warm)
        if not tr.converged:
            raise NonConvergence("inner sweep did not converge during shooting", tr)
        return tr

    triple = run(p_b, u_init)
    miss = triple.q.values[-1] - target
    J = None
    shots = []
    for k in range(cfg.shooting_iterations):
        err = float(np.max(np.abs(miss)))
        shots.append({"shot": k, "terminal_miss": err})
        log.debug("shot %d: terminal miss %.3e", k, err)
        if err <= cfg.shooting_tolerance:
            triple.history = shots + triple.history
            return triple
        fresh = J is None
        if fresh:
            J = np.empty((problem.n, problem.n))
            for i in range(problem.n):
                d = 1e-6 * (1.0 + abs(p_b[i]))
                pb = p_b.copy()
                pb[i] += d
                J[:, i] = (run(pb, triple.u.values).q.values[-1] - triple.q.values[-1]) / d
        try:
            step = np.linalg.solve(J, -miss)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _ in range(20):
            try:
                cand = run(p_b + lam * step, triple.u.values)
            except NonConvergence:
                lam *= 0.5
                continue
            cand_miss = cand.q.values[-1] - target
            if np.max(np.abs(cand_miss)) < err:
                break
            lam *= 0.5
        else:
            if fresh:
                break
            J = None  # stale Broyden model: rebuild it by differences
            continue
        s_vec = lam * step
        y_vec = cand_miss - miss
        J = J + np.outer(y_vec - J @ s_vec, s_vec) / (s_vec @ s_vec)
        p_b, triple, miss = p_b + s_vec, cand, cand_miss
    triple.converged = False
    triple.history = shots + triple.history
    raise NonConvergence("shooting on the terminal co-state did not converge", triple)


def euler_lagrange_residual(L, q: SampledPath, alpha: float, dL_dq=None, dL_dd=None, corrected: bool = True) -> SampledPath:
    """Left side of the fractional Euler-Lagrange equation along ``q``.

    ``L(t, q, d)`` is the variational Lagrangian with ``d = aD^alpha q``;
    partials default to central differences. Valid on nodes ``1..N-1``.
    """
    grid = q.grid
    t = grid.nodes
    d = left_rl_deriv(q, alpha, corrected).values
    qv = q.values
    if dL_dq is None:
        def dL_dq(tt, x, y):
            return _fd_gradient(lambda z: L(tt, z, y), x)
    if dL_dd is None:
        def dL_dd(tt, x, y):
            return _fd_gradient(lambda z: L(tt, x, z), y)
    Lq = np.array([np.atleast_1d(dL_dq(t[j], qv[j], d[j])) for j in range(t.size)], dtype=float)
    Ld = np.array([np.atleast_1d(dL_dd(t[j], qv[j], d[j])) for j in range(t.size)], dtype=float)
    outer = right_rl_deriv(SampledPath(grid, Ld), alpha, corrected).values
    return SampledPath(grid, Lq + outer, validity_start=1, validity_end=grid.N)
