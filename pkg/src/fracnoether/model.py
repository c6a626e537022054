"""Fractional optimal-control problems, their Hamiltonians and built-in examples.

A problem is

    minimize  int_a^b L(t, q, u) dt   subject to   aD_t^alpha q = phi(t, q, u),  q(a) = q_a,

with Hamiltonian ``H = L + p . phi``. Callables take ``(t, q, u)`` with ``q`` an
``n``-vector and ``u`` an ``m``-vector (1-d arrays even when ``n = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConstraintViolation

_PROBE_RNG_SEED = 20061907


def _fd_gradient(fun, x, delta_scale=1e-6):
    """Central-difference gradient (or Jacobian, rows = outputs) of ``fun`` at ``x``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        d = delta_scale * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += d
        xm[i] -= d
        cols.append((np.asarray(fun(xp), dtype=float) - np.asarray(fun(xm), dtype=float)) / (2 * d))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """Fractional optimal-control problem with order ``0 < alpha <= 1``.

    ``terminal_state`` is optional; when given, the solver shoots on the
    terminal co-state so that ``q(b)`` hits it. ``autonomous=None`` means
    "detect by probing".
    """

    n: int
    m: int
    alpha: float
    a: float
    b: float
    q_a: np.ndarray
    lagrangian: Callable
    dynamics: Callable
    dL_dq: Callable | None = None
    dL_du: Callable | None = None
    dphi_dq: Callable | None = None
    dphi_du: Callable | None = None
    autonomous: bool | None = None
    terminal_state: np.ndarray | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("state and control dimensions must be >= 1")
        if not (0.0 < self.alpha <= 1.0):
            raise ConstraintViolation(f"order alpha must lie in (0, 1], got {self.alpha}")
        if not self.b > self.a:
            raise ValueError("need a < b")
        q_a = np.atleast_1d(np.asarray(self.q_a, dtype=float))
        if q_a.shape != (self.n,):
            raise ValueError(f"q_a must have shape ({self.n},)")
        object.__setattr__(self, "q_a", q_a)
        if self.terminal_state is not None:
            qb = np.atleast_1d(np.asarray(self.terminal_state, dtype=float))
            if qb.shape != (self.n,):
                raise ValueError(f"terminal_state must have shape ({self.n},)")
            object.__setattr__(self, "terminal_state", qb)
        detected = self._probe_autonomous()
        if self.autonomous and not detected:
            raise ValueError("problem declared autonomous but L or phi depends on t")
        object.__setattr__(self, "autonomous", detected if self.autonomous is None else bool(self.autonomous))

    def _probe_autonomous(self) -> bool:
        rng = np.random.default_rng(_PROBE_RNG_SEED)
        t1, t2 = self.a + 0.3 * (self.b - self.a), self.a + 0.8 * (self.b - self.a)
        for _ in range(3):
            q = rng.normal(size=self.n)
            u = rng.normal(size=self.m)
            if self.L(t1, q, u) != self.L(t2, q, u):
                return False
            if not np.array_equal(self.phi(t1, q, u), self.phi(t2, q, u)):
                return False
        return True

    def L(self, t, q, u) -> float:
        return float(self.lagrangian(t, q, u))

    def phi(self, t, q, u) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.dynamics(t, q, u), dtype=float))

    def with_alpha(self, alpha: float) -> ControlProblem:
        return replace(self, alpha=alpha)


class Hamiltonian:
    """``H(t, q, u, p) = L(t, q, u) + p . phi(t, q, u)`` and its partials.

    Partials use the problem's analytic callables when present, otherwise
    central differences with step ``1e-6 (1 + |x|)``.
    """

    def __init__(self, problem: ControlProblem):
        self.problem = problem

    def __call__(self, t, q, u, p) -> float:
        pr = self.problem
        return pr.L(t, q, u) + float(np.dot(p, pr.phi(t, q, u)))

    def dL_dq(self, t, q, u):
        pr = self.problem
        if pr.dL_dq is not None:
            return np.atleast_1d(np.asarray(pr.dL_dq(t, q, u), dtype=float))
        return _fd_gradient(lambda x: pr.L(t, x, u), q)

    def dL_du(self, t, q, u):
        pr = self.problem
        if pr.dL_du is not None:
            return np.atleast_1d(np.asarray(pr.dL_du(t, q, u), dtype=float))
        return _fd_gradient(lambda x: pr.L(t, q, x), u)

    def phi_q(self, t, q, u):
        """Jacobian ``d phi / d q`` with shape ``(n, n)``."""
        pr = self.problem
        if pr.dphi_dq is not None:
            return np.asarray(pr.dphi_dq(t, q, u), dtype=float).reshape(pr.n, pr.n)
        return _fd_gradient(lambda x: pr.phi(t, x, u), q).reshape(pr.n, pr.n)

    def phi_u(self, t, q, u):
        """Jacobian ``d phi / d u`` with shape ``(n, m)``."""
        pr = self.problem
        if pr.dphi_du is not None:
            return np.asarray(pr.dphi_du(t, q, u), dtype=float).reshape(pr.n, pr.m)
        return _fd_gradient(lambda x: pr.phi(t, q, x), u).reshape(pr.n, pr.m)

    def dq(self, t, q, u, p):
        return self.dL_dq(t, q, u) + self.phi_q(t, q, u).T @ p

    def du(self, t, q, u, p):
        return self.dL_du(t, q, u) + self.phi_u(t, q, u).T @ p

    def dp(self, t, q, u, p):
        # wired, not differentiated
        return self.problem.phi(t, q, u)

    def du_jacobian(self, t, q, u, p):
        """``d^2 H / du^2`` by central differences of :meth:`du`."""
        return _fd_gradient(lambda x: self.du(t, q, x, p), u).reshape(self.problem.m, self.problem.m)


def make_hamiltonian(problem: ControlProblem) -> Hamiltonian:
    return Hamiltonian(problem)


@dataclass(frozen=True)
class Generators:
    """Infinitesimal generators ``(tau, xi, sigma, zeta)`` of an epsilon-group.

    Each is called as ``f(t, q, u, p)``; ``tau`` returns a scalar, the others
    vectors of the state, control and state size respectively.
    """

    tau: Callable
    xi: Callable
    sigma: Callable
    zeta: Callable
    name: str = "custom"


def time_translation(n: int, m: int) -> Generators:
    zn, zm = np.zeros(n), np.zeros(m)
    return Generators(
        tau=lambda t, q, u, p: 1.0,
        xi=lambda t, q, u, p: zn,
        sigma=lambda t, q, u, p: zm,
        zeta=lambda t, q, u, p: zn,
        name="time-translation",
    )


def state_translation(direction, m: int) -> Generators:
    """``q -> q + eps * direction`` with time, control and co-state fixed."""
    d = np.atleast_1d(np.asarray(direction, dtype=float))
    zm, zn = np.zeros(m), np.zeros(d.size)
    return Generators(
        tau=lambda t, q, u, p: 0.0,
        xi=lambda t, q, u, p: d,
        sigma=lambda t, q, u, p: zm,
        zeta=lambda t, q, u, p: zn,
        name="q-translation",
    )


def cov_as_control(
    lagrangian: Callable,
    alpha: float,
    interval: tuple[float, float],
    q_a,
    dL_dq: Callable | None = None,
    dL_dd: Callable | None = None,
    terminal_state=None,
    name: str = "cov",
) -> ControlProblem:
    """Embed ``int L(t, q, aD^alpha q) dt`` as a control problem with ``phi = u``."""
    q_a = np.atleast_1d(np.asarray(q_a, dtype=float))
    n = q_a.size
    eye = np.eye(n)
    return ControlProblem(
        n=n,
        m=n,
        alpha=alpha,
        a=interval[0],
        b=interval[1],
        q_a=q_a,
        lagrangian=lagrangian,
        dynamics=lambda t, q, u: np.asarray(u, dtype=float),
        dL_dq=dL_dq,
        dL_du=dL_dd,
        dphi_dq=lambda t, q, u: np.zeros((n, n)),
        dphi_du=lambda t, q, u: eye,
        terminal_state=terminal_state,
        name=name,
        params={"cov_lagrangian": lagrangian, "cov_dL_dd": dL_dd, "cov_dL_dq": dL_dq},
    )


def example1(alpha: float) -> ControlProblem:
    """``1/2 int_0^1 (0D_t^alpha q)^2 dt`` with ``q(0) = 0``, ``q(1) = 1``; needs ``alpha > 1/2``."""
    if not alpha > 0.5:
        raise ConstraintViolation(f"example1 requires alpha > 1/2, got {alpha}")
    return cov_as_control(
        lambda t, q, u: 0.5 * float(u @ u),
        alpha,
        (0.0, 1.0),
        [0.0],
        dL_dq=lambda t, q, u: np.zeros(1),
        dL_dd=lambda t, q, u: np.asarray(u, dtype=float),
        terminal_state=[1.0],
        name="example1",
    )


def example2(alpha: float) -> ControlProblem:
    """``1/2 int_0^1 (q^2 + u^2) dt`` with ``0D_t^alpha q = -q + u``, ``q(0) = 1``."""
    return ControlProblem(
        n=1,
        m=1,
        alpha=alpha,
        a=0.0,
        b=1.0,
        q_a=[1.0],
        lagrangian=lambda t, q, u: 0.5 * (q[0] ** 2 + u[0] ** 2),
        dynamics=lambda t, q, u: np.array([-q[0] + u[0]]),
        dL_dq=lambda t, q, u: np.array([q[0]]),
        dL_du=lambda t, q, u: np.array([u[0]]),
        dphi_dq=lambda t, q, u: np.array([[-1.0]]),
        dphi_du=lambda t, q, u: np.array([[1.0]]),
        name="example2",
    )


def _car_phi(t, q, u):
    c, s = np.cos(q[2]), np.sin(q[2])
    return np.array([u[0] * c, u[0] * s, u[1]])


def _car_phi_q(t, q, u):
    c, s = np.cos(q[2]), np.sin(q[2])
    return np.array([[0.0, 0.0, -u[0] * s], [0.0, 0.0, u[0] * c], [0.0, 0.0, 0.0]])


def _car_phi_u(t, q, u):
    c, s = np.cos(q[2]), np.sin(q[2])
    return np.array([[c, 0.0], [s, 0.0], [0.0, 1.0]])


def example3(alpha: float) -> ControlProblem:
    """Fractional car kinematics: ``int_0^1 (u1^2 + u2^2) dt``, three states, two controls.

    Drives the car from the origin to ``(1, 0.3, 0.5)``.
    """
    return ControlProblem(
        n=3,
        m=2,
        alpha=alpha,
        a=0.0,
        b=1.0,
        q_a=[0.0, 0.0, 0.0],
        lagrangian=lambda t, q, u: float(u[0] ** 2 + u[1] ** 2),
        dynamics=_car_phi,
        dL_dq=lambda t, q, u: np.zeros(3),
        dL_du=lambda t, q, u: 2.0 * np.asarray(u, dtype=float),
        dphi_dq=_car_phi_q,
        dphi_du=_car_phi_u,
        terminal_state=[1.0, 0.3, 0.5],
        name="example3",
        # origin is a singular point of the shooting map (q2 is second order in p)
        params={"terminal_costate_guess": [-2.0, -1.0, -1.0]},
    )


def qfree(alpha: float) -> ControlProblem:
    """A problem whose ``L`` and ``phi`` do not read ``q``: ``int (u^2/2 + t u) dt``, ``D^alpha q = u``."""
    return ControlProblem(
        n=1,
        m=1,
        alpha=alpha,
        a=0.0,
        b=1.0,
        q_a=[0.0],
        lagrangian=lambda t, q, u: 0.5 * u[0] ** 2 + t * u[0],
        dynamics=lambda t, q, u: np.array([u[0]]),
        dL_dq=lambda t, q, u: np.zeros(1),
        dL_du=lambda t, q, u: np.array([u[0] + t]),
        dphi_dq=lambda t, q, u: np.zeros((1, 1)),
        dphi_du=lambda t, q, u: np.ones((1, 1)),
        name="qfree",
    )


REGISTRY: dict[str, Callable[[float], ControlProblem]] = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "qfree": qfree,
}


def get_problem(problem_id: str, alpha: float) -> ControlProblem:
    try:
        factory = REGISTRY[problem_id]
    except KeyError:
        raise KeyError(f"unknown problem {problem_id!r}; known: {sorted(REGISTRY)}") from None
    return factory(alpha)
