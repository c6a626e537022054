"""Noether-type fractional conserved quantities, invariance checks and drift verification.

A conservation law is stored as a sum of products ``sum_i C1_i * C2_i``. Each
factor is a callable ``f(t, q, u, p, dq)`` evaluated node by node, where
``dq`` is the left derivative of order ``alpha`` of the sampled state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatch, NotAutonomous, UnsupportedGenerator
from .fracdiff import Grid, SampledPath, frac_pair_operator, left_rl_deriv
from .model import ControlProblem, Generators, make_hamiltonian
from .solver import PontryaginTriple

SCHEMA = "fracnoether/1"


@dataclass(frozen=True)
class ConservationLaw:
    """Ordered factor pairs ``(C1_i, C2_i)`` of a sum-of-products quantity."""

    pairs: tuple
    source: str = ""
    alpha: float = 1.0

    def __post_init__(self):
        pairs = tuple(tuple(pr) for pr in self.pairs)
        if not pairs or any(len(pr) != 2 for pr in pairs):
            raise ValueError("a conservation law needs at least one (C1, C2) pair")
        object.__setattr__(self, "pairs", pairs)

    @property
    def r(self) -> int:
        return len(self.pairs)

    def factor_paths(self, q: SampledPath, u: SampledPath | None = None, p: SampledPath | None = None):
        """Evaluate every factor along the paths; returns a list of ``(C1, C2)`` paths."""
        t, qv, dq = q.t, q.values, _state_derivative(q, self.alpha)
        uv = None if u is None else u.values
        pv = None if p is None else p.values
        out = []
        for c1, c2 in self.pairs:
            a1 = np.empty(t.size)
            a2 = np.empty(t.size)
            for j in range(t.size):
                args = (t[j], qv[j], None if uv is None else uv[j], None if pv is None else pv[j], dq[j])
                a1[j] = c1(*args)
                a2[j] = c2(*args)
            out.append((SampledPath(q.grid, a1), SampledPath(q.grid, a2)))
        return out

    def summed(self, q: SampledPath, u=None, p=None) -> SampledPath:
        """``sum_i C1_i C2_i`` along the paths."""
        total = sum(c1.values[:, 0] * c2.values[:, 0] for c1, c2 in self.factor_paths(q, u, p))
        return SampledPath(q.grid, total, name="summed")


def _state_derivative(q: SampledPath, alpha: float) -> np.ndarray:
    """``aD^alpha q`` on every node; the flagged first node is filled by linear extrapolation."""
    d = np.array(left_rl_deriv(q, alpha).values)
    if q.grid.N >= 2:
        d[0] = 2.0 * d[1] - d[2]
    return d


def _zero(*args):
    return 0.0


def noether_law(triple: PontryaginTriple, gen: Generators, alpha: float | None = None) -> ConservationLaw:
    """``[H - (1 - alpha) p . aD^alpha q] tau - p . xi`` as the pairs ``(H - ..., tau)`` and ``(-p_i, xi_i)``."""
    problem = triple.problem
    alpha = problem.alpha if alpha is None else float(alpha)
    H = make_hamiltonian(problem)

    def energy(t, q, u, p, dq):
        return H(t, q, u, p) - (1.0 - alpha) * float(np.dot(p, dq))

    def tau(t, q, u, p, dq):
        return float(gen.tau(t, q, u, p))

    pairs = [(energy, tau)]
    for i in range(problem.n):
        pairs.append((_costate_factor(i), _xi_factor(gen, i)))
    return ConservationLaw(tuple(pairs), source="fractional Noether theorem (optimal control)", alpha=alpha)


def _costate_factor(i):
    return lambda t, q, u, p, dq: -float(p[i])


def _xi_factor(gen, i):
    return lambda t, q, u, p, dq: float(np.atleast_1d(gen.xi(t, q, u, p))[i])


def lagrangian_noether_law(q: SampledPath, L: Callable, gen: Generators, alpha: float, dL_dd: Callable | None = None) -> ConservationLaw:
    """``[L - alpha dL/dd . aD^alpha q] tau + dL/dd . xi`` for a Lagrangian ``L(t, q, d)``.

    ``dL_dd`` defaults to central differences in ``d``. The generators are
    called with ``u = dq`` and ``p = None``.
    """
    from .model import _fd_gradient

    if dL_dd is None:
        def dL_dd(t, x, d):
            return _fd_gradient(lambda z: L(t, x, z), d)

    def grad(t, x, d):
        return np.atleast_1d(np.asarray(dL_dd(t, x, d), dtype=float))

    def energy(t, x, u, p, d):
        return float(L(t, x, d)) - alpha * float(np.dot(grad(t, x, d), d))

    def tau(t, x, u, p, d):
        return float(gen.tau(t, x, d, p))

    pairs = [(energy, tau)]
    for i in range(q.dim):
        pairs.append((
            (lambda i: lambda t, x, u, p, d: float(grad(t, x, d)[i]))(i),
            (lambda i: lambda t, x, u, p, d: float(np.atleast_1d(gen.xi(t, x, d, p))[i]))(i),
        ))
    return ConservationLaw(tuple(pairs), source="fractional Noether theorem (calculus of variations)", alpha=alpha)


def invariant_value(problem: ControlProblem, t, q, u, p, dq=None, alpha: float | None = None) -> float:
    """``H - (1 - alpha) p . dq`` at one point; ``dq=None`` substitutes the dynamics ``phi``."""
    alpha = problem.alpha if alpha is None else alpha
    q, u, p = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (q, u, p))
    dq = problem.phi(t, q, u) if dq is None else np.atleast_1d(np.asarray(dq, dtype=float))
    return make_hamiltonian(problem)(t, q, u, p) - (1.0 - alpha) * float(np.dot(p, dq))


def autonomous_invariant(triple: PontryaginTriple, alpha: float | None = None) -> SampledPath:
    """``H - (1 - alpha) p . aD^alpha q`` along the triple (the Hamiltonian when ``alpha = 1``)."""
    problem = triple.problem
    if not problem.autonomous:
        raise NotAutonomous(f"problem {problem.name!r} depends explicitly on t")
    alpha = problem.alpha if alpha is None else float(alpha)
    t = triple.grid.nodes
    q, u, p = triple.q.values, triple.u.values, triple.p.values
    dq = _state_derivative(triple.q, alpha)
    vals = [invariant_value(problem, t[j], q[j], u[j], p[j], dq[j], alpha) for j in range(t.size)]
    return SampledPath(triple.grid, vals, validity_start=1, name="autonomous_invariant")


@dataclass(frozen=True)
class PairDrift:
    drift_left: float
    drift_right: float

    @property
    def chosen(self) -> float:
        return min(self.drift_left, self.drift_right)


@dataclass(eq=False)
class VerificationReport:
    """Per-pair drifts of a conservation law along sampled paths.

    ``drift_left`` is the interior sup of ``D(C1, C2)``, ``drift_right`` that of
    ``D(C2, C1)``; either orientation counts, so ``chosen`` is the smaller.
    ``derivative_drift`` (``alpha = 1`` only) is the sup of the difference
    quotient of the summed quantity.
    """

    pairs: list[PairDrift]
    summed: SampledPath
    alpha: float
    drift_paths: list = field(default_factory=list)
    derivative_drift: float | None = None

    @property
    def grid(self) -> Grid:
        return self.summed.grid

    @property
    def chosen(self) -> float:
        """Largest chosen drift over all pairs."""
        return max(pd.chosen for pd in self.pairs)

    def to_json(self, summed_path_csv_ref: str | None = None) -> dict:
        return {
            "schema": SCHEMA,
            "pairs": [{"drift_left": pd.drift_left, "drift_right": pd.drift_right, "chosen": pd.chosen} for pd in self.pairs],
            "summed_path_csv_ref": summed_path_csv_ref,
            "alpha": self.alpha,
            "grid": {"a": self.grid.a, "b": self.grid.b, "N": self.grid.N},
            "verdict_fields": {
                "max_chosen_drift": self.chosen,
                "alpha1_derivative_drift": self.derivative_drift,
            },
        }


def verify_conservation(law: ConservationLaw, triple, alpha: float | None = None) -> VerificationReport:
    """Apply the pair operator to every factor pair in both orientations.

    ``triple`` is a :class:`PontryaginTriple` or, for Lagrangian laws, the
    sampled state alone.
    """
    if isinstance(triple, PontryaginTriple):
        q, u, p = triple.q, triple.u, triple.p
        alpha = triple.problem.alpha if alpha is None else float(alpha)
    else:
        q, u, p = triple, None, None
        alpha = law.alpha if alpha is None else float(alpha)
    if not np.isclose(alpha, law.alpha):
        raise ValueError(f"law built for alpha={law.alpha}, verifying at alpha={alpha}")
    drifts, paths = [], []
    for c1, c2 in law.factor_paths(q, u, p):
        left = frac_pair_operator(c1, c2, alpha)
        right = frac_pair_operator(c2, c1, alpha)
        drifts.append(PairDrift(left.sup(), right.sup()))
        paths.append((left, right))
    summed = law.summed(q, u, p)
    aux = None
    if alpha == 1.0:
        s = summed.values[1:, 0]
        aux = float(np.max(np.abs(np.diff(s)))) / q.grid.h
    return VerificationReport(drifts, summed, alpha, paths, aux)


@dataclass(frozen=True)
class InvarianceResult:
    """Defect ``Delta(eps)`` of the first-order invariance condition for each ``eps``."""

    eps: tuple
    defects: tuple
    generator: str = ""
    #: fitted power of ``eps`` in ``eps * Delta(eps)`` minus one
    order: float = float("nan")
    invariant: bool = False

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "generator": self.generator,
            "eps": list(self.eps),
            "defects": list(self.defects),
            "order": None if np.isnan(self.order) else self.order,
            "invariant": self.invariant,
        }


#: defects below this count as exact invariance
EXACT_DEFECT = 1e-10


def default_eps(grid: Grid, tau: float = 1.0, targets=(1e-2, 5e-3)) -> tuple:
    """``eps`` values close to ``targets`` with ``eps * tau`` a positive multiple of ``h``."""
    scale = abs(tau) if tau != 0 else 1.0
    ks = [max(1, int(round(e * scale / grid.h))) for e in targets]
    if len(set(ks)) < len(ks):
        ks = [ks[-1] * 2 ** (len(ks) - 1 - i) for i in range(len(ks))]
    return tuple(k * grid.h / scale for k in ks)


def probe_paths(problem: ControlProblem, grid: Grid):
    """Deterministic smooth, nonzero test paths ``(q, u, p)`` for invariance checks."""
    s = (grid.nodes - grid.a) / (grid.b - grid.a)
    q = np.column_stack([problem.q_a[i] + (1.0 + 0.25 * i) * s + 0.1 * s**2 for i in range(problem.n)])
    u = np.column_stack([np.cos(2.0 * s + k) for k in range(problem.m)])
    p = np.column_stack([1.0 + 0.5 * (1.0 - s) + 0.2 * i for i in range(problem.n)])
    return SampledPath(grid, q, name="q"), SampledPath(grid, u, name="u"), SampledPath(grid, p, name="p")


def check_invariance(
    problem: ControlProblem,
    gen: Generators,
    grid: Grid,
    eps_list=None,
    paths=None,
) -> InvarianceResult:
    """Defect of ``[H - p . aD^alpha q](transformed) = [H - p . aD^alpha q]`` to first order.

    The transformation is ``t -> t + eps tau``, ``q -> q + eps xi``,
    ``u -> u + eps sigma``, ``p -> p + eps zeta``. ``tau`` must be constant and
    ``eps tau`` a multiple of ``h`` so that transformed nodes are grid nodes;
    otherwise :class:`UnsupportedGenerator` is raised. ``paths`` is a
    :class:`PontryaginTriple` or ``(q, u, p)`` tuple; by default
    :func:`probe_paths`. ``Delta(eps)`` is the sup over nodes ``1..N`` of the
    difference divided by ``eps``.
    """
    if paths is None:
        q, u, p = probe_paths(problem, grid)
    elif isinstance(paths, PontryaginTriple):
        q, u, p = paths.q, paths.u, paths.p
    else:
        q, u, p = paths
    if not (q.grid.same_mesh(grid) and u.grid.same_mesh(grid) and p.grid.same_mesh(grid)):
        raise GridMismatch("paths are not sampled on the requested grid")
    t = grid.nodes
    qv, uv, pv = q.values, u.values, p.values
    nodes = range(t.size)
    taus = np.array([float(gen.tau(t[j], qv[j], uv[j], pv[j])) for j in nodes])
    if not np.allclose(taus, taus[0], rtol=0.0, atol=1e-14):
        raise UnsupportedGenerator("only constant time translations keep the grid aligned")
    tau = float(taus[0])
    xi = np.array([np.atleast_1d(gen.xi(t[j], qv[j], uv[j], pv[j])) for j in nodes], dtype=float)
    sigma = np.array([np.atleast_1d(gen.sigma(t[j], qv[j], uv[j], pv[j])) for j in nodes], dtype=float)
    zeta = np.array([np.atleast_1d(gen.zeta(t[j], qv[j], uv[j], pv[j])) for j in nodes], dtype=float)
    eps_list = default_eps(grid, tau) if eps_list is None else tuple(float(e) for e in eps_list)
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")

    H = make_hamiltonian(problem)
    alpha = problem.alpha

    def density(tt, qq, uu, pp):
        d = left_rl_deriv(qq, alpha).values
        return np.array([H(tt[j], qq.values[j], uu[j], pp[j]) - float(np.dot(pp[j], d[j])) for j in range(1, tt.size)])

    base = density(t, q, uv, pv)
    defects = []
    for eps in eps_list:
        shift = eps * tau
        k = shift / grid.h
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise UnsupportedGenerator(f"eps*tau = {shift} is not a multiple of h = {grid.h}")
        g2 = grid.shifted(shift) if tau != 0 else grid
        q2 = SampledPath(g2, qv + eps * xi)
        moved = density(g2.nodes, q2, uv + eps * sigma, pv + eps * zeta)
        # dt-bar = (1 + eps * dtau/dt) dt = dt for constant tau
        defects.append(float(np.max(np.abs(moved - base))) / eps)
    return _verdict(tuple(eps_list), tuple(defects), gen.name)


def _verdict(eps, defects, name):
    if max(defects) <= EXACT_DEFECT:
        return InvarianceResult(eps, defects, name, order=float("inf"), invariant=True)
    if len(eps) < 2:
        return InvarianceResult(eps, defects, name)
    lo, hi = int(np.argmin(eps)), int(np.argmax(eps))
    with np.errstate(divide="ignore"):
        order = float(np.log(defects[hi] / defects[lo]) / np.log(eps[hi] / eps[lo]))
    # Delta(eps) -> 0 linearly: fitted order near one, not near zero
    return InvarianceResult(eps, defects, name, order=order, invariant=bool(order >= 0.5))
