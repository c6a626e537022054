r"""Riemann-Liouville fractional derivatives and integrals on uniform grids.

The left derivative of order :math:`p` is approximated by the
Grünwald-Letnikov sum

.. math::

    {}_aD_t^p f(t_j) \approx h^{-p} \sum_{k=0}^{j} w_k f(t_{j-k}),
    \qquad w_k = (-1)^k \binom{p}{k},

augmented (by default) with two starting weights that make the sum exact
for constants and for :math:`t - a`. The starting weights vanish identically
at integer orders, so order one is the backward difference and order zero
the identity. Right derivatives are computed by time reversal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gamma, rgamma

from .errors import GridMismatch, OrderOutOfRange

#: Largest order magnitude accepted by the operator layer.
MAX_ORDER = 5.0


@dataclass(frozen=True)
class Grid:
    """Uniform mesh ``t_j = a + j h`` on ``[a, b]`` with ``N`` intervals."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise ValueError(f"need finite a < b, got [{self.a}, {self.b}]")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"need an integer N >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.N + 1)

    @property
    def offsets(self) -> np.ndarray:
        """``t_j - a`` computed as ``j h`` (independent of ``a``)."""
        return self.h * np.arange(self.N + 1)

    def shifted(self, eps: float) -> Grid:
        return Grid(self.a + eps, self.b + eps, self.N)

    def same_mesh(self, other: Grid) -> bool:
        return self.N == other.N and np.isclose(self.a, other.a) and np.isclose(self.b, other.b)


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A ``dim``-vector function sampled at the ``N + 1`` nodes of a grid.

    Nodes outside ``validity_start <= j < validity_end`` carry values that are
    reported but must not enter error norms (e.g. the weakly singular value of
    a left derivative at ``t = a``).
    """

    grid: Grid
    values: np.ndarray
    validity_start: int = 0
    validity_end: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != self.grid.N + 1:
            raise ValueError(f"values must have {self.grid.N + 1} rows, got shape {v.shape}")
        end = self.grid.N + 1 if self.validity_end is None else int(self.validity_end)
        if self.validity_start not in (0, 1) or not (self.validity_start < end <= self.grid.N + 1):
            raise ValueError("bad validity range")
        if not np.all(np.isfinite(v[self.validity_start:end])):
            raise ValueError("path values must be finite on the valid range")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "validity_end", end)

    @classmethod
    def from_function(cls, grid: Grid, f, name: str = "") -> SampledPath:
        """Sample a vectorized ``f(t)`` on the grid nodes."""
        return cls(grid, np.asarray(f(grid.nodes), dtype=float), name=name)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def valid(self) -> slice:
        return slice(self.validity_start, self.validity_end)

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def component(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def with_values(self, values, validity_start=None, validity_end=None, name=None) -> SampledPath:
        return SampledPath(
            self.grid,
            values,
            self.validity_start if validity_start is None else validity_start,
            self.validity_end if validity_end is None else validity_end,
            self.name if name is None else name,
        )

    def reversed(self) -> SampledPath:
        N = self.grid.N
        return SampledPath(
            self.grid,
            self.values[::-1],
            validity_start=N + 1 - self.validity_end,
            validity_end=N + 1 - self.validity_start,
            name=self.name,
        )

    def sup(self) -> float:
        """Sup-norm over the valid nodes."""
        return float(np.max(np.abs(self.values[self.valid])))


def _check_order(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or abs(p) > MAX_ORDER:
        raise OrderOutOfRange(f"order {p} outside [-{MAX_ORDER}, {MAX_ORDER}]")
    return p


def gl_weights(p: float, K: int) -> np.ndarray:
    """Grünwald-Letnikov weights ``w_0..w_K``, i.e. ``(-1)^k binom(p, k)``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    k = np.arange(1, K + 1, dtype=float)
    return np.cumprod(np.concatenate(([1.0], 1.0 - (p + 1.0) / k)))


@lru_cache(maxsize=64)
def _starting_weights(p: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``s0_j, s1_j`` multiplying ``f_0`` and ``f_1`` in the corrected sum.

    They are chosen so that ``h^{-p} (sum_k w_k f_{j-k} + s0_j f_0 + s1_j f_1)``
    is exact for ``f = 1`` and ``f = t - a`` at every node ``j >= 1`` (and at
    ``j = 0`` for integrals). Independent of ``h``.
    """
    w = gl_weights(p, N)
    c0 = np.cumsum(w)
    c1 = np.concatenate(([0.0], np.cumsum(c0)[:-1]))
    j = np.arange(N + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        e0 = np.power(j, -p) * rgamma(1.0 - p) if p != 0 else np.ones_like(j)
        e1 = np.power(j, 1.0 - p) * rgamma(2.0 - p)
    s1 = e1 - c1
    s0 = e0 - c0 - s1
    if p > 0:
        # exact values are singular at t = a; leave the flagged node alone
        s0[0] = s1[0] = 0.0
    s0.setflags(write=False)
    s1.setflags(write=False)
    return s0, s1


def operator_weights(p: float, N: int, corrected: bool = True):
    """Return ``(w, s0, s1)`` for order ``p`` on ``N`` intervals.

    ``s0``/``s1`` are zero arrays when ``corrected`` is false. Exposed for
    node-by-node marching in the solver.
    """
    w = gl_weights(p, N)
    if corrected:
        s0, s1 = _starting_weights(float(p), int(N))
    else:
        s0 = s1 = np.zeros(N + 1)
    return w, s0, s1


def _left_apply(values: np.ndarray, p: float, h: float, corrected: bool) -> np.ndarray:
    N = values.shape[0] - 1
    w, s0, s1 = operator_weights(p, N, corrected)
    out = np.empty_like(values)
    for i in range(values.shape[1]):
        out[:, i] = np.convolve(w, values[:, i])[: N + 1]
    if corrected:
        out += s0[:, None] * values[0] + s1[:, None] * values[1]
    return out / h**p


def left_rl_deriv(f: SampledPath, p: float, corrected: bool = True) -> SampledPath:
    """Left Riemann-Liouville derivative of order ``p >= 0``.

    The value at ``t_0`` is reported but flagged (``validity_start = 1``).
    """
    p = _check_order(p)
    if p < 0:
        raise OrderOutOfRange("use rl_integral for negative orders")
    g = _left_apply(f.values, p, f.grid.h, corrected)
    start = 1 if p > 0 else f.validity_start
    return SampledPath(f.grid, g, validity_start=start, validity_end=f.validity_end)


def right_rl_deriv(f: SampledPath, p: float, corrected: bool = True) -> SampledPath:
    """Right Riemann-Liouville derivative of order ``p >= 0`` (valid up to ``t_{N-1}``)."""
    return left_rl_deriv(f.reversed(), p, corrected).reversed()


def rl_integral(f: SampledPath, q: float, corrected: bool = True) -> SampledPath:
    """Left Riemann-Liouville integral of order ``q > 0``."""
    q = _check_order(q)
    if q <= 0:
        raise OrderOutOfRange(f"integral order must be positive, got {q}")
    g = _left_apply(f.values, -q, f.grid.h, corrected)
    return SampledPath(f.grid, g, validity_start=f.validity_start, validity_end=f.validity_end)


def power_law_deriv(p: float, upsilon: float, grid: Grid, side: str = "left") -> SampledPath:
    r"""Exact derivative of ``(t - a)^upsilon`` (or ``(b - t)^upsilon`` for ``side="right"``).

    ``Gamma(upsilon + 1) / Gamma(upsilon - p + 1) * (t - a)^(upsilon - p)``, with
    ``1/Gamma`` at non-positive integers taken as zero.
    """
    if upsilon <= -1:
        raise ValueError(f"need upsilon > -1, got {upsilon}")
    p = _check_order(p)
    s = grid.offsets if side == "left" else grid.offsets[::-1]
    coef = gamma(upsilon + 1.0) * rgamma(upsilon - p + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = coef * np.power(s, upsilon - p) if coef != 0 else np.zeros_like(s)
    if side == "left":
        return SampledPath(grid, vals, validity_start=1)
    return SampledPath(grid, vals, validity_end=grid.N)


def frac_pair_operator(f: SampledPath, g: SampledPath, alpha: float, corrected: bool = True) -> SampledPath:
    r"""``f * aD^alpha g - g * tD_b^alpha f``, summed over components.

    At ``alpha = 1`` this is the product-rule derivative ``d(fg)/dt``. Valid on
    the nodes ``1..N-1``.
    """
    if not f.grid.same_mesh(g.grid):
        raise GridMismatch("paths live on different grids")
    if f.dim != g.dim:
        raise GridMismatch(f"dimension mismatch: {f.dim} vs {g.dim}")
    dg = left_rl_deriv(g, alpha, corrected).values
    df = right_rl_deriv(f, alpha, corrected).values
    vals = np.sum(f.values * dg - g.values * df, axis=1)
    N = f.grid.N
    return SampledPath(f.grid, vals, validity_start=1, validity_end=N)
