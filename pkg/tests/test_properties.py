import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fracnoether import Grid, SampledPath, frac_pair_operator, get_problem, left_rl_deriv, right_rl_deriv, rl_integral
from fracnoether.noether import invariant_value

orders = st.floats(0.05, 0.95)
finite = st.floats(-5, 5)


def sampled(grid, coeffs):
    t = grid.offsets
    return SampledPath(grid, sum(c * t**k for k, c in enumerate(coeffs)))


@settings(max_examples=40, deadline=None)
@given(p=orders, a=finite, b=finite, N=st.integers(4, 200))
def test_linearity(p, a, b, N):
    g = Grid(0.0, 1.0, N)
    f, k = sampled(g, [1.0, 2.0, -1.0]), sampled(g, [0.5, 0.0, 3.0, 1.0])
    lhs = left_rl_deriv(f.with_values(a * f.values + b * k.values), p).values
    rhs = a * left_rl_deriv(f, p).values + b * left_rl_deriv(k, p).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-10 * (1 + np.abs(rhs).max()))


@settings(max_examples=30, deadline=None)
@given(p=orders, c0=finite, c1=finite, N=st.integers(2, 300), a=st.floats(-3, 3))
def test_affine_data_is_exact(p, c0, c1, N, a):
    from scipy.special import gamma

    g = Grid(a, a + 1.0, N)
    f = sampled(g, [c0, c1])
    s = g.offsets[1:]
    exact = c0 * s**-p / gamma(1 - p) + c1 * s ** (1 - p) / gamma(2 - p)
    np.testing.assert_allclose(left_rl_deriv(f, p).values[1:, 0], exact, rtol=1e-9, atol=1e-9 * np.abs(exact).max())


@settings(max_examples=30, deadline=None)
@given(p=orders, N=st.integers(4, 100), coeffs=st.lists(finite, min_size=1, max_size=4))
def test_right_is_mirrored_left(p, N, coeffs):
    g = Grid(0.0, 1.0, N)
    f = sampled(g, coeffs)
    mirror = f.with_values(f.values[::-1])
    np.testing.assert_array_equal(right_rl_deriv(f, p).values, left_rl_deriv(mirror, p).values[::-1])


@settings(max_examples=30, deadline=None)
@given(q=st.floats(0.1, 2.0), N=st.integers(4, 100))
def test_integral_vanishes_at_start(q, N):
    g = Grid(0.0, 1.0, N)
    assert rl_integral(sampled(g, [1.0, -2.0, 0.5]), q).values[0, 0] == 0.0


@settings(max_examples=30, deadline=None)
@given(p=orders, N=st.integers(4, 100), coeffs=st.lists(finite, min_size=1, max_size=4))
def test_pair_operator_vanishes_on_zero_factor(p, N, coeffs):
    g = Grid(0.0, 1.0, N)
    f = sampled(g, coeffs)
    zero = f.with_values(np.zeros_like(f.values))
    assert not frac_pair_operator(f, zero, p).values.any()
    assert not frac_pair_operator(zero, f, p).values.any()


@settings(max_examples=100, deadline=None)
@given(q=finite, u=finite, p=finite, alpha=st.sampled_from([0.5, 0.6, 0.75, 1.0]))
def test_example2_energy_identity(q, u, p, alpha):
    pr = get_problem("example2", alpha)
    expected = 0.5 * (q * q + u * u) + alpha * p * (-q + u)
    assert abs(invariant_value(pr, 0.0, [q], [u], [p]) - expected) <= 1e-12 * (1 + abs(expected))
