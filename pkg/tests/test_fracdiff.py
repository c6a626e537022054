import numpy as np
import pytest
from scipy.special import gamma

from fracnoether import (
    Grid,
    GridMismatch,
    OrderOutOfRange,
    SampledPath,
    frac_pair_operator,
    gl_weights,
    left_rl_deriv,
    power_law_deriv,
    right_rl_deriv,
    rl_integral,
)
from fracnoether.fracdiff import operator_weights


def monomial(grid, ups, side="left"):
    s = grid.offsets if side == "left" else grid.offsets[::-1]
    return SampledPath(grid, s**ups)


def interior_error(approx, exact):
    sl = slice(1, approx.grid.N)
    return float(np.max(np.abs(approx.values[sl] - exact.values[sl])))


class TestGrid:
    def test_nodes_and_step(self):
        g = Grid(1.0, 3.0, 4)
        assert g.h == 0.5
        np.testing.assert_allclose(g.nodes, [1.0, 1.5, 2.0, 2.5, 3.0])

    @pytest.mark.parametrize("a,b,N", [(1.0, 1.0, 4), (0.0, 1.0, 1), (0.0, np.inf, 4), (0.0, 1.0, 2.5)])
    def test_rejects_bad_grids(self, a, b, N):
        with pytest.raises(ValueError):
            Grid(a, b, N)

    def test_shift_keeps_offsets(self):
        g = Grid(0.0, 1.0, 10)
        np.testing.assert_array_equal(g.shifted(0.3).offsets, g.offsets)


class TestSampledPath:
    def test_values_are_read_only(self):
        f = SampledPath(Grid(0, 1, 4), np.arange(5.0))
        assert f.values.shape == (5, 1)
        with pytest.raises(ValueError):
            f.values[0, 0] = 1.0

    def test_nonfinite_rejected_only_on_valid_range(self):
        g = Grid(0, 1, 4)
        v = np.array([np.inf, 1, 2, 3, 4.0])
        with pytest.raises(ValueError):
            SampledPath(g, v)
        assert SampledPath(g, v, validity_start=1).sup() == 4.0

    def test_reversal_maps_validity(self):
        f = SampledPath(Grid(0, 1, 4), np.arange(5.0), validity_start=1)
        r = f.reversed()
        assert (r.validity_start, r.validity_end) == (0, 4)
        np.testing.assert_array_equal(r.values[:, 0], [4, 3, 2, 1, 0])


class TestWeights:
    def test_binomial_signs(self):
        np.testing.assert_allclose(gl_weights(0.5, 3), [1.0, -0.5, -0.125, -0.0625])

    def test_integer_orders_are_finite_differences(self):
        w, s0, s1 = operator_weights(1.0, 6)
        np.testing.assert_array_equal(w, [1, -1, 0, 0, 0, 0, 0])
        assert not s0.any() and not s1.any()
        w, s0, s1 = operator_weights(0.0, 6)
        np.testing.assert_array_equal(w, [1, 0, 0, 0, 0, 0, 0])
        assert not s0.any() and not s1.any()

    def test_uncorrected_option(self):
        _, s0, s1 = operator_weights(0.5, 8, corrected=False)
        assert not s0.any() and not s1.any()


class TestPowerLawOracle:
    def test_constant_has_nonzero_derivative(self):
        g = Grid(0, 1, 8)
        d = power_law_deriv(0.5, 0.0, g)
        np.testing.assert_allclose(d.values[1:, 0], g.offsets[1:] ** -0.5 / gamma(0.5))

    def test_integer_order_kills_constants(self):
        assert power_law_deriv(1.0, 0.0, Grid(0, 1, 8)).sup() == 0.0

    def test_right_side_mirrors(self):
        g = Grid(0, 2, 8)
        left = power_law_deriv(0.3, 1.5, g)
        right = power_law_deriv(0.3, 1.5, g, side="right")
        np.testing.assert_allclose(right.values[:-1, 0], left.values[:0:-1, 0])


class TestLeftDerivative:
    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("ups", [0, 1])
    def test_exact_on_affine_data(self, p, ups):
        g = Grid(0, 1, 256)
        exact = power_law_deriv(p, ups, g)
        assert interior_error(left_rl_deriv(monomial(g, ups), p), exact) <= 1e-11 * exact.sup()

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_first_order_on_quadratic(self, p):
        errs = []
        for N in (256, 512):
            g = Grid(0, 1, N)
            errs.append(interior_error(left_rl_deriv(monomial(g, 2), p), power_law_deriv(p, 2, g)))
        assert errs[0] / errs[1] > 1.8

    def test_plain_sum_is_inconsistent_at_first_node(self):
        # without starting weights the relative error at t_1 does not shrink with h
        rel = []
        for N in (64, 1024):
            g = Grid(0, 1, N)
            d = left_rl_deriv(monomial(g, 0), 0.5, corrected=False)
            rel.append(abs(d.values[1, 0] / power_law_deriv(0.5, 0, g).values[1, 0] - 1))
        assert rel[1] > 0.05 and np.isclose(rel[0], rel[1])

    def test_shift_invariance(self):
        g = Grid(0, 1, 64)
        f = monomial(g, 2.0)
        moved = SampledPath(g.shifted(5.0), f.values)
        np.testing.assert_array_equal(left_rl_deriv(f, 0.4).values, left_rl_deriv(moved, 0.4).values)

    def test_flags_first_node(self):
        d = left_rl_deriv(monomial(Grid(0, 1, 8), 1), 0.5)
        assert d.validity_start == 1
        assert left_rl_deriv(monomial(Grid(0, 1, 8), 1), 0.0).validity_start == 0

    def test_order_range(self):
        f = monomial(Grid(0, 1, 8), 1)
        with pytest.raises(OrderOutOfRange):
            left_rl_deriv(f, 7.0)
        with pytest.raises(OrderOutOfRange):
            left_rl_deriv(f, -0.5)

    def test_vector_paths_act_componentwise(self):
        g = Grid(0, 1, 32)
        f = SampledPath(g, np.column_stack([g.offsets, g.offsets**2]))
        d = left_rl_deriv(f, 0.6)
        np.testing.assert_array_equal(d.component(1), left_rl_deriv(monomial(g, 2), 0.6).component(0))


class TestRightDerivative:
    @pytest.mark.parametrize("p", [0.3, 0.8])
    def test_matches_mirrored_oracle(self, p):
        g = Grid(0, 1, 512)
        d = right_rl_deriv(monomial(g, 1.0, side="right"), p)
        exact = power_law_deriv(p, 1.0, g, side="right")
        assert d.validity_end == g.N
        assert interior_error(d, exact) <= 1e-11

    def test_order_one_is_minus_forward_difference(self):
        g = Grid(0, 1, 16)
        f = SampledPath(g, np.sin(g.nodes))
        d = right_rl_deriv(f, 1.0)
        np.testing.assert_allclose(d.values[:-1, 0], -(np.diff(f.values[:, 0]) / g.h), rtol=0, atol=1e-14)


class TestIntegral:
    @pytest.mark.parametrize("q", [0.3, 1.0, 1.5])
    def test_affine_exact(self, q):
        g = Grid(0, 2, 128)
        I = rl_integral(monomial(g, 1), q)
        exact = power_law_deriv(-q, 1, g)
        np.testing.assert_allclose(I.values[:, 0], exact.values[:, 0], rtol=1e-11, atol=1e-14)

    def test_rejects_non_positive(self):
        with pytest.raises(OrderOutOfRange):
            rl_integral(monomial(Grid(0, 1, 8), 1), 0.0)


class TestPairOperator:
    def test_order_one_is_product_rule(self):
        errs = []
        for N in (200, 400):
            g = Grid(0, 1, N)
            f = SampledPath.from_function(g, np.sin)
            k = SampledPath.from_function(g, np.exp)
            D = frac_pair_operator(f, k, 1.0)
            exact = np.cos(g.nodes) * np.exp(g.nodes) + np.sin(g.nodes) * np.exp(g.nodes)
            errs.append(np.max(np.abs(D.values[1:-1, 0] - exact[1:-1])))
        assert errs[1] < 1e-2 and errs[0] / errs[1] > 1.8

    def test_sums_components(self):
        g = Grid(0, 1, 16)
        f = SampledPath(g, np.column_stack([g.nodes, 1 + g.nodes]))
        k = SampledPath(g, np.column_stack([g.nodes**2, np.ones(17)]))
        D = frac_pair_operator(f, k, 0.5)
        D0 = frac_pair_operator(SampledPath(g, f.component(0)), SampledPath(g, k.component(0)), 0.5)
        D1 = frac_pair_operator(SampledPath(g, f.component(1)), SampledPath(g, k.component(1)), 0.5)
        np.testing.assert_allclose(D.values, D0.values + D1.values)

    def test_grid_mismatch(self):
        f = monomial(Grid(0, 1, 8), 1)
        with pytest.raises(GridMismatch):
            frac_pair_operator(f, monomial(Grid(0, 1, 16), 1), 0.5)
