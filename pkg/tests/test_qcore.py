import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qradial import GridFunction, QContext, RadialGridPoint, ValidationError
from qradial.qcore import (
    bminus,
    bplus,
    qgamma,
    qintegral_radial,
    qpascal_psi,
    qpochhammer,
    qpochhammer_inf,
)
from qradial.verify import lattice_psi

from .strategies import contexts


class TestQContext:
    @pytest.mark.parametrize("q,n,m", [(0.0, 1, 2), (1.0, 1, 2), (-0.5, 1, 2), (0.5, 0, 2), (0.5, 1, 1), (0.5, 1.5, 2)])
    def test_rejects_invalid(self, q, n, m):
        with pytest.raises(ValidationError):
            QContext(q, n, m)

    def test_constants(self):
        ctx = QContext(0.5, 2, 3)
        assert ctx.N == 5
        assert ctx.const1 == pytest.approx((4 - 1) * (16 - 1))
        assert ctx.const2 == pytest.approx(1 / ((4 - 1) * (4 - 1)))
        assert ctx.x(3) == pytest.approx(64.0)

    def test_grid_point(self, ctx12):
        assert RadialGridPoint(2).x(ctx12) == pytest.approx(16.0)
        with pytest.raises(ValidationError):
            RadialGridPoint(-1)


class TestPochhammer:
    def test_empty_product(self):
        assert qpochhammer(0.7, 0.5, 0) == 1.0

    def test_two_factors(self):
        assert qpochhammer(0.5, 0.25, 2) == pytest.approx(0.4375, abs=1e-15)

    @pytest.mark.parametrize("j", [1, 2, 7])
    def test_vanishing_first_factor(self, j):
        assert qpochhammer(1.0, 0.3, j) == 0.0

    def test_complex_argument(self):
        a = 0.3 + 0.4j
        assert qpochhammer(a, 0.5, 2) == pytest.approx((1 - a) * (1 - 0.5 * a))

    def test_infinite_trivial(self):
        assert qpochhammer_inf(0.0, 0.5, 1e-16) == 1.0

    def test_infinite_matches_long_finite_product(self):
        assert qpochhammer_inf(0.25, 0.25, 1e-16) == pytest.approx(qpochhammer(0.25, 0.25, 30), rel=1e-14)

    def test_infinite_consistent_with_gamma(self):
        # Gamma_p(2) = (p; p)_inf / ((1 - p) (p^2; p)_inf) = 1
        p = 0.25
        via_products = qpochhammer_inf(p, p, 1e-16) / ((1 - p) * qpochhammer_inf(p * p, p, 1e-16))
        assert via_products == pytest.approx(1.0, abs=1e-15)
        assert qgamma(2.0, p) == pytest.approx(via_products, abs=1e-15)

    def test_reported_tail_is_small(self):
        val, tail = qpochhammer_inf(0.9, 0.7, 1e-16, return_tail=True)
        assert 0 <= tail <= 1e-15

    @given(st.floats(-0.95, 0.95), st.floats(0.05, 0.95), st.integers(0, 30))
    def test_splitting(self, a, base, k):
        # (a; b)_inf = (a; b)_k (a b^k; b)_inf
        lhs = qpochhammer_inf(a, base, 1e-16)
        rhs = qpochhammer(a, base, k) * qpochhammer_inf(a * base**k, base, 1e-16)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


class TestQGamma:
    @pytest.mark.parametrize("x,base,expected", [(1, 0.25, 1.0), (2, 0.25, 1.0), (3, 0.5, 1.5)])
    def test_small_integers(self, x, base, expected):
        assert qgamma(x, base) == pytest.approx(expected, rel=1e-14)

    @given(st.floats(0.1, 6.0), st.floats(0.1, 0.9))
    def test_functional_equation(self, x, base):
        # Gamma_q(x + 1) = [x]_q Gamma_q(x) with [x]_q = (1 - q^x) / (1 - q)
        bracket = (1 - base**x) / (1 - base)
        assert qgamma(x + 1, base) == pytest.approx(bracket * qgamma(x, base), rel=1e-12)


class TestQPascal:
    def test_boundary_row(self, ctx12):
        assert qpascal_psi(0, 5, ctx12) == 1.0

    def test_first_column(self):
        ctx = QContext(0.5, 1, 2)
        assert qpascal_psi(3, 1, ctx) == pytest.approx(85.0, rel=1e-14)

    def test_brute_force_spot_value(self):
        ctx = QContext(0.6, 1, 2)
        assert qpascal_psi(2, 2, ctx) == pytest.approx(lattice_psi(2, 2, 0.6), rel=1e-13)

    @given(st.integers(1, 6), st.integers(1, 6), st.floats(0.2, 0.9))
    def test_pascal_recurrence(self, j, k, q):
        ctx = QContext(q, 1, 2)
        lhs = qpascal_psi(j, k, ctx)
        rhs = q ** (-2 * k) * qpascal_psi(j - 1, k, ctx) + qpascal_psi(j, k - 1, ctx)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_lattice_weights_run_from_k_down_to_one(self):
        """The lattice sum carries weights q^{-2k i_1 - ... - 2 i_k}.

        The form with weights 2(k-1), ..., 2, 0 would make Psi(j, 1) = j + 1,
        contradicting the boundary value (1 - q^{-2(j+1)}) / (1 - q^{-2}).
        """
        q, j = 0.5, 3
        ctx = QContext(q, 1, 2)
        shifted = sum(q ** (-2 * (1 - 1) * i) for i in range(j + 1))
        assert shifted == j + 1
        assert lattice_psi(j, 1, q) == pytest.approx((1 - q ** (-2 * (j + 1))) / (1 - q**-2))
        assert lattice_psi(j, 1, q) == pytest.approx(qpascal_psi(j, 1, ctx))

    def test_rejects_negative(self, ctx12):
        with pytest.raises(ValidationError):
            qpascal_psi(-1, 2, ctx12)


class TestJacksonIntegral:
    def test_indicator_zero(self, ctx12):
        assert qintegral_radial(GridFunction.indicator(0), ctx12) == pytest.approx(3.0)

    def test_indicator_one(self, ctx12):
        assert qintegral_radial(GridFunction.indicator(1), ctx12) == pytest.approx(12.0)

    def test_zero(self, ctx12):
        assert qintegral_radial(GridFunction(), ctx12) == 0.0


class TestQDerivatives:
    def test_constants_are_killed(self, ctx12):
        f = GridFunction({k: 2.5 for k in range(6)})
        for k in range(1, 5):
            assert bminus(f.values, k, ctx12) == 0.0
            assert bplus(f.values, k, ctx12) == 0.0

    def test_identity_function(self, ctx12):
        f = GridFunction({k: ctx12.x(k) for k in range(4)})
        assert bminus(f.values, 0, ctx12) == pytest.approx(1.0)

    def test_indicator_difference_quotient(self, ctx12):
        # (f(q^2 x) - f(x)) / (q^2 x - x) at x = q^-2 with f = f_0: (1 - 0) / (1 - 4)
        assert bplus(GridFunction.indicator(0).values, 1, ctx12) == pytest.approx(-1 / 3)
        # forward difference at x = 1 into x = q^-2: (0 - 1) / (4 - 1)
        assert bminus(GridFunction.indicator(0).values, 0, ctx12) == pytest.approx(-1 / 3)

    def test_backward_step_of_indicator(self, ctx12):
        # (0 - 1) / (16 - 4): the unit value sits at x = 4, so f is the indicator of k = 1
        assert bminus(GridFunction.indicator(1).values, 1, ctx12) == pytest.approx(-1 / 12)
        assert bminus(GridFunction.indicator(0).values, 1, ctx12) == 0.0

    def test_bplus_at_origin_uses_zero_off_grid(self, ctx12):
        f = GridFunction.indicator(0)
        assert bplus(f.values, 0, ctx12) == pytest.approx(-1 / (0.25 - 1))


class TestGridFunction:
    def test_rejects_bad_keys(self):
        for bad in ({-1: 1.0}, {1.5: 1.0}, {True: 1.0}):
            with pytest.raises(ValidationError):
                GridFunction(bad)

    def test_arithmetic(self):
        f = GridFunction({0: 1.0, 2: 3.0})
        g = GridFunction({2: 1.0, 3: 1j})
        assert (f + g).values == {0: 1.0, 2: 4.0, 3: 1j}
        assert (f - g)(3) == -1j
        assert (f * g).values == {2: 3.0}
        assert (2 * f)(2) == 6.0
        assert (-f)(0) == -1.0
        assert g.conj()(3) == -1j

    def test_array_round_trip(self):
        arr = np.array([0.0, 1.5, 0.0, -2.0])
        f = GridFunction.from_array(arr)
        assert f.support == [1, 3]
        assert f.kmax == 3
        np.testing.assert_array_equal(f.to_array(), arr)
        assert GridFunction().kmax == -1

    def test_real_and_complex(self):
        assert GridFunction({0: 1.0}).is_real
        assert GridFunction({0: 1 + 0j}).is_real  # zero imaginary part is dropped
        assert not GridFunction({0: 1 + 1j}).is_real


@given(contexts())
def test_const_box_is_positive_and_at_most_one(ctx):
    assert 0 < ctx.const_box < 1
    assert math.isclose(ctx.const_box, ctx.q ** (2 * ctx.n) * (1 - ctx.q**2) / (1 - ctx.q ** (2 * (ctx.N - 1))))
