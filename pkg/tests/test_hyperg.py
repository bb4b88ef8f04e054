import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qradial import QContext
from qradial.asc import ASCParams, asc_eval_recurrence
from qradial.errors import DivisionByZero, NonConvergent
from qradial.hyperg import SpectralParameterL, phi_l, phi_l_grid, phi_series
from qradial.laplacian import lambda_of_l, lambda_of_z
from qradial.qcore import qpochhammer, qpochhammer_inf

from .strategies import contexts


class TestPhiSeries:
    def test_unit_upper_parameter_terminates(self):
        assert phi_series([1.0, 0.3], [0.2], 0.5, 0.7) == 1.0

    def test_zero_argument(self):
        assert phi_series([0.2, 0.3, 0.4], [0.5, 0.0], 0.5, 0.0) == 1.0

    def test_terminating_two_terms(self):
        # 1phi0(q^-2; -; q^2, q^{4l+2(N-1)}) with l = 1, N = 3 stops after two terms
        q = 0.5
        u, z = q**-2, q**8
        expected = 1 + (1 - u) / (1 - q**2) * z
        assert phi_series([u], [], q**2, z) == pytest.approx(expected, rel=1e-15)

    @given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(0.1, 0.9))
    def test_q_binomial_theorem(self, a, z, base):
        # 1phi0(a; -; base, z) = (a z; base)_inf / (z; base)_inf for |z| < 1
        lhs = phi_series([a], [], base, z)
        rhs = qpochhammer_inf(a * z, base) / qpochhammer_inf(z, base)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_q_gauss_sum(self):
        # 2phi1(a, b; c; p, c/(ab)) = (c/a, c/b; p)_inf / (c, c/(ab); p)_inf
        a, b, c, p = 0.8, 0.9, 0.5, 0.6
        lhs = phi_series([a, b], [c], p, c / (a * b))
        rhs = qpochhammer_inf(c / a, p) * qpochhammer_inf(c / b, p) / (qpochhammer_inf(c, p) * qpochhammer_inf(c / (a * b), p))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_lower_parameter_hitting_pole(self):
        with pytest.raises(DivisionByZero):
            phi_series([0.3], [4.0], 0.5, 0.1)

    def test_divergent_series(self):
        with pytest.raises(NonConvergent):
            phi_series([0.3], [], 0.5, 1.5, max_terms=200)


class TestPhiL:
    @given(contexts(), st.floats(-3, 3))
    def test_value_at_origin(self, ctx, l):
        assert phi_l(0, l, ctx) == 1.0

    @given(contexts(), st.integers(0, 30))
    def test_zero_parameter_is_constant(self, ctx, k):
        assert phi_l(k, 0.0, ctx) == pytest.approx(1.0, abs=1e-15)

    def test_real_l_gives_float(self, ctx12):
        assert isinstance(phi_l(5, 0.7, ctx12), float)

    @pytest.mark.parametrize("k", [0, 1, 2, 5, 9])
    def test_bridge_to_al_salam_chihara(self, k):
        """Phi_l(q^{-2k}) = q^{k(N-1)} / (q^{2n}; q^2)_k Q_k(z)."""
        ctx = QContext(0.5, 1, 2)
        q, n, N = ctx.q, ctx.n, ctx.N
        lp = SpectralParameterL(1.0, ctx)
        qk = asc_eval_recurrence(k, lp.z.real, ASCParams.from_context(ctx))
        expected = q ** (k * (N - 1)) / qpochhammer(q ** (2 * n), q * q, k) * qk
        assert phi_l(k, 1.0, ctx) == pytest.approx(expected, rel=1e-12)

    @given(contexts(), st.floats(-2.5, 2.5), st.integers(0, 25))
    def test_reflection_symmetry(self, ctx, l, k):
        reflected = -l - (ctx.N - 1)
        a, b = phi_l(k, l, ctx), phi_l(k, reflected, ctx)
        assert a == pytest.approx(b, rel=1e-10, abs=1e-12)

    def test_grid_matches_pointwise(self):
        ctx = QContext(0.3, 2, 3)
        for l in (0.7, -1.2, SpectralParameterL.critical(1.1, ctx)):
            grid = phi_l_grid(25, l, ctx)
            for k in (0, 3, 11, 25):
                assert grid[k] == pytest.approx(phi_l(k, l, ctx), rel=1e-12, abs=1e-300)

    def test_small_q_needs_extra_precision(self):
        # Terms reach q^{-k^2} ~ 1e21 at q = 0.3, k = 40 while the sum is O(x^l)
        ctx = QContext(0.3, 2, 4)
        l = complex(-2.5, 1.3)
        grid = phi_l_grid(41, l, ctx)
        assert grid[41] == pytest.approx(phi_l(41, l, ctx), rel=1e-12)
        assert np.isfinite(grid).all()

    def test_critical_line_values_are_real(self):
        ctx = QContext(0.5, 1, 3)
        lp = SpectralParameterL.critical(0.8, ctx)
        vals = phi_l_grid(20, lp, ctx)
        assert np.abs(vals.imag).max() < 1e-12 * np.abs(vals).max()


class TestSpectralParameter:
    def test_critical_point(self, ctx12):
        lp = SpectralParameterL.critical(0.9, ctx12)
        assert lp.l.real == pytest.approx(-(ctx12.N - 1) / 2)
        assert lp.z == pytest.approx(math.cos(0.9))
        assert lp.e_plus == pytest.approx(cmath.exp(0.9j))

    @given(contexts(), st.floats(-0.99, 0.99))
    def test_from_z_inside_band(self, ctx, z):
        assert SpectralParameterL.from_z(z, ctx).z == pytest.approx(z, abs=1e-12)

    @given(contexts(), st.floats(1.01, 20.0))
    def test_from_z_outside_band(self, ctx, z):
        lp = SpectralParameterL.from_z(z, ctx)
        assert lp.z.real == pytest.approx(z, rel=1e-12)
        assert abs(lp.e_plus) <= 1 + 1e-12

    @given(contexts(), st.floats(0, math.pi))
    def test_eigenvalue_change_of_variable(self, ctx, theta):
        lp = SpectralParameterL.critical(theta, ctx)
        assert lambda_of_l(lp.l, ctx) == pytest.approx(lambda_of_z(math.cos(theta), ctx), rel=1e-12, abs=1e-13)

    def test_reflection_keeps_z(self, ctx12):
        lp = SpectralParameterL(0.4 + 0.3j, ctx12)
        assert lp.reflected().z == pytest.approx(lp.z)
