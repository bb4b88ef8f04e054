import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qradial import NonConvergent, QContext
from qradial.asc import (
    ASCParams,
    asc_eval_hypergeometric,
    asc_eval_recurrence,
    asc_mass_table,
    asc_table,
    asc_weight,
    build_spectral_measure,
    measure_quadrature,
)
from qradial.verify import ALL_CONFIGS, gram_matrix

from .strategies import contexts


def _params(q, n, m):
    return ASCParams.from_context(QContext(q, n, m))


class TestPolynomials:
    @given(contexts(), st.floats(-1, 1))
    def test_degree_zero_and_one(self, ctx, z):
        p = ASCParams.from_context(ctx)
        assert asc_eval_recurrence(0, z, p) == 1.0
        assert asc_eval_recurrence(1, z, p) == pytest.approx(2 * z - (p.a + p.b), abs=1e-12)

    def test_routes_agree_inside_band(self):
        p = _params(0.5, 1, 3)
        assert asc_eval_hypergeometric(5, 0.3, p) == pytest.approx(asc_eval_recurrence(5, 0.3, p), rel=1e-12)

    def test_routes_agree_at_endpoint(self):
        p = _params(0.5, 2, 2)
        assert asc_eval_hypergeometric(2, 1.0, p) == pytest.approx(asc_eval_recurrence(2, 1.0, p), rel=1e-12)

    def test_routes_agree_at_mass_point(self):
        p = _params(0.5, 1, 3)
        z0 = p.mass_abscissa(0)
        hyp = asc_eval_hypergeometric(3, z0, p)
        assert abs(hyp.imag) < 1e-12 * abs(hyp)
        assert hyp.real == pytest.approx(asc_eval_recurrence(3, z0, p), rel=1e-12)

    def test_degree_zero_hypergeometric(self):
        assert asc_eval_hypergeometric(0, 0.1, _params(0.7, 1, 2)) == 1.0

    @given(contexts(q=st.floats(0.2, 0.8)), st.integers(0, 10), st.floats(-1, 1))
    def test_routes_agree_everywhere(self, ctx, k, z):
        p = ASCParams.from_context(ctx)
        rec = asc_eval_recurrence(k, z, p)
        scale = max(1.0, float(np.abs(asc_table(k, np.linspace(-1, 1, 41), p)).max()))
        assert abs(asc_eval_hypergeometric(k, z, p) - rec) <= 1e-11 * scale

    def test_table_is_vectorized(self):
        p = _params(0.5, 2, 3)
        z = np.linspace(-1, 1, 7).reshape(7, 1)
        tab = asc_table(4, z, p)
        assert tab.shape == (5, 7, 1)
        assert tab[3, 2, 0] == pytest.approx(asc_eval_recurrence(3, z[2, 0], p))


class TestMasses:
    @pytest.mark.parametrize("n,m", ALL_CONFIGS)
    def test_masses_exist_exactly_when_m_exceeds_n_by_two(self, n, m):
        p = _params(0.5, n, m)
        assert (p.n_masses > 0) == (n <= m - 2)

    def test_equal_ranks_have_no_masses(self):
        assert build_spectral_measure(QContext(0.5, 2, 2)).mass_points == ()

    def test_single_mass(self):
        measure = build_spectral_measure(QContext(0.5, 1, 3))
        assert len(measure.mass_points) == 1
        z0, w0 = measure.mass_points[0]
        a = measure.params.a
        assert a == pytest.approx(2.0)
        assert z0 == pytest.approx((a + 1 / a) / 2)
        assert 0 < w0 < 1

    def test_mass_count_grows_with_the_gap(self):
        assert _params(0.5, 1, 5).n_masses == 2  # a = q^{-3}: a q^{2k} > 1 for k = 0, 1

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
    def test_mass_table_satisfies_recurrence(self, q):
        # Residual of 2z Q_i = Q_{i+1} + p^i (a+b) Q_i + (1-p^i)(1-ab p^{i-1}) Q_{i-1},
        # scaled by the size of its terms. Q_j near z_k is too ill-conditioned in z
        # for a comparison against either route evaluated at the rounded abscissa.
        params = _params(q, 1, 5)
        a, b, p, ab = params.a, params.b, params.base, params.ab
        tab = asc_mass_table(10, params)
        for k in range(params.n_masses):
            z, Q = params.mass_abscissa(k), tab[k]
            for i in range(1, 10):
                terms = [2 * z * Q[i], -Q[i + 1], -(p**i) * (a + b) * Q[i], -(1 - p**i) * (1 - ab * p ** (i - 1)) * Q[i - 1]]
                assert abs(sum(terms)) <= 1e-13 * sum(map(abs, terms))

    def test_forward_recurrence_is_unreliable_at_masses(self):
        # Q_j(z_k) decays like the minimal solution, so the forward recurrence
        # is swamped by the dominant one; this is why masses use the exact series.
        p = _params(0.3, 1, 5)
        fwd = asc_table(8, np.array(p.mass_abscissa(0)), p)
        assert abs(fwd[8] / asc_mass_table(8, p)[0, 8]) > 1e3


class TestMeasure:
    @pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7, 0.9])
    @pytest.mark.parametrize("n,m", ALL_CONFIGS)
    def test_total_mass(self, q, n, m):
        measure = build_spectral_measure(QContext(q, n, m))
        assert measure_quadrature(lambda z: np.ones_like(z), measure) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n,m", [(1, 3), (2, 2), (1, 2)])
    def test_first_orthonormal_polynomials(self, n, m):
        G = gram_matrix(QContext(0.5, n, m), 1)
        np.testing.assert_allclose(G, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_gram_matrix_is_identity(self, q):
        for n, m in ALL_CONFIGS:
            G = gram_matrix(QContext(q, n, m), 12)
            assert np.abs(G - np.eye(13)).max() < 1e-10, (n, m)

    @given(contexts(), st.floats(-0.999, 0.999))
    def test_weight_is_positive(self, ctx, z):
        assert asc_weight(np.array(z), ASCParams.from_context(ctx)) > 0

    def test_density_consistency(self):
        measure = build_spectral_measure(QContext(0.5, 1, 2))
        theta = 0.7
        dz = measure.continuous_weight(math.cos(theta)) * math.sin(theta)
        assert dz == pytest.approx(measure.density_theta(theta))

    def test_nonconvergence_is_reported(self):
        measure = build_spectral_measure(QContext(0.5, 1, 2))
        with pytest.raises(NonConvergent):
            measure_quadrature(lambda z: np.sign(z - 0.123), measure, tol=1e-15, max_points=2**10)

    def test_vector_valued_integrand(self):
        measure = build_spectral_measure(QContext(0.5, 1, 4))
        out = measure_quadrature(lambda z: np.stack([np.ones_like(z), z], axis=1), measure)
        assert out.shape == (2,)
        assert out[0] == pytest.approx(1.0)
