import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qradial import CapacityError, GridFunction, QContext, ValidationError
from qradial.radial import radial_integral, random_grid_function
from qradial.repsim import (
    _relative_residual,
    build_rep,
    check_relations,
    radial_equivalence_check,
    trace_integral,
    trace_tail_bound,
)

from .strategies import grid_functions

REP_CONFIGS = [(1, 2), (1, 3), (2, 2)]


@pytest.fixture(scope="module")
def reps():
    return {(q, n, m): build_rep(12, QContext(q, n, m)) for q in (0.3, 0.5, 0.7) for n, m in REP_CONFIGS}


def _column(rep, ind):
    """Index of basis vector e(ind) in the window."""
    return int(np.flatnonzero(np.all(rep.indices == np.array(ind), axis=1))[0])


class TestWindow:
    def test_shape(self):
        rep = build_rep(5, QContext(0.5, 1, 3))
        assert rep.size == 6 * 5 * 5
        assert rep.indices[:, 0].min() == -5 and rep.indices[:, 0].max() == 0
        assert rep.indices[:, 1:].min() == 1 and rep.indices[:, 1:].max() == 5
        assert len(rep.T) == len(rep.Tstar) == 4

    def test_interior_excludes_only_the_outer_shell(self):
        rep = build_rep(6, QContext(0.5, 1, 3))
        inner = rep.indices[rep.interior]
        assert inner[:, 0].min() == -5
        assert inner[:, 1:].max() == 5
        # the inner edges (i_j = 0 for j <= n, i_j = 1 for j > n) stay: there a step out has coefficient 0
        assert inner[:, 0].max() == 0 and inner[:, 1:].min() == 1

    def test_capacity(self):
        with pytest.raises(CapacityError):
            build_rep(50, QContext(0.5, 2, 2), capacity=1000)

    def test_minimum_window(self):
        with pytest.raises(ValidationError):
            build_rep(1, QContext(0.5, 1, 2))


class TestCoefficientAudit:
    """Boundary cases of the generator matrix elements, where sign and case slips hide."""

    def test_lowering_never_vanishes_for_small_j(self):
        q = 0.5
        rep = build_rep(6, QContext(q, 1, 2))
        col = _column(rep, (0, 3))
        target = _column(rep, (-1, 3))
        assert rep.T[0][target, col] == pytest.approx(np.sqrt(q**-2 - 1))

    def test_raising_vanishes_at_zero_for_small_j(self):
        rep = build_rep(6, QContext(0.5, 1, 2))
        col = _column(rep, (0, 3))
        assert rep.Tstar[0][:, col].nnz == 0

    def test_lowering_vanishes_at_one_for_large_j(self):
        rep = build_rep(6, QContext(0.5, 1, 2))
        col = _column(rep, (-2, 1))
        assert rep.T[1][:, col].nnz == 0

    def test_raising_at_one_for_large_j(self):
        q = 0.5
        rep = build_rep(6, QContext(q, 1, 2))
        col = _column(rep, (-2, 1))
        target = _column(rep, (-2, 2))
        # prefactor q^{i_1} = q^{-2} times (1 - q^{2 i_2})^{1/2}
        assert rep.Tstar[1][target, col] == pytest.approx(q**-2 * np.sqrt(1 - q**2))

    def test_window_clips_lowering_at_minus_M(self):
        rep = build_rep(6, QContext(0.5, 1, 2))
        col = _column(rep, (-6, 2))
        assert rep.T[0][:, col].nnz == 0
        assert not rep.interior[col]

    def test_last_generator_is_diagonal(self):
        q = 0.5
        rep = build_rep(4, QContext(q, 1, 3))
        d = rep.T[-1].diagonal()
        np.testing.assert_allclose(d, q ** rep.indices.sum(axis=1).astype(float))
        assert (rep.T[-1] != rep.Tstar[-1]).nnz == 0


class TestRelations:
    def test_all_relations_hold(self, reps):
        for key, rep in reps.items():
            res = check_relations(rep)
            assert len(res) == 8
            for name, r in res.items():
                assert r < 1e-13, (key, name, r)

    def test_radial_generator_spectrum(self, reps):
        for (q, n, m), rep in reps.items():
            x = rep.x(n + 1).diagonal()
            expected = q ** (2.0 * rep.indices[:, :n].sum(axis=1))
            mask = rep.interior
            np.testing.assert_allclose(x[mask], expected[mask], rtol=1e-13)

    def test_c_is_identity(self, reps):
        for rep in reps.values():
            c = rep.c().tocsr()[:, rep.interior]
            eye = sp.identity(rep.size, format="csr")[:, rep.interior]
            diff = np.abs((c - eye).toarray())
            scale = max(abs(A).max() for _, A in rep.x_terms(1))
            assert diff.max() <= 1e-13 * scale

    def test_f0_annihilation_is_exact(self, reps):
        for (q, n, m), rep in reps.items():
            f0 = rep.projection_f0()
            for j in range(n):
                assert (rep.Tstar[j] @ f0).count_nonzero() == 0
                assert (f0 @ rep.T[j]).count_nonzero() == 0

    def test_wrong_relation_is_detected(self, reps):
        rep = reps[(0.5, 1, 2)]
        T, mask, q = rep.T, rep.interior, 0.5
        right = _relative_residual([(1.0, T[0] @ T[1]), (-q, T[1] @ T[0])], mask)
        wrong = _relative_residual([(1.0, T[0] @ T[1]), (-q * q, T[1] @ T[0])], mask)
        assert right < 1e-15
        assert wrong > 0.1

    def test_wrong_diagonal_is_detected(self, reps):
        rep = reps[(0.5, 1, 2)]
        eye = sp.identity(rep.size, format="csr")
        assert _relative_residual(rep.x_terms(1) + [(-1.01, eye)], rep.interior) > 1e-3

    def test_x_index_checked(self, reps):
        with pytest.raises(ValidationError):
            reps[(0.5, 1, 2)].x_terms(0)


class TestTraceIntegral:
    @pytest.mark.parametrize("n,m", REP_CONFIGS)
    def test_origin(self, n, m):
        rep = build_rep(30, QContext(0.5, n, m))
        r = radial_equivalence_check(GridFunction.indicator(0), rep)
        assert r.radial == pytest.approx(1.0)
        assert r.passed
        assert abs(r.trace - 1.0) <= r.tailbound + 1e-12

    def test_zero(self, reps):
        rep = reps[(0.5, 1, 2)]
        assert trace_integral(GridFunction(), rep) == 0.0
        assert trace_tail_bound(GridFunction(), rep) == 0.0

    @pytest.mark.parametrize("j", [0, 1, 3])
    def test_geometric_closed_form(self, j):
        q = 0.5
        rep = build_rep(30, QContext(q, 1, 2))
        r = radial_equivalence_check(GridFunction.indicator(j), rep)
        assert r.radial == pytest.approx(q ** (-4 * j), rel=1e-14)
        assert abs(r.trace - r.radial) <= r.tailbound + 1e-10 * r.radial

    def test_tail_bound_is_sharp_to_a_factor(self):
        # For positive f the bound is the exact truncation error of the clipped sums.
        rep = build_rep(10, QContext(0.7, 1, 3))
        f = GridFunction({0: 1.0, 2: 3.0})
        r = radial_equivalence_check(f, rep)
        gap = r.radial - r.trace
        assert 0 < gap <= r.tailbound * (1 + 1e-9)
        assert gap >= 0.5 * r.tailbound

    def test_bound_shrinks_with_window(self):
        ctx = QContext(0.7, 1, 3)
        f = GridFunction({0: 1.0, 1: -0.5})
        bounds = [trace_tail_bound(f, build_rep(M, ctx)) for M in (5, 10, 20)]
        assert bounds[0] > bounds[1] > bounds[2] > 0

    def test_support_beyond_window(self, reps):
        with pytest.raises(ValidationError):
            trace_tail_bound(GridFunction.indicator(20), reps[(0.5, 1, 2)])

    def test_random_functions(self):
        ctx = QContext(0.5, 2, 2)
        rep = build_rep(25, ctx)
        rng = np.random.default_rng(4)
        for _ in range(5):
            assert radial_equivalence_check(random_grid_function(rng, 6, ctx), rep).passed

    @settings(max_examples=25)
    @given(st.sampled_from(REP_CONFIGS), st.sampled_from([0.3, 0.5, 0.7]), grid_functions(kmax=6))
    def test_property(self, config, q, f):
        rep = _cached_rep(q, *config)
        r = radial_equivalence_check(f, rep)
        assert abs(r.trace - r.radial) <= r.tailbound + 1e-10 * max(abs(r.radial), _abs_integral(f, rep.ctx))


_REP_CACHE: dict = {}


def _cached_rep(q, n, m):
    key = (q, n, m)
    if key not in _REP_CACHE:
        _REP_CACHE[key] = build_rep(30, QContext(q, n, m))
    return _REP_CACHE[key]


def _abs_integral(f, ctx):
    return radial_integral(GridFunction({k: abs(v) for k, v in f.values.items()}), ctx)
