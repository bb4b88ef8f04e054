"""The acceptance battery: thirteen identity checks with fixed tolerances and time budgets.

Each check returns a CriterionResult carrying the worst observed metric, so a
failure reports how far off it was rather than only that it failed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .asc import asc_eval_recurrence, asc_mass_table, asc_table, build_spectral_measure, measure_quadrature
from .cfun import asymptotics_check, wc_identity_check
from .hyperg import SpectralParameterL, phi_l_grid
from .laplacian import (
    box_divergence,
    box_matrix,
    box_matrix_from_pointwise,
    box_pointwise,
    dirichlet_form,
    lambda_of_l,
    lambda_of_z,
    operator_norm,
    truncated_spectrum,
)
from .qcore import GridFunction, QContext, qpascal_psi
from .radial import l2_norm, radial_integral, random_grid_function
from .repsim import build_rep, check_relations, radial_equivalence_check
from .spectral import multiplication_equivalence_check, plancherel_check, transform_forward, transform_inverse

ALL_CONFIGS: tuple[tuple[int, int], ...] = tuple((n, m) for n in range(1, 5) for m in range(2, 6) if n + m <= 6)
REP_CONFIGS: tuple[tuple[int, int], ...] = ((1, 2), (1, 3), (2, 2))
Q_VALUES: tuple[float, ...] = (0.3, 0.5, 0.7)


@dataclass
class CriterionResult:
    number: int
    name: str
    metric: float
    threshold: float
    seconds: float
    budget: float
    detail: str = ""

    @property
    def accurate(self) -> bool:
        return bool(self.metric <= self.threshold)

    @property
    def in_budget(self) -> bool:
        return self.seconds <= self.budget

    @property
    def passed(self) -> bool:
        return self.accurate and self.in_budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = "" if self.in_budget else " (over time budget)"
        extra = f" [{self.detail}]" if self.detail else ""
        return (
            f"{status} {self.number:2d} {self.name}: worst {self.metric:.3e} vs tol {self.threshold:.0e}, "
            f"{self.seconds:.2f}s of {self.budget:g}s{budget}{extra}"
        )


@dataclass
class Battery:
    """Configurations and sample sizes for the acceptance checks."""

    configs: Sequence[tuple[int, int]] = ALL_CONFIGS
    rep_configs: Sequence[tuple[int, int]] = REP_CONFIGS
    qs: Sequence[float] = Q_VALUES
    seed: int = 0
    n_random: int = 100
    n_pairs: int = 50
    n_roundtrip: int = 20

    def contexts(self, configs=None) -> Iterable[QContext]:
        for n, m in self.configs if configs is None else configs:
            for q in self.qs:
                yield QContext(q, n, m)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def _timed(fn: Callable[[], tuple[float, str]]) -> tuple[float, str, float]:
    t0 = time.perf_counter()
    metric, detail = fn()
    return metric, detail, time.perf_counter() - t0


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), np.finfo(float).tiny)


def lattice_psi(j: int, k: int, q: float) -> float:
    """Sum of q^{-2(k i_1 + (k-1) i_2 + ... + i_k)} over i in Z_+^k with i_1 + ... + i_k <= j."""

    def rec(r: int, left: int) -> float:
        if r == k:
            return 1.0
        w = 2 * (k - r)
        return sum(q ** (-w * i) * rec(r + 1, left - i) for i in range(left + 1))

    return rec(0, j)


def _c1(b: Battery):
    worst = 0.0
    for ctx in b.contexts():
        worst = max(worst, abs(radial_integral(GridFunction.indicator(0), ctx) - 1.0))
    return worst, ""


def _c2(b: Battery):
    worst = 0.0
    for q in b.qs:
        ctx = QContext(q, 1, 2)
        for j in range(9):
            for k in range(9):
                worst = max(worst, _rel(qpascal_psi(j, k, ctx), lattice_psi(j, k, q)))
    return worst, ""


def _c3(b: Battery):
    if not b.rep_configs:
        return 0.0, "skipped: no configuration with n + m <= 4"
    worst = 0.0
    rng = b.rng(3)
    for ctx in b.contexts(b.rep_configs):
        rep = build_rep(30, ctx)
        fs = [GridFunction.indicator(0)] + [random_grid_function(rng, 6, ctx) for _ in range(5)]
        for f in fs:
            r = radial_equivalence_check(f, rep)
            # Ratio of the observed gap to the certified allowance; <= 1 passes.
            worst = max(worst, abs(r.trace - r.radial) / (r.tailbound + 1e-10 * abs(r.radial)))
    return worst, "gap / (tail bound + 1e-10 |radial|)"


def _c4(b: Battery):
    if not b.rep_configs:
        return 0.0, "skipped: no configuration with n + m <= 4"
    worst = 0.0
    name = ""
    for ctx in b.contexts(b.rep_configs):
        res = check_relations(build_rep(20, ctx))
        key = max(res, key=res.get)
        if res[key] >= worst:
            worst, name = res[key], key
    return worst, f"largest: {name}"


def _c5(b: Battery):
    worst = 0.0
    rng = b.rng(5)
    for ctx in b.contexts():
        for _ in range(b.n_random):
            f = random_grid_function(rng, 30, ctx)
            a, d = box_pointwise(f, ctx), box_divergence(f, ctx)
            scale = max(abs(v) for v in a.values.values())
            worst = max(worst, max(abs(a(k) - d(k)) for k in a.values) / scale)
        dense = box_matrix(30, ctx).to_dense()
        worst = max(worst, np.abs(dense - box_matrix_from_pointwise(30, ctx)).max() / np.abs(dense).max())
    return worst, ""


def _c6(b: Battery):
    worst = 0.0
    rng = b.rng(6)
    for ctx in b.contexts():
        for _ in range(b.n_pairs):
            f = random_grid_function(rng, 20, ctx)
            g = random_grid_function(rng, 20, ctx)
            lhs = radial_integral(g.conj() * box_pointwise(f, ctx), ctx)
            worst = max(worst, _rel(dirichlet_form(f, g, ctx), lhs))
    return worst, ""


def eigen_parameters(ctx: QContext) -> list:
    """Five real l in (0, 2] and five points on the critical line."""
    real = [0.4, 0.8, 1.2, 1.6, 2.0]
    crit = [SpectralParameterL.critical(t, ctx) for t in (0.3, 1.0, 1.7, 2.4, 3.0)]
    return real + crit


def eigen_residual(l, ctx: QContext, kmax: int = 40) -> float:
    phi = phi_l_grid(kmax + 1, l, ctx)
    image = box_pointwise(GridFunction.from_array(phi), ctx)
    lam = lambda_of_l(l.l if isinstance(l, SpectralParameterL) else l, ctx)
    return max(abs(image(k) - lam * phi[k]) for k in range(kmax + 1)) / np.abs(phi).max()


def _c7(b: Battery):
    worst = 0.0
    for ctx in b.contexts():
        for l in eigen_parameters(ctx):
            worst = max(worst, eigen_residual(l, ctx))
    return worst, ""


def gram_matrix(ctx: QContext, jmax: int = 12) -> np.ndarray:
    measure = build_spectral_measure(ctx)
    params = measure.params
    nf = np.sqrt([params.norm_factor(j) for j in range(jmax + 1)])

    def g(z):
        P = (asc_table(jmax, z, params) / nf[:, None]).T
        return P[:, :, None] * P[:, None, :]

    g_mass = None
    if measure.mass_points:
        P = asc_mass_table(jmax, params) / nf
        g_mass = P[:, :, None] * P[:, None, :]
    return measure_quadrature(g, measure, 1e-13, g_mass=g_mass)


def _c8(b: Battery):
    worst = 0.0
    with_mass = 0
    without = 0
    for ctx in b.contexts():
        G = gram_matrix(ctx)
        worst = max(worst, np.abs(G - np.eye(G.shape[0])).max())
        if build_spectral_measure(ctx).mass_points:
            with_mass += 1
        else:
            without += 1
    return worst, f"{with_mass} cases with masses, {without} without"


def _c9(b: Battery):
    worst_p = worst_m = 0.0
    rng = b.rng(9)
    for ctx in b.contexts():
        measure = build_spectral_measure(ctx)
        for _ in range(b.n_random // len(b.qs) + 1):
            f = random_grid_function(rng, 20, ctx)
            lhs, rhs = plancherel_check(f, measure, ctx)
            worst_p = max(worst_p, _rel(rhs, lhs))
            worst_m = max(worst_m, multiplication_equivalence_check(f, measure, ctx) / l2_norm(f, ctx))
    return max(worst_p, worst_m), f"plancherel {worst_p:.1e}, multiplication {worst_m:.1e}"


def _c10(b: Battery):
    worst = 0.0
    rng = b.rng(10)
    for ctx in b.contexts():
        measure = build_spectral_measure(ctx)
        for _ in range(b.n_roundtrip):
            f = random_grid_function(rng, 15, ctx)
            back = transform_inverse(transform_forward(f, measure, ctx), ctx, 15)
            worst = max(worst, l2_norm(back - f, ctx) / l2_norm(f, ctx))
    return worst, ""


NORM_RTOL = 5e-5
BAND_TOL = 1e-6


def spectrum_report(ctx: QContext) -> dict:
    """Norm stabilization and band membership for one configuration."""
    norms = {s: operator_norm(s, ctx) for s in (100, 200, 400)}
    ev = truncated_spectrum(200, ctx)
    lo, hi = lambda_of_z(-1.0, ctx), lambda_of_z(1.0, ctx)
    measure = build_spectral_measure(ctx)
    mass_lambdas = [float(lambda_of_z(z, ctx)) for z in measure.mass_z]
    outside = [e for e in ev if not (lo - BAND_TOL <= e <= hi + BAND_TOL)]
    unexplained = [e for e in outside if not any(abs(e - lm) <= BAND_TOL for lm in mass_lambdas)]
    missing = [lm for lm in mass_lambdas if np.abs(ev - lm).min() > BAND_TOL]
    return {
        "norm_change": abs(norms[200] - norms[400]) / norms[400],
        "norms": norms,
        "unexplained": unexplained,
        "missing_masses": missing,
        "n_masses": len(mass_lambdas),
        "band": (lo, hi),
    }


def _c11(b: Battery):
    worst = 0.0
    bad = 0
    for ctx in b.contexts():
        rep = spectrum_report(ctx)
        worst = max(worst, rep["norm_change"] / NORM_RTOL)
        bad += len(rep["unexplained"]) + len(rep["missing_masses"])
    # Misplaced eigenvalues count as an automatic failure.
    return (worst if bad == 0 else math.inf), f"norm change / {NORM_RTOL:g}; {bad} misplaced eigenvalues"


ASYMPTOTIC_L = (0.5, 1.0, 2.0)


def _c12(b: Battery):
    worst = 0.0
    for ctx in b.contexts():
        for s in ASYMPTOTIC_L:
            # above the line, mirrored about it, and the exact reflection with target c(s)
            for l in (s, -(ctx.N - 1) / 2 - s, -s - (ctx.N - 1)):
                ratio, target = asymptotics_check(l, 40, ctx)
                worst = max(worst, abs(ratio - target))
    return worst, "both regimes"


def _c13(b: Battery):
    worst = 0.0
    for ctx in b.contexts():
        for z in np.linspace(-0.95, 0.95, 20):
            lhs, rhs = wc_identity_check(float(z), ctx)
            worst = max(worst, _rel(rhs, lhs))
    return worst, ""


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    threshold: float
    budget: float
    run: Callable[[Battery], tuple[float, str]] = field(repr=False)


CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "normalization of f_0", 1e-14, 1, _c1),
    Criterion(2, "q-Pascal closed form vs lattice sum", 1e-12, 5, _c2),
    Criterion(3, "trace integral vs radial integral", 1.0, 60, _c3),
    Criterion(4, "representation relations on interior", 1e-13, 60, _c4),
    Criterion(5, "pointwise vs divergence vs matrix", 1e-12, 10, _c5),
    Criterion(6, "Dirichlet form identity", 1e-11, 10, _c6),
    Criterion(7, "eigen-equation residual", 1e-10, 30, _c7),
    Criterion(8, "Al-Salam-Chihara Gram matrix", 1e-7, 60, _c8),
    Criterion(9, "Plancherel and multiplication equivalence", 1e-8, 120, _c9),
    Criterion(10, "round-trip inversion", 1e-8, 60, _c10),
    Criterion(11, "bounded norm and spectral band", 1.0, 30, _c11),
    Criterion(12, "large-x asymptotics", 1e-8, 10, _c12),
    Criterion(13, "w-c identity", 1e-10, 10, _c13),
)


def run_criterion(c: Criterion, battery: Battery) -> CriterionResult:
    metric, detail, seconds = _timed(lambda: c.run(battery))
    return CriterionResult(c.number, c.name, float(metric), c.threshold, seconds, c.budget, detail)


def run_all(battery: Battery | None = None, numbers: Iterable[int] | None = None) -> list[CriterionResult]:
    battery = Battery() if battery is None else battery
    wanted = set(numbers) if numbers is not None else None
    return [run_criterion(c, battery) for c in CRITERIA if wanted is None or c.number in wanted]


def single_config_battery(q: float, n: int, m: int, seed: int = 0) -> Battery:
    """The battery restricted to one (q, n, m); representation checks use it only when n + m <= 4."""
    cfg = ((n, m),)
    rep = cfg if n + m <= 4 else ()
    return Battery(configs=cfg, rep_configs=rep, qs=(q,), seed=seed)
