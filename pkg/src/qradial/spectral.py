"""The unitary transform U onto L^2 of the normalized Al-Salam-Chihara measure.

U f_j = q^{-j(N-1)} / (q^2; q^2)_j * Q_j(z), so U of a finite function is a
polynomial in z. Spectral functions are stored by coefficients in the Q_j
basis where possible, which lets any quadrature grid be refined by exact
re-evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asc import SpectralMeasure, asc_mass_table, asc_table, measure_quadrature, theta_rule
from .errors import ValidationError
from .laplacian import box_pointwise, lambda_of_z
from .qcore import GridFunction, QContext, qpochhammer
from .radial import l2_norm, norm_fj


def transform_scale(jmax: int, ctx: QContext) -> np.ndarray:
    """s_j with U f_j = s_j Q_j, namely q^{-j(N-1)} / (q^2; q^2)_j."""
    q, p = ctx.q, ctx.q**2
    return np.array([q ** (-j * (ctx.N - 1)) / qpochhammer(p, p, j) for j in range(jmax + 1)])


@dataclass(frozen=True)
class SpectralFunction:
    """A function on the support of the spectral measure.

    ``cont`` evaluates the function at an array of z in [-1, 1]; ``mass_values``
    holds its values at the mass points in order. ``qcoeffs``, when present,
    are the coefficients in the Q_j basis that generated it.
    """

    measure: SpectralMeasure
    cont: Callable[[np.ndarray], np.ndarray]
    mass_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    qcoeffs: np.ndarray | None = None

    @classmethod
    def from_qcoeffs(cls, coeffs, measure: SpectralMeasure) -> "SpectralFunction":
        coeffs = np.asarray(coeffs)
        jmax = coeffs.shape[0] - 1
        params = measure.params

        def cont(z):
            return np.tensordot(coeffs, asc_table(jmax, z, params), axes=(0, 0))

        mass = asc_mass_table(jmax, params) @ coeffs if measure.mass_points else np.zeros(0, dtype=coeffs.dtype)
        return cls(measure, cont, mass, coeffs)

    @classmethod
    def constant(cls, value, measure: SpectralMeasure) -> "SpectralFunction":
        return cls.from_qcoeffs(np.array([value]), measure)

    def __call__(self, z) -> np.ndarray:
        return self.cont(np.asarray(z, dtype=float))

    def samples(self, intervals: int) -> tuple[np.ndarray, np.ndarray]:
        """Values on the trapezoid nodes theta_i = i pi / intervals, with z_i = cos theta_i."""
        theta, _ = theta_rule(intervals)
        z = np.cos(theta)
        return z, self(z)

    def times_lambda(self, ctx: QContext) -> "SpectralFunction":
        lam_mass = lambda_of_z(self.measure.mass_z, ctx) if self.measure.mass_points else np.zeros(0)
        return SpectralFunction(
            self.measure,
            lambda z: lambda_of_z(z, ctx) * self.cont(z),
            lam_mass * self.mass_values,
        )

    def __sub__(self, other: "SpectralFunction") -> "SpectralFunction":
        coeffs = None
        if self.qcoeffs is not None and other.qcoeffs is not None:
            size = max(len(self.qcoeffs), len(other.qcoeffs))
            coeffs = np.zeros(size, dtype=np.result_type(self.qcoeffs, other.qcoeffs))
            coeffs[: len(self.qcoeffs)] += self.qcoeffs
            coeffs[: len(other.qcoeffs)] -= other.qcoeffs
        return SpectralFunction(
            self.measure, lambda z: self.cont(z) - other.cont(z), self.mass_values - other.mass_values, coeffs
        )

    def inner(self, other: "SpectralFunction", tol: float = 1e-13, atol: float = 0.0):
        """<self, other> = integral of self conj(other) d sigma."""
        return measure_quadrature(
            lambda z: self.cont(z) * np.conj(other.cont(z)),
            self.measure,
            tol,
            g_mass=self.mass_values * np.conj(other.mass_values),
            atol=atol,
        )

    def norm(self, tol: float = 1e-13, atol: float = 0.0) -> float:
        return math.sqrt(max(0.0, float(np.real(self.inner(self, tol, atol)))))

    def to_csv(self, intervals: int = 64) -> str:
        """Rows "type,coord,value": cont rows at z nodes, mass rows by mass index."""
        z, vals = self.samples(intervals)
        rows = ["type,coord,value"]
        rows += [f"cont,{zi:.17g},{_fmt(v)}" for zi, v in zip(z, vals)]
        rows += [f"mass,{k},{_fmt(v)}" for k, v in enumerate(self.mass_values)]
        return "\n".join(rows) + "\n"


def _fmt(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:.17g}"
    return f"{v.real:.17g}{v.imag:+.17g}j"


def transform_forward(f: GridFunction, measure: SpectralMeasure, ctx: QContext) -> SpectralFunction:
    """U f as the polynomial sum_j f(q^{-2j}) s_j Q_j(z)."""
    if not f.support:
        return SpectralFunction.constant(0.0, measure)
    jmax = f.kmax
    return SpectralFunction.from_qcoeffs(f.to_array(jmax) * transform_scale(jmax, ctx), measure)


def transform_inverse(fhat: SpectralFunction, ctx: QContext, jmax: int, tol: float = 1e-13) -> GridFunction:
    """f(q^{-2j}) = <fhat, U f_j> / ||f_j||^2 for j = 0..jmax."""
    if jmax < 0:
        raise ValidationError("jmax must be >= 0")
    measure = fhat.measure
    params = measure.params
    scale = transform_scale(jmax, ctx)

    def g(z):
        return fhat.cont(z)[:, None] * (asc_table(jmax, z, params).T * scale)

    g_mass = None
    if measure.mass_points:
        g_mass = fhat.mass_values[:, None] * (asc_mass_table(jmax, params) * scale)
    proj = measure_quadrature(g, measure, tol, g_mass=g_mass)
    norms = np.array([norm_fj(j, ctx) for j in range(jmax + 1)])
    return GridFunction.from_array(proj / norms)


def plancherel_check(f: GridFunction, measure: SpectralMeasure, ctx: QContext, tol: float = 1e-13) -> tuple[float, float]:
    """(||f||^2 in the radial L^2, ||U f||^2 in L^2(d sigma))."""
    lhs = l2_norm(f, ctx) ** 2
    rhs = transform_forward(f, measure, ctx).norm(tol) ** 2
    return lhs, rhs


def multiplication_equivalence_check(f: GridFunction, measure: SpectralMeasure, ctx: QContext, tol: float = 1e-13) -> float:
    """L^2(d sigma) distance between U(box f) and lambda(z) U f."""
    lhs = transform_forward(box_pointwise(f, ctx), measure, ctx)
    rhs = transform_forward(f, measure, ctx).times_lambda(ctx)
    # The difference should vanish, so convergence is judged against the size of the terms.
    floor = (tol * max(lhs.norm(tol), rhs.norm(tol))) ** 2
    return (lhs - rhs).norm(tol, atol=floor)
