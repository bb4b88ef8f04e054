"""Al-Salam-Chihara polynomials Q_k(z; a, b | p) and their orthogonality measure.

For H_{n,m} the parameters are a = q^{n-m+1}, b = q^{N-1} and p = q^2, so both
a and b are integer powers of q. The measure has a continuous part on [-1, 1]
and, when a > 1, finitely many point masses at z_k = (a p^k + a^{-1} p^{-k})/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np

from .errors import NonConvergent, ValidationError
from .hyperg import phi_series
from .qcore import DEFAULT_TOL, QContext, qpochhammer, qpochhammer_inf

_H_CUTOFF = 1e-18


@dataclass(frozen=True)
class ASCParams:
    """Parameters a = q^{a_exp}, b = q^{b_exp} with base p = q^2."""

    q: float
    a_exp: int
    b_exp: int

    @classmethod
    def from_context(cls, ctx: QContext) -> "ASCParams":
        return cls(ctx.q, ctx.n - ctx.m + 1, ctx.N - 1)

    @property
    def a(self) -> float:
        return self.q**self.a_exp

    @property
    def b(self) -> float:
        return self.q**self.b_exp

    @property
    def base(self) -> float:
        return self.q * self.q

    @property
    def ab(self) -> float:
        return self.q ** (self.a_exp + self.b_exp)

    @property
    def n_masses(self) -> int:
        """Number of k >= 0 with a p^k > 1, i.e. 2k < -a_exp."""
        return max(0, (-self.a_exp + 1) // 2)

    def mass_abscissa(self, k: int) -> float:
        t = self.q ** (self.a_exp + 2 * k)
        return (t + 1.0 / t) / 2.0

    def norm_factor(self, j: int) -> float:
        """(p, ab; p)_j, so that P_j = Q_j / sqrt(norm_factor(j)) is orthonormal."""
        p = self.base
        return qpochhammer(p, p, j) * qpochhammer(self.ab, p, j)


def asc_table(jmax: int, z, params: ASCParams) -> np.ndarray:
    """Q_0..Q_jmax at the points z by the forward three-term recurrence.

    Shape (jmax+1,) + shape(z). Stable for z in [-1, 1]; at mass points the
    polynomials are the minimal solution and ``asc_mass_table`` must be used.
    """
    z = np.asarray(z)
    dtype = complex if np.iscomplexobj(z) else float
    out = np.zeros((jmax + 1,) + z.shape, dtype=dtype)
    out[0] = 1.0
    if jmax == 0:
        return out
    a, b, p, ab = params.a, params.b, params.base, params.ab
    out[1] = 2 * z - (a + b)
    pi = p
    for i in range(1, jmax):
        out[i + 1] = (2 * z - pi * (a + b)) * out[i] - (1 - pi) * (1 - ab * pi / p) * out[i - 1]
        pi *= p
    return out


def asc_eval_recurrence(k: int, z, params: ASCParams):
    """Q_k(z) from Q_{-1} = 0, Q_0 = 1 and 2z Q_i = Q_{i+1} + p^i(a+b) Q_i + (1-p^i)(1-ab p^{i-1}) Q_{i-1}."""
    if k < 0:
        raise ValidationError("k must be >= 0")
    val = asc_table(k, z, params)[k]
    return val.item() if np.ndim(val) == 0 else val


def _unit_root(z):
    """Root w of w^2 - 2zw + 1 = 0 with |w| <= 1 (w = e^{i theta} on [-1, 1]), in mpmath."""
    z = mp.mpmathify(z)
    if mp.im(z) == 0 and abs(z) <= 1:
        z = mp.re(z)
        return mp.mpc(z, mp.sqrt(1 - z * z))
    r = mp.sqrt(z * z - 1)
    w = z - r
    return w if abs(w) <= 1 else z + r


def asc_eval_hypergeometric(k: int, z, params: ASCParams) -> complex:
    """Q_k(z) = (ab; p)_k / a^k * 3phi2(p^-k, a w, a/w; ab, 0; p, p), z = (w + 1/w)/2.

    The series cancels heavily for small q, so its parameters are rebuilt at
    the working precision from the exact inputs.
    """
    if k < 0:
        raise ValidationError("k must be >= 0")
    z = complex(z)
    zm = z.real if z.imag == 0 else z

    def qm():
        return mp.mpf(params.q)

    def a():
        return qm() ** params.a_exp

    series = phi_series(
        [lambda: qm() ** (-2 * k), lambda: a() * _unit_root(zm), lambda: a() / _unit_root(zm)],
        [lambda: qm() ** (params.a_exp + params.b_exp), 0.0],
        lambda: qm() ** 2,
        lambda: qm() ** 2,
        terminate_at=k,
    )
    return qpochhammer(params.ab, params.base, k) / params.a**k * series


def asc_mass_table(jmax: int, params: ASCParams) -> np.ndarray:
    """Q_j(z_k) for j <= jmax and every mass point k, shape (n_masses, jmax+1).

    At z_k the 3phi2 has upper parameters p^{-j}, p^{-k} and a^2 p^k, so it
    terminates after min(j, k)+1 terms and needs no recurrence.
    """
    a, p, ab = params.a, params.base, params.ab
    out = np.zeros((params.n_masses, jmax + 1))
    for k in range(params.n_masses):
        u2 = a * a * p**k
        for j in range(jmax + 1):
            s = 0.0
            for i in range(min(j, k) + 1):
                s += (
                    qpochhammer(p**-j, p, i)
                    * qpochhammer(p**-k, p, i)
                    * qpochhammer(u2, p, i)
                    / (qpochhammer(p, p, i) * qpochhammer(ab, p, i))
                    * p**i
                )
            out[k, j] = qpochhammer(ab, p, j) / a**j * s
    return out


def _h(z: np.ndarray, alpha: float, p: float) -> np.ndarray:
    """prod_k (1 - 2 alpha p^k z + alpha^2 p^{2k})."""
    out = np.ones_like(z, dtype=float)
    t = alpha
    while abs(t) >= _H_CUTOFF:
        out = out * (1 - 2 * t * z + t * t)
        t *= p
    return out


def asc_weight(z, params: ASCParams) -> np.ndarray:
    """Unnormalized continuous weight w(z) = h(1)h(-1)h(q)h(-q) / (h(a)h(b)).

    h(a) is divided into h(1) or h(q) (whichever shares the parity of a's
    exponent) as a finite product, so no infinite product is ever divided by
    a vanishing or huge one.
    """
    z = np.asarray(z, dtype=float)
    q, p, ea = params.q, params.base, params.a_exp
    par = ea % 2
    w = _h(z, -1.0, p) * _h(z, -q, p) * _h(z, q ** (1 - par), p) / _h(z, params.b, p)
    for e in range(min(par, ea), max(par, ea), 2):
        f = 1 - 2 * q**e * z + q ** (2 * e)
        w = w * f if ea > par else w / f
    return w


@dataclass(frozen=True)
class SpectralMeasure:
    """Normalized Al-Salam-Chihara measure: w(z) normalizer / (2 pi sqrt(1-z^2)) dz plus point masses.

    ``mass_points`` holds (z_k, weight_k) with weights already normalized.
    """

    params: ASCParams
    normalizer: float
    mass_points: tuple = field(default_factory=tuple)

    @property
    def mass_z(self) -> np.ndarray:
        return np.array([z for z, _ in self.mass_points], dtype=float)

    @property
    def mass_weights(self) -> np.ndarray:
        return np.array([w for _, w in self.mass_points], dtype=float)

    def weight(self, z) -> np.ndarray:
        """The unnormalized w(z)."""
        return asc_weight(z, self.params)

    def continuous_weight(self, z) -> np.ndarray:
        """Density with respect to dz on (-1, 1)."""
        z = np.asarray(z, dtype=float)
        return self.weight(z) * self.normalizer / (2 * math.pi * np.sqrt(1 - z * z))

    def density_theta(self, theta) -> np.ndarray:
        """Density with respect to d theta on [0, pi], z = cos theta."""
        return self.weight(np.cos(theta)) * self.normalizer / (2 * math.pi)

    def unnormalized_mass_weights(self) -> np.ndarray:
        return self.mass_weights / self.normalizer


def mass_weight_unnormalized(k: int, params: ASCParams, tol: float = DEFAULT_TOL) -> float:
    """Weight of the mass at z_k in the unnormalized measure (standard form, base p)."""
    a, b, p, ab = params.a, params.b, params.base, params.ab
    head = qpochhammer_inf(a**-2, p, tol) / (
        qpochhammer_inf(p, p, tol) * qpochhammer_inf(ab, p, tol) * qpochhammer_inf(b / a, p, tol)
    )
    ratio = (
        (1 - a * a * p ** (2 * k))
        * qpochhammer(a * a, p, k)
        * qpochhammer(ab, p, k)
        / ((1 - a * a) * qpochhammer(p, p, k) * qpochhammer(p * a / b, p, k))
    )
    return head * ratio * p ** (-k * k) * (a**3 * b) ** (-k)


def build_spectral_measure(ctx: QContext, tol: float = DEFAULT_TOL) -> SpectralMeasure:
    params = ASCParams.from_context(ctx)
    p = params.base
    normalizer = qpochhammer_inf(p, p, tol) * qpochhammer_inf(params.ab, p, tol)
    masses = tuple(
        (params.mass_abscissa(k), mass_weight_unnormalized(k, params, tol) * normalizer)
        for k in range(params.n_masses)
    )
    return SpectralMeasure(params, normalizer, masses)


def theta_rule(intervals: int) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes and weights on [0, pi] with the given number of intervals."""
    theta = np.linspace(0.0, math.pi, intervals + 1)
    wts = np.full(intervals + 1, math.pi / intervals)
    wts[0] /= 2
    wts[-1] /= 2
    return theta, wts


def measure_quadrature(
    g: Callable,
    measure: SpectralMeasure,
    tol: float = 1e-13,
    g_mass=None,
    atol: float = 0.0,
    start: int = 64,
    max_points: int = 2**20,
):
    """Integral of g against the normalized measure.

    ``g`` maps an array of z values (shape (M,)) to an array of shape (M, ...);
    extra trailing axes are integrated componentwise. The continuous part is a
    trapezoid rule in theta, doubled until the change is below ``tol`` times
    the larger of |result| and the integral of |g| (the rounding floor when the
    integrand cancels), or below ``atol``. ``g_mass`` gives the values at the
    mass points (same layout as g); by default g is evaluated at the mass
    abscissae.
    """
    intervals = start
    prev = None
    while True:
        theta, wts = theta_rule(intervals)
        vals = np.asarray(g(np.cos(theta)))
        dens = measure.density_theta(theta) * wts
        cur = np.tensordot(dens, vals, axes=(0, 0))
        if prev is not None:
            scale = max(np.linalg.norm(np.atleast_1d(cur)), np.linalg.norm(np.atleast_1d(np.tensordot(dens, np.abs(vals), axes=(0, 0)))))
            if np.linalg.norm(np.atleast_1d(cur - prev)) <= max(tol * scale, atol, np.finfo(float).tiny):
                break
        prev = cur
        intervals *= 2
        if intervals + 1 > max_points:
            raise NonConvergent(f"theta quadrature did not reach tol={tol} within {max_points} points")
    if measure.mass_points:
        mv = np.asarray(g(measure.mass_z) if g_mass is None else g_mass)
        cur = cur + np.tensordot(measure.mass_weights, mv, axes=(0, 0))
    return cur
