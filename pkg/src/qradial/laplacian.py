"""The radial Laplacian as a q-difference operator, in divergence form and as a Jacobi matrix."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NonConvergent, ValidationError
from .qcore import GridFunction, QContext, bminus, bplus
from .radial import basis_ej_coeff, rho


def _box_at(f: Mapping[int, complex], k: int, ctx: QContext):
    q, n, m = ctx.q, ctx.n, ctx.m
    x = q ** (-2 * k)
    c = q * q / ((1 - q * q) ** 2 * x)
    s = q ** (2 * m - 2)
    qn = q ** (-2 * n)
    return c * (
        (x - 1) * s * f.get(k - 1, 0.0)
        + (qn * x - 1) * f.get(k + 1, 0.0)
        + (1 + s - s * x - qn * x) * f.get(k, 0.0)
    )


def _image_support(f: GridFunction) -> list[int]:
    return sorted({j for k in f.support for j in (k - 1, k, k + 1) if j >= 0})


def box_pointwise(f: GridFunction, ctx: QContext) -> GridFunction:
    """Apply the explicit three-point formula at every grid point near supp f."""
    return GridFunction({k: _box_at(f.values, k, ctx) for k in _image_support(f)})


def divergence_constant(ctx: QContext) -> float:
    """Prefactor of the divergence form that reproduces the three-point formula.

    Expanding rho^{-1} B_+ [x (q^{-2n} x - 1) rho B_- f] gives the three-point
    formula exactly, so the prefactor is 1. ``ctx.const_box`` is the value
    printed next to the divergence form; it differs from 1 by exactly that
    factor, and the eigenvalues lambda(l) follow the three-point normalization.
    """
    return 1.0


def box_divergence(f: GridFunction, ctx: QContext) -> GridFunction:
    """divergence_constant * rho^{-1} B_+ [x (q^{-2n} x - 1) rho B_- f]."""
    q, n = ctx.q, ctx.n
    support = _image_support(f)
    if not support:
        return GridFunction({})
    flux = {}
    for k in range(support[-1] + 1):
        x = q ** (-2 * k)
        flux[k] = x * (q ** (-2 * n) * x - 1) * rho(k, ctx) * bminus(f.values, k, ctx)
    c = divergence_constant(ctx)
    return GridFunction({k: c * bplus(flux, k, ctx) / rho(k, ctx) for k in support})


def dirichlet_constant(ctx: QContext) -> float:
    """Weight K in K x (1 - q^{-2n} x) |B_- f|^2 matching the three-point box.

    Duality of B_- and -q^2 B_+ turns the form into q^2 K rho^{-1} B_+[...],
    so K = q^{-2} divergence_constant. The printed weight
    q^{2(n-1)}(1-q^2)/(1-q^{2(N-1)}) is larger by the factor ctx.const_box.
    """
    return divergence_constant(ctx) / ctx.q**2


def dirichlet_form(f: GridFunction, g: GridFunction, ctx: QContext):
    """Integral of K x (1 - q^{-2n} x) conj(B_- g) (B_- f) rho, which equals <box f, g>."""
    q, n = ctx.q, ctx.n
    kmax = max(f.kmax, g.kmax)
    K = dirichlet_constant(ctx)
    total = 0.0
    for k in range(kmax + 1):
        x = q ** (-2 * k)
        bf = bminus(f.values, k, ctx)
        bg = bminus(g.values, k, ctx)
        if bf == 0 or bg == 0:
            continue
        total += x * (1 - q ** (-2 * n) * x) * np.conj(bg) * bf * rho(k, ctx) * x
    return (q**-2 - 1.0) * K * total


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric Jacobi matrix; ``off[j]`` couples j and j+1."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        o = np.asarray(self.off, dtype=float)
        if o.shape[0] != max(0, d.shape[0] - 1):
            raise ValidationError("off-diagonal must have size - 1 entries")
        d.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", o)

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def eigenvalues(self) -> np.ndarray:
        if self.size == 1:
            return self.diag.copy()
        try:
            return eigh_tridiagonal(self.diag, self.off, eigvals_only=True)
        except np.linalg.LinAlgError as exc:
            raise NonConvergent(f"tridiagonal eigensolver failed: {exc}") from None


def box_matrix(size: int, ctx: QContext) -> TridiagonalOperator:
    """Truncation of box to span(e_0..e_{size-1})."""
    if size < 1:
        raise ValidationError("size must be >= 1")
    q, n, N = ctx.q, ctx.n, ctx.N
    c = q ** (ctx.m - n + 1) / (1 - q * q) ** 2
    j = np.arange(size, dtype=float)
    diag = c * (q ** (2 * j + N - 1) + q ** (2 * j + 2 * n - N + 1) - q ** (N - 1) - q ** (1 - N))
    jo = j[:-1]
    off = c * np.sqrt((1 - q ** (2 * jo + 2)) * (1 - q ** (2 * jo + 2 * n)))
    return TridiagonalOperator(diag, off)


def box_matrix_from_pointwise(size: int, ctx: QContext) -> np.ndarray:
    """Dense matrix <box e_j, e_i> assembled from box_pointwise, for cross-checks."""
    coef = [basis_ej_coeff(j, ctx) for j in range(size + 1)]
    out = np.zeros((size, size))
    for j in range(size):
        img = box_pointwise(GridFunction({j: coef[j]}), ctx)
        for i, v in img.values.items():
            if i < size:
                out[i, j] = v / coef[i]
    return out


def lambda_of_l(l, ctx: QContext) -> complex:
    """-q^{2-2n} (1 - q^{-2l}) (1 - q^{2l+2(N-1)}) / (1 - q^2)^2."""
    q = ctx.q
    lq = cmath.log(q)
    l = complex(l)
    val = -(q ** (2 - 2 * ctx.n)) * (1 - cmath.exp(-2 * l * lq)) * (1 - cmath.exp((2 * l + 2 * (ctx.N - 1)) * lq)) / (1 - q * q) ** 2
    return val.real if l.imag == 0 else val


def lambda_of_z(z, ctx: QContext):
    """-q^{2-2n} (1 - 2 q^{N-1} z + q^{2(N-1)}) / (1 - q^2)^2; vectorized over z."""
    q = ctx.q
    b = q ** (ctx.N - 1)
    return -(q ** (2 - 2 * ctx.n)) * (1 - 2 * b * np.asarray(z) + b * b) / (1 - q * q) ** 2


def truncated_spectrum(size: int, ctx: QContext) -> np.ndarray:
    """Ascending eigenvalues of box_matrix(size)."""
    if size < 2:
        raise ValidationError("size must be >= 2")
    return box_matrix(size, ctx).eigenvalues()


def operator_norm(size: int, ctx: QContext) -> float:
    return float(np.abs(truncated_spectrum(size, ctx)).max())
