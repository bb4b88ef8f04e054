"""Radial density, the invariant radial integral and the bases f_j, e_j."""

from __future__ import annotations

import csv
import io
import math
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .qcore import GridFunction, QContext, qpochhammer


@lru_cache(maxsize=4096)
def _rho(k: int, q: float, n: int, m: int) -> float:
    ctx = QContext(q, n, m)
    x = q ** (-2 * k)
    return ctx.const2 * x ** (m - 1) * math.prod(q ** (-2 * j) * x - 1.0 for j in range(1, n))


def rho(k: int, ctx: QContext) -> float:
    """rho(q^{-2k}) = const2 x^{m-1} prod_{j=1}^{n-1} (q^{-2j} x - 1)."""
    if int(k) != k or k < 0:
        raise ValidationError(f"grid index must be a nonnegative integer, got {k!r}")
    return _rho(int(k), ctx.q, ctx.n, ctx.m)


def rho_array(kmax: int, ctx: QContext) -> np.ndarray:
    return np.array([rho(k, ctx) for k in range(kmax + 1)])


def const2_proof_form(ctx: QContext) -> float:
    """const2 written as (-1)^{n-1} / ((q^-2 - 1)(q^-2; q^-2)_{n-1})."""
    b = ctx.q**-2
    return (-1) ** (ctx.n - 1) / ((b - 1.0) * qpochhammer(b, b, ctx.n - 1))


def measure_weights(kmax: int, ctx: QContext) -> np.ndarray:
    """(q^-2 - 1) rho(q^{-2k}) q^{-2k} for k = 0..kmax, the mass of each grid point."""
    q = ctx.q
    return np.array([(q**-2 - 1.0) * rho(k, ctx) * q ** (-2 * k) for k in range(kmax + 1)])


def radial_integral(f: GridFunction, ctx: QContext):
    """(q^-2 - 1) sum_k f(q^{-2k}) rho(q^{-2k}) q^{-2k}."""
    q = ctx.q
    return (q**-2 - 1.0) * sum(v * rho(k, ctx) * q ** (-2 * k) for k, v in f.values.items())


def inner_product(f: GridFunction, g: GridFunction, ctx: QContext):
    """<f, g> = integral of f conj(g)."""
    return radial_integral(f * g.conj(), ctx)


def norm_fj(j: int, ctx: QContext) -> float:
    """||f_j||^2 = q^{-2j(N-1)} (q^{2j+2}; q^2)_{n-1} / (q^2; q^2)_{n-1}."""
    if j < 0:
        raise ValidationError("j must be >= 0")
    q, p = ctx.q, ctx.q**2
    return q ** (-2 * j * (ctx.N - 1)) * qpochhammer(p ** (j + 1), p, ctx.n - 1) / qpochhammer(p, p, ctx.n - 1)


def basis_ej_coeff(j: int, ctx: QContext) -> float:
    """c with e_j = c f_j, namely q^{j(N-1)} sqrt((q^2; q^2)_{n-1} / (q^{2j+2}; q^2)_{n-1})."""
    if j < 0:
        raise ValidationError("j must be >= 0")
    q, p = ctx.q, ctx.q**2
    return q ** (j * (ctx.N - 1)) * math.sqrt(qpochhammer(p, p, ctx.n - 1) / qpochhammer(p ** (j + 1), p, ctx.n - 1))


def basis_e(j: int, ctx: QContext) -> GridFunction:
    return GridFunction({j: basis_ej_coeff(j, ctx)})


def from_e_coefficients(coeffs, ctx: QContext) -> GridFunction:
    """The function sum_j coeffs[j] e_j."""
    return GridFunction({j: c * basis_ej_coeff(j, ctx) for j, c in enumerate(coeffs) if c != 0})


def to_e_coefficients(f: GridFunction, ctx: QContext, kmax: int | None = None) -> np.ndarray:
    kmax = f.kmax if kmax is None else kmax
    arr = f.to_array(kmax)
    return arr / np.array([basis_ej_coeff(j, ctx) for j in range(kmax + 1)])


def l2_norm(f: GridFunction, ctx: QContext) -> float:
    return math.sqrt(max(0.0, float(np.real(inner_product(f, f, ctx)))))


def random_grid_function(rng: np.random.Generator, kmax: int, ctx: QContext, complex_values: bool = False) -> GridFunction:
    """Standard normal coefficients in the orthonormal basis e_0..e_kmax."""
    c = rng.standard_normal(kmax + 1)
    if complex_values:
        c = c + 1j * rng.standard_normal(kmax + 1)
    return from_e_coefficients(c, ctx)


def read_grid_csv(source) -> GridFunction:
    """Parse rows "k,re[,im]" with strictly increasing k. ``source`` is a path or text."""
    text = Path(source).read_text() if isinstance(source, Path) else str(source)
    values = {}
    last = -1
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) not in (2, 3):
            raise ValidationError(f"line {lineno}: expected k,re[,im]")
        try:
            k = int(row[0])
            re = float(row[1])
            im = float(row[2]) if len(row) == 3 else 0.0
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        if k < 0:
            raise ValidationError(f"line {lineno}: k must be >= 0")
        if k <= last:
            raise ValidationError(f"line {lineno}: k must be strictly increasing (got {k} after {last})")
        last = k
        values[k] = complex(re, im) if im else re
    return GridFunction(values)


def write_grid_csv(f: GridFunction) -> str:
    lines = []
    for k, v in f.values.items():
        if isinstance(v, complex):
            lines.append(f"{k},{v.real:.17g},{v.imag:.17g}")
        else:
            lines.append(f"{k},{v:.17g}")
    return "\n".join(lines) + "\n"
