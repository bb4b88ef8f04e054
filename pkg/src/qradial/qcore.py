"""Scalar q-series primitives and the radial grid.

The radial grid is q^{-2Z_+} = {1, q^-2, q^-4, ...}; a point x = q^{-2k} is
always carried by its integer index k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import NonConvergent, PoleError, ValidationError

Number = Union[float, complex]

DEFAULT_TOL = 1e-16

_BIG = 1e250
_SMALL = 1e-250


@dataclass(frozen=True)
class QContext:
    """Global parameters of H_{n,m} and the normalization constants derived from them."""

    q: float
    n: int
    m: int

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValidationError(f"q must lie in (0, 1), got {self.q!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be an integer >= 1, got {self.n!r}")
        if int(self.m) != self.m or self.m < 2:
            raise ValidationError(f"m must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def N(self) -> int:
        return self.n + self.m

    @property
    def const1(self) -> float:
        q = self.q
        return math.prod(q ** (-2 * j) - 1.0 for j in range(1, self.m))

    @property
    def const2(self) -> float:
        q = self.q
        return 1.0 / ((q**-2 - 1.0) * math.prod(q ** (-2 * j) - 1.0 for j in range(1, self.n)))

    @property
    def const_box(self) -> float:
        q = self.q
        return q ** (2 * self.n) * (1.0 - q * q) / (1.0 - q ** (2 * (self.N - 1)))

    def x(self, k: int) -> float:
        """Grid point q^{-2k}."""
        return self.q ** (-2 * k)


@dataclass(frozen=True)
class RadialGridPoint:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValidationError(f"grid index must be a nonnegative integer, got {self.k!r}")

    def x(self, ctx: QContext) -> float:
        return ctx.x(self.k)


def _scalar(v) -> Number:
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return v.real if v.imag == 0.0 else v
    return float(v)


@dataclass(frozen=True)
class GridFunction:
    """Finitely supported function on q^{-2Z_+}: ``values[k]`` is f(q^{-2k}); absent keys mean 0."""

    values: Mapping[int, Number] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.values).items():
            if isinstance(k, (bool, float)) or int(k) != k or k < 0:
                raise ValidationError(f"grid keys must be nonnegative integers, got {k!r}")
            clean[int(k)] = _scalar(v)
        object.__setattr__(self, "values", dict(sorted(clean.items())))

    @classmethod
    def indicator(cls, j: int) -> "GridFunction":
        """The function f_j: 1 at x = q^{-2j}, 0 elsewhere."""
        return cls({j: 1.0})

    @classmethod
    def from_array(cls, arr) -> "GridFunction":
        return cls({k: v for k, v in enumerate(np.asarray(arr).tolist()) if v != 0})

    def get(self, k: int, default: Number = 0.0) -> Number:
        return self.values.get(k, default)

    def __call__(self, k: int) -> Number:
        return self.values.get(k, 0.0)

    @property
    def support(self) -> list[int]:
        return [k for k, v in self.values.items() if v != 0]

    @property
    def kmax(self) -> int:
        s = self.support
        return s[-1] if s else -1

    @property
    def is_real(self) -> bool:
        return not any(isinstance(v, complex) for v in self.values.values())

    def to_array(self, kmax: int | None = None) -> np.ndarray:
        kmax = self.kmax if kmax is None else kmax
        dtype = float if self.is_real else complex
        out = np.zeros(kmax + 1, dtype=dtype)
        for k, v in self.values.items():
            if k <= kmax:
                out[k] = v
        return out

    def conj(self) -> "GridFunction":
        return GridFunction({k: v.conjugate() for k, v in self.values.items()})

    def _combine(self, other, op) -> "GridFunction":
        keys = set(self.values) | set(other.values)
        return GridFunction({k: op(self(k), other(k)) for k in keys})

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            keys = set(self.values) & set(other.values)
            return GridFunction({k: self(k) * other(k) for k in keys})
        return GridFunction({k: v * other for k, v in self.values.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def qpochhammer(a: Number, base: float, k: int) -> Number:
    """Finite q-Pochhammer symbol (a; base)_k = prod_{i<k} (1 - a base^i).

    Any nonzero real base is accepted; the radial computations also use base q^-2.
    """
    if k < 0:
        raise ValidationError("qpochhammer needs k >= 0")
    r = 1.0
    t = a
    for _ in range(k):
        r *= 1.0 - t
        t *= base
    return r


def _inf_cap(a: Number, base: float, tol: float) -> int:
    cap = math.ceil(10.0 * math.log(tol) / math.log(base))
    if abs(a) > 1.0:
        cap += math.ceil(math.log(abs(a)) / -math.log(base))
    return cap + 1


def qpochhammer_inf(a: Number, base: float, tol: float = DEFAULT_TOL, return_tail: bool = False):
    """Infinite q-Pochhammer symbol (a; base)_inf for 0 < base < 1.

    The product stops at the first index I with |a| base^I < tol. The omitted
    factors change the result by a relative amount of at most about
    |a| base^I / (1 - base) (first-order estimate), which is returned as the
    second element when ``return_tail`` is set.
    """
    if not (0.0 < base < 1.0):
        raise ValidationError(f"infinite product needs base in (0, 1), got {base!r}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    cap = _inf_cap(a, base, tol)
    r = 1.0
    log_scale = 0.0
    t = a
    mag = abs(a)
    i = 0
    while mag >= tol:
        if i >= cap:
            raise NonConvergent(f"(a;q)_inf did not reach |a q^i| < {tol} within {cap} factors")
        r *= 1.0 - t
        if r != 0 and not (_SMALL <= abs(r) <= _BIG):
            s = abs(r)
            r /= s
            log_scale += math.log(s)
        t *= base
        mag *= base
        i += 1
    if log_scale:
        r *= math.exp(log_scale)
    if return_tail:
        return r, mag / (1.0 - base)
    return r


def qgamma(x: Number, base: float, tol: float = DEFAULT_TOL) -> Number:
    """q-Gamma function (1-b)^{1-x} (b;b)_inf / (b^x;b)_inf."""
    xr = x.real if isinstance(x, complex) else x
    if abs(x.imag if isinstance(x, complex) else 0.0) < 1e-14 and xr <= 0.0 and abs(xr - round(xr)) < 1e-12:
        raise PoleError(f"q-Gamma has a pole at x = {x!r}")
    bx = base**x
    den = qpochhammer_inf(bx, base, tol)
    if den == 0:
        raise PoleError(f"q-Gamma denominator vanishes at x = {x!r}")
    return (1.0 - base) ** (1.0 - x) * qpochhammer_inf(base, base, tol) / den


def qpascal_psi(j: int, k: int, ctx: QContext) -> float:
    """q-Pascal triangle entry (q^-2;q^-2)_{j+k} / ((q^-2;q^-2)_j (q^-2;q^-2)_k)."""
    if j < 0 or k < 0:
        raise ValidationError("qpascal_psi needs j, k >= 0")
    b = ctx.q**-2
    return qpochhammer(b, b, j + k) / (qpochhammer(b, b, j) * qpochhammer(b, b, k))


def qintegral_radial(f: GridFunction, ctx: QContext) -> Number:
    """Jackson integral over [1, inf): (q^-2 - 1) sum_k f(q^{-2k}) q^{-2k}."""
    q = ctx.q
    return (q**-2 - 1.0) * sum(v * q ** (-2 * k) for k, v in f.values.items())


def qintegral_two_sided(values: Mapping[int, Number], ctx: QContext) -> Number:
    """Jackson integral over (0, inf) for a finitely supported map k -> f(q^{-2k}), k in Z."""
    q = ctx.q
    return (q**-2 - 1.0) * sum(v * q ** (-2 * k) for k, v in values.items())


def bminus(f: Mapping[int, Number], k: int, ctx: QContext) -> Number:
    """(f(q^-2 x) - f(x)) / (q^-2 x - x) at x = q^{-2k}."""
    q = ctx.q
    x = q ** (-2 * k)
    return (f.get(k + 1, 0.0) - f.get(k, 0.0)) / ((q**-2 - 1.0) * x)


def bplus(f: Mapping[int, Number], k: int, ctx: QContext) -> Number:
    """(f(q^2 x) - f(x)) / (q^2 x - x) at x = q^{-2k}; values off the grid count as 0."""
    q = ctx.q
    x = q ** (-2 * k)
    return (f.get(k - 1, 0.0) - f.get(k, 0.0)) / ((q * q - 1.0) * x)
