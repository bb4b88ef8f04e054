"""Basic hypergeometric series and the radial eigenfunctions Phi_l.

Terminating series on the radial grid cancel catastrophically: at x = q^{-2k}
the largest term of the 3phi2 is of order q^{-k^2} while the sum is of order
x^l. Sums are therefore accumulated in mpmath at a working precision chosen
from the observed term-to-sum ratio and confirmed by a second pass at higher
precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .errors import DivisionByZero, NonConvergent
from .qcore import QContext

TERMINATION_EPS = 1e-14
_START_DPS = 30
_GUARD_DPS = 15
_ZERO_DPS = 6000


def _to_mp(v):
    if callable(v):
        v = v()
    if isinstance(v, (mp.mpf, mp.mpc)):
        return v
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return mp.mpf(v.real) if v.imag == 0 else mp.mpc(v.real, v.imag)
    return mp.mpf(v)


def _from_mp(v):
    if isinstance(v, mp.mpc):
        if v.imag == 0:
            return float(v.real)
        return complex(float(v.real), float(v.imag))
    return float(v)


def _adaptive(compute: Callable[[int], tuple[list, list]]) -> list:
    """Run ``compute(dps) -> (values, scales)`` at increasing precision.

    ``scales[i]`` is the largest term magnitude that went into ``values[i]``,
    so the rounding floor of that sum is about scales[i] * 10^-dps. A value is
    accepted once it sits at least 20 digits above its floor; a value that
    stays under the floor up to _ZERO_DPS digits is an exact zero for all
    practical purposes and is returned as is.
    """
    dps = _START_DPS
    while True:
        with mp.workdps(dps):
            vals, scales = compute(dps)
            need = dps
            for v, s in zip(vals, scales):
                if s == 0:
                    continue
                av = abs(v)
                if av <= s * mp.mpf(10) ** (_GUARD_DPS - dps):
                    # Unresolved: the value is below the rounding floor, so at
                    # least the term scale itself has to be carried.
                    need = max(need, 2 * dps, int(float(mp.log10(s))) + 2 * _START_DPS)
                else:
                    need = max(need, int(math.ceil(float(mp.log10(s / av)))) + 25)
        if need <= dps:
            return vals
        if dps >= _ZERO_DPS:
            return vals
        dps = min(need + _GUARD_DPS, _ZERO_DPS)


def phi_series(
    upper: Sequence,
    lower: Sequence,
    base,
    argument,
    max_terms: int = 10000,
    tol: float = 1e-16,
    terminate_at: int | None = None,
) -> complex:
    """Evaluate the basic hypergeometric series r phi s(upper; lower; base, argument).

    Term k is prod (upper;base)_k / (prod (lower;base)_k (base;base)_k)
    * [(-1)^k base^{k(k-1)/2}]^{1+s-r} * argument^k. A zero lower parameter
    contributes factor 1.

    Parameters may be numbers or zero-argument callables; callables are
    evaluated at the working precision, so exact symbolic values such as
    q^{-2k} do not inherit double rounding.

    ``terminate_at`` declares that the series is a polynomial of that degree
    (an upper parameter is base^{-terminate_at} by construction). Otherwise the
    series stops when some upper factor 1 - u base^j falls below 1e-14, or when
    |term| < tol |sum|.
    """
    r, s = len(upper), len(lower)
    extra = 1 + s - r

    def compute(dps):
        ups = [_to_mp(u) for u in upper]
        lows = [_to_mp(b) for b in lower]
        p = _to_mp(base)
        z = _to_mp(argument)
        total = mp.mpf(1)
        term = mp.mpf(1)
        scale = mp.mpf(1)
        pj = mp.mpf(1)
        limit = terminate_at if terminate_at is not None else max_terms
        for j in range(limit):
            num = mp.mpf(1)
            stop = False
            for u in ups:
                f = 1 - u * pj
                if terminate_at is None and abs(f) < TERMINATION_EPS:
                    stop = True
                num *= f
            if stop:
                return [total], [scale]
            den = 1 - pj * p
            for b in lows:
                f = 1 - b * pj
                if abs(f) < TERMINATION_EPS:
                    raise DivisionByZero(f"lower parameter {complex(b)!r} hits base^-{j}")
                den *= f
            term = term * num / den * z
            if extra:
                term *= (-pj) ** extra
            total += term
            a = abs(term)
            if a > scale:
                scale = a
            if terminate_at is None and a <= tol * abs(total):
                return [total], [scale]
            pj *= p
        if terminate_at is None:
            raise NonConvergent(f"series did not converge within {max_terms} terms")
        return [total], [scale]

    return _from_mp(_adaptive(compute)[0])


@dataclass(frozen=True)
class SpectralParameterL:
    """Spectral parameter l with e_plus = q^{2l+N-1} and z = (e_plus + 1/e_plus)/2."""

    l: complex
    ctx: QContext

    @property
    def exponent(self) -> complex:
        return 2 * self.l + self.ctx.N - 1

    @property
    def e_plus(self) -> complex:
        return cmath.exp(self.exponent * math.log(self.ctx.q))

    @property
    def z(self) -> complex:
        e = self.e_plus
        return (e + 1 / e) / 2

    @property
    def is_real(self) -> bool:
        return complex(self.l).imag == 0

    @classmethod
    def critical(cls, theta: float, ctx: QContext) -> "SpectralParameterL":
        """Point on Re l = -(N-1)/2 with e_plus = e^{i theta}."""
        return cls(complex(-(ctx.N - 1) / 2, theta / (2 * math.log(ctx.q))), ctx)

    @classmethod
    def from_z(cls, z: float, ctx: QContext) -> "SpectralParameterL":
        """Parameter with the given z, taking the root w of w^2 - 2zw + 1 with |w| <= 1."""
        z = complex(z)
        if z.imag == 0 and abs(z.real) <= 1:
            return cls.critical(math.acos(z.real), ctx)
        root = cmath.sqrt(z * z - 1)
        w = z - root if abs(z - root) <= 1 else z + root
        l = (cmath.log(w) / math.log(ctx.q) - (ctx.N - 1)) / 2
        return cls(l, ctx)

    def reflected(self) -> "SpectralParameterL":
        """l -> -l-(N-1), which leaves z and Phi_l unchanged."""
        return SpectralParameterL(-self.l - (self.ctx.N - 1), self.ctx)


def _as_param(l, ctx: QContext) -> SpectralParameterL:
    return l if isinstance(l, SpectralParameterL) else SpectralParameterL(l, ctx)


def _mp_l(lp: SpectralParameterL):
    l = complex(lp.l)
    return mp.mpf(l.real) if l.imag == 0 else mp.mpc(l.real, l.imag)


def phi_l(k: int, l, ctx: QContext, max_terms: int = 10000):
    """Phi_l(q^{-2k}) = 3phi2(q^{-2k}, q^{-2l}, q^{2(l+N-1)}; q^{2n}, 0; q^2, q^2).

    Exact terminating sum of k+1 terms. Returns float for real l.
    """
    lp = _as_param(l, ctx)
    if k < 0:
        raise ValueError("k must be >= 0")
    N, n = ctx.N, ctx.n

    def qm():
        return mp.mpf(ctx.q)

    val = phi_series(
        [lambda: qm() ** (-2 * k), lambda: qm() ** (-2 * _mp_l(lp)), lambda: qm() ** (2 * (_mp_l(lp) + N - 1))],
        [lambda: qm() ** (2 * n), 0.0],
        lambda: qm() ** 2,
        lambda: qm() ** 2,
        max_terms=max_terms,
        terminate_at=min(k, max_terms),
    )
    if lp.is_real and isinstance(val, complex):
        assert abs(val.imag) < 1e-13 * max(1.0, abs(val))
        val = val.real
    return val


def _realify(v, dps: int):
    if isinstance(v, mp.mpc) and abs(v.imag) <= abs(v) * mp.mpf(10) ** (_GUARD_DPS - dps):
        return v.real
    return v


def phi_l_grid(kmax: int, l, ctx: QContext) -> np.ndarray:
    """Phi_l(q^{-2k}) for k = 0..kmax by the terminating series.

    The k-independent coefficient (q^{-2l}, q^{2l+2N-2}; q^2)_j q^{2j}
    / (q^{2n}, q^2; q^2)_j is shared across grid points.
    """
    lp = _as_param(l, ctx)
    N, n = ctx.N, ctx.n

    def compute(dps):
        qm = mp.mpf(ctx.q)
        lm = _mp_l(lp)
        p = qm * qm
        u1 = qm ** (-2 * lm)
        u2 = qm ** (2 * (lm + N - 1))
        # (1 - u1 t)(1 - u2 t) only needs u1 + u2 and u1 u2, which are real
        # for real l and on the critical line; real arithmetic is much cheaper.
        usum, uprod = _realify(u1 + u2, dps), _realify(u1 * u2, dps)
        b = p**n
        coef = [mp.mpf(1)]
        pj = mp.mpf(1)
        for j in range(kmax):
            coef.append(coef[-1] * (1 - usum * pj + uprod * pj * pj) / ((1 - pj * p) * (1 - b * pj)) * p)
            pj *= p
        vals, scales = [], []
        for k in range(kmax + 1):
            x = qm ** (-2 * k)
            poch = mp.mpf(1)
            total = coef[0]
            scale = abs(coef[0])
            pj = mp.mpf(1)
            for j in range(1, k + 1):
                poch *= 1 - x * pj
                t = poch * coef[j]
                total += t
                if abs(t) > scale:
                    scale = abs(t)
                pj *= p
            vals.append(total)
            scales.append(scale)
        return vals, scales

    out =[_from_mp(v) for v in _adaptive(compute)]
    if lp.is_real:
        return np.array([v.real if isinstance(v, complex) else v for v in out], dtype=float)
    return np.array(out, dtype=complex)
