"""The c-function, large-x asymptotics of Phi_l and the w-c identity."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .asc import ASCParams, asc_weight
from .errors import PoleError
from .hyperg import SpectralParameterL, phi_l
from .qcore import DEFAULT_TOL, QContext, qpochhammer_inf

POLE_EPS = 1e-12


def _qpow(exponent: complex, q: float) -> complex:
    val = cmath.exp(complex(exponent) * math.log(q))
    return val.real if val.imag == 0 else val


def _denominator(a: complex, base: float, tol: float) -> complex:
    """(a; base)_inf, refusing to return a value when a factor nearly vanishes."""
    t = a
    while abs(t) > 0.5:
        if abs(1 - t) < POLE_EPS:
            raise PoleError(f"denominator product ({a!r}; {base})_inf has a vanishing factor")
        t *= base
    if abs(1 - t) < POLE_EPS:
        raise PoleError(f"denominator product ({a!r}; {base})_inf has a vanishing factor")
    return qpochhammer_inf(a, base, tol)


def c_function(l, ctx: QContext, tol: float = DEFAULT_TOL) -> complex:
    """c(l) = (q^{2(l+N-1)}, q^{2(l+n)}; q^2)_inf / (q^{2(2l+N-1)}, q^{2n}; q^2)_inf."""
    q, n, N = ctx.q, ctx.n, ctx.N
    p = q * q
    l = complex(l)
    num = qpochhammer_inf(_qpow(2 * (l + N - 1), q), p, tol) * qpochhammer_inf(_qpow(2 * (l + n), q), p, tol)
    den = _denominator(_qpow(2 * (2 * l + N - 1), q), p, tol) * qpochhammer_inf(p**n, p, tol)
    val = num / den
    return val.real if l.imag == 0 and isinstance(val, complex) else val


def asymptotics_check(l, kmax: int, ctx: QContext) -> tuple[complex, complex]:
    """(Phi_l(x) / x^s, c-value) at x = q^{-2 kmax} for the dominant exponent s.

    Above the critical line s = l and the target is c(l); below it
    s = -l-(N-1) and the target is c(-l-(N-1)).
    """
    l = complex(l)
    crit = -(ctx.N - 1) / 2
    if abs(l.real - crit) < 1e-14:
        raise ValueError("l lies on the critical line, where neither exponent dominates")
    s = l if l.real > crit else -l - (ctx.N - 1)
    phi = phi_l(kmax, l.real if l.imag == 0 else l, ctx)
    ratio = phi * _qpow(2 * s * kmax, ctx.q)
    return ratio, c_function(s, ctx)


def wc_identity_check(z: float, ctx: QContext, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(w(z), 1 / (c(l) c(-l-(N-1)) (q^{2n}; q^2)_inf^2)) with z = cos theta, e^{i theta} = q^{2l+N-1}."""
    if not (-1.0 < z < 1.0):
        raise ValueError("z must lie in (-1, 1)")
    lp = SpectralParameterL.critical(math.acos(z), ctx)
    lhs = float(asc_weight(np.array(z), ASCParams.from_context(ctx)))
    p = ctx.q**2
    prod = c_function(lp.l, ctx, tol) * c_function(lp.reflected().l, ctx, tol)
    rhs = 1.0 / (prod * qpochhammer_inf(p**ctx.n, p, tol) ** 2)
    return lhs, float(np.real(rhs))
