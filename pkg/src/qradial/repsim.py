"""Truncated matrices of the *-representation T, the weight operator Q and the trace integral.

Basis vectors e(i_1, ..., i_{N-1}) have i_j <= 0 for j <= n and i_j >= 1 for
j > n. The window keeps -M <= i_j <= 0 and 1 <= i_j <= M respectively.
Within the window the only transitions that leave it are t_j lowering i_j
below -M (j <= n) and t_j^* raising i_j above M (n < j < N); they are dropped.
The opposite ends are closed by zero coefficients, not by truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ValidationError
from .qcore import GridFunction, QContext
from .radial import radial_integral

DEFAULT_CAPACITY = 2_000_000


@dataclass(frozen=True)
class TruncatedRep:
    """Sparse T(t_j), T(t_j^*) for j = 1..N on the window |i_j| <= M.

    ``indices`` has shape (size, N-1); ``q_exponent`` holds 2 sum_j (N-j) i_j,
    so the diagonal of Q is const1 q^{q_exponent}.
    """

    ctx: QContext
    M: int
    indices: np.ndarray
    T: tuple
    Tstar: tuple
    q_exponent: np.ndarray

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    @property
    def qdiag(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.ctx.const1 * self.ctx.q ** self.q_exponent.astype(float)

    @property
    def radial_index(self) -> np.ndarray:
        """K with T(x_{n+1}) e(i) = q^{-2K} e(i), i.e. K = -(i_1 + ... + i_n)."""
        return -self.indices[:, : self.ctx.n].sum(axis=1)

    @property
    def interior(self) -> np.ndarray:
        """Mask of basis vectors whose images under every single generator stay in the window."""
        n = self.ctx.n
        ok = np.all(self.indices[:, :n] > -self.M, axis=1)
        if self.indices.shape[1] > n:
            ok &= np.all(self.indices[:, n:] < self.M, axis=1)
        return ok

    def x_terms(self, k: int) -> list[tuple[float, sp.csr_matrix]]:
        """T(x_k) as signed products T(t_j) T(t_j^*), kept apart for residual scaling."""
        n, N = self.ctx.n, self.ctx.N
        if not 1 <= k <= N:
            raise ValidationError("k must lie in 1..N")
        terms = [(1.0, self.T[j - 1] @ self.Tstar[j - 1]) for j in range(max(k, n + 1), N + 1)]
        terms += [(-1.0, self.T[j - 1] @ self.Tstar[j - 1]) for j in range(k, n + 1)]
        return terms

    def x(self, k: int) -> sp.csr_matrix:
        """T(x_k) assembled from the generators."""
        return sum(c * A for c, A in self.x_terms(k)).tocsr()

    def c(self) -> sp.csr_matrix:
        return self.x(1)

    def function_operator(self, f: GridFunction) -> sp.csr_matrix:
        """T(f(x_{n+1})), diagonal with entries f(q^{2(i_1+...+i_n)})."""
        vals = np.array([f(int(K)) for K in self.radial_index])
        return sp.diags(vals).tocsr()

    def projection_f0(self) -> sp.csr_matrix:
        return self.function_operator(GridFunction.indicator(0))


def _window(ctx: QContext, M: int) -> np.ndarray:
    n, N = ctx.n, ctx.N
    axes = [np.arange(-M, 1)] * n + [np.arange(1, M + 1)] * (N - 1 - n)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def build_rep(M: int, ctx: QContext, capacity: int = DEFAULT_CAPACITY) -> TruncatedRep:
    if M < 2:
        raise ValidationError("M must be >= 2")
    n, N, q = ctx.n, ctx.N, ctx.q
    size = (M + 1) ** n * M ** (N - 1 - n)
    if size > capacity:
        raise CapacityError(f"window has {size} basis vectors, above the cap {capacity}")
    idx = _window(ctx, M)
    shape = [M + 1] * n + [M] * (N - 1 - n)
    shift = np.where(np.arange(N - 1) < n, M, -1)

    def position(ind):
        return np.ravel_multi_index(tuple((ind + shift).T), shape)

    cols = np.arange(size)
    T, Tstar = [], []
    for j in range(1, N):
        pre = idx[:, : j - 1].sum(axis=1).astype(float)
        ij = idx[:, j - 1].astype(float)
        lower = idx.copy()
        lower[:, j - 1] -= 1
        raise_ = idx.copy()
        raise_[:, j - 1] += 1
        if j <= n:
            c_low = q**pre * np.sqrt(q ** (2 * (ij - 1)) - 1)
            c_up = q**pre * np.sqrt(np.maximum(q ** (2 * ij) - 1, 0.0))
            keep_low = idx[:, j - 1] > -M
            keep_up = idx[:, j - 1] < 0
        else:
            c_low = q**pre * np.sqrt(np.maximum(1 - q ** (2 * (ij - 1)), 0.0))
            c_up = q**pre * np.sqrt(1 - q ** (2 * ij))
            keep_low = idx[:, j - 1] > 1
            keep_up = idx[:, j - 1] < M
        T.append(_sparse(position(lower[keep_low]), cols[keep_low], c_low[keep_low], size))
        Tstar.append(_sparse(position(raise_[keep_up]), cols[keep_up], c_up[keep_up], size))
    diag = q ** idx.sum(axis=1).astype(float)
    T.append(sp.diags(diag).tocsr())
    Tstar.append(sp.diags(diag).tocsr())
    weights = 2 * (N - np.arange(1, N))
    q_exponent = idx @ weights
    return TruncatedRep(ctx, M, idx, tuple(T), tuple(Tstar), q_exponent)


def _sparse(rows, cols, data, size) -> sp.csr_matrix:
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size))


def _relative_residual(terms: list[tuple[float, sp.spmatrix]], mask: np.ndarray) -> float:
    """max over interior columns of |sum c_i A_i| / sum |c_i| |A_i| (entrywise)."""
    total = sum(c * A for c, A in terms)
    scale = sum(abs(c) * abs(A) for c, A in terms)
    total = sp.csr_matrix(total)[:, mask]
    scale = sp.csr_matrix(scale)[:, mask]
    if total.nnz == 0:
        return 0.0
    total = total.tocoo()
    s = np.asarray(scale.tocsr()[total.row, total.col]).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(s > 0, np.abs(total.data) / s, np.abs(total.data))
    return float(r.max()) if r.size else 0.0


def check_relations(rep: TruncatedRep, ctx: QContext | None = None) -> dict[str, float]:
    """Max relative residual of each defining relation on the interior subspace."""
    ctx = rep.ctx if ctx is None else ctx
    q, n, N = ctx.q, ctx.n, ctx.N
    T, S = rep.T, rep.Tstar
    mask = rep.interior
    eye = sp.identity(rep.size, format="csr")
    g = q**-2 - 1
    out: dict[str, float] = {}

    worst = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            worst = max(worst, _relative_residual([(1.0, T[i] @ T[j]), (-q, T[j] @ T[i])], mask))
    out["t_i t_j = q t_j t_i (i<j)"] = worst

    worst = 0.0
    for i in range(N):
        for j in range(N):
            if i != j:
                worst = max(worst, _relative_residual([(1.0, T[i] @ S[j]), (-q, S[j] @ T[i])], mask))
    out["t_i t_j* = q t_j* t_i (i!=j)"] = worst

    upper = 0.0
    lower = 0.0
    for i in range(1, N + 1):
        terms = [(1.0, T[i - 1] @ S[i - 1]), (-1.0, S[i - 1] @ T[i - 1])]
        if i > n:
            terms += [(-g, T[k - 1] @ S[k - 1]) for k in range(i + 1, N + 1)]
            upper = max(upper, _relative_residual(terms, mask))
        else:
            terms += [(-g, T[k - 1] @ S[k - 1]) for k in range(i + 1, n + 1)]
            terms += [(g, T[k - 1] @ S[k - 1]) for k in range(n + 1, N + 1)]
            lower = max(lower, _relative_residual(terms, mask))
    out["t_i t_i* (i>n)"] = upper
    out["t_i t_i* (i<=n)"] = lower

    # x_k is a signed sum of large products, so residuals are scaled by the products themselves.
    out["c = 1"] = _relative_residual(rep.x_terms(1) + [(-1.0, eye)], mask)

    xs = {k: rep.x_terms(k) for k in range(1, N + 1)}
    worst = 0.0
    for k in range(1, N + 1):
        expected = q ** (2 * rep.indices[:, : k - 1].sum(axis=1).astype(float))
        worst = max(worst, _relative_residual(xs[k] + [(-1.0, sp.diags(expected))], mask))
    out["x_k diagonal"] = worst

    worst = 0.0
    for j in range(1, N + 1):
        for k in range(1, N + 1):
            factor = q * q if j < k else 1.0
            terms = [(c, T[j - 1] @ A) for c, A in xs[k]] + [(-factor * c, A @ T[j - 1]) for c, A in xs[k]]
            worst = max(worst, _relative_residual(terms, mask))
    out["t_j x_k = q^2 x_k t_j (j<k), x_k t_j (j>=k)"] = worst

    f0 = rep.projection_f0()
    worst = 0.0
    for j in range(1, n + 1):
        worst = max(worst, abs(S[j - 1] @ f0).max(), abs(f0 @ T[j - 1]).max())
    out["t_j* f_0 = f_0 t_j = 0 (j<=n)"] = float(worst)
    return out


@dataclass(frozen=True)
class TraceResult:
    trace: float
    radial: float
    tailbound: float

    @property
    def passed(self) -> bool:
        return abs(self.trace - self.radial) <= self.tailbound + 1e-10 * abs(self.radial)


def trace_integral(f: GridFunction, rep: TruncatedRep, ctx: QContext | None = None):
    """Tr(T(f) Q) over the window."""
    ctx = rep.ctx if ctx is None else ctx
    K = rep.radial_index
    vals = np.array([f(int(k)) for k in K])
    nz = vals != 0
    if not nz.any():
        return 0.0
    return ctx.const1 * np.sum(vals[nz] * ctx.q ** rep.q_exponent[nz].astype(float))


def trace_tail_bound(f: GridFunction, rep: TruncatedRep, ctx: QContext | None = None) -> float:
    """Bound on |Tr(T(f) Q) - window sum| from the clipped coordinates j > n.

    The trace factorizes into the sum over i_1..i_n (complete inside the
    window when supp f <= M) times prod_{j>n} sum_{i>=1} r_j^i with
    r_j = q^{2(N-j)}. Clipping at M leaves out const1 A (prod G_j - prod G_j^M)
    with A the absolute first factor.
    """
    ctx = rep.ctx if ctx is None else ctx
    q, n, N, M = ctx.q, ctx.n, ctx.N, rep.M
    if f.kmax > M:
        raise ValidationError(f"support of f reaches k={f.kmax}, beyond the window M={M}")
    sel = np.all(rep.indices[:, n:] == 1, axis=1) if N - 1 > n else np.ones(rep.size, dtype=bool)
    K = rep.radial_index[sel]
    exps = rep.indices[sel, :n] @ (2 * (N - np.arange(1, n + 1)))
    A = sum(abs(f(int(k))) * q ** float(e) for k, e in zip(K, exps))
    full, clipped = 1.0, 1.0
    for j in range(n + 1, N):
        r = q ** (2 * (N - j))
        full *= r / (1 - r)
        clipped *= r * (1 - r**M) / (1 - r)
    return ctx.const1 * A * (full - clipped)


def radial_equivalence_check(f: GridFunction, rep: TruncatedRep, ctx: QContext | None = None) -> TraceResult:
    ctx = rep.ctx if ctx is None else ctx
    return TraceResult(
        float(np.real(trace_integral(f, rep, ctx))),
        float(np.real(radial_integral(f, ctx))),
        trace_tail_bound(f, rep, ctx),
    )
