"""Brute-force reference values for small optimization problems.

Independent of the mirror-descent engine: the search is an exhaustive grid
over eigenvalue simplices crossed with a sample of Haar unitaries, followed
by a local polish of the best grid points with a generic quasi-Newton method
(finite-difference gradients) on the parameterization ``sigma = A A^dagger /
tr(A A^dagger)``.  Spectral decompositions in the polish come from ``scipy.linalg``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import unitary_group

from .divergences import AlphaLimit, parse_alpha
from .errors import DomainError
from .linalg import unpack_state

__all__ = ["simplex_grid", "oracle_set_divergence", "oracle_cond_entropy", "oracle_gen_mutual_info",
           "oracle_mutual_info", "oracle_c_norm_diagonal", "GRID_BUDGET"]

GRID_BUDGET = 50_000


def simplex_grid(d: int, resolution: int) -> np.ndarray:
    """All points of the ``d``-simplex with coordinates in ``{0, 1/N, ..., 1}``."""
    pts = [c for c in itertools.combinations_with_replacement(range(d), resolution)]
    out = np.zeros((len(pts), d))
    for i, c in enumerate(pts):
        out[i] = np.bincount(c, minlength=d)
    return out / resolution


def _grid_resolution(d, resolution, n_unitaries, budget):
    """Largest resolution ``<= resolution`` keeping points times unitaries within ``budget``."""
    r = resolution
    while r > 2 and math.comb(r + d - 1, d - 1) * n_unitaries > budget:
        r = int(r * 0.8)
    return r


def _candidates(d, resolution, n_unitaries, rng, budget):
    if d == 1:
        return np.ones((1, 1, 1), dtype=complex)
    r = _grid_resolution(d, resolution, n_unitaries, budget)
    lam = simplex_grid(d, r)
    U = unitary_group.rvs(d, size=n_unitaries, random_state=rng).reshape(n_unitaries, d, d)
    U[0] = np.eye(d)
    S = np.einsum("uij,pj,ukj->upik", U, lam, U.conj())
    return S.reshape(-1, d, d)


def _batch_divergence(rho, taus, alpha):
    """Sandwiched divergence of ``rho`` to each ``taus[n]`` (plain numpy, grid stage)."""
    lt, Ut = np.linalg.eigh(taus)
    if alpha is AlphaLimit.ONE:
        lr = np.linalg.eigvalsh(rho)
        lr = lr[lr > 1e-15]
        neg = float(np.sum(lr * np.log(lr)))
        logs = np.where(lt > 1e-14, np.log(np.maximum(lt, 1e-300)), -1e6)
        Lt = (Ut * logs[:, None, :]) @ Ut.conj().swapaxes(-1, -2)
        return neg - np.einsum("ij,nji->n", rho, Lt).real
    g = (1 - alpha) / (2 * alpha)
    if alpha > 1:
        pw = np.where(lt > 1e-14, np.maximum(lt, 1e-300) ** g, 1e12)
    else:
        pw = np.maximum(lt, 0) ** g
    P = (Ut * pw[:, None, :]) @ Ut.conj().swapaxes(-1, -2)
    M = P @ rho @ P
    ev = np.maximum(np.linalg.eigvalsh(M), 0)
    with np.errstate(divide="ignore"):
        return np.log(np.sum(ev ** alpha, axis=-1)) / (alpha - 1)


def _divergence(rho, tau, alpha):
    """Sandwiched divergence via ``scipy.linalg`` matrix functions (polish stage)."""
    if alpha is AlphaLimit.ONE:
        return float(np.trace(rho @ (sla.logm(rho + 1e-300 * np.eye(len(rho))) - sla.logm(tau))).real)
    g = (1 - alpha) / (2 * alpha)
    lt, Ut = sla.eigh(tau)
    P = (Ut * np.maximum(lt, 1e-300) ** g) @ Ut.conj().T
    M = P @ rho @ P
    M = 0.5 * (M + M.conj().T)
    ev = np.maximum(sla.eigvalsh(M), 0)
    return float(np.log(np.sum(ev ** alpha)) / (alpha - 1))


def _state_from(x, d):
    A = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
    S = A @ A.conj().T
    return S / np.trace(S).real


def _params_from(sigma, d, floor=1e-6):
    s = (1 - floor) * sigma + floor * np.eye(d) / d
    A = sla.cholesky(0.5 * (s + s.conj().T), lower=True)
    return np.concatenate([A.real.ravel(), A.imag.ravel()])


def _polish(fun, starts, dims):
    """Minimize ``fun(list of states)`` from each start; returns the best value."""
    sizes = [2 * d * d for d in dims]

    def obj(x):
        parts, k = [], 0
        for d, n in zip(dims, sizes):
            parts.append(_state_from(x[k:k + n], d))
            k += n
        v = fun(parts)
        return v if np.isfinite(v) else 1e6

    best = math.inf
    for st in starts:
        x0 = np.concatenate([_params_from(s, d) for s, d in zip(st, dims)])
        best = min(best, obj(x0))
        res = minimize(obj, x0, method="L-BFGS-B", options=dict(maxiter=2000, ftol=1e-15, gtol=1e-11))
        best = min(best, float(res.fun))
    return best


def oracle_set_divergence(rho, kind: str, dims, alpha, tau_a=None, resolution: int = 200,
                          unitaries: int = 500, seed=0, top: int = 2,
                          budget: int = GRID_BUDGET) -> float:
    """Reference value of ``inf_tau D(rho || tau)`` over a small state family.

    Parameters
    ----------
    kind : {"identity", "fixed", "product", "diagonal"}
        ``1/d_A ⊗ sigma_B``, ``tau_A ⊗ sigma_B``, ``sigma_A ⊗ sigma_B`` or diagonal states.
    resolution, unitaries : int
        Simplex points per axis and Haar sample size of the grid stage.  The
        resolution is reduced until the grid has at most ``budget`` points.
    top : int
        Number of best grid points refined by the polish.
    """
    rho = np.asarray(rho, dtype=complex)
    a = parse_alpha(alpha, allow_limits=False) if not isinstance(alpha, AlphaLimit) else alpha
    if a is AlphaLimit.INF:
        raise DomainError("the oracle covers finite orders and alpha -> 1")
    rng = np.random.default_rng(seed)
    dims = tuple(int(x) for x in dims)
    if kind == "diagonal":
        D = dims[0] if len(dims) == 1 else int(np.prod(dims))
        lam = simplex_grid(D, _grid_resolution(D, resolution, 1, budget))
        taus = np.einsum("pj,jk->pjk", lam, np.eye(D)).astype(complex)
        vals = _batch_divergence(rho, taus, a)
        order = np.argsort(vals)[:top]

        def fun_d(x):
            p = np.exp(x - x.max())
            return _divergence(rho, np.diag(p / p.sum()).astype(complex), a)

        best = float(vals[order[0]])
        for i in order:
            x0 = np.log(np.maximum(lam[i], 1e-6))
            res = minimize(fun_d, x0, method="Nelder-Mead",
                           options=dict(xatol=1e-10, fatol=1e-14, maxiter=20000))
            best = min(best, float(res.fun))
        return best
    dA, dB = dims
    if kind in ("identity", "fixed"):
        T = np.eye(dA) / dA if kind == "identity" else np.asarray(tau_a, dtype=complex)
        S = _candidates(dB, resolution, unitaries, rng, budget)
        vals = _batch_divergence(rho, np.einsum("ij,nkl->nikjl", T, S).reshape(-1, dA * dB, dA * dB), a)
        order = np.argsort(vals)[:top]
        fun = lambda parts: _divergence(rho, np.kron(T, parts[0]), a)
        return min(float(vals[order[0]]), _polish(fun, [[S[i]] for i in order], [dB]))
    if kind == "product":
        # nested grid: coarse grids on both factors, then a joint polish
        per = int(math.sqrt(budget))
        SA = _candidates(dA, resolution, unitaries, rng, per)
        SB = _candidates(dB, resolution, unitaries, rng, per)
        SA = SA[rng.choice(len(SA), size=min(len(SA), per), replace=False)]
        SB = SB[rng.choice(len(SB), size=min(len(SB), per), replace=False)]
        best_vals = np.full(len(SA), np.inf)
        best_b = np.zeros(len(SA), dtype=int)
        for i, sa in enumerate(SA):
            v = _batch_divergence(rho, np.einsum("ij,nkl->nikjl", sa, SB).reshape(-1, dA * dB, dA * dB), a)
            best_b[i] = int(np.argmin(v))
            best_vals[i] = v[best_b[i]]
        order = np.argsort(best_vals)[:top]
        fun = lambda parts: _divergence(rho, np.kron(parts[0], parts[1]), a)
        starts = [[SA[i], SB[best_b[i]]] for i in order]
        return min(float(best_vals[order[0]]), _polish(fun, starts, [dA, dB]))
    raise DomainError(f"unsupported oracle kind {kind!r}")


def oracle_cond_entropy(rho, alpha, dims=None, **kw) -> float:
    """Reference ``log d_A - inf_sigma D(rho || 1_A/d_A ⊗ sigma_B)``."""
    mat, dims = unpack_state(rho, dims)
    return math.log(dims[0]) - oracle_set_divergence(mat, "identity", dims, alpha, **kw)


def oracle_gen_mutual_info(rho, tau_a, alpha, dims=None, **kw) -> float:
    """Reference ``inf_sigma D(rho || tau_A ⊗ sigma_B)``."""
    mat, dims = unpack_state(rho, dims)
    return oracle_set_divergence(mat, "fixed", dims, alpha, tau_a=tau_a, **kw)


def oracle_mutual_info(rho, alpha, dims=None, **kw) -> float:
    """Reference ``inf_{sigma_A, sigma_B} D(rho || sigma_A ⊗ sigma_B)``."""
    mat, dims = unpack_state(rho, dims)
    return oracle_set_divergence(mat, "product", dims, alpha, **kw)


def oracle_c_norm_diagonal(X, p: float, s: float, maximize: bool, resolution: int = 200) -> float:
    """Grid plus bounded polish of ``|| c^s X c^s ||_p`` over ``c = diag(t, 1 - t)``."""
    X = np.asarray(X, dtype=complex)
    if X.shape != (2, 2):
        raise DomainError("the diagonal norm oracle covers d = 2")
    sign = -1.0 if maximize else 1.0

    def f(t):
        c = np.array([t, 1 - t]) ** s
        sv = sla.svdvals(c[:, None] * X * c[None, :])
        return sign * (sv.max() if math.isinf(p) else float(np.sum(sv ** p) ** (1 / p)))

    ts = np.linspace(0, 1, resolution + 1)
    if s < 0:
        ts = ts[1:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.array([f(t) for t in ts])
    vals = np.where(np.isfinite(vals), vals, np.inf)
    i = int(np.argmin(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    best = vals[i]
    if hi > lo:
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options=dict(xatol=1e-13))
        best = min(best, float(res.fun))
    return sign * best
