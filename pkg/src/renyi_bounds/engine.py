"""Batched mirror-descent engine over products of state simplices.

The engine optimizes functionals of the form ``Phi(f(tau))`` where ``tau`` is
a tensor product of factors, some fixed and some variable, ``f`` is a matrix
power or the logarithm, and ``Phi`` is one of

* ``"q"``: ``tr[(R P R)^a]`` with ``R = X^{1/2}`` for a PSD ``X``;
* ``"norm"``: ``|| P X P ||_a^a`` for a general square ``X``;
* ``"rel"``: ``-tr[X P]`` (with ``f = log`` this is the Umegaki cross term).

Variable factors are density matrices (``"state"``) or probability vectors
placed on the diagonal (``"diag"``).  Gradients are exact: the chain rule
through ``f`` uses Daleckii-Krein divided differences.  The update is the
matrix exponentiated-gradient step ``sigma <- exp(log sigma - eta g) / tr``
with Armijo backtracking, and the stopping rule is the Frank-Wolfe gap,
which upper-bounds the suboptimality on convex instances.

All arrays carry a leading batch axis so that many instances share one set
of numpy calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LOG = "log"


@dataclass
class Factor:
    """One tensor factor of ``tau``.

    ``mode`` is ``"fixed"`` (with ``value`` of shape ``(n, d, d)``),
    ``"state"`` or ``"diag"`` (variable).
    """

    dim: int
    mode: str = "state"
    value: np.ndarray | None = None

    @property
    def variable(self) -> bool:
        return self.mode != "fixed"


@dataclass
class Problem:
    """A batch of instances sharing structure.

    ``sense = +1`` minimizes ``Phi``, ``sense = -1`` maximizes it.
    """

    kind: str
    X: np.ndarray
    a: float
    power: float | str
    factors: list
    sense: int = 1
    R: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=complex)
        if self.kind == "q" and self.R is None:
            self.R = psd_sqrt(self.X)
        if len(self.factors) > 2:
            raise ValueError("at most two tensor factors are supported")
        if sum(f.variable for f in self.factors) == 0:
            raise ValueError("no variable factor")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def subset(self, idx) -> "Problem":
        facs = [Factor(f.dim, f.mode, None if f.value is None else f.value[idx])
                for f in self.factors]
        return Problem(self.kind, self.X[idx], self.a, self.power, facs, self.sense,
                       None if self.R is None else self.R[idx])


@dataclass
class EngineResult:
    value: np.ndarray
    variables: list
    gap: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    history: list = field(default_factory=list)


def _herm(A):
    return 0.5 * (A + A.conj().swapaxes(-1, -2))


def _cut(lam):
    m = np.max(np.abs(lam), axis=-1, keepdims=True)
    return np.where(m > 0, 1e-12 * m, 1e-300)


def psd_sqrt(X):
    lam, U = np.linalg.eigh(_herm(X))
    lam = np.where(lam > _cut(lam), lam, 0.0)
    return (U * np.sqrt(lam)[..., None, :]) @ U.conj().swapaxes(-1, -2)


def _fvals(lam, power):
    lam = np.maximum(lam, 1e-300)
    if power == LOG:
        return np.log(lam)
    return lam ** power


def _fprime(lam, power):
    lam = np.maximum(lam, 1e-300)
    if power == LOG:
        return 1.0 / lam
    return power * lam ** (power - 1)


def _divided_differences(lam, power):
    """Daleckii-Krein matrix ``(f(l_i) - f(l_j)) / (l_i - l_j)`` (stacked)."""
    fl = _fvals(lam, power)
    li = lam[..., :, None]
    lj = lam[..., None, :]
    num = fl[..., :, None] - fl[..., None, :]
    den = li - lj
    close = np.abs(den) <= 1e-9 * np.maximum(np.abs(li), np.abs(lj))
    dp = _fprime(lam, power)
    mean_der = 0.5 * (dp[..., :, None] + dp[..., None, :])
    return np.where(close, mean_der, num / np.where(close, 1.0, den))


def _fixed_power(T, power):
    lam, U = np.linalg.eigh(_herm(T))
    keep = lam > _cut(lam)
    if power == LOG:
        vals = np.where(keep, np.log(np.where(keep, lam, 1.0)), 0.0)
    elif power == 0:
        vals = keep.astype(float)
    else:
        vals = np.where(keep, np.maximum(lam, 1e-300) ** power, 0.0)
    return (U * vals[..., None, :]) @ U.conj().swapaxes(-1, -2)


def _bkron(A, B):
    n, a, _ = A.shape
    b = B.shape[-1]
    return np.einsum("nij,nkl->nikjl", A, B).reshape(n, a * b, a * b)


class _Point:
    """Cached spectral data of the variable factors at one iterate."""

    def __init__(self, problem: Problem, variables):
        self.vars = variables
        self.fpow = []
        self.spectra = []
        iv = 0
        for f in problem.factors:
            if f.mode == "fixed":
                self.fpow.append(("fixed", _fixed_power(f.value, problem.power)))
                self.spectra.append(None)
                continue
            v = variables[iv]
            iv += 1
            if f.mode == "diag":
                w = np.maximum(v, 1e-300)
                self.spectra.append(("diag", w))
                self.fpow.append(("diag", _fvals(w, problem.power)))
            else:
                lam, U = np.linalg.eigh(_herm(v))
                lam = np.maximum(lam, 1e-300)
                self.spectra.append(("state", lam, U))
                fv = (U * _fvals(lam, problem.power)[..., None, :]) @ U.conj().swapaxes(-1, -2)
                self.fpow.append(("state", fv))

    def full_power(self, problem: Problem):
        mats = []
        for kind, val in self.fpow:
            if kind == "diag":
                mats.append(val[..., :, None] * np.eye(val.shape[-1]))
            else:
                mats.append(val)
        if problem.power == LOG and len(mats) == 2:
            dA, dB = mats[0].shape[-1], mats[1].shape[-1]
            IA = np.broadcast_to(np.eye(dA), mats[0].shape)
            IB = np.broadcast_to(np.eye(dB), mats[1].shape)
            return _bkron(mats[0], IB) + _bkron(IA, mats[1])
        P = mats[0]
        for M in mats[1:]:
            P = _bkron(P, M)
        return P


def _phi_and_gp(problem: Problem, P, need_grad=True):
    k = problem.kind
    a = problem.a
    if k == "q":
        R = problem.R
        M = _herm(R @ P @ R)
        lam, U = np.linalg.eigh(M)
        keep = lam > _cut(lam)
        lp = np.where(keep, np.maximum(lam, 1e-300), 1.0)
        phi = np.sum(np.where(keep, lp ** a, 0.0), axis=-1)
        if not need_grad:
            return phi, None
        w = np.where(keep, lp ** (a - 1), 0.0)
        Mp = (U * w[..., None, :]) @ U.conj().swapaxes(-1, -2)
        return phi, a * _herm(R @ Mp @ R)
    if k == "norm":
        X = problem.X
        A = P @ X @ P
        if not need_grad:
            s = np.linalg.svd(A, compute_uv=False)
            return np.sum(s ** a, axis=-1), None
        U, s, Vh = np.linalg.svd(A)
        keep = s > _cut(s)
        w = np.where(keep, np.maximum(s, 1e-300) ** (a - 1), 0.0)
        phi = np.sum(np.where(keep, s ** a, 0.0), axis=-1)
        K = (Vh.conj().swapaxes(-1, -2) * w[..., None, :]) @ U.conj().swapaxes(-1, -2)
        Z = X @ P @ K + K @ P @ X
        return phi, a * _herm(Z)
    if k == "rel":
        X = problem.X
        phi = -np.einsum("nij,nji->n", X, P).real
        return phi, (-_herm(X) if need_grad else None)
    raise ValueError(f"unknown objective kind {k!r}")


def _pullback(problem: Problem, pt: _Point, GP):
    """Gradients with respect to each variable factor."""
    facs = problem.factors
    out = []
    if len(facs) == 1:
        gf = [GP]
    else:
        dA, dB = facs[0].dim, facs[1].dim
        n = GP.shape[0]
        G4 = GP.reshape(n, dA, dB, dA, dB)
        PA = pt.fpow[0][1]
        PB = pt.fpow[1][1]
        if pt.fpow[0][0] == "diag":
            PA = PA[..., :, None] * np.eye(dA)
        if pt.fpow[1][0] == "diag":
            PB = PB[..., :, None] * np.eye(dB)
        if problem.power == LOG:
            PA = np.broadcast_to(np.eye(dA), PA.shape)
            PB = np.broadcast_to(np.eye(dB), PB.shape)
        gB = np.einsum("nij,njbic->nbc", PA, G4)
        gA = np.einsum("nij,najbi->nab", PB, G4)
        gf = [gA, gB]
    for f, sp, g in zip(facs, pt.spectra, gf):
        if f.mode == "fixed":
            continue
        if sp[0] == "diag":
            w = sp[1]
            gd = np.einsum("nii->ni", g).real
            out.append(gd * _fprime(w, problem.power))
        else:
            lam, U = sp[1], sp[2]
            Gt = U.conj().swapaxes(-1, -2) @ g @ U
            Gt = Gt * _divided_differences(lam, problem.power)
            out.append(_herm(U @ Gt @ U.conj().swapaxes(-1, -2)))
    return out


def evaluate(problem: Problem, variables, need_grad=True):
    """Return ``(Phi, grads, point)`` at the given variable factors."""
    pt = _Point(problem, variables)
    P = pt.full_power(problem)
    phi, GP = _phi_and_gp(problem, P, need_grad)
    grads = _pullback(problem, pt, GP) if need_grad else None
    return phi, grads, pt


def _inner(g, v, mode):
    if mode == "diag":
        return np.sum(g * v, axis=-1)
    return np.einsum("nij,nji->n", g, v).real


def _gap(g, v, mode):
    if mode == "diag":
        return np.sum(g * v, axis=-1) - g.min(axis=-1)
    return np.einsum("nij,nji->n", g, v).real - np.linalg.eigvalsh(g)[..., 0]


def _spread(g, mode):
    if mode == "diag":
        return g.max(axis=-1) - g.min(axis=-1)
    lam = np.linalg.eigvalsh(g)
    return lam[..., -1] - lam[..., 0]


def _md_step(v, g, eta, sp, mode, mix, rep):
    if mode == "diag":
        lw = np.log(np.maximum(v, 1e-300)) - eta[:, None] * g
        lw -= lw.max(axis=-1, keepdims=True)
        w = np.exp(lw)
        w /= w.sum(axis=-1, keepdims=True)
        low = (w.min(axis=-1) < mix)[:, None]
        return np.where(low, (1 - mix) * w + mix * rep, w)
    lam, U = sp[1], sp[2]
    L = (U * np.log(lam)[..., None, :]) @ U.conj().swapaxes(-1, -2)
    H = _herm(L - eta[:, None, None] * g)
    mu, V = np.linalg.eigh(H)
    mu = mu - mu[..., -1:]
    e = np.exp(mu)
    e /= e.sum(axis=-1, keepdims=True)
    S = _herm((V * e[..., None, :]) @ V.conj().swapaxes(-1, -2))
    low = (e.min(axis=-1) < mix)[:, None, None]
    return np.where(low, (1 - mix) * S + mix * rep, S)


def _default_rep(f: Factor):
    if f.mode == "diag":
        return np.full(f.dim, 1.0 / f.dim)
    return np.eye(f.dim) / f.dim


def mirror_descent(problem: Problem, init, tol=1e-9, max_iter=10000, mix=1e-8,
                   reps=None, armijo=1e-4, stall_tol=1e-5, abs_tol=1e-300):
    """Exponentiated-gradient descent on ``sense * Phi``.

    Parameters
    ----------
    problem : Problem
        Batch of instances.
    init : list of ndarray
        Initial values of the variable factors, each with leading batch axis.
    tol : float
        Relative Frank-Wolfe gap tolerance: stop when ``gap <= tol * |Phi|``.
    mix : float
        Weight of the representative state mixed into an iterate whose
        smallest eigenvalue drops below ``mix``; keeps iterates interior.
    stall_tol : float
        When the objective stops improving at machine precision before the
        gap reaches ``tol``, the run still counts as converged if the
        relative gap is below ``stall_tol``.  The objective error is then
        far below the gap, which scales like its square root.

    Returns
    -------
    EngineResult
        ``gap`` holds the final Frank-Wolfe gap, a certified bound on the
        suboptimality for convex instances.
    """
    n = problem.n
    var_facs = [f for f in problem.factors if f.variable]
    reps = reps or [_default_rep(f) for f in var_facs]
    cur = [np.array(v, dtype=float if f.mode == "diag" else complex, copy=True)
           for v, f in zip(init, var_facs)]
    value = np.full(n, np.nan)
    gap_out = np.full(n, np.inf)
    iters = np.zeros(n, dtype=int)
    conv = np.zeros(n, dtype=bool)
    eta = np.full(n, np.nan)
    flat = np.zeros(n, dtype=int)
    active = np.arange(n)
    sense = problem.sense

    for it in range(max_iter + 1):
        if active.size == 0:
            break
        sub = problem.subset(active) if active.size != n else problem
        vs = [v[active] for v in cur]
        phi, grads, pt = evaluate(sub, vs)
        gs = [sense * g for g in grads]
        F = sense * phi
        gap = sum(_gap(g, v, f.mode) for g, v, f in zip(gs, vs, var_facs))
        value[active] = phi
        gap_out[active] = gap
        iters[active] = it
        scale = np.maximum(np.abs(phi), abs_tol)
        done = gap <= tol * scale
        stuck = flat[active] >= 3
        conv[active[done]] = True
        conv[active[stuck & ~done]] = gap[stuck & ~done] <= stall_tol * scale[stuck & ~done]
        if it == max_iter:
            break
        keep = ~(done | stuck)
        if not keep.any():
            break
        active, vs, gs, F = active[keep], [v[keep] for v in vs], [g[keep] for g in gs], F[keep]
        sub = problem.subset(active)
        spectra = [pt.spectra[i] for i, f in enumerate(problem.factors) if f.variable]
        spectra = [tuple(s[0:1]) + tuple(x[keep] for x in s[1:]) for s in spectra]
        e = eta[active]
        fresh = np.isnan(e)
        if fresh.any():
            spread = sum(_spread(g, f.mode) for g, f in zip(gs, var_facs))
            e = np.where(fresh, 1.0 / np.maximum(spread, 1e-300), e)
        pending = np.arange(active.size)
        new_vs = [v.copy() for v in vs]
        Fnew = F.copy()
        for bt in range(60):
            sub_p = sub.subset(pending)
            prop = []
            for j, f in enumerate(var_facs):
                sp = spectra[j]
                sp_p = tuple(sp[0:1]) + tuple(x[pending] for x in sp[1:])
                prop.append(_md_step(vs[j][pending], gs[j][pending], e[pending], sp_p,
                                     f.mode, mix, reps[j]))
            phi_new, _, _ = evaluate(sub_p, prop, need_grad=False)
            Fn = sense * phi_new
            lin = sum(_inner(gs[j][pending], prop[j] - vs[j][pending], f.mode)
                      for j, f in enumerate(var_facs))
            ok = Fn <= F[pending] + armijo * np.minimum(lin, 0) + 4e-16 * np.abs(F[pending])
            ok &= np.isfinite(Fn)
            for j in range(len(var_facs)):
                new_vs[j][pending[ok]] = prop[j][ok]
            Fnew[pending[ok]] = Fn[ok]
            if bt == 0:
                e[pending[ok]] *= 2.0
            pending = pending[~ok]
            if pending.size == 0:
                break
            e[pending] *= 0.25
        eta[active] = e
        tiny = (F - Fnew) <= 1e-14 * np.abs(F)
        tiny[pending] = True
        flat[active] = np.where(tiny, flat[active] + 1, 0)
        for j in range(len(var_facs)):
            cur[j][active] = new_vs[j]
    return EngineResult(value, cur, gap_out, iters, conv)
