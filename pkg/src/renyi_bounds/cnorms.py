"""The ``C, p, q`` norm family and its dual map.

For a set ``C`` of states and ``1 <= p <= q <= inf`` with ``1/r = 1/p - 1/q``::

    ||X||_{C,p,q}   = sup_{c in C} || c^{1/(2r)} X c^{1/(2r)} ||_p
    ||X||*_{C,p',q'} = inf_{c in C, c > 0} || c^{-1/(2r)} X c^{-1/(2r)} ||_{p'}

where for the dual ``q' <= p'`` and ``1/r = 1/q' - 1/p'``.  Both are
computed with the batched mirror-descent engine.  The infimum is approached
through the interior: after optimization the mixtures
``(1 - delta) c + delta tau_rep`` for ``delta = 1e-2, 1e-4, ..., 1e-10`` are
evaluated and the smallest value is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import engine as E
from .errors import DomainError
from .linalg import random_density
from .variational import DEFAULT, ConvexStateSet, OptimizerConfig, _assemble, _factors, _interior

__all__ = ["NormIndices", "c_norm", "c_norm_batch", "c_norm_dual", "c_norm_dual_batch",
           "verify_norm_laws", "NormLawReport", "DELTA_SCHEDULE"]

DELTA_SCHEDULE = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)


def _inv(x):
    return 0.0 if math.isinf(x) else 1.0 / x


@dataclass(frozen=True)
class NormIndices:
    """Index triple of a primal (``dual=False``: ``p <= q``) or dual (``q <= p``) norm.

    ``r`` is derived: ``1/r = 1/p - 1/q`` (primal) or ``1/q - 1/p`` (dual).
    """

    p: float
    q: float
    dual: bool = False

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not p >= 1 or not q >= 1:
            raise DomainError("indices must be at least 1")
        if not self.dual and p > q:
            raise DomainError(f"primal indices need p <= q, got p={p}, q={q}")
        if self.dual and q > p:
            raise DomainError(f"dual indices need q' <= p', got p'={p}, q'={q}")

    @property
    def inv_r(self) -> float:
        v = _inv(self.p) - _inv(self.q)
        v = -v if self.dual else v
        return max(v, 0.0)

    @property
    def r(self) -> float:
        return math.inf if self.inv_r == 0 else 1.0 / self.inv_r

    @property
    def exponent(self) -> float:
        """Power ``s`` of ``c`` in the sandwich: ``1/(2r)`` primal, ``-1/(2r)`` dual."""
        s = 0.5 * self.inv_r
        return -s if self.dual else s

    def conjugate(self) -> "NormIndices":
        """Hölder conjugate indices with the opposite variant."""
        def conj(x):
            if math.isinf(x):
                return 1.0
            if x == 1:
                return math.inf
            return x / (x - 1)
        return NormIndices(conj(self.p), conj(self.q), not self.dual)


def _schatten_batch(Z, p):
    s = np.linalg.svd(Z, compute_uv=False)
    if math.isinf(p):
        return s[..., 0]
    return np.sum(s ** p, axis=-1) ** (1 / p)


def _sandwich_norm(Xs, cs, s, p):
    lam, U = np.linalg.eigh(cs)
    lam = np.maximum(lam, 1e-300)
    P = (U * lam[..., None, :] ** s) @ U.conj().swapaxes(-1, -2)
    return _schatten_batch(P @ Xs @ P, p)


def _check_set(C):
    if not isinstance(C, ConvexStateSet):
        raise TypeError("C must be a ConvexStateSet")
    if C.kind in ("separable", "product"):
        raise DomainError(f"set kind {C.kind!r} is not supported for the norm family")
    if not C.has_full_rank_member:
        raise DomainError("the set needs a full-rank member")


def _init(C, n, rng, r):
    if C.kind == "diagonal":
        d = C.dims[0]
        return [np.full((n, d), 1.0 / d)] if r == 0 else [rng.dirichlet(np.ones(d), size=n)]
    d = C.dims[-1]
    if r == 0:
        return [np.broadcast_to(np.eye(d) / d, (n, d, d)).astype(complex)]
    return [_interior(np.array([random_density(d, d, rng) for _ in range(n)]), 1e-3)]


@dataclass
class NormResult:
    value: np.ndarray
    witness: np.ndarray
    gap: np.ndarray
    converged: np.ndarray


def _optimize(Xs, C, idx, cfg, sense):
    Xs = np.asarray(Xs, dtype=complex)
    n, D = Xs.shape[0], Xs.shape[-1]
    s, p = idx.exponent, float(idx.p)
    if C.kind == "singleton":
        cs = np.broadcast_to(C.tau, Xs.shape)
        return NormResult(_sandwich_norm(Xs, cs, s, p), np.array(cs), np.zeros(n), np.ones(n, bool))
    if s == 0:
        rep = np.broadcast_to(C.representative, Xs.shape)
        return NormResult(_schatten_batch(Xs, p), np.array(rep), np.zeros(n), np.ones(n, bool))
    if math.isinf(p):
        raise DomainError("p = inf with finite r is not supported (non-smooth objective)")
    facs = _factors(C.kind, C.dims, n, C.tau)
    prob = E.Problem("norm", Xs, p, s, facs, sense)
    rng = np.random.default_rng(cfg.seed)
    best_val = None
    restarts = 1 if sense == 1 else cfg.restarts
    for r in range(restarts):
        init = _init(C, n, rng, r)
        res = E.mirror_descent(prob, init, tol=cfg.tol, max_iter=cfg.max_iter, mix=cfg.mix,
                               stall_tol=cfg.stall_tol)
        val = res.value
        if best_val is None:
            best_val, best_vars, best_gap, best_conv = val.copy(), [v.copy() for v in res.variables], \
                res.gap.copy(), res.converged.copy()
            continue
        better = sense * val < sense * best_val - 1e-15 * np.abs(best_val)
        best_val[better], best_gap[better] = val[better], res.gap[better]
        best_conv[better] = res.converged[better]
        for j in range(len(best_vars)):
            best_vars[j][better] = res.variables[j][better]
    cs = _assemble(C.kind, C.dims, best_vars, C.tau)
    values = best_val ** (1 / p)
    if sense == 1:
        rep = C.representative
        for delta in DELTA_SCHEDULE:
            cd = (1 - delta) * cs + delta * rep
            vd = _sandwich_norm(Xs, cd, s, p)
            take = vd < values
            values = np.where(take, vd, values)
            cs = np.where(take[:, None, None], cd, cs)
    return NormResult(values, cs, best_gap, best_conv)


def c_norm_batch(Xs, C: ConvexStateSet, idx: NormIndices, cfg: OptimizerConfig | None = None):
    """Vectorized :func:`c_norm`; returns a :class:`NormResult`."""
    if idx.dual:
        raise DomainError("primal indices required")
    _check_set(C)
    return _optimize(Xs, C, idx, cfg or DEFAULT, -1)


def c_norm_dual_batch(Xs, C: ConvexStateSet, idx: NormIndices, cfg: OptimizerConfig | None = None):
    """Vectorized :func:`c_norm_dual`; returns a :class:`NormResult`."""
    if not idx.dual:
        raise DomainError("dual indices required")
    _check_set(C)
    return _optimize(Xs, C, idx, cfg or DEFAULT, 1)


def c_norm(X, C: ConvexStateSet, idx: NormIndices, cfg: OptimizerConfig | None = None) -> float:
    """``sup_{c in C} || c^{1/(2r)} X c^{1/(2r)} ||_p``.

    The objective need not be concave in ``c``: the value is the best over
    ``cfg.restarts`` starts (the first at the representative).
    """
    return float(c_norm_batch(np.asarray(X)[None], C, idx, cfg).value[0])


def c_norm_dual(X, C: ConvexStateSet, idx: NormIndices, cfg: OptimizerConfig | None = None) -> float:
    """``inf_{c in C, c > 0} || c^{-1/(2r)} X c^{-1/(2r)} ||_{p'}``."""
    return float(c_norm_dual_batch(np.asarray(X)[None], C, idx, cfg).value[0])


# ---------------------------------------------------------------------------
# randomized verification


@dataclass
class NormLawReport:
    """Outcome of :func:`verify_norm_laws`; ``checks`` maps law names to ``(passed, detail)``."""

    checks: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def summary(self) -> str:
        return "\n".join(f"{k}: {'pass' if ok else 'FAIL'} ({d})" for k, (ok, d) in self.checks.items())


def _random_matrices(n, d, rng, psd=False):
    if psd:
        G = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        return G @ G.conj().swapaxes(-1, -2) / d
    return rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))


def _schatten_dual_maximizer(Z, p_dual):
    """``W`` with ``||W||_p = 1`` and ``tr[Z W] = ||Z||_{p'}`` (``p = p'/(p'-1)``)."""
    U, s, Vh = np.linalg.svd(Z)
    if p_dual == 1:
        w = np.zeros_like(s)
        w[..., 0] = 1.0
    else:
        w = s ** (p_dual - 1)
        w /= _schatten_batch_vals(w, p_dual / (p_dual - 1))[..., None]
    return (Vh.conj().swapaxes(-1, -2) * w[..., None, :]) @ U.conj().swapaxes(-1, -2)


def _schatten_batch_vals(s, p):
    if math.isinf(p):
        return np.max(s, axis=-1)
    return np.sum(s ** p, axis=-1) ** (1 / p)


def verify_norm_laws(C: ConvexStateSet, idx: NormIndices, trials: int = 500, seed=0,
                     directions: int = 10_000, slack: float = 1e-6, cfg=None,
                     corrupt: bool = False) -> NormLawReport:
    """Randomized check of Hölder, the dual formula, triangle inequality and monotonicity.

    Parameters
    ----------
    C : ConvexStateSet
    idx : NormIndices
        Primal indices; the dual uses the Hölder conjugates.
    trials : int
        Random instances per law.
    directions : int
        Random PSD directions for the dual-formula search.
    corrupt : bool
        Negative control: evaluate the dual map at the representative state
        with the wrong exponent sign.
    """
    if idx.dual:
        idx = idx.conjugate()
    cfg = cfg or DEFAULT
    didx = idx.conjugate()
    rng = np.random.default_rng(seed)
    d = C.dim
    rep = NormLawReport()

    def dual(Xs):
        if corrupt:
            Xs = np.asarray(Xs, dtype=complex)
            cs = np.broadcast_to(C.representative, Xs.shape)
            return _sandwich_norm(Xs, cs, -didx.exponent, float(didx.p))
        return c_norm_dual_batch(Xs, C, didx, cfg).value

    def primal(Xs):
        return c_norm_batch(Xs, C, idx, cfg).value

    # (a) Hölder on general matrices
    X = _random_matrices(trials, d, rng)
    Y = _random_matrices(trials, d, rng)
    lhs = np.abs(np.einsum("nij,nji->n", X, Y))
    rhs = primal(X) * dual(Y)
    viol = lhs - rhs - slack * np.maximum(1, rhs)
    k = int(np.argmax(viol))
    rep.checks["holder"] = (bool(viol[k] <= 0), f"max excess {viol[k]:.3g}")
    if viol[k] > 0:
        rep.witnesses["holder"] = (X[k], Y[k])

    # (b) dual formula on a PSD X
    n_dual = min(trials, 5)
    Xp = _random_matrices(n_dual, d, rng, psd=True)
    dres = c_norm_dual_batch(Xp, C, didx, cfg) if not corrupt else None
    dvals = dual(Xp)
    worst = 1.0
    over = -np.inf
    Ys = _random_matrices(directions, d, rng, psd=True)
    Ys = Ys / primal(Ys)[:, None, None]
    for i in range(n_dual):
        cand = Ys
        if dres is not None:
            lam, U = np.linalg.eigh(dres.witness[i])
            Pm = (U * np.maximum(lam, 1e-300) ** didx.exponent) @ U.conj().T
            W = _schatten_dual_maximizer((Pm @ Xp[i] @ Pm)[None], didx.p)[0]
            W = 0.5 * (W + W.conj().T)
            Y0 = Pm @ W @ Pm
            cand = np.concatenate([Y0[None] / primal(Y0[None])[0], Ys])
        best = np.einsum("ij,nji->n", Xp[i], cand).real.max()
        worst = min(worst, best / dvals[i])
        over = max(over, best - dvals[i] - slack * max(1, dvals[i]))
    ok_b = worst >= 0.95 and over <= 0
    rep.checks["dual_formula"] = (bool(ok_b), f"sup/dual min ratio {worst:.4f}, max excess {over:.3g}")

    # (c) triangle inequality: primal on all matrices, dual on PSD
    A = _random_matrices(trials, d, rng)
    B = _random_matrices(trials, d, rng)
    pa, pb, pab = primal(A), primal(B), primal(A + B)
    ex = pab - pa - pb - slack * np.maximum(1, pa + pb)
    Ap = _random_matrices(trials, d, rng, psd=True)
    Bp = _random_matrices(trials, d, rng, psd=True)
    da, db, dab = dual(Ap), dual(Bp), dual(Ap + Bp)
    exd = dab - da - db - slack * np.maximum(1, da + db)
    rep.checks["triangle_primal"] = (bool(ex.max() <= 0), f"max excess {ex.max():.3g}")
    rep.checks["triangle_dual_psd"] = (bool(exd.max() <= 0), f"max excess {exd.max():.3g}")

    # (d) monotonicity of the dual on ordered PSD pairs
    Xs = _random_matrices(trials, d, rng, psd=True)
    Ys = Xs + _random_matrices(trials, d, rng, psd=True) * rng.uniform(0, 1, (trials, 1, 1))
    dx, dy = dual(Xs), dual(Ys)
    exm = dx - dy - slack * np.maximum(1, dy)
    k = int(np.argmax(exm))
    rep.checks["monotonicity"] = (bool(exm[k] <= 0), f"max excess {exm[k]:.3g}")
    if exm[k] > 0:
        rep.witnesses["monotonicity"] = (Xs[k], Ys[k])
    return rep
