"""Optimized entropic quantities: minimal divergence to a convex set of states,
conditional entropies, mutual informations, CMI, SEP distance and the
generalized mutual information, with their infinite-order analogues.

Finite orders and the Umegaki limit run on the batched mirror-descent engine
(:mod:`renyi_bounds.engine`).  Infinite-order quantities are semidefinite
programs solved with ``cvxpy``.  Every optimizer returns an
:class:`OptResult` whose ``error`` field is a certified upper bound on the
suboptimality of ``value`` for convex instances, expressed in the units of
``value``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import engine as E
from .divergences import INF, ONE, d_max, d_sandwiched, parse_alpha, q_sandwiched, umegaki
from .errors import DomainError, KernelError, NonConvergenceError
from .linalg import (PartitionedState, cutoff, kernel_included, kron, mat_power,
                     permute_systems, random_density, reduce_to, unpack_state)

__all__ = [
    "ConvexStateSet", "OptimizerConfig", "OptResult",
    "d_alpha_to_set", "d_alpha_to_set_batch",
    "cond_entropy_up", "cond_entropy_up_batch", "cond_entropy_nonvar",
    "mutual_info_up", "mutual_info_up_batch", "mutual_info_nonvar",
    "cmi_up", "cmi_up_batch", "cmi_nonvar",
    "sep_distance", "sep_distance_batch", "gen_mutual_info", "gen_mutual_info_batch", "inf_order_quantities",
]

KINDS = ("singleton", "identity", "fixed", "product", "separable", "diagonal")


@dataclass(frozen=True)
class ConvexStateSet:
    """Descriptor of an optimization domain of states on ``prod(dims)``.

    Use the constructors :meth:`singleton`, :meth:`identity_simplex`,
    :meth:`fixed_factor`, :meth:`product`, :meth:`separable` and
    :meth:`diagonal`.  ``product`` is the set of product states, which is
    *not* convex; it is flagged by :attr:`convex`.
    """

    kind: str
    dims: tuple
    tau: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")

    @classmethod
    def singleton(cls, tau):
        tau = np.asarray(tau, dtype=complex)
        return cls("singleton", (tau.shape[0],), tau)

    @classmethod
    def identity_simplex(cls, d_a: int, d_b: int):
        """States ``1_A / d_A ⊗ sigma_B``."""
        return cls("identity", (int(d_a), int(d_b)))

    @classmethod
    def fixed_factor(cls, tau_a, d_b: int):
        """States ``tau_A ⊗ sigma_B``."""
        tau_a = np.asarray(tau_a, dtype=complex)
        return cls("fixed", (tau_a.shape[0], int(d_b)), tau_a)

    @classmethod
    def product(cls, d_a: int, d_b: int):
        """Product states ``sigma_A ⊗ sigma_B`` (not convex)."""
        return cls("product", (int(d_a), int(d_b)))

    @classmethod
    def separable(cls, d_a: int, d_b: int):
        return cls("separable", (int(d_a), int(d_b)))

    @classmethod
    def diagonal(cls, d: int):
        """Diagonal states in the computational basis."""
        return cls("diagonal", (int(d),))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def convex(self) -> bool:
        return self.kind != "product"

    @property
    def representative(self) -> np.ndarray:
        """A fixed member; full rank whenever the set has a full-rank member."""
        if self.kind == "singleton":
            return self.tau
        if self.kind == "fixed":
            return np.kron(self.tau, np.eye(self.dims[1]) / self.dims[1])
        return np.eye(self.dim, dtype=complex) / self.dim

    @property
    def has_full_rank_member(self) -> bool:
        lam = np.linalg.eigvalsh(self.representative)
        return bool(lam.min() > cutoff(lam)[0])


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimizer settings.

    ``tol`` is the relative Frank-Wolfe gap tolerance, ``restarts`` counts
    the total number of starting points (canonical start plus random ones),
    ``grid`` is the resolution used by the brute-force oracles.
    """

    tol: float = 1e-9
    max_iter: int = 10_000
    restarts: int = 5
    grid: int = 200
    seed: int = 0
    stall_tol: float = 1e-5
    mix: float = 1e-8
    fw_steps: int = 200
    fw_outer: int = 10
    fw_seeds: int = 50
    sep_tol: float = 1e-7
    sdp_solver: str = "CLARABEL"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")

    def with_(self, **kw) -> "OptimizerConfig":
        return replace(self, **kw)


DEFAULT = OptimizerConfig()


@dataclass
class OptResult:
    """Outcome of an optimization.

    Attributes
    ----------
    value : float
        Optimized quantity (divergence or entropy, nats).
    witness : ndarray or None
        Optimal member of the set (full operator), or the optimal
        conditioning state for entropies.
    error : float
        Certified bound on the suboptimality of ``value`` (convex problems);
        for non-convex problems it certifies stationarity only.
    converged : bool
    iterations : int
    restarts : int
    info : dict
    """

    value: float
    witness: np.ndarray | None = None
    error: float = 0.0
    converged: bool = True
    iterations: int = 0
    restarts: int = 1
    info: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _cfg(cfg):
    return DEFAULT if cfg is None else cfg


def _check_converged(res, cfg, what):
    if not res.converged:
        raise NonConvergenceError(
            f"{what}: optimizer did not converge (gap {res.error:.3g})", res)


# ---------------------------------------------------------------------------
# batched core


def _objective(alpha):
    if alpha is ONE:
        return "rel", 1.0, E.LOG, 1
    g = (1 - alpha) / alpha
    return "q", alpha, g, (1 if alpha > 1 else -1)


def _to_divergence(phi, gap, rhos, alpha):
    """Map engine values and gaps onto divergence values and error bars."""
    if alpha is ONE:
        lam = np.linalg.eigvalsh(rhos)
        lam = np.where(lam > cutoff(lam), lam, 1.0)
        ent = np.sum(lam * np.log(lam), axis=-1)
        return ent + phi, gap
    val = np.log(phi) / (alpha - 1)
    rel = np.minimum(gap / np.abs(phi), 0.5)
    err = -np.log1p(-rel) / abs(alpha - 1)
    return val, err


def _factors(kind, dims, n, tau_a=None):
    if kind == "identity":
        dA, dB = dims
        T = np.broadcast_to(np.eye(dA) / dA, (n, dA, dA)).astype(complex)
        return [E.Factor(dA, "fixed", T), E.Factor(dB, "state")]
    if kind == "fixed":
        dA, dB = dims
        T = np.asarray(tau_a, dtype=complex)
        if T.ndim == 2:
            T = np.broadcast_to(T, (n,) + T.shape).copy()
        return [E.Factor(dA, "fixed", T), E.Factor(dB, "state")]
    if kind == "product":
        dA, dB = dims
        return [E.Factor(dA, "state"), E.Factor(dB, "state")]
    if kind == "diagonal":
        return [E.Factor(dims[0], "diag")]
    raise ValueError(f"no engine layout for set kind {kind!r}")


def _canonical_init(kind, dims, rhos):
    n = rhos.shape[0]
    if kind in ("identity", "fixed"):
        rb = reduce_to(rhos, dims, [1])
        return [_interior(rb)]
    if kind == "product":
        return [_interior(reduce_to(rhos, dims, [0])), _interior(reduce_to(rhos, dims, [1]))]
    if kind == "diagonal":
        w = np.einsum("nii->ni", rhos).real
        d = w.shape[-1]
        return [0.999 * w + 0.001 / d]
    raise ValueError(kind)


def _interior(s, w=1e-6):
    d = s.shape[-1]
    return (1 - w) * s + w * np.eye(d) / d


def _random_init(kind, dims, n, rng):
    if kind == "diagonal":
        return [rng.dirichlet(np.ones(dims[0]), size=n)]
    blocks = [dims[1]] if kind in ("identity", "fixed") else list(dims)
    return [_interior(np.array([random_density(d, d, rng) for _ in range(n)]), 1e-3)
            for d in blocks]


def _assemble(kind, dims, variables, tau_a=None):
    if kind == "identity":
        dA = dims[0]
        return np.einsum("ij,nkl->nikjl", np.eye(dA) / dA, variables[0]).reshape(
            (-1, int(np.prod(dims)), int(np.prod(dims))))
    if kind == "fixed":
        T = np.asarray(tau_a)
        if T.ndim == 2:
            T = np.broadcast_to(T, (variables[0].shape[0],) + T.shape)
        return E._bkron(T, variables[0])
    if kind == "product":
        return E._bkron(variables[0], variables[1])
    if kind == "diagonal":
        return variables[0][..., :, None] * np.eye(dims[0])
    raise ValueError(kind)


@dataclass
class BatchResult:
    value: np.ndarray
    error: np.ndarray
    converged: np.ndarray
    witness: np.ndarray
    variables: list
    iterations: np.ndarray
    restarts: np.ndarray


def _solve_batch(rhos, kind, dims, alpha, cfg, tau_a=None, convex=None):
    """Minimize ``D_alpha(rho || tau)`` over ``tau`` in the set, for a stack of ``rho``."""
    rhos = np.asarray(rhos, dtype=complex)
    n = rhos.shape[0]
    objk, a, power, sense = _objective(alpha)
    facs = _factors(kind, dims, n, tau_a)
    prob = E.Problem(objk, rhos, a, power, facs, sense)
    convex = (kind != "product") if convex is None else convex
    run = lambda p, init: E.mirror_descent(p, init, tol=cfg.tol, max_iter=cfg.max_iter,
                                           mix=cfg.mix, stall_tol=cfg.stall_tol)
    res = run(prob, _canonical_init(kind, dims, rhos))
    val, err = _to_divergence(res.value, res.gap, rhos, alpha)
    conv = res.converged.copy()
    variables = [v.copy() for v in res.variables]
    iters = res.iterations.copy()
    used = np.ones(n, dtype=int)
    rng = np.random.default_rng(cfg.seed)
    for r in range(1, cfg.restarts):
        need = np.arange(n) if not convex else np.flatnonzero(~conv)
        inits = _random_init(kind, dims, n, rng)
        if need.size == 0:
            continue
        sub = prob.subset(need)
        rr = run(sub, [v[need] for v in inits])
        v2, e2 = _to_divergence(rr.value, rr.gap, rhos[need], alpha)
        better = v2 < val[need] - 1e-15 * np.abs(val[need])
        if convex:
            better |= rr.converged & ~conv[need]
        idx = need[better]
        val[idx], err[idx], conv[idx] = v2[better], e2[better], rr.converged[better]
        for j in range(len(variables)):
            variables[j][idx] = rr.variables[j][better]
        iters[need] += rr.iterations
        used[need] += 1
    witness = _assemble(kind, dims, variables, tau_a)
    return BatchResult(val, err, conv, witness, variables, iters, used)


# ---------------------------------------------------------------------------
# infinite order via semidefinite programming


def _sdp_min_trace(rho, left, d_var, right=None, solver="CLARABEL", ppt_dims=None):
    """``min tr Y`` subject to ``rho <= L ⊗ Y`` (or ``rho <= Y`` with PPT ``Y``)."""
    import cvxpy as cp

    Y = cp.Variable((d_var, d_var), hermitian=True)
    if ppt_dims is not None:
        cons = [Y - rho >> 0, cp.partial_transpose(Y, list(ppt_dims), 1) >> 0]
    elif right is None:
        cons = [cp.kron(left, Y) - rho >> 0]
    else:
        cons = [cp.kron(Y, right) - rho >> 0]
    cons.append(Y >> 0)
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(Y))), cons)
    prob.solve(solver=solver)
    if prob.status not in ("optimal", "optimal_inaccurate") or Y.value is None:
        raise NonConvergenceError(f"SDP solver returned status {prob.status}")
    Yv = 0.5 * (Y.value + Y.value.conj().T)
    return float(prob.value), Yv


def _inf_to_set(rho, kind, dims, cfg, tau_a=None):
    dA = dims[0]
    if kind == "identity":
        t, Y = _sdp_min_trace(rho, np.eye(dA), dims[1], solver=cfg.sdp_solver)
        return OptResult(float(np.log(dA * t)), np.kron(np.eye(dA) / dA, Y / t),
                         error=1e-7, info={"solver": cfg.sdp_solver})
    if kind == "fixed":
        t, Y = _sdp_min_trace(rho, tau_a, dims[1], solver=cfg.sdp_solver)
        return OptResult(float(np.log(t)), np.kron(tau_a, Y / t), error=1e-7)
    if kind == "separable":
        if dims[0] * dims[1] > 6:
            raise DomainError("infinite-order SEP distance is only exact for d_A*d_B <= 6")
        t, Y = _sdp_min_trace(rho, None, rho.shape[0], solver=cfg.sdp_solver, ppt_dims=dims)
        return OptResult(float(np.log(t)), Y / t, error=1e-7, info={"relaxation": "PPT"})
    if kind == "product":
        return _inf_product(rho, dims, cfg)
    if kind == "diagonal":
        # rho <= lam * diag(w): SDP over diagonal Y
        import cvxpy as cp
        y = cp.Variable(dims[0], nonneg=True)
        prob = cp.Problem(cp.Minimize(cp.sum(y)), [cp.diag(y) - rho >> 0])
        prob.solve(solver=cfg.sdp_solver)
        t = float(prob.value)
        return OptResult(float(np.log(t)), np.diag(y.value / t), error=1e-7)
    raise ValueError(kind)


def _inf_product(rho, dims, cfg, max_rounds=100, max_starts=3):
    """Alternating SDPs for ``min log t`` s.t. ``rho <= t sigma_A ⊗ sigma_B``.

    With one factor fixed, the congruence by its inverse square root turns
    the step into the conditional min-entropy program, which is compiled
    once with the transformed state as a parameter.
    """
    import cvxpy as cp

    dA, dB = dims
    D = dA * dB
    PB = cp.Parameter((D, D), hermitian=True)
    PA = cp.Parameter((D, D), hermitian=True)
    YB = cp.Variable((dB, dB), hermitian=True)
    YA = cp.Variable((dA, dA), hermitian=True)
    pB = cp.Problem(cp.Minimize(cp.real(cp.trace(YB))), [cp.kron(np.eye(dA), YB) - PB >> 0])
    pA = cp.Problem(cp.Minimize(cp.real(cp.trace(YA))), [cp.kron(YA, np.eye(dB)) - PA >> 0])

    def step(prob, param, Y, S, left):
        Si = mat_power(S, -0.5)
        W = np.kron(Si, np.eye(dB)) if left else np.kron(np.eye(dA), Si)
        M = W @ rho @ W
        param.value = 0.5 * (M + M.conj().T)
        prob.solve(solver=cfg.sdp_solver)
        if prob.status not in ("optimal", "optimal_inaccurate"):
            raise NonConvergenceError(f"SDP solver returned status {prob.status}")
        Yv = 0.5 * (Y.value + Y.value.conj().T)
        return float(prob.value), _interior((Yv / np.trace(Yv).real)[None], 1e-12)[0]

    best = None
    rng = np.random.default_rng(cfg.seed)
    starts = [reduce_to(rho, dims, [0])] + [random_density(dA, dA, rng)
                                             for _ in range(min(cfg.restarts, max_starts) - 1)]
    for r, sA in enumerate(starts):
        sA = _interior(sA[None], 1e-6)[0]
        prev = np.inf
        for it in range(max_rounds):
            tB, sB = step(pB, PB, YB, sA, True)
            tA, sA = step(pA, PA, YA, sB, False)
            drop = np.log(prev) - np.log(tA)
            if drop <= 1e-8:
                break
            prev = tA
        val = float(np.log(tA))
        if best is None or val < best.value - 1e-12:
            # stationarity indicator only: the problem is not convex
            best = OptResult(val, np.kron(sA, sB), error=float(max(drop, 1e-7)),
                             iterations=it + 1, converged=bool(drop <= 1e-6))
    best.restarts = len(starts)
    return best


# ---------------------------------------------------------------------------
# public API


def _as_set(C, rho):
    if not isinstance(C, ConvexStateSet):
        raise TypeError("C must be a ConvexStateSet")
    if C.dim != rho.shape[-1]:
        raise DomainError(f"set dimension {C.dim} does not match state dimension {rho.shape[-1]}")
    return C


def _check_fixed_kernel(rho, C):
    if C.kind == "fixed":
        rA = reduce_to(rho, C.dims, [0])
        if not kernel_included(C.tau, rA):
            raise KernelError("kernel condition violated: ker tau_A not contained in ker rho_A")


def d_alpha_to_set(rho, C: ConvexStateSet, alpha, cfg: OptimizerConfig | None = None,
                   strict: bool = False) -> OptResult:
    """Minimal sandwiched divergence ``inf_{tau in C} D_alpha(rho || tau)``.

    Parameters
    ----------
    rho : ndarray or PartitionedState
        State on the space of ``C``.
    C : ConvexStateSet
    alpha : float or AlphaLimit
    cfg : OptimizerConfig, optional
    strict : bool
        Raise :class:`NonConvergenceError` instead of returning a flagged
        result when the optimizer fails.

    Returns
    -------
    OptResult
        ``witness`` is the optimal ``tau``.
    """
    cfg = _cfg(cfg)
    a = parse_alpha(alpha)
    rho = rho.matrix if isinstance(rho, PartitionedState) else np.asarray(rho, dtype=complex)
    C = _as_set(C, rho)
    if C.kind == "singleton":
        return OptResult(d_sandwiched(rho, C.tau, a), C.tau)
    _check_fixed_kernel(rho, C)
    if C.kind == "separable":
        return sep_distance(rho, a, C.dims, cfg)
    if a is INF:
        return _inf_to_set(rho, C.kind, C.dims, cfg, C.tau)
    br = _solve_batch(rho[None], C.kind, C.dims, a, cfg, C.tau)
    out = OptResult(float(br.value[0]), br.witness[0], float(br.error[0]), bool(br.converged[0]),
                    int(br.iterations[0]), int(br.restarts[0]),
                    {"factors": [v[0] for v in br.variables]})
    if strict:
        _check_converged(out, cfg, "d_alpha_to_set")
    return out


def d_alpha_to_set_batch(rhos, C: ConvexStateSet, alpha, cfg=None, tau_a=None) -> BatchResult:
    """Vectorized :func:`d_alpha_to_set` over a stack of states.

    ``tau_a`` may hold one fixed factor per instance for ``fixed`` sets.
    """
    cfg = _cfg(cfg)
    a = parse_alpha(alpha)
    if a is INF or C.kind in ("singleton", "separable"):
        rs = [d_alpha_to_set(r, C, a, cfg) for r in rhos]
        return BatchResult(np.array([r.value for r in rs]), np.array([r.error for r in rs]),
                           np.array([r.converged for r in rs]),
                           np.array([r.witness for r in rs]), [], np.zeros(len(rs), int),
                           np.ones(len(rs), int))
    tau = C.tau if tau_a is None else tau_a
    return _solve_batch(np.asarray(rhos), C.kind, C.dims, a, cfg, tau)


def _pair(rho, dims):
    mat, dims = unpack_state(rho, dims)
    if len(dims) != 2:
        raise DomainError(f"expected a bipartite state, got dims {dims}")
    return mat, dims


def cond_entropy_up(rho, alpha, dims=None, cfg=None, full: bool = False):
    """Optimized conditional entropy ``sup_sigma_B 1/(1-alpha) log Q(rho || 1 ⊗ sigma_B)``.

    Computed as ``log d_A - D_{alpha, C}(rho)`` with ``C`` the identity
    simplex ``{1/d_A ⊗ sigma_B}``.  ``full=True`` returns an
    :class:`OptResult` whose witness is the optimal ``sigma_B``.
    """
    mat, dims = _pair(rho, dims)
    a = parse_alpha(alpha)
    C = ConvexStateSet.identity_simplex(*dims)
    r = d_alpha_to_set(mat, C, a, cfg)
    sigma_b = reduce_to(r.witness, dims, [1])
    out = OptResult(np.log(dims[0]) - r.value, sigma_b, r.error, r.converged,
                    r.iterations, r.restarts, r.info)
    return out if full else out.value


def cond_entropy_up_batch(rhos, dims, alpha, cfg=None):
    """Vectorized conditional entropy; returns ``(values, errors, converged)``."""
    a = parse_alpha(alpha)
    C = ConvexStateSet.identity_simplex(*dims)
    br = d_alpha_to_set_batch(rhos, C, a, cfg)
    return np.log(dims[0]) - br.value, br.error, br.converged


def cond_entropy_nonvar(rho, alpha, dims=None) -> float:
    """Conditional entropy with the marginal: ``1/(1-alpha) log Q(rho || 1 ⊗ rho_B)``."""
    mat, dims = _pair(rho, dims)
    a = parse_alpha(alpha)
    ref = np.kron(np.eye(dims[0]), reduce_to(mat, dims, [1]))
    return -d_sandwiched(mat, ref, a, check=False)


def mutual_info_up(rho, alpha, dims=None, cfg=None, full: bool = False):
    """Optimized mutual information ``inf D_alpha(rho || sigma_A ⊗ sigma_B)``.

    The product set is not convex: the optimizer is a joint mirror descent
    on both factors started from the marginals and from ``cfg.restarts - 1``
    random points; the best stationary value is returned.
    """
    mat, dims = _pair(rho, dims)
    r = d_alpha_to_set(mat, ConvexStateSet.product(*dims), alpha, cfg)
    return r if full else r.value


def mutual_info_up_batch(rhos, dims, alpha, cfg=None):
    br = d_alpha_to_set_batch(rhos, ConvexStateSet.product(*dims), alpha, cfg)
    return br.value, br.error, br.converged


def mutual_info_nonvar(rho, alpha, dims=None) -> float:
    """``D_alpha(rho || rho_A ⊗ rho_B)``."""
    mat, dims = _pair(rho, dims)
    ref = np.kron(reduce_to(mat, dims, [0]), reduce_to(mat, dims, [1]))
    return d_sandwiched(mat, ref, alpha, check=False)


def _triple(rho, dims):
    mat, dims = unpack_state(rho, dims)
    if len(dims) != 3:
        raise DomainError(f"expected a tripartite state, got dims {dims}")
    return mat, dims


def _cmi_parts(mat, dims):
    """Return the two bipartite states ``(C|B)`` and ``(C|AB)`` with C first."""
    dA, dB, dC = dims
    rbc = reduce_to(mat, dims, [1, 2])
    c_b = permute_systems(rbc, (dB, dC), (1, 0))
    c_ab = permute_systems(mat, (dA * dB, dC), (1, 0))
    return (c_b, (dC, dB)), (c_ab, (dC, dA * dB))


def cmi_up(rho, alpha, dims=None, cfg=None, full: bool = False):
    """``H_up(C|B) - H_up(C|AB)`` for a tripartite state with dims ``(d_A, d_B, d_C)``."""
    mat, dims = _triple(rho, dims)
    (x1, d1), (x2, d2) = _cmi_parts(mat, dims)
    h1 = cond_entropy_up(x1, alpha, d1, cfg, full=True)
    h2 = cond_entropy_up(x2, alpha, d2, cfg, full=True)
    out = OptResult(h1.value - h2.value, None, h1.error + h2.error,
                    h1.converged and h2.converged, h1.iterations + h2.iterations,
                    info={"H(C|B)": h1.value, "H(C|AB)": h2.value})
    return out if full else out.value


def cmi_up_batch(rhos, dims, alpha, cfg=None):
    rhos = np.asarray(rhos)
    dA, dB, dC = dims
    rbc = reduce_to(rhos, dims, [1, 2])
    x1 = permute_systems(rbc, (dB, dC), (1, 0))
    x2 = permute_systems(rhos, (dA * dB, dC), (1, 0))
    v1, e1, c1 = cond_entropy_up_batch(x1, (dC, dB), alpha, cfg)
    v2, e2, c2 = cond_entropy_up_batch(x2, (dC, dA * dB), alpha, cfg)
    return v1 - v2, e1 + e2, c1 & c2


def cmi_nonvar(rho, alpha, dims=None) -> float:
    """``H(C|B) - H(C|AB)`` with the marginal-based conditional entropies."""
    mat, dims = _triple(rho, dims)
    (x1, d1), (x2, d2) = _cmi_parts(mat, dims)
    return cond_entropy_nonvar(x1, alpha, d1) - cond_entropy_nonvar(x2, alpha, d2)


def gen_mutual_info(rho, tau_a, alpha, dims=None, cfg=None, full: bool = False):
    """Generalized mutual information ``inf_sigma_B D_alpha(rho || tau_A ⊗ sigma_B)``."""
    mat, dims = _pair(rho, dims)
    C = ConvexStateSet.fixed_factor(tau_a, dims[1])
    r = d_alpha_to_set(mat, C, alpha, cfg)
    return r if full else r.value


def gen_mutual_info_batch(rhos, taus, dims, alpha, cfg=None):
    C = ConvexStateSet.fixed_factor(np.asarray(taus)[0], dims[1])
    br = d_alpha_to_set_batch(rhos, C, alpha, cfg, tau_a=np.asarray(taus))
    return br.value, br.error, br.converged


# ---------------------------------------------------------------------------
# separable states


def _product_lmo(G, dims, seeds, rng, warm=None, max_iter=100):
    """Approximately minimize ``<a b| G |a b>`` over unit product vectors.

    Batched over the leading axis of ``G``; alternating minimal-eigenvector
    updates from ``seeds`` random starts (plus optional warm starts on ``A``).
    Returns the minimal values ``(n,)`` and the product vectors ``(n, D)``.
    """
    n = G.shape[0]
    dA, dB = dims
    G4 = G.reshape(n, dA, dB, dA, dB)
    A = rng.standard_normal((n, seeds, dA)) + 1j * rng.standard_normal((n, seeds, dA))
    if warm is not None:
        A = np.concatenate([A, warm], axis=1)
    A /= np.linalg.norm(A, axis=-1, keepdims=True)
    prev = None
    scale = np.abs(G).max()
    for _ in range(max_iter):
        GB = np.einsum("nsi,nibjc,nsj->nsbc", A.conj(), G4, A)
        _, vb = np.linalg.eigh(GB)
        B = vb[..., 0]
        GA = np.einsum("nsb,nibjc,nsc->nsij", B.conj(), G4, B)
        la, va = np.linalg.eigh(GA)
        A = va[..., 0]
        cur = la[..., 0]
        if prev is not None and np.max(np.abs(prev - cur)) <= 1e-13 * max(scale, 1e-300):
            break
        prev = cur
    k = np.argmin(cur, axis=1)
    idx = np.arange(n)
    vec = np.einsum("ni,nj->nij", A[idx, k], B[idx, k]).reshape(n, dA * dB)
    return cur[idx, k], vec, A[idx, k]


def _single_eval(kind, R, X, a, power, tau):
    """Value and gradient of the engine objective for one instance with one state factor."""
    lam, U = np.linalg.eigh(tau)
    lam = np.maximum(lam, 1e-300)
    Uh = U.conj().T
    P = (U * E._fvals(lam, power)) @ Uh
    if kind == "q":
        M = R @ P @ R
        mu, W = np.linalg.eigh(0.5 * (M + M.conj().T))
        keep = mu > E._cut(mu)
        mp = np.where(keep, np.maximum(mu, 1e-300), 1.0)
        phi = float(np.sum(np.where(keep, mp ** a, 0.0)))
        GP = a * R @ ((W * np.where(keep, mp ** (a - 1), 0.0)) @ W.conj().T) @ R
    else:
        phi = float(-np.einsum("ij,ji->", X, P).real)
        GP = -X
    G = U @ ((Uh @ GP @ U) * E._divided_differences(lam, power)) @ Uh
    return phi, 0.5 * (G + G.conj().T)


def _sep_one(rho, dims, alpha, cfg, rng):
    """One SEP instance: Frank-Wolfe outer loop, L-BFGS polish of all product atoms.

    ``tau = (1 - mix) T / tr T + mix 1/D`` with ``T = sum_k |a_k b_k><a_k b_k|`` over
    ``D**2`` unnormalized atoms (enough for any point of the hull).  The
    polish minimizes the divergence itself; certification uses the
    Frank-Wolfe gap of the convex trace functional.
    """
    from scipy.optimize import minimize

    dA, dB = dims
    D = dA * dB
    objk, a, power, sense = _objective(alpha)
    R = E.psd_sqrt(rho[None])[0] if objk == "q" else None
    lam_r = np.linalg.eigvalsh(rho)
    lam_r = lam_r[lam_r > cutoff(lam_r)]
    ent = float(np.sum(lam_r * np.log(lam_r)))
    mix = cfg.mix
    rep = np.eye(D) / D
    K = D * D
    la, ua = np.linalg.eigh(reduce_to(rho, dims, [0]))
    lb, ub = np.linalg.eigh(reduce_to(rho, dims, [1]))
    A = np.zeros((K, dA), dtype=complex)
    B = np.zeros((K, dB), dtype=complex)
    for i in range(dA):
        for j in range(dB):
            A[i * dB + j] = np.sqrt(max(la[i], 1e-6)) * ua[:, i]
            B[i * dB + j] = np.sqrt(max(lb[j], 1e-6)) * ub[:, j]
    for k in range(D, K):
        A[k] = 1e-3 * (rng.standard_normal(dA) + 1j * rng.standard_normal(dA))
        B[k] = 1e-3 * (rng.standard_normal(dB) + 1j * rng.standard_normal(dB))
    nA = K * dA

    def unpack(z):
        c = z[: z.size // 2] + 1j * z[z.size // 2:]
        return c[:nA].reshape(K, dA), c[nA:].reshape(K, dB)

    def pack(A, B):
        c = np.concatenate([A.ravel(), B.ravel()])
        return np.concatenate([c.real, c.imag])

    def state(A, B):
        X = np.einsum("ka,kb->kab", A, B).reshape(K, D)
        T = X.T @ X.conj()
        t = np.trace(T).real
        return X, T, t, (1 - mix) * T / t + mix * rep

    def div(phi):
        return ent + phi if alpha is ONE else np.log(phi) / (alpha - 1)

    def fg(z):
        A, B = unpack(z)
        X, T, t, tau = state(A, B)
        phi, G = _single_eval(objk, R, rho, a, power, tau)
        if alpha is not ONE:
            G = G / (phi * (alpha - 1))
        H = (1 - mix) / t * (G - np.einsum("ij,ji->", G, T / t).real * np.eye(D))
        Y = (X @ H.T).reshape(K, dA, dB)
        gA = 2 * np.einsum("kab,kb->ka", Y, B.conj())
        gB = 2 * np.einsum("kab,ka->kb", Y, A.conj())
        g = np.concatenate([gA.ravel(), gB.ravel()])
        return div(phi), np.concatenate([g.real, g.imag])

    z = pack(A, B)
    best = None
    evals = 0
    for outer in range(cfg.fw_outer):
        r = minimize(fg, z, jac=True, method="L-BFGS-B",
                     options=dict(maxiter=cfg.max_iter, ftol=1e-16, gtol=1e-14, maxcor=30))
        z = r.x
        evals += r.nfev
        A, B = unpack(z)
        X, T, t, tau = state(A, B)
        phi, G = _single_eval(objk, R, rho, a, power, tau)
        g = sense * G
        lmo, atom, _ = _product_lmo(g[None], dims, cfg.fw_seeds, rng)
        gap = max(float(np.einsum("ij,ji->", g, tau).real - lmo[0]), 0.0)
        if best is None or gap < best[2]:
            best = (phi, tau, gap)
        scale = abs(phi) * (1.0 if alpha is ONE else abs(alpha - 1))
        if gap <= cfg.sep_tol * scale:
            break
        # swap the lightest atom for the Frank-Wolfe atom
        k = int(np.argmin(np.linalg.norm(X, axis=1)))
        u, s, vh = np.linalg.svd(atom[0].reshape(dA, dB))
        A[k] = np.sqrt(1e-3 * t) * u[:, 0]
        B[k] = vh[0]
        z = pack(A, B)
    phi, tau, gap = best
    return phi, tau, gap, outer + 1, evals


def _sep_batch(rhos, dims, alpha, cfg):
    rhos = np.asarray(rhos, dtype=complex)
    n = rhos.shape[0]
    rng = np.random.default_rng(cfg.seed)
    phis, taus, gaps, its = np.zeros(n), [], np.zeros(n), np.zeros(n, dtype=int)
    for i in range(n):
        phis[i], tau, gaps[i], its[i], _ = _sep_one(rhos[i], dims, alpha, cfg, rng)
        taus.append(tau)
    val, err = _to_divergence(phis, gaps, rhos, alpha)
    conv = gaps <= cfg.stall_tol * np.abs(phis)
    return BatchResult(val, err, conv, np.array(taus), [], its, np.ones(n, int))


def sep_distance(rho, alpha, dims=None, cfg=None) -> OptResult:
    """Minimal sandwiched divergence to the separable states.

    Fully corrective Frank-Wolfe over pure product atoms.  The returned
    value is attained by a separable witness, so it upper-bounds the
    infimum; ``error`` converts the final Frank-Wolfe gap, which depends on
    a multi-start search for the best product atom.
    """
    cfg = _cfg(cfg)
    mat, dims = _pair(rho, dims)
    a = parse_alpha(alpha)
    if a is INF:
        return _inf_to_set(mat, "separable", dims, cfg)
    br = sep_distance_batch(mat[None], dims, a, cfg)
    return OptResult(float(br.value[0]), br.witness[0], float(br.error[0]),
                     bool(br.converged[0]), int(br.iterations[0]))


def sep_distance_batch(rhos, dims, alpha, cfg=None) -> BatchResult:
    """Vectorized :func:`sep_distance` over a stack of states (finite orders and ONE)."""
    cfg = _cfg(cfg)
    a = parse_alpha(alpha)
    if a is INF:
        raise DomainError("use sep_distance for the infinite order")
    if dims[0] * dims[1] > 9:
        raise DomainError("SEP distance is implemented for d_A * d_B <= 9")
    return _sep_batch(rhos, dims, a, cfg)


# ---------------------------------------------------------------------------
# infinite order


def inf_order_quantities(rho, which: str, dims=None, cfg=None) -> float:
    """Infinite-order quantities.

    ``which`` is ``"min_cond_entropy"`` (bipartite), ``"max_mutual_info"``
    (bipartite) or ``"max_cmi"`` (tripartite, ``H_min(C|B) - H_min(C|AB)``).
    """
    cfg = _cfg(cfg)
    if which == "min_cond_entropy":
        mat, dims = _pair(rho, dims)
        r = _inf_to_set(mat, "identity", dims, cfg)
        return float(np.log(dims[0]) - r.value)
    if which == "max_mutual_info":
        mat, dims = _pair(rho, dims)
        return _inf_product(mat, dims, cfg).value
    if which == "max_cmi":
        mat, dims = _triple(rho, dims)
        (x1, d1), (x2, d2) = _cmi_parts(mat, dims)
        return (inf_order_quantities(x1, "min_cond_entropy", d1, cfg)
                - inf_order_quantities(x2, "min_cond_entropy", d2, cfg))
    raise DomainError(f"unknown infinite-order quantity {which!r}")
