"""Randomized property suites: divergence laws, norm laws, bound validity, ALAFF and Markov.

Every suite returns a :class:`SuiteReport`.  A check records the number of
trials, violations, the largest excess over its slack and, on failure, a
witness (states, order, values) that serializes to JSON.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from .cnorms import NormIndices, verify_norm_laws
from .divergences import ONE, d_sandwiched, q_sandwiched
from .linalg import (apply_floor, random_density, reduce_to, state_at_distance, trace_distance)
from .markov import RecoveryKind, beta0, certify_amc, markov_classical, markov_gap, markov_product, petz_recover
from .serialization import to_jsonable
from .variational import (DEFAULT, ConvexStateSet, cmi_nonvar, cmi_up_batch, cond_entropy_nonvar,
                          cond_entropy_up_batch, gen_mutual_info_batch, mutual_info_up_batch,
                          sep_distance_batch)

__all__ = ["Check", "SuiteReport", "divergence_laws", "norm_laws", "bound_validity", "alaff_suite",
           "markov_suite", "run_suite", "SUITES", "max_workers"]


def max_workers() -> int:
    """Worker count, capped by ``RENYI_THREADS`` when set."""
    n = os.cpu_count() or 1
    env = os.environ.get("RENYI_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            pass
    return n


def _pmap(fn, items):
    """Order-preserving map over a thread pool of :func:`max_workers` threads."""
    items = list(items)
    w = max_workers()
    if w == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


@dataclass
class Check:
    name: str
    trials: int
    violations: int
    max_excess: float
    witness: dict | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self):
        return to_jsonable({"name": self.name, "passed": self.passed, "trials": self.trials,
                            "violations": self.violations, "max_excess": self.max_excess,
                            "note": self.note, "witness": self.witness})


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return to_jsonable({"suite": self.suite, "passed": self.passed, "params": self.params,
                            "checks": [c.to_dict() for c in self.checks]})

    def summary(self) -> str:
        lines = [f"{self.suite}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)"]
        for c in self.checks:
            if not c.passed:
                lines.append(f"  {c.name}: {c.violations}/{c.trials} violations, "
                             f"max excess {c.max_excess:.3g} {c.note}")
        return "\n".join(lines)


def _check(name, excess, witness_fn=None, note=""):
    """Build a :class:`Check` from per-trial excesses (positive means violated)."""
    excess = np.asarray(excess, dtype=float)
    excess = np.where(np.isnan(excess), np.inf, excess)
    viol = int(np.sum(excess > 0))
    k = int(np.argmax(excess)) if excess.size else 0
    wit = witness_fn(k) if (viol and witness_fn is not None) else None
    return Check(name, int(excess.size), viol, float(excess[k]) if excess.size else -math.inf, wit, note)


def _rel(x, base):
    return x * np.maximum(1.0, np.abs(base))


# ---------------------------------------------------------------------------
# divergence laws

ALPHAS_LOW = (0.5, 0.6, 0.75, 0.9)
ALPHAS_HIGH = (1.5, 2.0, 3.0, 5.0)
MONO_GRID = (0.5, 0.8, ONE, 1.5, 2.0, 5.0, 20.0)


def _rand_psd(d, rng, rank=None):
    return random_density(d, rank or d, rng) * rng.uniform(0.2, 2.0)


def divergence_laws(trials: int = 500, seed=0, slack: float = 1e-9, corrupt: str | None = None):
    """Sub/superadditivity, joint convexity, data processing, monotonicity in the order,
    homogeneity, tensor multiplicativity and agreement of the two evaluation orders.

    ``corrupt="subadditivity"`` flips the direction of the sub/superadditivity
    inequality (negative control).
    """
    rng = np.random.default_rng(seed)
    rep = SuiteReport("divergence-laws", params={"trials": trials, "seed": seed, "slack": slack})
    alphas = ALPHAS_LOW + ALPHAS_HIGH

    ex, wit = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d = int(rng.integers(2, 5))
        X1, X2 = _rand_psd(d, rng, int(rng.integers(1, d + 1))), _rand_psd(d, rng, int(rng.integers(1, d + 1)))
        Y = _rand_psd(d, rng)
        lhs = q_sandwiched(X1 + X2, Y, a)
        rhs = q_sandwiched(X1, Y, a) + q_sandwiched(X2, Y, a)
        sign = 1 if a < 1 else -1
        if corrupt == "subadditivity":
            sign = -sign
        ex.append(sign * (lhs - rhs) - _rel(slack, rhs))
        wit.append({"X1": X1, "X2": X2, "Y": Y, "alpha": a, "lhs": lhs, "rhs": rhs})
    rep.checks.append(_check("sub_superadditivity", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d = int(rng.integers(2, 5))
        r1, r2, s1, s2 = (random_density(d, d, rng) for _ in range(4))
        p = rng.uniform()
        lhs = q_sandwiched(p * r1 + (1 - p) * r2, p * s1 + (1 - p) * s2, a)
        rhs = p * q_sandwiched(r1, s1, a) + (1 - p) * q_sandwiched(r2, s2, a)
        sign = -1 if a < 1 else 1
        ex.append(sign * (lhs - rhs) - _rel(slack, rhs))
        wit.append({"rho1": r1, "rho2": r2, "sigma1": s1, "sigma2": s2, "p": p, "alpha": a})
    rep.checks.append(_check("joint_convexity_concavity", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        a = (alphas + (ONE,))[i % (len(alphas) + 1)]
        dims = (2, int(rng.integers(2, 4)))
        D = dims[0] * dims[1]
        r, s = random_density(D, D, rng), random_density(D, D, rng)
        keep = [int(rng.integers(0, 2))]
        full = d_sandwiched(r, s, a)
        part = d_sandwiched(reduce_to(r, dims, keep), reduce_to(s, dims, keep), a)
        ex.append(part - full - _rel(slack, full))
        wit.append({"rho": r, "sigma": s, "dims": dims, "alpha": a, "full": full, "reduced": part})
    rep.checks.append(_check("data_processing_partial_trace", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        d = int(rng.integers(2, 5))
        r, s = random_density(d, d, rng), random_density(d, d, rng)
        vals = [d_sandwiched(r, s, a) for a in MONO_GRID]
        ex.append(max(vals[j] - vals[j + 1] - _rel(slack, vals[j]) for j in range(len(vals) - 1)))
        wit.append({"rho": r, "sigma": s, "grid": [str(a) for a in MONO_GRID], "values": vals})
    rep.checks.append(_check("monotonicity_in_alpha", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d = int(rng.integers(2, 5))
        X, Y = _rand_psd(d, rng), _rand_psd(d, rng)
        c = float(np.exp(rng.uniform(-2, 2)))
        q = q_sandwiched(X, Y, a)
        e1 = abs(q_sandwiched(c * X, Y, a) - c ** a * q) - _rel(slack, c ** a * q)
        e2 = abs(q_sandwiched(X, c * Y, a) - c ** (1 - a) * q) - _rel(slack, c ** (1 - a) * q)
        ex.append(max(e1, e2))
        wit.append({"X": X, "Y": Y, "c": c, "alpha": a})
    rep.checks.append(_check("homogeneity", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d1, d2 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        r1, s1 = random_density(d1, d1, rng), random_density(d1, d1, rng)
        r2, s2 = random_density(d2, d2, rng), random_density(d2, d2, rng)
        lhs = q_sandwiched(np.kron(r1, r2), np.kron(s1, s2), a)
        rhs = q_sandwiched(r1, s1, a) * q_sandwiched(r2, s2, a)
        ex.append(abs(lhs - rhs) - _rel(slack, rhs))
        wit.append({"rho1": r1, "sigma1": s1, "rho2": r2, "sigma2": s2, "alpha": a})
    rep.checks.append(_check("tensor_multiplicativity", ex, lambda k: wit[k]))

    ex, wit = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d = int(rng.integers(2, 5))
        X, Y = _rand_psd(d, rng), _rand_psd(d, rng)
        q1, q2 = q_sandwiched(X, Y, a), q_sandwiched(X, Y, a, order="alternative")
        ex.append(abs(q1 - q2) - _rel(slack, q1))
        wit.append({"X": X, "Y": Y, "alpha": a})
    rep.checks.append(_check("order_conventions_agree", ex, lambda k: wit[k]))
    return rep


# ---------------------------------------------------------------------------
# norm laws


def norm_laws(trials: int = 500, seed=0, dims=(2, 3), directions: int = 10_000, slack: float = 1e-6,
              indices=((2.0, math.inf),), cfg=None):
    """Hölder, dual formula, triangle inequality and monotonicity for the norm family.

    The sets are the singleton ``{1/d}``, the diagonal simplex and the
    identity simplex ``{1/2 ⊗ sigma}`` on ``C^2 ⊗ C^d``; every primal
    index pair is followed by the cross-check of the dual ``(alpha, 1)`` map
    with the set divergence.
    """
    from .cnorms import c_norm_dual
    from .variational import d_alpha_to_set

    rep = SuiteReport("norm-laws", params={"trials": trials, "seed": seed, "dims": list(dims),
                                           "directions": directions})
    ss = np.random.SeedSequence(seed)
    jobs = []
    for d in dims:
        for C in (ConvexStateSet.singleton(np.eye(d) / d), ConvexStateSet.diagonal(d),
                  ConvexStateSet.identity_simplex(2, d)):
            for p, q in indices:
                jobs.append((d, C, NormIndices(p, q), ss.spawn(1)[0]))

    def run(job):
        d, C, idx, sq = job
        r = verify_norm_laws(C, idx, trials, np.random.default_rng(sq), directions, slack, cfg)
        tag = f"{C.kind}/d={C.dim}/p={idx.p:g}/q={idx.q:g}"
        out = []
        for law, (ok, detail) in r.checks.items():
            w = r.witnesses.get(law)
            out.append(Check(f"{tag}/{law}", trials, 0 if ok else 1, 0.0 if ok else 1.0,
                             {"pair": w} if w is not None else None, detail))
        return out

    for chunk in _pmap(run, jobs):
        rep.checks.extend(chunk)

    rng = np.random.default_rng(ss.spawn(1)[0])
    ex, wit = [], []
    for d in dims:
        for C in (ConvexStateSet.diagonal(d), ConvexStateSet.identity_simplex(2, d)):
            for a in (1.5, 2.0, 3.0):
                rho = random_density(C.dim, C.dim, rng)
                lhs = c_norm_dual(rho, C, NormIndices(a, 1, True), cfg)
                dv = float(d_alpha_to_set(rho, C, a, cfg).value)
                rhs = math.exp((a - 1) / a * dv)
                ex.append(abs(lhs - rhs) - 1e-6)
                wit.append({"rho": rho, "set": C.kind, "alpha": a, "dual": lhs, "from_divergence": rhs})
    rep.checks.append(_check("dual_alpha_1_matches_set_divergence", ex, lambda k: wit[k]))
    return rep


# ---------------------------------------------------------------------------
# bound validity

BOUND_ALPHAS = (0.6, 0.9, 1.1, 2.0, 5.0, 30.0)
BOUND_EPS = (1e-3, 1e-2, 0.1)
QUANTITIES = ("cond_entropy", "mutual_info", "cmi", "first_arg", "divergence_bound", "sep_distance",
              "gen_mi")


def _approaches(a):
    aps = [B.Approach.AXIOMATIC, B.Approach.OPERATOR_SPACE]
    if a > 1:
        aps.append(B.Approach.MIXED)
    return aps


def _partner(rho, eps, rng, floor=None):
    """State at distance ``eps`` from ``rho``, halving ``eps`` until it is reachable."""
    for _ in range(60):
        try:
            return state_at_distance(rho, eps, rng, floor)
        except ValueError:
            eps *= 0.5
    return rho.copy()


def _min_eig(X):
    return float(np.linalg.eigvalsh(X)[0])


def _evaluate(quantity, states, a, d, cfg, aux=None):
    """Values and error estimates of a quantity on a stack of states."""
    if quantity == "cond_entropy":
        v, e, c = cond_entropy_up_batch(states, (d, d), a, cfg)
    elif quantity == "mutual_info":
        v, e, c = mutual_info_up_batch(states, (d, d), a, cfg.with_(restarts=min(cfg.restarts, 2)))
    elif quantity == "cmi":
        v, e, c = cmi_up_batch(states, (2, 2, 2), a, cfg)
    elif quantity == "gen_mi":
        v, e, c = gen_mutual_info_batch(states, aux, (d, d), a, cfg)
    elif quantity == "sep_distance":
        br = sep_distance_batch(states, (2, 2), a, cfg)
        v, e, c = br.value, br.error, br.converged
    elif quantity in ("first_arg", "divergence_bound"):
        v = np.array([d_sandwiched(r, t, a) for r, t in zip(states, aux)])
        e, c = np.zeros(len(v)), np.ones(len(v), bool)
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    return np.asarray(v), np.asarray(e), np.asarray(c)


def _bounds_for(quantity, a, eps, d, m_tau=None):
    """``{label: value}`` of every applicable bound."""
    out = {}
    if quantity == "mutual_info":
        out["axiomatic"] = B.bound_mutual_info(a, eps, d)
        return out
    for ap in _approaches(a):
        if quantity == "cmi":
            out[ap.value] = B.bound_cmi(ap, a, eps, 2)
            continue
        q = {"cond_entropy": "cond_entropy", "first_arg": "first_arg",
             "divergence_bound": "divergence_bound", "sep_distance": "sep_distance",
             "gen_mi": "gen_mi"}[quantity]
        dd = 2 if quantity == "sep_distance" else d
        out[ap.value] = B.bound_for_quantity(q, ap, B.BoundParams(a, eps, d_a=dd, d_b=dd, m_tau=m_tau))
    return out


def _bound_config(job):
    quantity, d, a, eps_list, trials, sq, cfg, slack = job
    rng = np.random.default_rng(sq)
    D = {"cmi": 8, "sep_distance": 4}.get(quantity, d * d)
    checks = []
    if quantity == "divergence_bound":
        taus = [random_density(D, D, rng) for _ in range(trials)]
        m_taus = np.array([_min_eig(t) for t in taus])
        for eps in eps_list:
            rhos = np.array([state_at_distance(t, eps, rng) for t in taus])
            val, _, _ = _evaluate(quantity, rhos, a, d, cfg, taus)
            for label in _bounds_for(quantity, a, eps, d, 0.5).keys():
                bnd = np.array([_bounds_for(quantity, a, eps, d, m)[label] for m in m_taus])
                ex = val - bnd - slack
                checks.append(_check(f"{quantity}/{label}/d={d}/alpha={a:g}/eps={eps:g}", ex,
                                     lambda k: {"rho": rhos[k], "tau": taus[k], "alpha": a, "eps": eps,
                                                "value": val[k], "bound": bnd[k]}))
        return checks
    aux_r = aux_fixed = None
    m_tau = None
    if quantity == "first_arg":
        tau = random_density(D, D, rng)
        aux_fixed = [tau] * trials
        m_tau = _min_eig(tau)
    if quantity == "gen_mi":
        tau_a = random_density(d, d, rng)
        aux_fixed = np.array([tau_a] * trials)
        m_tau = _min_eig(tau_a)
    rhos = np.array([random_density(D, D, rng) for _ in range(trials)])
    v0, e0, c0 = _evaluate(quantity, rhos, a, d, cfg, aux_fixed)
    for eps in eps_list:
        sig = np.array([state_at_distance(r, eps, rng) for r in rhos])
        v1, e1, c1 = _evaluate(quantity, sig, a, d, cfg, aux_fixed)
        diff = np.abs(v0 - v1)
        tol = slack + e0 + e1
        conv_note = f"unconverged {int(np.sum(~(c0 & c1)))}"
        bnds = _bounds_for(quantity, a, eps, d, m_tau)
        if quantity == "cond_entropy":
            bnds.update(_baselines(a, eps, d))
        for label, bnd in bnds.items():
            ex = diff - bnd - tol
            checks.append(_check(f"{quantity}/{label}/d={d}/alpha={a:g}/eps={eps:g}", ex,
                                 lambda k, bnd=bnd: {"rho": rhos[k], "sigma": sig[k], "alpha": a,
                                                     "eps": eps, "values": [v0[k], v1[k]],
                                                     "errors": [e0[k], e1[k]], "bound": bnd},
                                 conv_note))
    return checks


def _baselines(a, eps, d):
    out = {"baseline_marwah": B.baseline_marwah(a, eps, d)}
    if a > 1:
        out["baseline_beigi"] = B.baseline_beigi(a, eps, d)
    else:
        try:
            out["baseline_rubboli"] = B.baseline_rubboli(a, eps, float(d) ** 2)
        except Exception:
            pass
    return out


def bound_validity(trials: int = 1000, seed=0, dims=(2, 3), alphas=BOUND_ALPHAS, eps=BOUND_EPS,
                   quantities=QUANTITIES, sep_trials: int = 100, slack: float = 1e-6, cfg=None,
                   progress=None):
    """Check every applicable continuity bound on random pairs at trace distance ``eps``.

    Each configuration draws ``trials`` states and, for every ``eps``, a
    partner at exactly that distance; the same first states are reused across
    the ``eps`` values.  The tolerance is ``slack`` plus the optimizer error
    estimates of both values.  Mutual information and CMI use 2 x 2 and
    2 x 2 x 2 only when ``dims`` contains 2; SEP uses 2 x 2 with
    ``sep_trials`` pairs.
    """
    cfg = cfg or DEFAULT
    rep = SuiteReport("bound-validity", params={"trials": trials, "seed": seed, "dims": list(dims),
                                                "alphas": list(alphas), "eps": list(eps),
                                                "quantities": list(quantities), "slack": slack})
    ss = np.random.SeedSequence(seed)
    jobs = []
    for quantity in quantities:
        qdims = dims
        if quantity in ("cmi", "sep_distance"):
            qdims = (2,) if 2 in dims else ()
        for d in qdims:
            for a in alphas:
                n = sep_trials if quantity == "sep_distance" else trials
                jobs.append((quantity, d, a, tuple(eps), n, ss.spawn(1)[0], cfg, slack))

    def run(job):
        out = _bound_config(job)
        if progress is not None:
            progress(job[:3])
        return out

    for chunk in _pmap(run, jobs):
        rep.checks.extend(chunk)

    # the new alpha > 1 bound improves on the prior one at small eps
    new = B.bound_for_quantity("cond_entropy", "axiomatic", B.BoundParams(2.0, 1e-3, d_a=2))
    old = B.baseline_marwah(2.0, 1e-3, 2)
    rep.checks.append(Check("axiomatic_new_below_marwah/alpha=2/eps=0.001/d=2", 1, int(new > old),
                            new - old, None if new <= old else {"new": new, "baseline": old}))
    return rep


# ---------------------------------------------------------------------------
# ALAFF


def alaff_suite(trials: int = 500, seed=0, slack: float = 1e-9, floors=(0.05, 0.1), dims=(2, 3, 4)):
    """Almost concavity / convexity of ``Q`` and the two-input continuity bounds."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("alaff", params={"trials": trials, "seed": seed, "floors": list(floors),
                                       "dims": list(dims)})
    alphas = ALPHAS_LOW + ALPHAS_HIGH
    ex_in, ex_uv, ex_sign, wit = [], [], [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        d = int(rng.choice(dims))
        f1, f2 = rng.uniform(0.02, 0.9 / d, size=2)
        s1 = apply_floor(random_density(d, d, rng), f1)
        s2 = apply_floor(random_density(d, d, rng), f2)
        r1, r2 = random_density(d, d, rng), random_density(d, d, rng)
        p = float(rng.uniform())
        m1, m2 = _min_eig(s1), _min_eig(s2)
        xi = B.alaff_xi(a, p, m1, m2)
        uv = B.alaff_uv(a, p, m1, m2)
        lhs = q_sandwiched(p * r1 + (1 - p) * r2, p * s1 + (1 - p) * s2, a)
        mix = p * q_sandwiched(r1, s1, a) + (1 - p) * q_sandwiched(r2, s2, a)
        if a < 1:
            ex_in.append(lhs - mix - xi - _rel(slack, lhs))
            ex_uv.append(xi - uv - _rel(slack, uv))
            ex_sign.append(-xi - slack)
        else:
            ex_in.append(mix + xi - lhs - _rel(slack, lhs))
            ex_uv.append(uv - xi - _rel(slack, uv))
            ex_sign.append(xi - slack)
        wit.append({"rho1": r1, "rho2": r2, "sigma1": s1, "sigma2": s2, "p": p, "alpha": a,
                    "xi": xi, "uv": uv, "lhs": lhs, "mixture": mix})
    rep.checks.append(_check("xi_inequality", ex_in, lambda k: wit[k]))
    rep.checks.append(_check("xi_simplified_bound", ex_uv, lambda k: wit[k]))
    rep.checks.append(_check("xi_sign", ex_sign, lambda k: wit[k]))

    for m in floors:
        for d in dims:
            exq, exd, wit2 = [], [], []
            for i in range(trials):
                a = alphas[i % len(alphas)]
                s1 = apply_floor(random_density(d, d, rng), 2 * m)
                r1 = random_density(d, d, rng)
                e_t, d_t = (float(x) for x in np.exp(rng.uniform(np.log(1e-4), np.log(0.5), size=2)))
                r2 = state_at_distance(r1, e_t, rng)
                s2 = _partner(s1, d_t, rng, 2 * m)
                eps, delta = trace_distance(r1, r2), trace_distance(s1, s2)
                params = B.BoundParams(a, min(eps, 1.0), min(delta, 1.0), d=d, m_min=m)
                qb = B.alaff_bounds("q_two_input", params)
                db = B.alaff_bounds("d_two_input", params)
                q1, q2 = q_sandwiched(r1, s1, a), q_sandwiched(r2, s2, a)
                D1, D2 = d_sandwiched(r1, s1, a), d_sandwiched(r2, s2, a)
                exq.append(abs(q1 - q2) - qb - slack)
                exd.append(abs(D1 - D2) - db - slack)
                wit2.append({"rho1": r1, "sigma1": s1, "rho2": r2, "sigma2": s2, "alpha": a, "eps": eps,
                             "delta": delta, "q_bound": qb, "d_bound": db, "q": [q1, q2], "d": [D1, D2]})
            rep.checks.append(_check(f"q_two_input/m={m:g}/d={d}", exq, lambda k, w=wit2: w[k]))
            rep.checks.append(_check(f"d_two_input/m={m:g}/d={d}", exd, lambda k, w=wit2: w[k]))

    # non-variational conditional entropy on floored states
    ex, wit3 = [], []
    for i in range(trials):
        a = alphas[i % len(alphas)]
        dims2 = (2, 2)
        m = 0.05
        r = apply_floor(random_density(4, 4, rng), m)
        e_t = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.5))))
        s = _partner(r, e_t, rng, m)
        eps = trace_distance(r, s)
        bnd = B.alaff_bounds("cond_entropy_nonvar", B.BoundParams(a, eps, d_a=2, d=4, m_min=m))
        diff = abs(cond_entropy_nonvar(r, a, dims2) - cond_entropy_nonvar(s, a, dims2))
        ex.append(diff - bnd - slack)
        wit3.append({"rho": r, "sigma": s, "alpha": a, "eps": eps, "bound": bnd, "diff": diff})
    rep.checks.append(_check("cond_entropy_nonvar_bound", ex, lambda k: wit3[k]))
    return rep


# ---------------------------------------------------------------------------
# Markov


def quadrature_mass(halfwidth: float = 10.0, nodes: int = 201) -> float:
    """Gauss-Legendre integral of :func:`beta0` over ``[-T, T]``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return float(np.sum(halfwidth * w * beta0(halfwidth * x)))


def _exact_chains(rng, n):
    out = []
    for i in range(n):
        if i % 2 == 0:
            ra = random_density(2, 2, rng)
            rbc = random_density(4, 4, rng)
            out.append(markov_product(ra, rbc, (2, 2)))
        else:
            p = rng.dirichlet(np.ones(2))
            out.append(markov_classical(p, [random_density(2, 2, rng) for _ in range(2)],
                                        [random_density(2, 2, rng) for _ in range(2)]))
    return out


MARKOV_REGIMES = ((0.75, 1 / 6), (2.0, 0.125))


def markov_suite(trials: int = 200, seed=0, tol: float = 1e-7, slack: float = 1e-6,
                 regimes=MARKOV_REGIMES, chains: int = 10):
    """Exact chains, the certificate sandwich on random states and quadrature normalization.

    ``regimes`` lists ``(alpha, certificate parameter)`` pairs; the default
    parameters are the midpoints of the admissible intervals.
    """
    from .variational import cmi_up

    rng = np.random.default_rng(seed)
    rep = SuiteReport("markov", params={"trials": trials, "seed": seed, "tol": tol,
                                        "regimes": [list(r) for r in regimes]})
    mass = quadrature_mass()
    rep.checks.append(Check("beta0_quadrature_mass", 1, int(abs(mass - 1) > 1e-10), abs(mass - 1) - 1e-10))

    exact = _exact_chains(rng, chains)
    ex_cmi, ex_gap, ex_lo, ex_up, wit = [], [], [], [], []
    for rho, dims in exact:
        gaps = [markov_gap(rho, k, dims) for k in (RecoveryKind.petz(), RecoveryKind.rotated(0.3),
                                                   RecoveryKind.universal())]
        ex_gap.append(max(gaps) - tol)
        for a in (0.6, 1.5, 3.0):
            cv = max(abs(cmi_nonvar(rho, a, dims)), abs(float(cmi_up(rho, a, dims))))
            ex_cmi.append(cv - tol)
        for a, cp in regimes:
            cert = certify_amc(rho, a, cp, 0.0, dims)
            ex_lo.append(abs(cert.lower_bound) - tol)
            ex_up.append(abs(cert.upper_bound) - tol)
            wit.append({"rho": rho, "alpha": a, "cert_param": cp, "lower": cert.lower_bound,
                        "upper": cert.upper_bound, "cmi": cert.cmi_value})
    rep.checks.append(_check("exact_chain_cmi", ex_cmi))
    rep.checks.append(_check("exact_chain_gap", ex_gap))
    rep.checks.append(_check("exact_chain_upper_bound", ex_up, lambda k: wit[k]))
    rep.checks.append(_check("exact_chain_lower_bound", ex_lo, lambda k: wit[k]))

    for a, cp in regimes:
        lo_ex, up_ex, w = [], [], []
        for _ in range(trials):
            rho = random_density(8, 8, rng)
            cert = certify_amc(rho, a, cp, 0.0, (2, 2, 2))
            lo_ex.append(cert.lower_bound - cert.cmi_value - slack)
            up_ex.append(cert.cmi_value - cert.upper_bound - slack)
            w.append({"rho": rho, "alpha": a, "cert_param": cp, "lower": cert.lower_bound,
                      "cmi": cert.cmi_value, "upper": cert.upper_bound})
        rep.checks.append(_check(f"sandwich_upper/alpha={a:g}", up_ex, lambda k, w=w: w[k]))
        rep.checks.append(_check(f"sandwich_lower/alpha={a:g}", lo_ex, lambda k, w=w: w[k]))

    ex = []
    for _ in range(5):
        rho = random_density(8, 8, rng)
        rab = reduce_to(rho, (2, 2, 2), [0, 1])
        out = petz_recover(rho, rab, RecoveryKind.petz(), (2, 2, 2))
        lam = np.linalg.eigvalsh(0.5 * (out + out.conj().T))
        u1 = petz_recover(rho, rab, RecoveryKind.universal(10, 201), (2, 2, 2))
        u2 = petz_recover(rho, rab, RecoveryKind.universal(10, 402), (2, 2, 2))
        ex.append(max(abs(np.trace(out).real - 1) - 1e-9, -lam[0] - 1e-9,
                      np.abs(u1 - u2).max() - 1e-7))
    rep.checks.append(_check("recovery_trace_psd_quadrature", ex))
    return rep


SUITES = {
    "divergence-laws": divergence_laws,
    "norm-laws": norm_laws,
    "bound-validity": bound_validity,
    "alaff": alaff_suite,
    "markov": markov_suite,
}


def run_suite(name: str, trials: int | None = None, seed=0, **kw) -> SuiteReport:
    """Run a suite by name; ``trials=None`` keeps the suite default."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if trials is not None:
        kw["trials"] = trials
    return SUITES[name](seed=seed, **kw)
