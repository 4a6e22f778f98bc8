"""Closed-form continuity bounds and their limits.

Every function is a scalar formula in nats.  Arguments of the form
``log(1 + x)`` are evaluated with ``log1p``; large powers are handled in
log-space so that orders up to ``1e5`` and beyond stay finite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .divergences import INF, ONE, AlphaLimit, parse_alpha
from .errors import DomainError
from .linalg import binary_entropy

__all__ = [
    "Approach", "Quantity", "NonVarKind", "BoundParams",
    "bound_generic", "bound_generic_limit", "kappa_for", "bound_for_quantity",
    "bound_for_quantity_limit", "best_bound",
    "bound_mutual_info", "bound_mutual_info_limit", "bound_cmi", "bound_cmi_limit",
    "alaff_xi", "alaff_uv", "alaff_c_tilde", "alaff_c_nonvar", "alaff_c_two_input",
    "alaff_bounds", "amc_k", "amc_certificate_bounds",
    "baseline_marwah", "baseline_beigi", "baseline_rubboli", "winter_cond_entropy",
]


class Approach(enum.Enum):
    AXIOMATIC = "axiomatic"
    OPERATOR_SPACE = "operator_space"
    MIXED = "mixed"

    @classmethod
    def parse(cls, x):
        if isinstance(x, cls):
            return x
        key = str(x).strip().lower().replace("-", "_").replace("operatorspace", "operator_space")
        for a in cls:
            if key in (a.value, a.name.lower()):
                return a
        raise DomainError(f"unknown approach {x!r}")


class Quantity(enum.Enum):
    COND_ENTROPY = "cond_entropy"
    FIRST_ARG = "first_arg"
    DIVERGENCE_BOUND = "divergence_bound"
    SEP_DISTANCE = "sep_distance"
    GEN_MI = "gen_mi"

    @classmethod
    def parse(cls, x):
        if isinstance(x, cls):
            return x
        key = str(x).strip().lower().replace("-", "_")
        aliases = {"condentropy": "cond_entropy", "firstarg": "first_arg",
                   "divergencebound": "divergence_bound", "sepdistance": "sep_distance",
                   "sep": "sep_distance", "genmi": "gen_mi"}
        key = aliases.get(key, key)
        for q in cls:
            if key == q.value:
                return q
        raise DomainError(f"unknown quantity {x!r}")


class NonVarKind(enum.Enum):
    COND_ENTROPY_NONVAR = "cond_entropy_nonvar"
    CMI_NONVAR = "cmi_nonvar"
    Q_TWO_INPUT = "q_two_input"
    D_TWO_INPUT = "d_two_input"


@dataclass(frozen=True)
class BoundParams:
    """Parameters of the quantity-specific bounds.

    Only the fields used by a given formula need to be set.  ``m`` is
    ``min(d_A, d_B)`` for the mutual-information and SEP bounds;
    ``m_tau`` the smallest nonzero eigenvalue of a fixed second argument;
    ``m_min`` a uniform eigenvalue floor.
    """

    alpha: object
    eps: float
    delta: float = 0.0
    d_a: int | None = None
    d_b: int | None = None
    d_c: int | None = None
    d: int | None = None
    m_tau: float | None = None
    m_min: float | None = None

    @property
    def m(self) -> int:
        if self.d_a is None or self.d_b is None:
            raise DomainError("d_A and d_B are required")
        return min(self.d_a, self.d_b)


# ---------------------------------------------------------------------------
# helpers


def _check_eps(eps, name="epsilon"):
    eps = float(eps)
    if not 0 <= eps <= 1 or math.isnan(eps):
        raise DomainError(f"{name}={eps} outside [0, 1]")
    return eps


def _check_kappa(kappa):
    kappa = float(kappa)
    if not kappa >= 1:
        raise DomainError(f"kappa={kappa} must be at least 1")
    return kappa


def _log(x):
    return -math.inf if x == 0 else math.log(x)


def _log1p_sum(terms):
    """``log(1 + sum_i s_i exp(l_i))`` for ``terms = [(s_i, l_i)]`` with ``s_i = ±1``."""
    big = max([0.0] + [l for _, l in terms])
    if big <= 0:
        return math.log1p(math.fsum(s * math.exp(l) for s, l in terms))
    acc = math.exp(-big) + math.fsum(s * math.exp(l - big) for s, l in terms)
    return big + math.log(acc)


def _h_term(eps):
    """``(1 + eps) h(eps / (1 + eps))``."""
    return (1 + eps) * binary_entropy(eps / (1 + eps))


# ---------------------------------------------------------------------------
# generic bounds


def bound_generic(approach, alpha, eps, kappa) -> float:
    """Continuity bound for ``inf_{tau in C} D_alpha(. || tau)``.

    Parameters
    ----------
    approach : Approach or str
        ``Mixed`` is only available for ``alpha > 1``.  ``OperatorSpace``
        with ``alpha < 1`` uses the low-order branch of its constant.
    alpha : float
        Finite order.
    eps : float
        Trace-distance bound in ``[0, 1]``.
    kappa : float
        ``log(kappa)`` bounds the optimized divergence over all states.
    """
    ap = Approach.parse(approach)
    a = parse_alpha(alpha, allow_limits=False)
    eps = _check_eps(eps)
    kappa = _check_kappa(kappa)
    if eps == 0:
        return 0.0
    le, lk = math.log(eps), math.log(kappa)
    l1e = math.log1p(eps)
    if ap is Approach.AXIOMATIC:
        if a < 1:
            inner = _log1p_sum([(1, a * le + (1 - a) * lk), (-1, le - (1 - a) * l1e)])
            return l1e + inner / (1 - a)
        inner = _log1p_sum([(1, le + (a - 1) * lk), (-1, a * le - (a - 1) * l1e)])
        return l1e + inner / (a - 1)
    if ap is Approach.OPERATOR_SPACE:
        if a < 1:
            return _log1p_sum([(1, a * le + (1 - a) * lk)]) / (1 - a)
        b = (a - 1) / a
        return _log1p_sum([(1, le + b * lk)]) / b
    if a < 1:
        raise DomainError("the mixed approach requires alpha > 1")
    b = (a - 1) / a
    inner = _log1p_sum([(1, le + b * lk), (-1, (2 - 1 / a) * le - b * l1e)])
    return l1e + inner / b


def bound_generic_limit(approach, which, eps, kappa) -> float:
    """The ``alpha -> 1`` (``which=ONE``) or ``alpha -> inf`` (``INF``) limit of :func:`bound_generic`."""
    ap = Approach.parse(approach)
    lim = parse_alpha(which)
    if not isinstance(lim, AlphaLimit):
        raise DomainError("which must be ONE or INF")
    eps = _check_eps(eps)
    kappa = _check_kappa(kappa)
    lk = math.log(kappa)
    if lim is ONE:
        if ap is Approach.OPERATOR_SPACE:
            return 0.0 if eps == 0 else math.inf
        return eps * lk + _h_term(eps)
    if ap is Approach.AXIOMATIC:
        return 0.0 if eps == 0 else math.log1p(eps) + lk
    if ap is Approach.OPERATOR_SPACE:
        return math.log1p(eps * kappa)
    return math.log((1 + eps) * (1 + eps * kappa) - eps * eps)


# ---------------------------------------------------------------------------
# instantiations


def kappa_for(quantity, params: BoundParams) -> float:
    """The constant ``kappa`` for each optimized quantity."""
    q = Quantity.parse(quantity)
    if q is Quantity.COND_ENTROPY:
        if params.d_a is None:
            raise DomainError("d_A is required")
        return float(params.d_a) ** 2
    if q in (Quantity.FIRST_ARG, Quantity.DIVERGENCE_BOUND):
        if params.m_tau is None or not 0 < params.m_tau <= 1:
            raise DomainError("m_tau in (0, 1] is required")
        return 1.0 / params.m_tau
    if q is Quantity.SEP_DISTANCE:
        return float(params.m)
    if params.m_tau is None or not 0 < params.m_tau <= 1:
        raise DomainError("m_tau in (0, 1] is required")
    return params.m / params.m_tau


def _allowed(q, ap, a):
    if ap is Approach.MIXED and a < 1:
        return False, "the mixed approach requires alpha > 1"
    return True, ""


def bound_for_quantity(quantity, approach, params: BoundParams) -> float:
    """Continuity bound of a specific quantity with its ``kappa``.

    For ``alpha < 1`` only the axiomatic and operator-space branches exist.
    """
    q = Quantity.parse(quantity)
    ap = Approach.parse(approach)
    a = parse_alpha(params.alpha)
    if isinstance(a, AlphaLimit):
        return bound_for_quantity_limit(q, ap, a, params)
    ok, why = _allowed(q, ap, a)
    if not ok:
        raise DomainError(why)
    return bound_generic(ap, a, params.eps, kappa_for(q, params))


def bound_for_quantity_limit(quantity, approach, which, params: BoundParams) -> float:
    q = Quantity.parse(quantity)
    return bound_generic_limit(approach, which, params.eps, kappa_for(q, params))


def best_bound(quantity, params: BoundParams) -> float:
    """Minimum over the approaches available at ``params.alpha``."""
    a = parse_alpha(params.alpha)
    aps = [Approach.AXIOMATIC, Approach.OPERATOR_SPACE]
    if isinstance(a, AlphaLimit) or a > 1:
        aps.append(Approach.MIXED)
    return min(bound_for_quantity(quantity, ap, params) for ap in aps)


def bound_mutual_info(alpha, eps, m) -> float:
    """Axiomatic continuity bound of the optimized mutual information, ``m = min(d_A, d_B)``."""
    a = parse_alpha(alpha, allow_limits=False)
    eps = _check_eps(eps)
    if m < 1:
        raise DomainError("m must be a positive dimension")
    if eps == 0:
        return 0.0
    le, lm = math.log(eps), math.log(m)
    e1 = eps ** (1 / a)
    le1 = le / a
    l1e1 = math.log1p(e1)
    if a < 1:
        inner = _log1p_sum([(1, a * le + 2 * (1 - a) * lm), (-1, le1 - 2 * (1 - a) * l1e1)])
        return 2 * l1e1 + inner / (1 - a)
    inner = _log1p_sum([(1, le1 + 2 * (a - 1) * lm), (-1, a * le - 2 * (a - 1) * l1e1)])
    return 2 * l1e1 + inner / (a - 1)


def bound_mutual_info_limit(which, eps, m) -> float:
    lim = parse_alpha(which)
    eps = _check_eps(eps)
    if lim is ONE:
        return 2 * eps * math.log(m) + 2 * _h_term(eps)
    if lim is INF:
        return math.log(4 * m * m)
    raise DomainError("which must be ONE or INF")


def bound_cmi(approach, alpha, eps, d) -> float:
    """Twice the conditional-entropy bound; ``d`` is the dimension of the conditioned system."""
    p = BoundParams(alpha, eps, d_a=d)
    return 2 * bound_for_quantity(Quantity.COND_ENTROPY, approach, p)


def bound_cmi_limit(approach, which, eps, d) -> float:
    return 2 * bound_generic_limit(approach, which, eps, float(d) ** 2)


def winter_cond_entropy(eps, d_a) -> float:
    """``2 eps log d_A + (1 + eps) h(eps / (1 + eps))``."""
    eps = _check_eps(eps)
    return 2 * eps * math.log(d_a) + _h_term(eps)


# ---------------------------------------------------------------------------
# comparison baselines


def baseline_marwah(alpha, eps, d_a) -> float:
    """Prior axiomatic bound for the conditional entropy.

    For ``alpha < 1`` it is the axiomatic bound at ``kappa = d_A**2``.  For
    ``alpha > 1`` it is the same expression at order ``beta`` with
    ``1/alpha + 1/beta = 2`` and distance ``sqrt(2 eps)``.
    """
    a = parse_alpha(alpha, allow_limits=False)
    eps = _check_eps(eps)
    kappa = float(d_a) ** 2
    if a < 1:
        return bound_generic(Approach.AXIOMATIC, a, eps, kappa)
    if eps == 0:
        return 0.0
    b = a / (2 * a - 1)
    e = math.sqrt(2 * eps)
    le = math.log(e)
    inner = _log1p_sum([(1, b * le + (1 - b) * math.log(kappa)), (-1, le - (1 - b) * math.log1p(e))])
    return math.log1p(e) + inner / (1 - b)


def baseline_beigi(alpha, eps, d_a) -> float:
    """Prior operator-space bound ``a' log(1 + 2 eps d_A^(2/a'))``, ``a' = alpha/(alpha-1)``."""
    a = parse_alpha(alpha, allow_limits=False)
    if a <= 1:
        raise DomainError("baseline requires alpha > 1")
    eps = _check_eps(eps)
    ap = a / (a - 1)
    return ap * math.log1p(2 * eps * float(d_a) ** (2 / ap))


def baseline_rubboli(alpha, eps, kappa) -> float:
    """``1/(alpha-1) log(1 - eps^alpha kappa^(1-alpha))`` for ``alpha < 1``.

    Valid only for ``eps <= kappa^((alpha-1)/alpha)``.
    """
    a = parse_alpha(alpha, allow_limits=False)
    if a >= 1:
        raise DomainError("baseline requires alpha < 1")
    eps = _check_eps(eps)
    kappa = _check_kappa(kappa)
    if eps > kappa ** ((a - 1) / a):
        raise DomainError("baseline valid only for eps <= kappa^((alpha-1)/alpha)")
    x = eps ** a * kappa ** (1 - a)
    return math.inf if x >= 1 else math.log1p(-x) / (a - 1)


# ---------------------------------------------------------------------------
# almost-concavity / almost-convexity error terms


def _check_floor(m, name="floor"):
    m = float(m)
    if not 0 < m <= 1:
        raise DomainError(f"{name}={m} outside (0, 1]")
    return m


def alaff_xi(alpha, p, m1, m2) -> float:
    """Error term of the almost concavity (``alpha < 1``) or convexity (``alpha > 1``) of ``Q``.

    ``m1``, ``m2`` are the smallest nonzero eigenvalues of ``sigma_1`` and ``sigma_2``.
    """
    a = parse_alpha(alpha, allow_limits=False)
    p = float(p)
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    m1, m2 = _check_floor(m1), _check_floor(m2)
    q = 1 - p
    t1 = p ** a * (p + q / m1) ** (1 - a)
    t2 = q ** a * (p / m2 + q) ** (1 - a)
    if a < 1:
        return -1 + t1 + t2
    return -(p - t1) * m1 ** (1 - a) - (q - t2) * m2 ** (1 - a)


def alaff_uv(alpha, p, m1, m2) -> float:
    """The simplified bound ``u_alpha(p)`` (``alpha < 1``) or ``v_alpha(p)`` (``alpha > 1``)."""
    a = parse_alpha(alpha, allow_limits=False)
    p = float(p)
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    m1, m2 = _check_floor(m1), _check_floor(m2)
    if a < 1:
        w1, w2 = (1 / m1) ** (1 - a), (1 / m2) ** (1 - a)
    else:
        w1, w2 = m1 ** (1 - a), m2 ** (1 - a)
    return (1 - a) * math.sqrt(p) * ((math.log(1 / m1) + 1) * w1 + (1 / m2 + 1) * w2)


def alaff_c_tilde(alpha, m) -> float:
    a = parse_alpha(alpha)
    m = _check_floor(m)
    base = math.log(1 / m) + 1 / m + 2
    if a is ONE:
        return base
    return base * (m ** (a - 1) if a < 1 else m ** (1 - a))


def _check_floor_dim(m, d):
    m = _check_floor(m, "m")
    if not m * d < 1:
        raise DomainError(f"the floor needs m * d < 1, got m={m}, d={d}")
    return m


def alaff_c_nonvar(alpha, m, d_a, d_ab) -> float:
    """Constant of the non-variational conditional-entropy bound (``alpha = ONE`` allowed)."""
    a = parse_alpha(alpha)
    if a is INF:
        raise DomainError("no infinite-order constant")
    m = _check_floor_dim(m, d_ab)
    k = 1 - m * d_ab
    ct = alaff_c_tilde(a, m)
    if a is ONE:
        return 2 * math.log(d_a) / k + math.sqrt(2) * ct / k
    if a < 1:
        dd = float(d_a) ** (2 * (1 - a))
        return (dd - 1) / (1 - a) / k + math.sqrt(2) * ct / k * dd
    return math.expm1(2 * (a - 1) * math.log(d_a)) / (a - 1) / k + math.sqrt(2) * ct / k


def alaff_c_two_input(alpha, m, d) -> float:
    """Constant ``c(alpha, m, d)`` of the two-input bounds."""
    a = parse_alpha(alpha, allow_limits=False)
    m = _check_floor_dim(m, d)
    base = math.log(1 / m) + 1 / m + 2
    k = 1 - m * d
    if a < 1:
        return (1 + math.sqrt(2) * (1 - a) * base * m ** (a - 1)) / k
    return m ** (1 - a) * (1 + math.sqrt(2) * (a - 1) * base) / k


def alaff_bounds(which, params: BoundParams) -> float:
    """Continuity bounds from almost concavity / convexity.

    ``CondEntropyNonVar`` uses ``d_a`` and ``d`` (``= d_AB``); ``CMINonVar``
    uses ``d_c`` and ``d`` (``= d_ABC``); the two-input bounds use ``d`` and
    require ``2 m_min <= lambda_min(sigma)``.
    """
    w = which if isinstance(which, NonVarKind) else NonVarKind(str(which).lower())
    a = parse_alpha(params.alpha)
    eps = _check_eps(params.eps)
    delta = _check_eps(params.delta, "delta")
    if params.m_min is None or params.d is None:
        raise DomainError("m_min and d are required")
    m = params.m_min
    if w is NonVarKind.COND_ENTROPY_NONVAR:
        return alaff_c_nonvar(a, m, params.d_a, params.d) * math.sqrt(eps)
    if w is NonVarKind.CMI_NONVAR:
        return 2 * alaff_c_nonvar(a, m, params.d_c, params.d) * math.sqrt(eps)
    if isinstance(a, AlphaLimit):
        raise DomainError("two-input bounds need a finite alpha")
    if not 2 * m < 1:
        raise DomainError("two-input bounds need 2 m < 1")
    c = alaff_c_two_input(a, m, params.d)
    if a < 1:
        qb = (1 + math.sqrt(2)) * math.sqrt(eps) + 2 * c * math.sqrt(delta)
    else:
        qb = (1 + math.sqrt(2)) * m ** (1 - a) * math.sqrt(eps) + 2 * c * math.sqrt(delta)
    if w is NonVarKind.Q_TWO_INPUT:
        return qb
    if a < 1:
        return m ** (a - 1) / (1 - a) * qb
    return qb / (a - 1)


# ---------------------------------------------------------------------------
# approximate Markov chains


def _check_cert(a, cp):
    cp = float(cp)
    hi = 1 - 1 / (2 * a) if a < 1 else 1 / (2 * a)
    if not 0 < cp < hi:
        raise DomainError(f"certParam={cp} outside (0, {hi:.6g})")
    return cp


def amc_k(alpha, cert_param, t, norm_inv_rho_bc) -> float:
    """The constant ``K`` (``alpha < 1``) or ``K'`` (``alpha > 1``).

    The sine is taken in absolute value: for ``alpha > 1`` its argument is
    negative and the square root would otherwise be undefined.
    """
    a = parse_alpha(alpha, allow_limits=False)
    cp = _check_cert(a, cert_param)
    s = abs(math.sin(math.pi * (1 - a) / a))
    bracket = (4 * math.sqrt(norm_inv_rho_bc) + math.sqrt(math.pi / (math.e * cp * s)) + 4)
    k = bracket * math.pi / (2 * math.cosh(math.pi * t))
    if a > 1:
        k *= norm_inv_rho_bc ** ((1 - a) / a)
    return k


def amc_certificate_bounds(alpha, cert_param, t, norm_inv_rho_bc, norm_inv_rho_abc,
                           petz_gap, rotated_gap, d_c, d_abc):
    """Lower and upper bounds on the sandwiched CMI of a positive definite state.

    Parameters
    ----------
    norm_inv_rho_bc, norm_inv_rho_abc : float
        Operator norms of the inverse marginals.
    petz_gap, rotated_gap : float
        Trace-norm distance of the state to its Petz and rotated recoveries.
    d_c, d_abc : int

    Returns
    -------
    (lower, upper) : tuple of float

    Notes
    -----
    For ``alpha < 1`` the exponent ``1 - 1/x`` is negative on the whole
    regime; a zero rotated gap is still mapped to a zero lower bound.
    """
    a = parse_alpha(alpha, allow_limits=False)
    cp = _check_cert(a, cert_param)
    k = amc_k(a, cp, t, norm_inv_rho_bc)
    x = 1 / (2 * a) - cp
    expo = 1 - 1 / x if a < 1 else 1 / x
    base = k * rotated_gap
    if base == 0:
        # exact recovery: the bound collapses to log(1 + 0) even where expo < 0
        term = 0.0
    else:
        term = math.exp(expo * math.log(base))
    pref = a / (1 - a) if a < 1 else a / (a - 1)
    lower = pref * math.log1p(term) if np.isfinite(term) else math.inf
    m = 1 / norm_inv_rho_abc
    upper = alaff_c_nonvar(a, m, d_c, d_abc) * math.sqrt(petz_gap)
    return lower, upper
