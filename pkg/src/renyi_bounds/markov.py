"""Petz-type recovery maps and certification of approximate quantum Markov chains.

States are tripartite with dims ``(d_A, d_B, d_C)``.  The recovery maps act
``B -> BC`` and send operators on ``AB`` to operators on ``ABC``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import amc_certificate_bounds
from .divergences import parse_alpha
from .errors import DomainError, KernelError, VerificationError
from .linalg import (cutoff, herm_eig, kernel_included, reduce_to, support_projection, trace_norm,
                     unpack_state)
from .variational import cmi_nonvar

__all__ = ["RecoveryKind", "petz_recover", "beta0", "markov_gap", "certify_amc",
           "AMCCertificate", "markov_product", "markov_classical"]


@dataclass(frozen=True)
class RecoveryKind:
    """``Petz``, ``Rotated(t)`` or ``Universal(T, N)``."""

    kind: str = "petz"
    t: float = 0.0
    halfwidth: float = 10.0
    nodes: int = 201

    def __post_init__(self):
        if self.kind not in ("petz", "rotated", "universal"):
            raise DomainError(f"unknown recovery kind {self.kind!r}")
        if self.kind == "universal" and (self.halfwidth <= 0 or self.nodes < 3):
            raise DomainError("universal recovery needs T > 0 and N >= 3")

    @classmethod
    def petz(cls):
        return cls("petz")

    @classmethod
    def rotated(cls, t: float):
        return cls("rotated", float(t))

    @classmethod
    def universal(cls, halfwidth: float = 10.0, nodes: int = 201):
        return cls("universal", 0.0, float(halfwidth), int(nodes))


def beta0(t):
    """Density ``pi / 2 / (cosh(pi t) + 1)`` on the real line."""
    t = np.asarray(t, dtype=float)
    return np.pi / 2 / (np.cosh(np.pi * t) + 1)


def _complex_power(H, z):
    """``H^z`` on the support of a PSD ``H`` for complex ``z``."""
    sp = herm_eig(H, check=False)
    lam = sp.eigenvalues
    keep = lam > cutoff(lam)
    vals = np.zeros(lam.shape, dtype=complex)
    vals[keep] = np.exp(z * np.log(lam[keep]))
    U = sp.eigenvectors
    return (U * vals) @ U.conj().T


class _Recovery:
    """Cached spectral data of the reference marginals."""

    def __init__(self, rho, dims):
        self.rho, self.dims = np.asarray(rho, dtype=complex), tuple(dims)
        dA, dB, dC = self.dims
        self.rho_b = reduce_to(self.rho, self.dims, [1])
        self.rho_bc = reduce_to(self.rho, self.dims, [1, 2])
        if not kernel_included(np.kron(np.eye(dA), self.rho_b), reduce_to(self.rho, self.dims, [0, 1])):
            raise KernelError("support misalignment: ker rho_B is not contained in ker rho_AB")
        if not kernel_included(np.kron(np.eye(dA), self.rho_bc), self.rho):
            raise KernelError("support misalignment: ker rho_BC is not contained in ker rho_ABC")

    def rotated(self, X, t):
        dA, dB, dC = self.dims
        left_b = np.kron(np.eye(dA), _complex_power(self.rho_b, -0.5 - 1j * t))
        left_bc = np.kron(np.eye(dA), _complex_power(self.rho_bc, 0.5 + 1j * t))
        inner = np.kron(left_b @ X @ left_b.conj().T, np.eye(dC))
        return left_bc @ inner @ left_bc.conj().T


def petz_recover(rho_ref, X, kind: RecoveryKind | None = None, dims=None) -> np.ndarray:
    """Apply a recovery map built from ``rho_ref`` to an operator ``X`` on ``AB``.

    The rotated map is ``A_t X A_t^dagger`` with
    ``A_t = rho_BC^{1/2 + i t} rho_B^{-1/2 - i t}`` (identities on ``A`` and
    ``C`` implied); ``t = 0`` is the Petz map.  The universal map averages
    the rotated maps at parameter ``t/2`` against :func:`beta0`, truncated
    to ``[-T, T]`` and integrated by Gauss-Legendre quadrature.
    """
    kind = kind or RecoveryKind.petz()
    mat, dims = unpack_state(rho_ref, dims)
    if len(dims) != 3:
        raise DomainError("reference state must be tripartite")
    X = np.asarray(X, dtype=complex)
    if X.shape != (dims[0] * dims[1],) * 2:
        raise DomainError("X must act on AB")
    rec = _Recovery(mat, dims)
    Q = np.eye(X.shape[0]) - np.kron(np.eye(dims[0]), support_projection(rec.rho_b))
    if max(np.abs(Q @ X).max(), np.abs(X @ Q).max()) > 1e-10 * max(1.0, np.abs(X).max()):
        raise KernelError("support misalignment: X is not supported on supp(1_A ⊗ rho_B)")
    if kind.kind == "petz":
        return rec.rotated(X, 0.0)
    if kind.kind == "rotated":
        return rec.rotated(X, kind.t)
    x, w = np.polynomial.legendre.leggauss(kind.nodes)
    ts = kind.halfwidth * x
    ws = kind.halfwidth * w * beta0(ts)
    out = np.zeros((mat.shape[0],) * 2, dtype=complex)
    for t, wt in zip(ts, ws):
        out += wt * rec.rotated(X, t / 2)
    return out


def markov_gap(rho, kind: RecoveryKind | None = None, dims=None) -> float:
    """``|| rho_ABC - R(rho_AB) ||_1`` (full trace norm, twice the trace distance)."""
    mat, dims = unpack_state(rho, dims)
    rho_ab = reduce_to(mat, dims, [0, 1])
    return trace_norm(mat - petz_recover(mat, rho_ab, kind, dims))


@dataclass
class AMCCertificate:
    cmi_value: float
    lower_bound: float
    upper_bound: float
    petz_gap: float
    rotated_gap: float
    holds: bool


GAP_FLOOR = 1e-12


def certify_amc(rho, alpha, cert_param, t: float = 0.0, dims=None, slack: float = 1e-6,
                strict: bool = False, gap_floor: float = GAP_FLOOR) -> AMCCertificate:
    """Sandwich the non-variational CMI of a positive definite state between recovery-gap bounds.

    Gaps below ``gap_floor`` are rounding noise of the recovery map and are
    treated as exact zeros before entering the bounds.

    Raises
    ------
    DomainError
        On non-positive-definite input, a certificate parameter outside its
        regime, or ``lambda_min(rho) * d_ABC >= 1``.
    VerificationError
        With ``strict=True`` when ``lower <= cmi <= upper`` fails beyond ``slack``.
    """
    mat, dims = unpack_state(rho, dims)
    if len(dims) != 3:
        raise DomainError("state must be tripartite")
    a = parse_alpha(alpha, allow_limits=False)
    lam = np.linalg.eigvalsh(mat)
    if lam[0] <= cutoff(lam[::-1])[0]:
        raise DomainError("state must be positive definite")
    lam_bc = np.linalg.eigvalsh(reduce_to(mat, dims, [1, 2]))
    d_abc = int(np.prod(dims))
    pg = markov_gap(mat, RecoveryKind.petz(), dims)
    rg = markov_gap(mat, RecoveryKind.rotated(t), dims)
    pg, rg = (0.0 if g < gap_floor else g for g in (pg, rg))
    lower, upper = amc_certificate_bounds(a, cert_param, t, 1 / lam_bc[0], 1 / lam[0],
                                          pg, rg, dims[2], d_abc)
    cmi = cmi_nonvar(mat, a, dims)
    holds = bool(lower <= cmi + slack and cmi <= upper + slack)
    cert = AMCCertificate(cmi, lower, upper, pg, rg, holds)
    if strict and not holds:
        raise VerificationError(f"certificate violated: {lower} <= {cmi} <= {upper} fails")
    return cert


def markov_product(rho_a, rho_bc, dims_bc):
    """Exact Markov chain ``rho_A ⊗ rho_BC``; returns ``(state, dims)``."""
    return np.kron(rho_a, rho_bc), (rho_a.shape[0],) + tuple(dims_bc)


def markov_classical(p, rhos_a, rhos_c):
    """Exact Markov chain ``sum_b p_b rho_A^b ⊗ |b><b| ⊗ rho_C^b``."""
    p = np.asarray(p, dtype=float)
    dB = p.size
    dA, dC = rhos_a[0].shape[0], rhos_c[0].shape[0]
    out = np.zeros((dA * dB * dC,) * 2, dtype=complex)
    for b in range(dB):
        e = np.zeros((dB, dB))
        e[b, b] = 1
        out += p[b] * np.kron(np.kron(rhos_a[b], e), rhos_c[b])
    return out, (dA, dB, dC)
