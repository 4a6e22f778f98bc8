"""Hermitian matrix kernel: spectra, matrix functions, norms and random states.

Every routine accepts plain ``numpy`` arrays.  Functions that make sense on
stacks of matrices (leading batch axes) say so in their docstring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

HERM_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
REL_CUTOFF = 1e-12
ABS_CUTOFF = 1e-300


class Spectrum(NamedTuple):
    """Eigen-decomposition ``U diag(eigenvalues) U^dagger``, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues[..., None, :]) @ U.conj().swapaxes(-1, -2)

    @property
    def min_positive(self) -> float:
        """Smallest eigenvalue above the kernel cutoff."""
        lam = self.eigenvalues
        return float(lam[lam > cutoff(lam)].min())

    @property
    def min(self) -> float:
        return float(self.eigenvalues.min())


def cutoff(eigenvalues) -> np.ndarray:
    """Kernel cutoff for a set of eigenvalues (relative, with an absolute floor).

    Works on stacks: the last axis holds the eigenvalues of one matrix.
    """
    lam_max = np.max(np.abs(eigenvalues), axis=-1, keepdims=True)
    return np.where(lam_max > 0, REL_CUTOFF * lam_max, ABS_CUTOFF)


def is_hermitian(X, tol: float = HERM_TOL) -> bool:
    X = np.asarray(X)
    return X.ndim >= 2 and X.shape[-1] == X.shape[-2] and np.allclose(
        X, X.conj().swapaxes(-1, -2), rtol=0, atol=tol)


def as_hermitian(X, tol: float = HERM_TOL) -> np.ndarray:
    """Validate ``X`` as a Hermitian matrix and return it as complex array."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    if not is_hermitian(X, tol):
        err = np.abs(X - X.conj().T).max()
        raise ValueError(f"matrix is not Hermitian (max asymmetry {err:.3g})")
    return 0.5 * (X + X.conj().T)


def as_density(rho, psd_tol: float = PSD_TOL, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD and unit trace."""
    rho = as_hermitian(rho)
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -psd_tol:
        raise ValueError(f"matrix is not PSD (min eigenvalue {lam.min():.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise ValueError(f"trace is {tr:.12g}, expected 1")
    return rho


@dataclass(frozen=True)
class PartitionedState:
    """A density matrix together with its tensor factor dimensions."""

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        if any(d < 1 for d in dims) or int(np.prod(dims)) != mat.shape[-1]:
            raise ValueError(f"dims {dims} do not match matrix of size {mat.shape[-1]}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def validated(cls, matrix, dims) -> "PartitionedState":
        return cls(as_density(matrix), dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[-1]

    def marginal(self, keep: Sequence[int]) -> "PartitionedState":
        keep = sorted(keep)
        return PartitionedState(reduce_to(self.matrix, self.dims, keep),
                                tuple(self.dims[k] for k in keep))

    def permuted(self, order: Sequence[int]) -> "PartitionedState":
        return PartitionedState(permute_systems(self.matrix, self.dims, order),
                                tuple(self.dims[k] for k in order))


def unpack_state(rho, dims=None):
    """Return ``(matrix, dims)`` from a :class:`PartitionedState` or an array."""
    if isinstance(rho, PartitionedState):
        return rho.matrix, rho.dims
    if dims is None:
        raise ValueError("factor dimensions are required for a bare matrix")
    return PartitionedState(rho, dims).matrix, tuple(int(d) for d in dims)


def herm_eig(H, check: bool = True) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix, eigenvalues sorted descending.

    Parameters
    ----------
    H : array_like
        Hermitian matrix (or stack of matrices when ``check`` is False).
    check : bool
        Reject inputs that are not Hermitian within ``1e-12``.
    """
    H = np.asarray(H)
    if check and not is_hermitian(H):
        raise ValueError("herm_eig needs a Hermitian matrix")
    lam, U = np.linalg.eigh(H)
    return Spectrum(lam[..., ::-1], U[..., ::-1])


def apply_spectral(H, func) -> np.ndarray:
    """Return ``U f(lambda) U^dagger`` for Hermitian ``H`` (stacks allowed)."""
    lam, U = np.linalg.eigh(H)
    return (U * func(lam)[..., None, :]) @ U.conj().swapaxes(-1, -2)


def _power_values(lam, s):
    lam = np.where(lam > 0, lam, 0.0)
    keep = lam > cutoff(lam)
    safe = np.where(keep, lam, 1.0)
    if s == 0:
        return keep.astype(float)
    return np.where(keep, safe ** s, 0.0)


def mat_power(X, s: float) -> np.ndarray:
    """Power ``X^s`` of a PSD matrix under the pseudo-inverse convention.

    Eigenvalues below the kernel cutoff are mapped to zero for every ``s``
    (``s = 0`` gives the support projection).  Small negative eigenvalues
    from round-off are treated as zero.  Stacks are supported.

    Examples
    --------
    >>> mat_power(np.diag([4.0, 0.0]), -0.5).real
    array([[0.5, 0. ],
           [0. , 0. ]])
    """
    return apply_spectral(np.asarray(X), lambda lam: _power_values(lam, s))


def mat_log(X) -> np.ndarray:
    """Natural logarithm of a PSD matrix restricted to its support."""
    def f(lam):
        keep = lam > cutoff(lam)
        return np.where(keep, np.log(np.where(keep, lam, 1.0)), 0.0)
    return apply_spectral(np.asarray(X), f)


def mat_exp_h(H) -> np.ndarray:
    """Exponential of a Hermitian matrix."""
    return apply_spectral(np.asarray(H), np.exp)


def support_projection(X) -> np.ndarray:
    """Orthogonal projection onto the span of eigenvectors above the cutoff."""
    return mat_power(X, 0)


def kernel_included(sigma, rho) -> bool:
    """True iff ``ker sigma`` is contained in ``ker rho``.

    Tested as ``|| (1 - P) rho (1 - P) || < cutoff`` with ``P`` the support
    projection of ``sigma`` and the cutoff taken relative to ``rho``.
    """
    sigma = np.asarray(sigma)
    rho = np.asarray(rho)
    if sigma.shape != rho.shape:
        raise ValueError("dimension mismatch")
    Q = np.eye(sigma.shape[-1]) - support_projection(sigma)
    resid = Q @ rho @ Q
    scale = np.abs(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))).max()
    tol = REL_CUTOFF * scale if scale > 0 else ABS_CUTOFF
    return bool(np.abs(np.linalg.eigvalsh(0.5 * (resid + resid.conj().T))).max() <= max(tol, 1e-14))


def singular_values(X) -> np.ndarray:
    return np.linalg.svd(np.asarray(X), compute_uv=False)


def schatten_norm(X, p: float) -> float:
    """Schatten ``p``-norm for ``p`` in ``[1, inf]``."""
    if not p >= 1:
        raise ValueError(f"Schatten norm needs p >= 1, got {p}")
    s = singular_values(X)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s ** p) ** (1.0 / p))


def trace_norm(X) -> float:
    return schatten_norm(X, 1)


def trace_distance(rho, sigma) -> float:
    """``1/2 ||rho - sigma||_1``."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    D = rho - sigma
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (D + D.conj().T))).sum())


def fidelity(rho, sigma) -> float:
    """Squared fidelity ``(tr |sqrt(rho) sqrt(sigma)|)^2``."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("dimension mismatch")
    s = singular_values(mat_power(rho, 0.5) @ mat_power(sigma, 0.5))
    return float(min(max(s.sum() ** 2, 0.0), 1.0))


def kron(*ops) -> np.ndarray:
    """Tensor product of any number of matrices."""
    out = np.ones((1, 1))
    for op in ops:
        out = np.kron(out, op)
    return out


def permute_systems(X, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator (stacks supported)."""
    X = np.asarray(X)
    n = len(dims)
    batch = X.shape[:-2]
    nb = len(batch)
    T = X.reshape(batch + tuple(dims) + tuple(dims))
    axes = list(range(nb)) + [nb + k for k in order] + [nb + n + k for k in order]
    D = X.shape[-1]
    return T.transpose(axes).reshape(batch + (D, D))


def reduce_to(X, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace keeping the factors listed in ``keep`` (stacks supported)."""
    X = np.asarray(X)
    dims = tuple(dims)
    keep = sorted(set(keep))
    n = len(dims)
    batch = X.shape[:-2]
    nb = len(batch)
    T = X.reshape(batch + dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    bl = "ABCDEFGH"[:nb]
    row = [letters[k] for k in range(n)]
    col = [letters[k] if k not in keep else letters[n + k] for k in range(n)]
    out = bl + "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    expr = bl + "".join(row) + "".join(col) + "->" + out
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return np.einsum(expr, T).reshape(batch + (dk, dk))


def partial_trace(rho, factor, dims: Sequence[int] | None = None) -> np.ndarray:
    """Trace out one factor (or a list of factors) of a partitioned state.

    Parameters
    ----------
    rho : PartitionedState or ndarray
        State; a bare array needs ``dims``.
    factor : int or sequence of int
        Factor index(es) to trace out.
    """
    mat, dims = unpack_state(rho, dims)
    drop = {factor} if np.isscalar(factor) else set(factor)
    if any(not (0 <= k < len(dims)) for k in drop):
        raise ValueError(f"invalid factor index {factor} for dims {dims}")
    keep = [k for k in range(len(dims)) if k not in drop]
    return reduce_to(mat, dims, keep)


def embed(op, dims: Sequence[int], slots: Sequence[int]) -> np.ndarray:
    """Tensor ``op`` (acting on the factors ``slots``, contiguous) with identities."""
    slots = list(slots)
    before = int(np.prod(dims[:slots[0]]))
    after = int(np.prod(dims[slots[-1] + 1:]))
    return kron(np.eye(before), op, np.eye(after))


def binary_entropy(x: float) -> float:
    """Binary entropy in nats, ``h(0) = h(1) = 0``."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    return float(sum(-t * np.log(t) for t in (x, 1 - x) if t > 0))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix ``G G^dagger / tr`` of given rank."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar random unitary via QR of a complex Ginibre matrix."""
    rng = _rng(seed)
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_hermitian(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (G + G.conj().T)


def apply_floor(rho, m: float) -> np.ndarray:
    """Mix towards the maximally mixed state so that ``rho >= m``."""
    d = rho.shape[-1]
    return (1 - m * d) * rho + m * np.eye(d)


def random_pair_at_distance(d: int, eps: float, seed=None, floor: float | None = None):
    """Random pair of states with trace distance exactly ``eps``.

    The second state lies on the segment from ``rho`` towards a random state
    ``omega``, so the distance is ``t * 1/2 ||rho - omega||_1`` and ``t`` is
    solved for in closed form.  With ``floor`` both states satisfy
    ``state >= floor * 1``.

    Raises
    ------
    ValueError
        If ``eps`` is out of range or cannot be reached under the floor.
    """
    if floor is not None and not (0 <= floor and floor * d < 1):
        raise ValueError(f"floor {floor} is infeasible in dimension {d} (need m*d < 1)")
    rng = _rng(seed)
    rho = random_density(d, d, rng)
    if floor:
        rho = apply_floor(rho, floor)
    return rho, state_at_distance(rho, eps, rng, floor)


def state_at_distance(rho, eps: float, seed=None, floor: float | None = None) -> np.ndarray:
    """Random state at trace distance exactly ``eps`` from ``rho`` (see :func:`random_pair_at_distance`)."""
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    rng = _rng(seed)
    fix = (lambda r: apply_floor(r, floor)) if floor else (lambda r: r)
    if eps == 0:
        return rho.copy()
    for attempt in range(32):
        if attempt < 16:
            omega = random_density(d, int(rng.integers(1, d + 1)), rng)
        else:
            lam, U = np.linalg.eigh(rho)
            k = int(rng.integers(0, max(1, d // 2)))
            v = U[:, k]
            omega = np.outer(v, v.conj())
        omega = fix(omega)
        t0 = trace_distance(rho, omega)
        if t0 >= eps:
            t = eps / t0
            sigma = (1 - t) * rho + t * omega
            return 0.5 * (sigma + sigma.conj().T)
    best = 1 - np.linalg.eigvalsh(rho).min() if not floor else None
    raise ValueError(f"could not reach trace distance {eps} (floor={floor}, "
                     f"max reachable approx {best})")
