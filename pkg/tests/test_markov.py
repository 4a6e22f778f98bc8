import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from renyi_bounds.errors import DomainError, KernelError, VerificationError
from renyi_bounds.linalg import kron, random_density, random_unitary, reduce_to
from renyi_bounds.markov import (RecoveryKind, beta0, certify_amc, markov_classical, markov_gap,
                                 markov_product, petz_recover)
from renyi_bounds.variational import cmi_nonvar
from renyi_bounds.verify import quadrature_mass

seeds = st.integers(0, 2**31 - 1)
DIMS = (2, 2, 2)


def test_beta0_values():
    assert beta0(0.0) == pytest.approx(math.pi / 4)
    t = np.linspace(-3, 3, 13)
    assert np.allclose(beta0(t), beta0(-t))


def test_quadrature_mass_against_antiderivative():
    exact = math.tanh(math.pi * 10 / 2)
    assert quadrature_mass(10, 201) == pytest.approx(exact, abs=1e-12)
    assert abs(quadrature_mass(10, 201) - 1) <= 1e-10


def test_kind_validation():
    with pytest.raises(DomainError):
        RecoveryKind.universal(0, 201)
    with pytest.raises(DomainError):
        RecoveryKind.universal(10, 2)
    with pytest.raises(DomainError):
        RecoveryKind("other")


def test_product_chain_recovered(rng):
    rho, dims = markov_product(random_density(2, seed=rng), random_density(4, seed=rng), (2, 2))
    rab = reduce_to(rho, dims, [0, 1])
    for kind in (RecoveryKind.petz(), RecoveryKind.rotated(0.7), RecoveryKind.universal()):
        assert np.abs(petz_recover(rho, rab, kind, dims) - rho).max() <= 1e-9


def test_classical_chain_gap_zero(rng):
    p = rng.dirichlet(np.ones(2))
    rho, dims = markov_classical(p, [random_density(2, seed=rng) for _ in range(2)],
                                 [random_density(2, seed=rng) for _ in range(2)])
    assert markov_gap(rho, None, dims) <= 1e-8
    assert cmi_nonvar(rho, 1.5, dims) == pytest.approx(0, abs=1e-9)


@given(seeds)
@settings(max_examples=10)
def test_rotated_zero_equals_petz(seed):
    rho = random_density(8, seed=seed)
    X = reduce_to(rho, DIMS, [0, 1])
    a = petz_recover(rho, X, RecoveryKind.petz(), DIMS)
    b = petz_recover(rho, X, RecoveryKind.rotated(0.0), DIMS)
    assert np.array_equal(a, b)


def test_recovery_trace_and_psd(rng):
    rho = random_density(8, seed=rng)
    out = petz_recover(rho, reduce_to(rho, DIMS, [0, 1]), None, DIMS)
    assert np.trace(out).real == pytest.approx(1, abs=1e-9)
    assert np.linalg.eigvalsh(0.5 * (out + out.conj().T)).min() >= -1e-9
    u = petz_recover(rho, reduce_to(rho, DIMS, [0, 1]), RecoveryKind.universal(), DIMS)
    assert np.trace(u).real == pytest.approx(1, abs=1e-7)


def test_universal_quadrature_converged(rng):
    rho = random_density(8, seed=rng)
    X = reduce_to(rho, DIMS, [0, 1])
    u1 = petz_recover(rho, X, RecoveryKind.universal(10, 201), DIMS)
    u2 = petz_recover(rho, X, RecoveryKind.universal(10, 402), DIMS)
    assert np.abs(u1 - u2).max() < 1e-7


def test_gap_local_unitary_invariance(rng):
    rho = random_density(8, seed=rng)
    U = kron(random_unitary(2, rng), random_unitary(2, rng), random_unitary(2, rng))
    g1 = markov_gap(rho, None, DIMS)
    g2 = markov_gap(U @ rho @ U.conj().T, None, DIMS)
    assert g1 > 0
    assert g2 == pytest.approx(g1, abs=1e-9)


def test_gap_positive_for_random_state(rng):
    assert markov_gap(random_density(8, seed=rng), RecoveryKind.rotated(0.3), DIMS) > 1e-3


def test_support_misalignment():
    rho = np.zeros((8, 8), dtype=complex)
    rho[0, 0] = 1.0
    X = np.eye(4) / 4
    with pytest.raises(KernelError):
        petz_recover(rho, X, None, DIMS)


@pytest.mark.parametrize("a,cp", [(0.75, 1 / 6), (2.0, 0.125)])
def test_certificate_on_exact_chain(a, cp, rng):
    rho, dims = markov_product(random_density(2, seed=rng), random_density(4, seed=rng), (2, 2))
    cert = certify_amc(rho, a, cp, 0.0, dims, strict=True)
    assert abs(cert.cmi_value) <= 1e-7
    assert cert.lower_bound <= 1e-7 and cert.upper_bound <= 1e-7


def test_certificate_upper_holds_random_states(rng):
    for _ in range(5):
        cert = certify_amc(random_density(8, seed=rng), 2.0, 0.125, 0.0, DIMS)
        assert cert.cmi_value <= cert.upper_bound + 1e-6


def test_certificate_rejects_non_pd_and_regime():
    rho = np.diag([1.0] + [0.0] * 7).astype(complex)
    with pytest.raises(DomainError):
        certify_amc(rho, 2.0, 0.125, 0.0, DIMS)
    with pytest.raises(DomainError):
        certify_amc(np.eye(8) / 8, 2.0, 0.3, 0.0, DIMS)


def test_certificate_strict_failure_raises(rng):
    with pytest.raises(VerificationError):
        for _ in range(20):
            certify_amc(random_density(8, seed=rng), 2.0, 0.125, 0.0, DIMS, strict=True)
