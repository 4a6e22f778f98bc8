import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from renyi_bounds.divergences import INF, ONE, d_sandwiched
from renyi_bounds.errors import DomainError
from renyi_bounds.linalg import random_density, reduce_to
from renyi_bounds.variational import (ConvexStateSet, OptimizerConfig, cmi_nonvar, cmi_up, cmi_up_batch,
                                      cond_entropy_nonvar, cond_entropy_up, cond_entropy_up_batch,
                                      d_alpha_to_set, gen_mutual_info, gen_mutual_info_batch,
                                      inf_order_quantities, mutual_info_nonvar, mutual_info_up,
                                      mutual_info_up_batch, sep_distance)

seeds = st.integers(0, 2**31 - 1)
ALPHAS = [0.6, 0.9, ONE, 1.5, 2.0, 5.0]


def phi_plus(d=2):
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1
    v /= np.sqrt(d)
    return np.outer(v, v.conj())


def renyi_entropy(rho, a):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-14]
    if a is ONE:
        return float(-np.sum(lam * np.log(lam)))
    return float(np.log(np.sum(lam ** a)) / (1 - a))


@pytest.mark.parametrize("a", ALPHAS)
def test_cond_entropy_maximally_mixed(a):
    assert cond_entropy_up(np.eye(4) / 4, a, (2, 2)) == pytest.approx(math.log(2), abs=1e-9)


@pytest.mark.parametrize("a", ALPHAS)
def test_cond_entropy_maximally_entangled(a):
    assert cond_entropy_up(phi_plus(), a, (2, 2)) == pytest.approx(-math.log(2), abs=1e-6)


@pytest.mark.parametrize("a", ALPHAS)
def test_cond_entropy_product_is_marginal_entropy(a, rng):
    ra, rb = random_density(2, seed=rng), random_density(3, seed=rng)
    val = cond_entropy_up(np.kron(ra, rb), a, (2, 3))
    assert val == pytest.approx(renyi_entropy(ra, a), abs=1e-7)


def test_cond_entropy_full_witness(rng):
    rho = random_density(6, seed=rng)
    res = cond_entropy_up(rho, 2.0, (2, 3), full=True)
    assert res.converged
    assert res.witness.shape == (3, 3)
    assert np.trace(res.witness).real == pytest.approx(1)
    direct = math.log(2) - d_sandwiched(rho, np.kron(np.eye(2) / 2, res.witness), 2.0)
    assert direct == pytest.approx(res.value, abs=1e-9)


@given(seeds)
@settings(max_examples=15)
def test_cond_entropy_beats_marginal_choice(seed):
    rho = random_density(4, seed=seed)
    for a in (0.7, 2.0):
        assert cond_entropy_up(rho, a, (2, 2)) >= cond_entropy_nonvar(rho, a, (2, 2)) - 1e-9


@given(seeds)
@settings(max_examples=10)
def test_cond_entropy_decreasing_in_alpha(seed):
    rho = random_density(4, seed=seed)
    vals = [cond_entropy_up(rho, a, (2, 2)) for a in (0.6, 0.9, ONE, 1.5, 3.0)]
    assert all(x >= y - 1e-8 for x, y in zip(vals, vals[1:]))


def test_batch_matches_single(rng):
    rhos = np.stack([random_density(4, seed=rng) for _ in range(4)])
    v, e, c = cond_entropy_up_batch(rhos, (2, 2), 1.5)
    assert c.all()
    for k in range(4):
        assert v[k] == pytest.approx(cond_entropy_up(rhos[k], 1.5, (2, 2)), abs=1e-9)
    vm, _, _ = mutual_info_up_batch(rhos, (2, 2), 2.0)
    assert vm[0] == pytest.approx(mutual_info_up(rhos[0], 2.0, (2, 2)), abs=1e-8)


@pytest.mark.parametrize("a", [0.6, 2.0])
def test_mutual_info_product_zero(a, rng):
    rho = np.kron(random_density(2, seed=rng), random_density(2, seed=rng))
    assert mutual_info_up(rho, a, (2, 2)) == pytest.approx(0, abs=1e-8)


def test_mutual_info_below_marginal_choice(rng):
    rho = random_density(4, seed=rng)
    for a in (0.7, 2.0):
        assert mutual_info_up(rho, a, (2, 2)) <= mutual_info_nonvar(rho, a, (2, 2)) + 1e-9


def test_gen_mutual_info_with_marginal(rng):
    ra, rb = random_density(2, seed=rng), random_density(2, seed=rng)
    assert gen_mutual_info(np.kron(ra, rb), ra, 2.0, (2, 2)) == pytest.approx(0, abs=1e-8)
    rhos = np.stack([np.kron(ra, rb)] * 2)
    v, _, _ = gen_mutual_info_batch(rhos, np.stack([ra, ra]), (2, 2), 2.0)
    assert np.allclose(v, 0, atol=1e-8)


def test_gen_mutual_info_identity_relation(rng):
    rho = random_density(4, seed=rng)
    val = gen_mutual_info(rho, np.eye(2) / 2, 2.0, (2, 2))
    assert val == pytest.approx(math.log(2) - cond_entropy_up(rho, 2.0, (2, 2)), abs=1e-9)


@pytest.mark.parametrize("a", [0.6, 1.5, 3.0])
def test_cmi_markov_chain_zero(a, rng):
    rho = np.kron(random_density(2, seed=rng), random_density(4, seed=rng))
    assert cmi_up(rho, a, (2, 2, 2)) == pytest.approx(0, abs=1e-7)
    assert cmi_nonvar(rho, a, (2, 2, 2)) == pytest.approx(0, abs=1e-9)


def test_cmi_batch(rng):
    rhos = np.stack([random_density(8, seed=rng) for _ in range(3)])
    v, _, c = cmi_up_batch(rhos, (2, 2, 2), 2.0)
    assert c.all()
    assert v[1] == pytest.approx(cmi_up(rhos[1], 2.0, (2, 2, 2)), abs=1e-8)


def test_singleton_set_is_divergence(rng):
    rho, tau = random_density(3, seed=rng), random_density(3, seed=rng)
    res = d_alpha_to_set(rho, ConvexStateSet.singleton(tau), 2.0)
    assert res.value == pytest.approx(d_sandwiched(rho, tau, 2.0), rel=1e-12)


def test_diagonal_set_classical(rng):
    p = rng.dirichlet(np.ones(3))
    res = d_alpha_to_set(np.diag(p).astype(complex), ConvexStateSet.diagonal(3), 2.0)
    assert res.value == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("a", [0.5, 0.8, 2.0, ONE])
def test_sep_distance_maximally_entangled(a):
    res = sep_distance(phi_plus(), a, (2, 2), OptimizerConfig(seed=1))
    assert res.value == pytest.approx(math.log(2), abs=1e-4)


def test_sep_distance_product_zero(rng):
    rho = np.kron(random_density(2, seed=rng), random_density(2, seed=rng))
    assert sep_distance(rho, 2.0, (2, 2)).value == pytest.approx(0, abs=1e-6)


def test_sep_dimension_guard():
    with pytest.raises(DomainError):
        sep_distance(np.eye(16) / 16, 2.0, (4, 4))


def test_infinite_order_quantities():
    assert inf_order_quantities(np.eye(4) / 4, "min_cond_entropy", (2, 2)) == pytest.approx(math.log(2), abs=1e-6)
    assert inf_order_quantities(phi_plus(), "min_cond_entropy", (2, 2)) == pytest.approx(-math.log(2), abs=1e-6)
    prod = np.kron(np.diag([0.7, 0.3]), np.diag([0.4, 0.6])).astype(complex)
    assert inf_order_quantities(prod, "max_mutual_info", (2, 2)) == pytest.approx(0, abs=1e-6)
    with pytest.raises(DomainError):
        inf_order_quantities(prod, "nope", (2, 2))


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(tol=0)
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)


def test_witness_is_in_set(rng):
    rho = random_density(4, seed=rng)
    res = d_alpha_to_set(rho, ConvexStateSet.identity_simplex(2, 2), 0.7)
    w = res.witness
    assert np.allclose(w, np.kron(np.eye(2) / 2, reduce_to(w, (2, 2), [1])), atol=1e-12)
