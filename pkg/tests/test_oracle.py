import math

import numpy as np
import pytest

from renyi_bounds.errors import DomainError
from renyi_bounds.linalg import random_density
from renyi_bounds.oracle import (oracle_c_norm_diagonal, oracle_cond_entropy, oracle_gen_mutual_info,
                                 oracle_mutual_info, oracle_set_divergence, simplex_grid)
from renyi_bounds.variational import cond_entropy_up


@pytest.mark.parametrize("d,n", [(2, 4), (3, 5), (4, 3)])
def test_simplex_grid_count(d, n):
    g = simplex_grid(d, n)
    assert len(g) == math.comb(n + d - 1, d - 1)
    assert np.allclose(g.sum(axis=1), 1)


def test_oracle_known_values(rng):
    assert oracle_cond_entropy(np.eye(4) / 4, 2.0, (2, 2), unitaries=20) == pytest.approx(math.log(2), abs=1e-9)
    ra, rb = random_density(2, seed=rng), random_density(2, seed=rng)
    prod = np.kron(ra, rb)
    assert oracle_mutual_info(prod, 2.0, (2, 2), unitaries=20, budget=4000) == pytest.approx(0, abs=1e-6)
    assert oracle_gen_mutual_info(prod, ra, 0.7, (2, 2), unitaries=20) == pytest.approx(0, abs=1e-6)


def test_oracle_agrees_with_optimizer(rng):
    rho = random_density(4, seed=rng)
    ref = oracle_cond_entropy(rho, 1.5, (2, 2), unitaries=50)
    assert cond_entropy_up(rho, 1.5, (2, 2)) == pytest.approx(ref, abs=1e-6)


def test_oracle_diagonal_classical(rng):
    p = rng.dirichlet(np.ones(3))
    assert oracle_set_divergence(np.diag(p).astype(complex), "diagonal", (3,), 2.0, resolution=30) == pytest.approx(0, abs=1e-8)


def test_oracle_rejects():
    with pytest.raises(DomainError):
        oracle_set_divergence(np.eye(4) / 4, "identity", (2, 2), "inf")
    with pytest.raises(DomainError):
        oracle_set_divergence(np.eye(4) / 4, "separable", (2, 2), 2.0)
    with pytest.raises(DomainError):
        oracle_c_norm_diagonal(np.eye(3), 2, 0.25, True)


def test_c_norm_oracle_identity():
    val = oracle_c_norm_diagonal(np.eye(2), 2, 0.25, maximize=True)
    assert val == pytest.approx(math.sqrt(2 * 0.5 ** 1), abs=1e-9)
