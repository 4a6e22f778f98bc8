import math

import mpmath as mp
import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from renyi_bounds.divergences import (INF, ONE, RHO1, RHO2, TAU, d_max, d_sandwiched, parse_alpha,
                                      q_geometric, q_petz, q_sandwiched, superadditivity_counterexample,
                                      umegaki)
from renyi_bounds.errors import DomainError, KernelError
from renyi_bounds.linalg import random_density

seeds = st.integers(0, 2**31 - 1)
alphas = st.sampled_from([0.5, 0.6, 0.75, 0.9, 1.5, 2.0, 3.0, 7.0])


def _q_ref(rho, sigma, a):
    g = (1 - a) / (2 * a)
    P = sla.fractional_matrix_power(sigma, g)
    M = P @ rho @ P
    return float(np.sum(np.maximum(np.linalg.eigvalsh(0.5 * (M + M.conj().T)), 0) ** a))


@given(seeds, alphas, st.integers(2, 4))
def test_q_sandwiched_against_scipy(seed, a, d):
    r = np.random.default_rng(seed)
    rho, sigma = random_density(d, seed=r), random_density(d, seed=r)
    assert q_sandwiched(rho, sigma, a) == pytest.approx(_q_ref(rho, sigma, a), rel=1e-9)


@given(seeds, alphas)
def test_alternative_order_agrees(seed, a):
    r = np.random.default_rng(seed)
    rho, sigma = random_density(3, seed=r), random_density(3, seed=r)
    assert q_sandwiched(rho, sigma, a, "alternative") == pytest.approx(q_sandwiched(rho, sigma, a), rel=1e-10)


def test_divergence_of_equal_states_is_zero(rng):
    rho = random_density(3, seed=rng)
    for a in (0.5, 0.7, 2.0, ONE, INF):
        assert d_sandwiched(rho, rho, a) == pytest.approx(0, abs=1e-10)


def test_classical_commuting_case():
    p, q = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
    a = 2.5
    ref = math.log(np.sum(p ** a * q ** (1 - a))) / (a - 1)
    assert d_sandwiched(np.diag(p), np.diag(q), a) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("side", [1 - 1e-6, 1 + 1e-6])
def test_limit_one_is_umegaki(side, rng):
    rho, sigma = random_density(3, seed=rng), random_density(3, seed=rng)
    assert d_sandwiched(rho, sigma, side) == pytest.approx(umegaki(rho, sigma), abs=1e-5)
    assert d_sandwiched(rho, sigma, 1.0) == umegaki(rho, sigma)


def test_umegaki_against_logm(rng):
    rho, sigma = random_density(3, seed=rng), random_density(3, seed=rng)
    ref = np.trace(rho @ (sla.logm(rho) - sla.logm(sigma))).real
    assert umegaki(rho, sigma) == pytest.approx(ref, abs=1e-10)


def test_large_alpha_approaches_dmax(rng):
    rho, sigma = random_density(3, seed=rng), random_density(3, seed=rng)
    assert d_sandwiched(rho, sigma, 1e4) == pytest.approx(d_max(rho, sigma), abs=2e-3)


@given(seeds)
def test_dmax_bisection_agrees(seed):
    r = np.random.default_rng(seed)
    rho, sigma = random_density(3, seed=r), random_density(3, seed=r)
    assert d_max(rho, sigma, "bisection") == pytest.approx(d_max(rho, sigma), abs=1e-10)


def test_kernel_violation_raises():
    rho = np.eye(2) / 2
    sigma = np.diag([1.0, 0.0])
    with pytest.raises(KernelError):
        d_sandwiched(rho, sigma, 2.0)
    assert math.isfinite(d_sandwiched(sigma, rho, 2.0))


@pytest.mark.parametrize("bad", [0.3, 0.0, -1.0, float("nan"), "abc"])
def test_parse_alpha_rejects(bad):
    with pytest.raises(DomainError):
        parse_alpha(bad)


@pytest.mark.parametrize("text,expected", [("one", ONE), ("1", ONE), ("inf", INF), (1.0, ONE),
                                           (math.inf, INF), ("2.5", 2.5)])
def test_parse_alpha_accepts(text, expected):
    assert parse_alpha(text) == expected


def test_parse_alpha_finite_only():
    with pytest.raises(DomainError):
        parse_alpha(ONE, allow_limits=False)


def test_geometric_range():
    with pytest.raises(DomainError):
        q_geometric(RHO1, TAU, 2.5)


def _mp_power(M, s):
    E, Q = mp.eighe(M)
    return Q * mp.diag([e ** s for e in E]) * Q.transpose_conj()


def _mp_values(a=mp.mpf("1.5")):
    mp.mp.dps = 40
    conv = lambda X: mp.matrix([[mp.mpf(str(x.real)) for x in row] for row in X])
    r1, r2, t = conv(RHO1), conv(RHO2), conv(TAU)
    petz = lambda r: sum((_mp_power(r, a) * _mp_power(t, 1 - a))[i, i] for i in range(2))

    def geo(r):
        ti, th = _mp_power(t, -0.5), _mp_power(t, 0.5)
        return sum((th * _mp_power(ti * r * ti, a) * th)[i, i] for i in range(2))

    return {"petz": [petz(r1), petz(r2), petz(r1 + r2)], "geometric": [geo(r1), geo(r2), geo(r1 + r2)]}


def test_counterexample_against_high_precision():
    res = superadditivity_counterexample()
    ref = _mp_values()
    for fam in ("petz", "geometric"):
        v1, v2, vc = (float(mp.re(x)) for x in ref[fam])
        assert res[fam]["rho1"] == pytest.approx(v1, rel=1e-12)
        assert res[fam]["rho2"] == pytest.approx(v2, rel=1e-12)
        assert res[fam]["combined"] == pytest.approx(vc, rel=1e-12)


def test_counterexample_chains():
    res = superadditivity_counterexample()
    assert res["petz"]["sum"] > 6 > 5.9 > res["petz"]["combined"]
    assert res["geometric"]["sum"] > 9 > 6 > res["geometric"]["combined"]
    assert res["holds"]


def test_shipped_matrices():
    assert np.array_equal(RHO1.real, [[0.8, 0.3], [0.3, 0.2]])
    assert np.array_equal(RHO2.real, [[0.1, 0.2], [0.2, 0.9]])
    assert np.array_equal(TAU.real, [[0.45, 0.49], [0.49, 0.55]])


def test_petz_matches_definition():
    ref = np.trace(sla.fractional_matrix_power(RHO1, 1.5) @ sla.fractional_matrix_power(TAU, -0.5)).real
    assert q_petz(RHO1, TAU, 1.5) == pytest.approx(ref, rel=1e-10)
