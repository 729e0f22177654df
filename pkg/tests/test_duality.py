import numpy as np
import pytest

from kmpchain import duality
from kmpchain.dual import dual_config_from_sites
from kmpchain.params import ModelParams, stream


def test_duality_function_frozen():
    # beta+ = 0.5: one particle in each cemetery, two at site 0, xi_0 = 3
    #   F = (0.5)^-1 * 1^-1 * 3^2/2! = 2 * 4.5 = 9.0
    p = ModelParams(L=1, beta_minus=1.0, beta_plus=0.5)
    counts = np.array([1, 0, 2, 0, 1])
    xi = np.array([1.0, 3.0, 1.0])
    assert abs(duality.duality_function(counts, xi, p) - 9.0) < 1e-12


def test_duality_function_empty_counts():
    p = ModelParams(L=2)
    assert duality.duality_function(np.zeros(7, dtype=int), np.ones(5), p) == 1.0


def test_duality_function_validation():
    p = ModelParams(L=1)
    with pytest.raises(ValueError):
        duality.duality_function(np.zeros(4, dtype=int), np.ones(3), p)
    with pytest.raises(ValueError):
        duality.duality_function(np.zeros(5, dtype=int), np.ones(4), p)
    with pytest.raises(ValueError):
        duality.duality_function(np.array([0, -1, 0, 0, 0]), np.ones(3), p)
    big = np.zeros(5, dtype=int)
    big[2] = duality.FACTORIAL_GUARD + 1
    with pytest.raises(ValueError):
        duality.duality_function(big, np.ones(3), p)


def test_eval_many_matches_loop():
    p = ModelParams(L=2, beta_minus=0.8, beta_plus=1.7)
    rng = stream(21)
    xi = rng.exponential(1.0, size=5) + 0.1
    rows = rng.integers(0, 4, size=(40, 7))
    vec = duality._eval_many(rows, xi, p)
    for i in range(40):
        assert abs(vec[i] - duality.duality_function(rows[i], xi, p)) < 1e-12


def test_duality_check_statistics():
    chk = duality.DualityCheck(lhs=1.1, se_lhs=0.03, rhs=1.0, se_rhs=0.04, t=1.0, reps=10)
    assert abs(chk.combined_se - 0.05) < 1e-15
    assert abs(chk.z - 2.0) < 1e-12


def test_verify_duality_small():
    # modest budget; the identity is exact, so z is O(1)
    p = ModelParams(L=1, A=1.0, B=2.0, a=1.0, b=0.0,
                    beta_minus=1.0, beta_plus=0.5)
    zeta = np.array([0.5, 1.0, 2.0])
    chk = duality.verify_duality({0: 1, 1: 1}, zeta, t=1.0, reps=60000,
                                 params=p, rng=stream(40))
    assert chk.reps == 60000
    assert abs(chk.z) < 4.0


def test_verify_duality_t_zero_exact():
    # at t = 0 both sides equal F(k, zeta) deterministically
    p = ModelParams(L=1, beta_plus=0.5)
    zeta = np.array([0.5, 1.0, 2.0])
    k = {-1: 1, 1: 2}
    chk = duality.verify_duality(k, zeta, t=0.0, reps=32, params=p, rng=stream(41))
    want = duality.duality_function(dual_config_from_sites(p, k), zeta, p)
    assert chk.se_lhs == 0.0 and chk.se_rhs == 0.0
    assert abs(chk.lhs - want) < 1e-12 and abs(chk.rhs - want) < 1e-12


def test_verify_stationary_moment_equilibrium():
    # equal reservoirs at T = 2: E[xi_x] = 2 for every x, so the single-site
    # first moment is 2 and the prediction mechanism must agree
    p = ModelParams(L=1, beta_minus=0.5, beta_plus=0.5, seed=42)
    chk = duality.verify_stationary_moment({0: 1}, p, t_burn=500.0,
                                           t_measure=3e4, n_batches=15)
    assert abs(chk.predicted - 2.0) < 1e-12
    assert abs(chk.z) < 4.0
    assert chk.k == ((0, 1),)


def test_verify_stationary_moment_product():
    # two particles at distinct sites; prediction comes from the joint law
    p = ModelParams(L=1, beta_minus=1.0, beta_plus=0.5, seed=43)
    chk = duality.verify_stationary_moment({-1: 1, 1: 1}, p, t_burn=500.0,
                                           t_measure=6e4, n_batches=15)
    assert 1.0 < chk.predicted < 2.0 ** 2
    assert abs(chk.z) < 4.0
