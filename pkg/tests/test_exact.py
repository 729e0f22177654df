import itertools
import math

import numpy as np
import pytest

from kmpchain import exact
from kmpchain.params import ModelParams


# ----------------------------------------------------------------------
# independent reference implementations (deliberately different route:
# dense full-clock embedded chains, subset weights by permutation count)
# ----------------------------------------------------------------------

def dense_single_walker_law(params):
    """Absorption-at-delta+ probabilities from a dense full-clock chain."""
    L = params.L
    c, d = params.left_rate, params.right_rate
    total = 2 * L + c + d
    states = list(range(-(L + 1), L + 2))
    idx = {x: i for i, x in enumerate(states)}
    n = len(states)
    P = np.zeros((n, n))
    P[idx[-(L + 1)], idx[-(L + 1)]] = 1.0
    P[idx[L + 1], idx[L + 1]] = 1.0
    for x in range(-L, L + 1):
        row = idx[x]
        stay = 0.0
        for bond in range(-L, L):            # bond couples (bond, bond+1)
            if x == bond:
                P[row, idx[bond + 1]] += 0.5 / total
                stay += 0.5 / total
            elif x == bond + 1:
                P[row, idx[bond]] += 0.5 / total
                stay += 0.5 / total
            else:
                stay += 1.0 / total
        if x == -L:
            P[row, idx[-(L + 1)]] += c / total
        else:
            stay += c / total
        if x == L:
            P[row, idx[L + 1]] += d / total
        else:
            stay += d / total
        P[row, row] += stay
    trans = [idx[x] for x in range(-L, L + 1)]
    Q = P[np.ix_(trans, trans)]
    r_plus = P[trans, idx[L + 1]]
    a = np.linalg.solve(np.eye(len(trans)) - Q, r_plus)
    out = np.zeros(n)
    out[idx[L + 1]] = 1.0
    out[trans] = a
    return out


def permutation_split_law(m):
    """P(exact subset of labelled walkers goes left) by enumerating (U, perm)
    outcomes directly; returns {frozenset: probability}."""
    from fractions import Fraction
    law = {}
    n_outcomes = (m + 1) * math.factorial(m)
    for u in range(m + 1):
        for perm in itertools.permutations(range(m)):
            s = frozenset(perm[:u])
            law[s] = law.get(s, Fraction(0)) + Fraction(1, n_outcomes)
    return law


def dense_joint_law(positions, params):
    """Joint absorption-pattern law of labelled walkers from a dense product
    chain, with split probabilities taken from permutation_split_law."""
    L = params.L
    c, d = params.left_rate, params.right_rate
    total = 2 * L + c + d
    n = len(positions)
    codes = list(range(-(L + 1), L + 2))
    states = list(itertools.product(codes, repeat=n))
    idx = {s: i for i, s in enumerate(states)}
    ns = len(states)
    P = np.zeros((ns, ns))
    split = {m: permutation_split_law(m) for m in range(n + 1)}

    def absorbed(s):
        return all(abs(x) == L + 1 for x in s)

    for s in states:
        row = idx[s]
        if absorbed(s):
            P[row, row] = 1.0
            continue
        for bond in range(-L, L):
            pool = [i for i, x in enumerate(s) if x in (bond, bond + 1)]
            if not pool:
                P[row, row] += 1.0 / total
                continue
            for subset, w in split[len(pool)].items():
                new = list(s)
                for j, i in enumerate(pool):
                    new[i] = bond if j in subset else bond + 1
                P[row, idx[tuple(new)]] += float(w) / total
        new = tuple(-(L + 1) if x == -L else x for x in s)
        P[row, idx[new]] += c / total
        new = tuple(L + 1 if x == L else x for x in s)
        P[row, idx[new]] += d / total

    trans = [idx[s] for s in states if not absorbed(s)]
    targets = [s for s in states if absorbed(s)]
    Q = P[np.ix_(trans, trans)]
    solve = np.linalg.inv(np.eye(len(trans)) - Q)
    start = trans.index(idx[tuple(positions)])
    law = np.zeros((2,) * n)
    for s in targets:
        pattern = tuple(1 if x == L + 1 else 0 for x in s)
        col = P[np.ix_(trans, [idx[s]])].ravel()
        law[pattern] += solve[start] @ col
    return law


# ----------------------------------------------------------------------
# single-walker absorption
# ----------------------------------------------------------------------

def test_oracle_frozen_values_L1():
    # first-step system at L=1, A=B=1, a=b=0 solves to (1/6, 1/2, 5/6)
    p = ModelParams(L=1)
    oracle = exact.hitting_oracle(p)
    assert np.allclose(oracle, [0.0, 1 / 6, 1 / 2, 5 / 6, 1.0], atol=1e-14)


def test_oracle_endpoints_and_monotone():
    p = ModelParams(L=4, A=0.3, B=2.5, a=1.0, b=0.5)
    oracle = exact.hitting_oracle(p)
    assert oracle[0] == 0.0 and oracle[-1] == 1.0
    assert np.all(np.diff(oracle) > 0)


def test_closed_form_matches_oracle_small_grid():
    for L in (1, 2, 3, 8):
        for A, B, a, b in [(1, 1, 0, 0), (2, 0.5, 1, 0), (0.7, 3, 2, -1),
                           (1.4, 1.4, 0.5, 0.5)]:
            p = ModelParams(L=L, A=A, B=B, a=a, b=b)
            closed = np.array([exact.hitting_closed_form(p, x)
                               for x in range(-L, L + 1)])
            assert np.abs(closed - exact.hitting_oracle(p)[1:-1]).max() < 1e-12


def test_oracle_matches_dense_full_clock_chain():
    for L, A, B, a, b in [(1, 1, 1, 0, 0), (2, 1.3, 0.7, 0.5, -1),
                          (3, 2, 0.5, 1, 2)]:
        p = ModelParams(L=L, A=A, B=B, a=a, b=b)
        dense = dense_single_walker_law(p)
        assert np.abs(dense - exact.hitting_oracle(p)).max() < 1e-12


def test_closed_form_rejects_out_of_range():
    p = ModelParams(L=2)
    with pytest.raises(ValueError):
        exact.hitting_closed_form(p, 3)


# ----------------------------------------------------------------------
# joint absorption law
# ----------------------------------------------------------------------

def test_joint_single_walker_equals_oracle():
    p = ModelParams(L=2, A=1.0, B=2.0, a=1.0, b=0.0)
    oracle = exact.hitting_oracle(p)
    for x in range(-2, 3):
        law = exact.exact_joint_hitting([x], p)
        assert law.shape == (2,)
        assert abs(law.sum() - 1.0) < 1e-12
        assert abs(law[1] - oracle[x + 3]) < 1e-12


def test_joint_matches_dense_product_chain():
    p = ModelParams(L=1, A=0.8, B=1.7, a=1.0, b=0.0)
    for positions in [(-1, 1), (0, 0), (-1, -1), (0, 1)]:
        fast = exact.exact_joint_hitting(list(positions), p)
        dense = dense_joint_law(list(positions), p)
        assert np.abs(fast - dense).max() < 1e-12


def test_joint_three_walkers_marginalizes():
    p = ModelParams(L=2, A=1.5, B=0.5, a=0.0, b=1.0)
    joint = exact.exact_joint_hitting([-1, 0, 1], p)
    assert abs(joint.sum() - 1.0) < 1e-12
    pair = exact.exact_joint_hitting([-1, 1], p)
    assert np.abs(joint.sum(axis=1) - pair).max() < 1e-10


def test_joint_exchangeable_under_relabeling():
    p = ModelParams(L=2, A=1.0, B=2.0)
    ab = exact.exact_joint_hitting([0, 1], p)
    ba = exact.exact_joint_hitting([1, 0], p)
    assert np.abs(ab - ba.T).max() < 1e-12


def test_joint_guards():
    with pytest.raises(exact.StateSpaceError):
        exact.exact_joint_hitting([0] * 5, ModelParams(L=2))
    with pytest.raises(exact.StateSpaceError):
        exact.exact_joint_hitting([0, 1], ModelParams(L=7))
    with pytest.raises(ValueError):
        exact.exact_joint_hitting([4], ModelParams(L=2))


def test_pattern_counts():
    p = ModelParams(L=1)
    joint = exact.exact_joint_hitting([0, 0], p)
    q = exact.pattern_counts(joint)
    assert q.shape == (3,)
    assert abs(q.sum() - 1.0) < 1e-12
    assert abs(q[1] - (joint[0, 1] + joint[1, 0])) < 1e-14


# ----------------------------------------------------------------------
# macroscopic limit and regimes
# ----------------------------------------------------------------------

def test_p_limit_spot_values():
    # bulk-dominated: linear interpolation
    assert abs(exact.p_limit(1, 1, 0, 0, 0.5) - 0.75) < 1e-15
    # slow left (a=1), fast right: num = 2AB(1+u)+B, den = 4AB+B
    assert abs(exact.p_limit(2, 1, 1, 0, 0.0) - 5 / 9) < 1e-15
    # both slower than the bulk: only boundary terms survive
    assert abs(exact.p_limit(1, 3, 2, 2, 0.3) - 0.75) < 1e-15
    # one side much slower: profile pinned to the other reservoir
    assert exact.p_limit(1, 1, 2, 1.5, 0.0) == 1.0
    assert exact.p_limit(1, 1, 1.5, 2, 0.0) == 0.0


def test_p_limit_rejects_endpoint_u():
    with pytest.raises(ValueError):
        exact.p_limit(1, 1, 0, 0, 1.0)
    with pytest.raises(ValueError):
        exact.p_limit(1, 1, 0, 0, -1.0)


def test_regime_classify_covers_all_cells():
    assert exact.regime_classify(0, 0) == "i"
    assert exact.regime_classify(1, 0.5) == "ii"
    assert exact.regime_classify(-1, 1) == "iii"
    assert exact.regime_classify(1, 1) == "iv"
    assert exact.regime_classify(2, 2) == "v"
    assert exact.regime_classify(3, 1.5) == "vi"
    assert exact.regime_classify(1.5, 3) == "vii"


def test_temperature_profile_consistent_with_p_limit():
    grid = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.25, 1.5, 2.0, 3.0]
    for a in grid:
        for b in grid:
            for u in (-0.9, -0.3, 0.0, 0.4, 0.8):
                prof = exact.temperature_profile(1.3, 0.8, a, b, 1.0, 2.0, u)
                want = 1.0 + exact.p_limit(1.3, 0.8, a, b, u)
                assert abs(prof.value - want) < 1e-12


def test_temperature_profile_frozen_examples():
    # symmetric balanced-slow case: flat midpoint profile
    prof = exact.temperature_profile(1, 1, 1, 1, 1.0, 2.0, 0.0)
    assert prof.tag == "iv"
    assert abs(prof.value - 1.5) < 1e-15
    # both exponents 2: amplitude ratio sets the level
    prof = exact.temperature_profile(1, 3, 2, 2, 1.0, 2.0, 0.0)
    assert prof.tag == "v"
    assert abs(prof.coeff_plus - 0.75) < 1e-15
    assert abs(prof.value - 1.75) < 1e-15
    # slow-left edge value: T(-1+) = (4/5) T- + (1/5) T+ at A=1
    prof = exact.temperature_profile(1, 1, 1, 0, 1.0, 2.0, -1.0)
    assert prof.tag == "ii"
    assert abs(prof.value - 1.2) < 1e-15


def test_temperature_profile_rejects_outside_closed_interval():
    with pytest.raises(ValueError):
        exact.temperature_profile(1, 1, 0, 0, 1.0, 2.0, 1.5)


# ----------------------------------------------------------------------
# stationary moments
# ----------------------------------------------------------------------

def test_stationary_moment_single_site():
    p = ModelParams(L=3, beta_minus=1.0, beta_plus=0.5)
    # symmetric chain, center site: mean (T- + T+)/2
    assert abs(exact.stationary_moment_prediction([0], p) - 1.5) < 1e-12


def test_stationary_moment_matches_dense_chain():
    p = ModelParams(L=1, A=0.8, B=1.7, a=1.0, b=0.0,
                    beta_minus=1.0, beta_plus=0.5)
    law = dense_joint_law([0, 0], p)
    q = exact.pattern_counts(law)
    want = sum(q[j] * 0.5 ** (-j) * 1.0 ** (-(2 - j)) for j in range(3))
    got = exact.stationary_moment_prediction([0, 0], p)
    assert abs(got - want) < 1e-12


def test_stationary_moment_empty():
    assert exact.stationary_moment_prediction([], ModelParams(L=2)) == 1.0
