import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmpchain import model
from kmpchain.params import ModelParams, schedule, stream


# ----------------------------------------------------------------------
# parameters
# ----------------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(L=0)
    with pytest.raises(ValueError):
        ModelParams(L=2, A=0.0)
    with pytest.raises(ValueError):
        ModelParams(L=2, B=-1.0)
    with pytest.raises(ValueError):
        ModelParams(L=2, beta_minus=0.0)
    with pytest.raises(ValueError):
        ModelParams(L=2, k_B=0.0)


def test_params_derived_rates():
    p = ModelParams(L=10)
    assert p.n_sites == 21 and p.n_bonds == 20
    assert p.total_rate == 22.0
    assert schedule(p).total_rate == p.total_rate
    p = ModelParams(L=4, A=3.0, B=0.5, a=1.0, b=-1.0)
    assert abs(p.left_rate - 0.75) < 1e-15
    assert abs(p.right_rate - 2.0) < 1e-15


def test_temperature_conversion():
    p = ModelParams(L=1, beta_minus=0.5, beta_plus=2.0, k_B=1.0)
    assert abs(p.T_minus - 2.0) < 1e-15 and abs(p.T_plus - 0.5) < 1e-15
    p = ModelParams(L=1, beta_minus=0.5, beta_plus=2.0, k_B=2.0)
    assert abs(p.T_minus - 1.0) < 1e-15 and abs(p.T_plus - 0.25) < 1e-15


def test_site_index():
    p = ModelParams(L=3)
    assert p.site_index(-3) == 0 and p.site_index(0) == 3 and p.site_index(3) == 6
    assert list(p.sites()) == list(range(-3, 4))
    with pytest.raises(ValueError):
        p.site_index(4)


def test_stream_reproducible_and_distinct():
    x = stream(11, 4).random(5)
    y = stream(11, 4).random(5)
    z = stream(11, 5).random(5)
    assert np.array_equal(x, y)
    assert not np.array_equal(x, z)


# ----------------------------------------------------------------------
# single events
# ----------------------------------------------------------------------

def test_new_config():
    p = ModelParams(L=2)
    assert np.array_equal(model.new_config(p), np.ones(5))
    assert np.array_equal(model.new_config(p, 2.5), np.full(5, 2.5))
    arr = model.new_config(p, [0, 1, 2, 3, 4])
    assert np.array_equal(arr, np.arange(5.0))
    with pytest.raises(ValueError):
        model.new_config(p, -1.0)


def test_apply_bond_frozen():
    p = ModelParams(L=1)
    out = model.apply_bond(np.array([1.0, 2.0, 3.0]), 0, 0.25, p)
    assert np.allclose(out, [1.0, 1.25, 3.75])
    with pytest.raises(ValueError):
        model.apply_bond(np.ones(3), 1, 0.5, p)     # (1, 2) is off the chain
    with pytest.raises(ValueError):
        model.apply_bond(np.ones(3), 0, 1.5, p)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.0, 1e6), min_size=5, max_size=5),
       st.integers(-2, 1), st.floats(0.0, 1.0))
def test_bond_conserves_energy(xi, x, p):
    params = ModelParams(L=2)
    out = model.apply_bond(np.array(xi), x, p, params)
    s = xi[x + 2] + xi[x + 3]
    assert abs(out.sum() - sum(xi)) <= 1e-9 * max(1.0, sum(xi))
    assert abs(out[x + 2] - p * s) <= 1e-12 * max(1.0, s)


def test_apply_reservoir():
    p = ModelParams(L=1)
    out = model.apply_reservoir(np.ones(3), "left", 7.0, p)
    assert np.array_equal(out, [7.0, 1.0, 1.0])
    out = model.apply_reservoir(np.ones(3), "right", 7.0, p)
    assert np.array_equal(out, [1.0, 1.0, 7.0])
    with pytest.raises(ValueError):
        model.apply_reservoir(np.ones(3), "top", 7.0, p)
    with pytest.raises(ValueError):
        model.apply_reservoir(np.ones(3), "left", 0.0, p)


def test_draw_event_frequencies():
    # L=1, unit boundary amplitudes: total rate 4, each event type has mass 1/4
    p = ModelParams(L=1)
    rng = stream(7)
    n = 20000
    counts = {("bond", -1): 0, ("bond", 0): 0, ("left",): 0, ("right",): 0}
    for _ in range(n):
        counts[model.draw_event(p, rng)] += 1
    for c in counts.values():
        assert abs(c / n - 0.25) < 4 * np.sqrt(0.25 * 0.75 / n)


def test_step_conserves_or_refreshes():
    p = ModelParams(L=2, beta_minus=1.0, beta_plus=0.5)
    rng = stream(8)
    xi = model.new_config(p)
    dts = []
    for _ in range(4000):
        out, dt = model.step(xi, p, rng)
        assert dt > 0
        dts.append(dt)
        changed = np.flatnonzero(out != xi)
        if changed.size == 2:          # bond event: pair sum preserved
            i, j = changed
            assert j == i + 1
            assert abs(out[i] + out[j] - xi[i] - xi[j]) < 1e-9
        elif changed.size == 1:        # boundary refresh at an edge
            assert changed[0] in (0, p.n_sites - 1)
        xi = out
    # holding times are Exp(total_rate)
    assert abs(np.mean(dts) - 1.0 / p.total_rate) < 4 / (p.total_rate * np.sqrt(len(dts)))


# ----------------------------------------------------------------------
# stationary runs
# ----------------------------------------------------------------------

def test_equilibrium_profile_flat():
    # equal reservoirs: every site relaxes to the common temperature
    p = ModelParams(L=2, beta_minus=1.0, beta_plus=1.0, seed=3)
    prof = model.simulate_stationary(p, t_burn=500.0, t_measure=4e4, n_batches=20)
    z = np.abs(prof.means - 1.0) / prof.ses
    assert z.max() < 4.0
    assert np.array_equal(prof.sites, p.sites())
    # reported summary matches the stored batch means
    assert np.allclose(prof.means, prof.batch_means.mean(axis=0))
    assert np.allclose(prof.ses,
                       prof.batch_means.std(axis=0, ddof=1) / np.sqrt(20))


def test_profile_records_shape():
    p = ModelParams(L=1, seed=5)
    prof = model.simulate_stationary(p, t_burn=50.0, t_measure=2000.0, n_batches=4)
    recs = prof.records()
    assert len(recs) == 3
    assert recs[0][0] == -1 and recs[-1][0] == 1
    assert all(n == 4 for *_, n in recs)


def test_simulate_stationary_validation():
    p = ModelParams(L=1)
    with pytest.raises(ValueError):
        model.simulate_stationary(p, n_batches=1)
    with pytest.raises(ValueError):
        model.simulate_stationary(p, moment_k={0: 0}, t_burn=1.0, t_measure=10.0)


def test_moment_tracking_equilibrium():
    # at equal unit temperatures E[xi_0] = 1, so the k={0:1} monomial mean is 1
    p = ModelParams(L=1, seed=9)
    prof = model.simulate_stationary(p, t_burn=500.0, t_measure=4e4,
                                     n_batches=20, moment_k={0: 1})
    assert prof.moment_mean is not None
    assert abs(prof.moment_mean - 1.0) / prof.moment_se < 4.0
    # the tracked monomial at a single site equals that site's energy
    assert abs(prof.moment_mean - prof.means[1]) < 1e-9


def test_simulation_deterministic_given_seed():
    p = ModelParams(L=2, beta_plus=0.5, seed=17)
    a = model.simulate_stationary(p, t_burn=100.0, t_measure=2000.0, n_batches=5)
    b = model.simulate_stationary(p, t_burn=100.0, t_measure=2000.0, n_batches=5)
    assert np.array_equal(a.means, b.means) and np.array_equal(a.ses, b.ses)


def test_sample_marginals_shape():
    p = ModelParams(L=1, beta_plus=0.5, seed=2)
    snaps = model.sample_marginals(p, interval=5.0, n_samples=200, t_burn=100.0)
    assert snaps.shape == (200, 3)
    assert np.all(snaps > 0)


def test_config_at_time():
    p = ModelParams(L=1, seed=4)
    zeta = np.array([0.5, 1.0, 1.5])
    out = model.config_at_time(zeta, p, t=0.0, reps=8)
    assert out.shape == (8, 3)
    assert np.all(out == zeta)          # no clock can ring in zero time
    out = model.config_at_time(zeta, p, t=2.0, reps=64)
    assert not np.all(out == zeta)
    with pytest.raises(ValueError):
        model.config_at_time(np.ones(4), p, t=1.0, reps=2)
