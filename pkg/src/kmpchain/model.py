"""Event-driven simulation of the energy chain.

State is a length-(2L+1) array of site energies (array index i = logical site
x + L). Dynamics: each bond (x, x+1) at rate 1 redistributes the pair sum
uniformly (left share p ~ U[0,1]); the left/right boundary clocks replace the
edge energy with a fresh exponential draw at rates A*L^-a and B*L^-b.

Single-event functions are plain Python for tests and interactive use; long
runs go through numba kernels that accumulate time-weighted batch integrals
in O(1) work per event (a site's integral is settled lazily, only when an
event touches it).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .params import ModelParams


def new_config(params: ModelParams, fill=None) -> np.ndarray:
    """Fresh energy configuration; scalar or per-site `fill` (default 1)."""
    if fill is None:
        return np.ones(params.n_sites)
    arr = np.broadcast_to(np.asarray(fill, dtype=float), (params.n_sites,)).copy()
    if np.any(arr < 0):
        raise ValueError("energies must be nonnegative")
    return arr


def apply_bond(xi: np.ndarray, x: int, p: float, params: ModelParams) -> np.ndarray:
    """Redistribute the energy of bond (x, x+1): left site keeps share p of the pair sum."""
    if not -params.L <= x <= params.L - 1:
        raise ValueError(f"bond ({x}, {x + 1}) outside the chain")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"share p must lie in [0, 1], got {p}")
    i = x + params.L
    out = np.array(xi, dtype=float)
    s = out[i] + out[i + 1]
    out[i] = p * s
    out[i + 1] = s - p * s
    return out


def apply_reservoir(xi: np.ndarray, side: str, y: float, params: ModelParams) -> np.ndarray:
    """Replace the edge energy with the reservoir draw y."""
    if y <= 0.0:
        raise ValueError(f"reservoir draw must be positive, got {y}")
    out = np.array(xi, dtype=float)
    if side == "left":
        out[0] = y
    elif side == "right":
        out[-1] = y
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return out


def draw_event(params: ModelParams, rng: np.random.Generator):
    """Next event type, chosen proportionally to the clock rates.

    Returns ("bond", x) with x the bond's left site, ("left",) or ("right",).
    """
    v = rng.random() * params.total_rate
    if v < params.n_bonds:
        j = min(int(v), params.n_bonds - 1)
        return ("bond", j - params.L)
    if v < params.n_bonds + params.left_rate:
        return ("left",)
    return ("right",)


def step(xi: np.ndarray, params: ModelParams, rng: np.random.Generator):
    """One event of the chain: returns (new configuration, holding time)."""
    dt = rng.exponential(1.0 / params.total_rate)
    ev = draw_event(params, rng)
    if ev[0] == "bond":
        out = apply_bond(xi, ev[1], rng.random(), params)
    elif ev[0] == "left":
        out = apply_reservoir(xi, "left", rng.exponential(params.T_minus), params)
    else:
        out = apply_reservoir(xi, "right", rng.exponential(params.T_plus), params)
    return out, dt


# ----------------------------------------------------------------------
# numba kernels
# ----------------------------------------------------------------------

@njit(cache=True)
def _accrue(acc, col, val, t0, t1, batch_dur, n_batches):
    """acc[batch, col] += val * |overlap of [t0, t1) with each batch window|."""
    seg = t0
    while seg < t1:
        ib = int(seg / batch_dur)
        if ib >= n_batches:
            ib = n_batches - 1
        end = (ib + 1.0) * batch_dur
        if t1 < end:
            end = t1
        acc[ib, col] += val * (end - seg)
        if end <= seg:
            break
        seg = end


@njit(cache=True)
def _advance(xi, left_rate, right_rate, mean_minus, mean_plus, t_end, rng):
    """Evolve in place for t_end time units; final holding state is kept."""
    nb = xi.size - 1
    total = nb + left_rate + right_rate
    t = rng.exponential(1.0 / total)
    while t < t_end:
        v = rng.random() * total
        if v < nb:
            j = int(v)
            if j >= nb:
                j = nb - 1
            s = xi[j] + xi[j + 1]
            p = rng.random()
            xi[j] = p * s
            xi[j + 1] = s - p * s
        elif v < nb + left_rate:
            xi[0] = rng.exponential(mean_minus)
        else:
            xi[nb] = rng.exponential(mean_plus)
        t += rng.exponential(1.0 / total)


@njit(cache=True)
def _measure(xi, left_rate, right_rate, mean_minus, mean_plus, t_measure,
             site_acc, k_idx, k_pow, f_acc, rng):
    """Per-batch time integrals of every site energy over [0, t_measure),
    plus of the monomial prod xi[k_idx]**k_pow when k_idx is nonempty."""
    n = xi.size
    nb = n - 1
    total = nb + left_rate + right_rate
    n_batches = site_acc.shape[0]
    batch_dur = t_measure / n_batches
    last = np.zeros(n)
    track_f = k_idx.size > 0
    f_last = 0.0
    f_val = 1.0
    if track_f:
        for i in range(k_idx.size):
            f_val *= xi[k_idx[i]] ** k_pow[i]
    t = 0.0
    while True:
        t_next = t + rng.exponential(1.0 / total)
        if t_next >= t_measure:
            break
        t = t_next
        v = rng.random() * total
        if v < nb:
            j = int(v)
            if j >= nb:
                j = nb - 1
            _accrue(site_acc, j, xi[j], last[j], t, batch_dur, n_batches)
            _accrue(site_acc, j + 1, xi[j + 1], last[j + 1], t, batch_dur, n_batches)
            last[j] = t
            last[j + 1] = t
            s = xi[j] + xi[j + 1]
            p = rng.random()
            xi[j] = p * s
            xi[j + 1] = s - p * s
            lo, hi = j, j + 1
        elif v < nb + left_rate:
            _accrue(site_acc, 0, xi[0], last[0], t, batch_dur, n_batches)
            last[0] = t
            xi[0] = rng.exponential(mean_minus)
            lo, hi = 0, 0
        else:
            _accrue(site_acc, nb, xi[nb], last[nb], t, batch_dur, n_batches)
            last[nb] = t
            xi[nb] = rng.exponential(mean_plus)
            lo, hi = nb, nb
        if track_f:
            touched = False
            for i in range(k_idx.size):
                if lo <= k_idx[i] <= hi:
                    touched = True
            if touched:
                _accrue(f_acc, 0, f_val, f_last, t, batch_dur, n_batches)
                f_last = t
                f_val = 1.0
                for i in range(k_idx.size):
                    f_val *= xi[k_idx[i]] ** k_pow[i]
    for i in range(n):
        _accrue(site_acc, i, xi[i], last[i], t_measure, batch_dur, n_batches)
    if track_f:
        _accrue(f_acc, 0, f_val, f_last, t_measure, batch_dur, n_batches)


@njit(cache=True)
def _snapshots(xi, left_rate, right_rate, mean_minus, mean_plus, interval, out, rng):
    """Record the held configuration every `interval` time units."""
    n = xi.size
    nb = n - 1
    total = nb + left_rate + right_rate
    n_samples = out.shape[0]
    k = 0
    t = 0.0
    while k < n_samples:
        t_next = t + rng.exponential(1.0 / total)
        while k < n_samples and (k + 1.0) * interval <= t_next:
            for i in range(n):
                out[k, i] = xi[i]
            k += 1
        t = t_next
        v = rng.random() * total
        if v < nb:
            j = int(v)
            if j >= nb:
                j = nb - 1
            s = xi[j] + xi[j + 1]
            p = rng.random()
            xi[j] = p * s
            xi[j + 1] = s - p * s
        elif v < nb + left_rate:
            xi[0] = rng.exponential(mean_minus)
        else:
            xi[nb] = rng.exponential(mean_plus)


@njit(cache=True)
def _ensemble_at_time(zeta, left_rate, right_rate, mean_minus, mean_plus,
                      t_end, out, rng):
    for r in range(out.shape[0]):
        xi = out[r]
        for i in range(zeta.size):
            xi[i] = zeta[i]
        _advance(xi, left_rate, right_rate, mean_minus, mean_plus, t_end, rng)


# ----------------------------------------------------------------------
# wrappers
# ----------------------------------------------------------------------

def default_burn_in(params: ModelParams) -> float:
    """Diffusive burn-in heuristic: 10 * (2L+1)^2 time units."""
    return 10.0 * params.n_sites ** 2


def default_measure_time(params: ModelParams) -> float:
    """Default measurement budget: 2000 * (2L+1)^2 time units, calibrated so
    the per-site batch-means standard error is below 0.01 at L = 10 with
    reservoir temperatures of order 1."""
    return 2000.0 * params.n_sites ** 2


@dataclass
class StationaryProfile:
    sites: np.ndarray        # logical site indices -L..L
    means: np.ndarray        # time-averaged energies
    ses: np.ndarray          # batch-means standard errors
    n_batches: int
    t_burn: float
    t_measure: float
    batch_means: np.ndarray  # (n_batches, n_sites)
    moment_mean: float | None = None
    moment_se: float | None = None

    def records(self):
        return [(int(x), float(m), float(s), self.n_batches)
                for x, m, s in zip(self.sites, self.means, self.ses)]


def simulate_stationary(params: ModelParams, t_burn: float | None = None,
                        t_measure: float | None = None, n_batches: int = 30,
                        rng: np.random.Generator | None = None,
                        moment_k: dict | None = None,
                        init=None) -> StationaryProfile:
    """Burn in, then time-average every site energy with batch-means errors.

    moment_k: optional {site x: power k} monomial; the run then also reports
    the time average of F(k, xi) = prod xi_x^{k_x} / k_x!.
    """
    if n_batches < 2:
        raise ValueError("need at least 2 batches")
    if rng is None:
        rng = params.rng()
    if t_burn is None:
        t_burn = default_burn_in(params)
    if t_measure is None:
        t_measure = default_measure_time(params)
    xi = new_config(params, init)
    lr, rr = params.left_rate, params.right_rate
    mm, mp = params.T_minus, params.T_plus
    if t_burn > 0:
        _advance(xi, lr, rr, mm, mp, t_burn, rng)
    site_acc = np.zeros((n_batches, params.n_sites))
    f_acc = np.zeros((n_batches, 1))
    if moment_k:
        items = sorted(moment_k.items())
        k_idx = np.array([params.site_index(x) for x, _ in items], dtype=np.int64)
        k_pow = np.array([int(k) for _, k in items], dtype=np.int64)
        if np.any(k_pow < 1):
            raise ValueError("moment powers must be positive")
    else:
        k_idx = np.empty(0, dtype=np.int64)
        k_pow = np.empty(0, dtype=np.int64)
    _measure(xi, lr, rr, mm, mp, float(t_measure), site_acc, k_idx, k_pow, f_acc, rng)
    batch_dur = t_measure / n_batches
    batch_means = site_acc / batch_dur
    means = batch_means.mean(axis=0)
    ses = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    moment_mean = moment_se = None
    if moment_k:
        norm = 1.0
        for _, k in sorted(moment_k.items()):
            norm *= math.factorial(int(k))
        f_means = f_acc[:, 0] / batch_dur / norm
        moment_mean = float(f_means.mean())
        moment_se = float(f_means.std(ddof=1) / math.sqrt(n_batches))
    return StationaryProfile(sites=params.sites(), means=means, ses=ses,
                             n_batches=n_batches, t_burn=float(t_burn),
                             t_measure=float(t_measure), batch_means=batch_means,
                             moment_mean=moment_mean, moment_se=moment_se)


def sample_marginals(params: ModelParams, interval: float, n_samples: int,
                     t_burn: float | None = None,
                     rng: np.random.Generator | None = None,
                     init=None) -> np.ndarray:
    """(n_samples, 2L+1) snapshots of the chain, `interval` time units apart,
    after burn-in. Used for marginal-law diagnostics."""
    if rng is None:
        rng = params.rng()
    if t_burn is None:
        t_burn = default_burn_in(params)
    xi = new_config(params, init)
    lr, rr = params.left_rate, params.right_rate
    mm, mp = params.T_minus, params.T_plus
    if t_burn > 0:
        _advance(xi, lr, rr, mm, mp, t_burn, rng)
    out = np.empty((n_samples, params.n_sites))
    _snapshots(xi, lr, rr, mm, mp, float(interval), out, rng)
    return out


def config_at_time(zeta, params: ModelParams, t: float, reps: int,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """(reps, 2L+1) independent configurations at time t, all started at zeta."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (params.n_sites,):
        raise ValueError(f"zeta must have shape ({params.n_sites},)")
    if rng is None:
        rng = params.rng()
    out = np.empty((reps, params.n_sites))
    _ensemble_at_time(zeta, params.left_rate, params.right_rate,
                      params.T_minus, params.T_plus, float(t), out, rng)
    return out
