"""Dual particle processes: occupation counts and labelled walkers.

The dual state space augments the sites -L..L with two absorbing cemeteries.
Occupation arrays have length 2L+3: column 0 is delta- (left cemetery),
columns 1..2L+1 are sites -L..L, column 2L+2 is delta+. A bond clock (rate 1)
redraws the split of the pair total uniformly (q of the pool to the left
site); the boundary clocks move everything at the edge site into the
adjacent cemetery at rates A*L^-a and B*L^-b.

The labelled version tracks individual walkers: on a bond ring, a uniform
size-U subset of the walkers in the pair (U uniform on {0..pool}) lands on
the left site. For absorption statistics only the events that can move a
walker matter, so the Monte Carlo kernel skips clocks ringing on empty
regions; this leaves the embedded jump chain, and hence the absorption
pattern law, unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .params import ModelParams

DELTA_MINUS = 0  # column of the left cemetery in an occupation array


def delta_plus_col(params: ModelParams) -> int:
    return 2 * params.L + 2


def site_col(params: ModelParams, x: int) -> int:
    """Occupation-array column of logical site x."""
    if not -params.L <= x <= params.L:
        raise ValueError(f"site {x} outside [-{params.L}, {params.L}]")
    return x + params.L + 1


def dual_config_from_sites(params: ModelParams, k: dict) -> np.ndarray:
    """Occupation array with k[x] particles at site x and empty cemeteries."""
    counts = np.zeros(2 * params.L + 3, dtype=np.int64)
    for x, c in k.items():
        if c < 0:
            raise ValueError("counts must be nonnegative")
        counts[site_col(params, int(x))] = int(c)
    return counts


def expand_sites(k: dict) -> list[int]:
    """Multiset {site: count} -> explicit per-particle site list (sorted)."""
    out = []
    for x in sorted(k):
        out.extend([int(x)] * int(k[x]))
    return out


# ----------------------------------------------------------------------
# single events (plain Python)
# ----------------------------------------------------------------------

def dual_step(counts: np.ndarray, params: ModelParams, rng: np.random.Generator):
    """One event of the occupation process: returns (new counts, holding time)."""
    counts = np.asarray(counts)
    dt = rng.exponential(1.0 / params.total_rate)
    out = counts.copy()
    v = rng.random() * params.total_rate
    nb = params.n_bonds
    if v < nb:
        j = min(int(v), nb - 1) + 1          # left column of the pair
        pool = out[j] + out[j + 1]
        q = rng.integers(0, pool + 1)
        out[j] = q
        out[j + 1] = pool - q
    elif v < nb + params.left_rate:
        out[DELTA_MINUS] += out[1]
        out[1] = 0
    else:
        dp = delta_plus_col(params)
        out[dp] += out[dp - 1]
        out[dp - 1] = 0
    return out, dt


def label_step(positions: np.ndarray, params: ModelParams, rng: np.random.Generator):
    """One event of the labelled process. Positions are logical sites in
    [-L, L]; absorbed walkers sit at -(L+1) or (L+1) and never move again.
    Returns (new positions, holding time)."""
    pos = np.asarray(positions, dtype=np.int64)
    L = params.L
    dt = rng.exponential(1.0 / params.total_rate)
    out = pos.copy()
    v = rng.random() * params.total_rate
    nb = params.n_bonds
    if v < nb:
        x = min(int(v), nb - 1) - L          # bond (x, x+1)
        pool = np.flatnonzero((out == x) | (out == x + 1))
        m = pool.size
        if m > 0:
            u = int(rng.integers(0, m + 1))
            perm = pool.copy()
            # Fisher-Yates; the first u entries of a uniform permutation are
            # a uniform size-u subset
            for i in range(m - 1, 0, -1):
                j = int(rng.integers(0, i + 1))
                perm[i], perm[j] = perm[j], perm[i]
            out[perm[:u]] = x
            out[perm[u:]] = x + 1
    elif v < nb + params.left_rate:
        out[out == -L] = -(L + 1)
    else:
        out[out == L] = L + 1
    return out, dt


# ----------------------------------------------------------------------
# absorption kernel (relevant-event jump chain)
# ----------------------------------------------------------------------

@njit(cache=True)
def _label_absorb(pos0, L, c, d, out, max_events, rng):
    """Run each replica's walkers to absorption; out[r, i] = +1 (delta+) or
    -1 (delta-). Returns the number of replicas that hit max_events."""
    n = pos0.size
    reps = out.shape[0]
    pos = np.empty(n, np.int64)
    cand = np.empty(2 * n, np.int64)     # candidate bond left-sites
    pool = np.empty(n, np.int64)
    overflow = 0
    for r in range(reps):
        for i in range(n):
            pos[i] = pos0[i]
        n_active = n
        ev = 0
        while n_active > 0 and ev < max_events:
            ev += 1
            # collect relevant clocks
            nc = 0
            left_on = False
            right_on = False
            for i in range(n):
                x = pos[i]
                if x < -L or x > L:
                    continue
                if x == -L:
                    left_on = True
                if x == L:
                    right_on = True
                for bx in (x - 1, x):
                    if -L <= bx <= L - 1:
                        seen = False
                        for kk in range(nc):
                            if cand[kk] == bx:
                                seen = True
                                break
                        if not seen:
                            cand[nc] = bx
                            nc += 1
            total = float(nc)
            if left_on:
                total += c
            if right_on:
                total += d
            v = rng.random() * total
            if v < nc:
                bx = cand[int(v) if int(v) < nc else nc - 1]
                m = 0
                for i in range(n):
                    if pos[i] == bx or pos[i] == bx + 1:
                        pool[m] = i
                        m += 1
                u = rng.integers(0, m + 1)
                for i in range(m - 1, 0, -1):
                    j = rng.integers(0, i + 1)
                    tmp = pool[i]
                    pool[i] = pool[j]
                    pool[j] = tmp
                for i in range(m):
                    pos[pool[i]] = bx if i < u else bx + 1
            elif left_on and v < nc + c:
                for i in range(n):
                    if pos[i] == -L:
                        pos[i] = -(L + 1)
                        n_active -= 1
            else:
                for i in range(n):
                    if pos[i] == L:
                        pos[i] = L + 1
                        n_active -= 1
        if n_active > 0:
            overflow += 1
            for i in range(n):
                out[r, i] = 0
        else:
            for i in range(n):
                out[r, i] = 1 if pos[i] > L else -1
    return overflow


def hitting_patterns(positions, params: ModelParams, reps: int,
                     rng: np.random.Generator | None = None,
                     max_events: int = 10 ** 9) -> np.ndarray:
    """(reps, n) array of absorption marks (+1 = delta+, -1 = delta-) for n
    labelled walkers started at the given sites."""
    pos0 = np.asarray(positions, dtype=np.int64)
    L = params.L
    if np.any(pos0 < -L) or np.any(pos0 > L):
        raise ValueError("start sites must lie in [-L, L]")
    if rng is None:
        rng = params.rng()
    out = np.empty((int(reps), pos0.size), dtype=np.int8)
    overflow = _label_absorb(pos0, L, params.left_rate, params.right_rate,
                             out, int(max_events), rng)
    if overflow:
        raise RuntimeError(f"{overflow} replicas not absorbed within {max_events} events")
    return out


def run_until_absorbed(positions, params: ModelParams,
                       rng: np.random.Generator | None = None,
                       max_events: int = 10 ** 9) -> np.ndarray:
    """Absorption marks (+1/-1 per walker) of a single trajectory."""
    return hitting_patterns(positions, params, 1, rng, max_events)[0]


@dataclass(frozen=True)
class QLEstimate:
    counts: np.ndarray   # histogram of (number absorbed at delta+), j = 0..n
    q: np.ndarray        # empirical law, sums to 1 exactly
    se: np.ndarray       # binomial standard errors per bin
    reps: int


def estimate_qL(k: dict, reps: int, params: ModelParams,
                rng: np.random.Generator | None = None) -> QLEstimate:
    """Monte Carlo law of the number of walkers absorbed at delta+ for the
    dual configuration k = {site: count}."""
    sites = expand_sites(k)
    if not sites:
        raise ValueError("k must contain at least one particle")
    marks = hitting_patterns(sites, params, reps, rng)
    nplus = (marks > 0).sum(axis=1)
    counts = np.bincount(nplus, minlength=len(sites) + 1).astype(np.int64)
    q = counts / float(reps)
    se = np.sqrt(q * (1.0 - q) / reps)
    return QLEstimate(counts=counts, q=q, se=se, reps=int(reps))


# ----------------------------------------------------------------------
# occupation ensemble at a fixed time (for duality checks)
# ----------------------------------------------------------------------

@njit(cache=True)
def _dual_ensemble_at_time(k0, L, c, d, t_end, out, rng):
    nb = 2 * L
    total = nb + c + d
    n_cols = k0.size
    for r in range(out.shape[0]):
        eta = out[r]
        for i in range(n_cols):
            eta[i] = k0[i]
        t = rng.exponential(1.0 / total)
        while t < t_end:
            v = rng.random() * total
            if v < nb:
                j = int(v)
                if j >= nb:
                    j = nb - 1
                j += 1
                pool = eta[j] + eta[j + 1]
                q = rng.integers(0, pool + 1)
                eta[j] = q
                eta[j + 1] = pool - q
            elif v < nb + c:
                eta[0] += eta[1]
                eta[1] = 0
            else:
                eta[n_cols - 1] += eta[n_cols - 2]
                eta[n_cols - 2] = 0
            t += rng.exponential(1.0 / total)


def dual_at_time(k: dict, params: ModelParams, t: float, reps: int,
                 rng: np.random.Generator | None = None) -> np.ndarray:
    """(reps, 2L+3) occupation arrays at time t, all started from k."""
    k0 = dual_config_from_sites(params, k)
    if rng is None:
        rng = params.rng()
    out = np.empty((int(reps), k0.size), dtype=np.int64)
    _dual_ensemble_at_time(k0, params.L, params.left_rate, params.right_rate,
                           float(t), out, rng)
    return out
