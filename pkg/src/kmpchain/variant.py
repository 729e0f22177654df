"""One-sided reservoir variant of the chain.

Bulk sites are 1..N-1 (array index x-1); sites 0 and N are ghosts that are
never stored. Bulk bonds (x, x+1), x = 1..N-2, ring at rate 1 with the usual
uniform split. At rate A*N^-a the left event draws E ~ Exponential(mean T0)
and p ~ U[0,1] and sets xi_1 <- (1-p)(E + xi_1) (the ghost's share is
discarded); symmetrically at rate B*N^-b the right event sets
xi_{N-1} <- p(xi_{N-1} + E'), E' ~ Exponential(mean T1).

Dual occupation counts live on 0..N with both ghosts absorbing. Acting with
the energy generator on the pairing
    F(n, xi) = T0^{n_0} T1^{n_N} prod_{x=1}^{N-1} xi_x^{n_x} / n_x!
shows the dual boundary action is a *single-site uniform thinning*: the left
clock moves q ~ Uniform{0..n_1} particles from site 1 to ghost 0 (site 2
untouched), and symmetrically on the right. A pooled two-site redistribution
does not satisfy the duality identity; see the duality tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .duality import DualityCheck
from .model import StationaryProfile
from .params import stream

FACTORIAL_GUARD = 20

_FACTORIALS = np.array([math.factorial(i) for i in range(FACTORIAL_GUARD + 1)],
                       dtype=float)


@dataclass(frozen=True)
class VariantParams:
    N: int
    T0: float = 1.0
    T1: float = 1.0
    A: float = 1.0
    B: float = 1.0
    a: float = 0.0
    b: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 3:
            raise ValueError(f"N must be >= 3, got {self.N}")
        if not (self.T0 > 0 and self.T1 > 0):
            raise ValueError("reservoir temperatures must be positive")
        if not (self.A > 0 and self.B > 0):
            raise ValueError("boundary amplitudes A, B must be positive")

    @property
    def n_bulk_sites(self) -> int:
        return self.N - 1

    @property
    def n_bulk_bonds(self) -> int:
        return self.N - 2

    @property
    def left_rate(self) -> float:
        return self.A * float(self.N) ** (-self.a)

    @property
    def right_rate(self) -> float:
        return self.B * float(self.N) ** (-self.b)

    @property
    def total_rate(self) -> float:
        return self.n_bulk_bonds + self.left_rate + self.right_rate

    def site_index(self, x: int) -> int:
        if not 1 <= x <= self.N - 1:
            raise ValueError(f"bulk site {x} outside [1, {self.N - 1}]")
        return x - 1

    def sites(self) -> np.ndarray:
        return np.arange(1, self.N)

    def rng(self, index: int = 0) -> np.random.Generator:
        return stream(self.seed, index)


def variant_new_config(params: VariantParams, fill=None) -> np.ndarray:
    if fill is None:
        return np.ones(params.n_bulk_sites)
    arr = np.broadcast_to(np.asarray(fill, dtype=float), (params.n_bulk_sites,)).copy()
    if np.any(arr < 0):
        raise ValueError("energies must be nonnegative")
    return arr


def variant_step(xi: np.ndarray, params: VariantParams, rng: np.random.Generator):
    """One event: returns (new configuration, holding time)."""
    dt = rng.exponential(1.0 / params.total_rate)
    out = np.array(xi, dtype=float)
    nb = params.n_bulk_bonds
    v = rng.random() * params.total_rate
    if v < nb:
        j = min(int(v), nb - 1)
        s = out[j] + out[j + 1]
        p = rng.random()
        out[j] = p * s
        out[j + 1] = s - p * s
    elif v < nb + params.left_rate:
        e = rng.exponential(params.T0)
        p = rng.random()
        out[0] = (1.0 - p) * (e + out[0])
    else:
        e = rng.exponential(params.T1)
        p = rng.random()
        out[-1] = p * (out[-1] + e)
    return out, dt


# ----------------------------------------------------------------------
# dual occupation process
# ----------------------------------------------------------------------

def variant_dual_config(params: VariantParams, k: dict) -> np.ndarray:
    """Counts over 0..N with k[x] particles on bulk sites, ghosts empty."""
    counts = np.zeros(params.N + 1, dtype=np.int64)
    for x, c in k.items():
        if c < 0:
            raise ValueError("counts must be nonnegative")
        counts[params.site_index(int(x)) + 1] = int(c)
    return counts


def variant_dual_step(counts: np.ndarray, params: VariantParams,
                      rng: np.random.Generator):
    """One event of the variant dual: bulk pair redistribution, or a uniform
    thinning of the edge site into the adjacent ghost."""
    counts = np.asarray(counts)
    dt = rng.exponential(1.0 / params.total_rate)
    out = counts.copy()
    nb = params.n_bulk_bonds
    v = rng.random() * params.total_rate
    if v < nb:
        j = min(int(v), nb - 1) + 1          # couples columns j, j+1 (sites)
        pool = out[j] + out[j + 1]
        q = rng.integers(0, pool + 1)
        out[j] = q
        out[j + 1] = pool - q
    elif v < nb + params.left_rate:
        q = rng.integers(0, out[1] + 1)
        out[0] += q
        out[1] -= q
    else:
        q = rng.integers(0, out[-2] + 1)
        out[-1] += q
        out[-2] -= q
    return out, dt


def variant_duality_function(counts, xi, params: VariantParams) -> float:
    """F(n, xi) = T0^{n_0} T1^{n_N} prod_x xi_x^{n_x} / n_x!."""
    counts = np.asarray(counts, dtype=np.int64)
    xi = np.asarray(xi, dtype=float)
    if counts.size != params.N + 1:
        raise ValueError(f"counts must have length {params.N + 1}")
    if xi.size != params.n_bulk_sites:
        raise ValueError(f"xi must have length {params.n_bulk_sites}")
    if np.any(counts < 0):
        raise ValueError("occupation numbers must be nonnegative")
    if np.any(counts > FACTORIAL_GUARD):
        raise ValueError(f"occupation numbers above {FACTORIAL_GUARD} are not supported")
    site_counts = counts[1:-1]
    val = params.T0 ** float(counts[0]) * params.T1 ** float(counts[-1])
    val *= np.prod(xi ** site_counts / _FACTORIALS[site_counts])
    return float(val)


# ----------------------------------------------------------------------
# exact single-walker absorption
# ----------------------------------------------------------------------

def variant_hitting_oracle(params: VariantParams) -> np.ndarray:
    """P(absorbed at ghost N | start site x) for x = 0..N, from the first-step
    system solved by tridiagonal elimination.

    A boundary ring thins a lone walker into the ghost with probability 1/2
    and a bond ring moves it with probability 1/2, so the edge equations carry
    the plain rates: (1+c) h_1 = h_2, (1+d) h_{N-1} = h_{N-2} + d.
    """
    N = params.N
    c = params.left_rate
    d = params.right_rate
    n = N - 1
    lower = np.full(n, -1.0)
    diag = np.full(n, 2.0)
    upper = np.full(n, -1.0)
    rhs = np.zeros(n)
    diag[0] = 1.0 + c
    diag[-1] = 1.0 + d
    rhs[-1] = d

    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = upper[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i] * cp[i - 1]
        cp[i] = upper[i] / m
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m
    sol = np.empty(n)
    sol[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        sol[i] = dp[i] - cp[i] * sol[i + 1]

    out = np.empty(N + 1)
    out[0] = 0.0
    out[1:-1] = sol
    out[-1] = 1.0
    return out


@njit(cache=True)
def _v_walker_absorb(x0, N, c, d, out, rng):
    """Single walker replicas; out[r] = +1 (ghost N) or -1 (ghost 0)."""
    for r in range(out.size):
        y = x0
        while True:
            total = 0.0
            if y >= 2:
                total += 1.0          # bond (y-1, y)
            if y <= N - 2:
                total += 1.0          # bond (y, y+1)
            if y == 1:
                total += c
            if y == N - 1:
                total += d
            v = rng.random() * total
            limit = 0.0
            if y >= 2:
                limit += 1.0
                if v < limit:
                    if rng.integers(0, 2) == 1:
                        y -= 1
                    continue
            if y <= N - 2:
                limit += 1.0
                if v < limit:
                    if rng.integers(0, 2) == 1:
                        y += 1
                    continue
            if y == 1 and v < limit + c:
                if rng.integers(0, 2) == 1:
                    out[r] = -1
                    break
                continue
            if rng.integers(0, 2) == 1:
                out[r] = 1
                break


def variant_walker_absorption(x0: int, params: VariantParams, reps: int,
                              rng: np.random.Generator | None = None) -> np.ndarray:
    """(reps,) absorption marks (+1 = ghost N, -1 = ghost 0) of one walker."""
    if not 1 <= x0 <= params.N - 1:
        raise ValueError(f"start site {x0} outside [1, {params.N - 1}]")
    if rng is None:
        rng = params.rng()
    out = np.zeros(int(reps), dtype=np.int8)
    _v_walker_absorb(int(x0), params.N, params.left_rate, params.right_rate, out, rng)
    return out


# ----------------------------------------------------------------------
# kernels: stationary profile and fixed-time ensembles
# ----------------------------------------------------------------------

@njit(cache=True)
def _v_accrue(acc, col, val, t0, t1, batch_dur, n_batches):
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
def _v_advance(xi, c, d, T0, T1, t_end, rng):
    nb = xi.size - 1
    total = nb + c + d
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
        elif v < nb + c:
            e = rng.exponential(T0)
            p = rng.random()
            xi[0] = (1.0 - p) * (e + xi[0])
        else:
            e = rng.exponential(T1)
            p = rng.random()
            xi[xi.size - 1] = p * (xi[xi.size - 1] + e)
        t += rng.exponential(1.0 / total)


@njit(cache=True)
def _v_measure(xi, c, d, T0, T1, t_measure, site_acc, rng):
    n = xi.size
    nb = n - 1
    total = nb + c + d
    n_batches = site_acc.shape[0]
    batch_dur = t_measure / n_batches
    last = np.zeros(n)
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
            _v_accrue(site_acc, j, xi[j], last[j], t, batch_dur, n_batches)
            _v_accrue(site_acc, j + 1, xi[j + 1], last[j + 1], t, batch_dur, n_batches)
            last[j] = t
            last[j + 1] = t
            s = xi[j] + xi[j + 1]
            p = rng.random()
            xi[j] = p * s
            xi[j + 1] = s - p * s
        elif v < nb + c:
            _v_accrue(site_acc, 0, xi[0], last[0], t, batch_dur, n_batches)
            last[0] = t
            e = rng.exponential(T0)
            p = rng.random()
            xi[0] = (1.0 - p) * (e + xi[0])
        else:
            _v_accrue(site_acc, n - 1, xi[n - 1], last[n - 1], t, batch_dur, n_batches)
            last[n - 1] = t
            e = rng.exponential(T1)
            p = rng.random()
            xi[n - 1] = p * (xi[n - 1] + e)
    for i in range(n):
        _v_accrue(site_acc, i, xi[i], last[i], t_measure, batch_dur, n_batches)


@njit(cache=True)
def _v_ensemble_at_time(zeta, c, d, T0, T1, t_end, out, rng):
    for r in range(out.shape[0]):
        xi = out[r]
        for i in range(zeta.size):
            xi[i] = zeta[i]
        _v_advance(xi, c, d, T0, T1, t_end, rng)


@njit(cache=True)
def _v_dual_at_time(k0, c, d, t_end, out, rng):
    ncols = k0.size                      # N + 1
    nb = ncols - 3                       # bulk bonds
    total = nb + c + d
    for r in range(out.shape[0]):
        eta = out[r]
        for i in range(ncols):
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
                q = rng.integers(0, eta[1] + 1)
                eta[0] += q
                eta[1] -= q
            else:
                q = rng.integers(0, eta[ncols - 2] + 1)
                eta[ncols - 1] += q
                eta[ncols - 2] -= q
            t += rng.exponential(1.0 / total)


def variant_default_burn_in(params: VariantParams) -> float:
    return 10.0 * params.N ** 2


def variant_default_measure_time(params: VariantParams) -> float:
    return 2000.0 * params.N ** 2


def variant_simulate_stationary(params: VariantParams, t_burn: float | None = None,
                                t_measure: float | None = None, n_batches: int = 30,
                                rng: np.random.Generator | None = None,
                                init=None) -> StationaryProfile:
    """Time-averaged bulk-site energies with batch-means errors."""
    if n_batches < 2:
        raise ValueError("need at least 2 batches")
    if rng is None:
        rng = params.rng()
    if t_burn is None:
        t_burn = variant_default_burn_in(params)
    if t_measure is None:
        t_measure = variant_default_measure_time(params)
    xi = variant_new_config(params, init)
    c, d = params.left_rate, params.right_rate
    if t_burn > 0:
        _v_advance(xi, c, d, params.T0, params.T1, t_burn, rng)
    site_acc = np.zeros((n_batches, params.n_bulk_sites))
    _v_measure(xi, c, d, params.T0, params.T1, float(t_measure), site_acc, rng)
    batch_dur = t_measure / n_batches
    batch_means = site_acc / batch_dur
    means = batch_means.mean(axis=0)
    ses = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    return StationaryProfile(sites=params.sites(), means=means, ses=ses,
                             n_batches=n_batches, t_burn=float(t_burn),
                             t_measure=float(t_measure), batch_means=batch_means)


def variant_config_at_time(zeta, params: VariantParams, t: float, reps: int,
                           rng: np.random.Generator | None = None) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (params.n_bulk_sites,):
        raise ValueError(f"zeta must have shape ({params.n_bulk_sites},)")
    if rng is None:
        rng = params.rng()
    out = np.empty((int(reps), params.n_bulk_sites))
    _v_ensemble_at_time(zeta, params.left_rate, params.right_rate,
                        params.T0, params.T1, float(t), out, rng)
    return out


def variant_dual_at_time(k: dict, params: VariantParams, t: float, reps: int,
                         rng: np.random.Generator | None = None) -> np.ndarray:
    k0 = variant_dual_config(params, k)
    if rng is None:
        rng = params.rng()
    out = np.empty((int(reps), k0.size), dtype=np.int64)
    _v_dual_at_time(k0, params.left_rate, params.right_rate, float(t), out, rng)
    return out


# ----------------------------------------------------------------------
# duality check
# ----------------------------------------------------------------------

def variant_verify_duality(k: dict, zeta, t: float, reps: int,
                           params: VariantParams,
                           rng: np.random.Generator | None = None) -> DualityCheck:
    """Two-sided Monte Carlo comparison of the variant duality identity."""
    if rng is None:
        rng = params.rng()
    zeta = np.asarray(zeta, dtype=float)
    k_counts = variant_dual_config(params, k)

    configs = variant_config_at_time(zeta, params, t, reps, rng)
    site_counts = k_counts[1:-1]
    lhs_vals = np.prod(configs ** site_counts[None, :] / _FACTORIALS[site_counts][None, :],
                       axis=1)
    lhs = float(lhs_vals.mean())
    se_lhs = float(lhs_vals.std(ddof=1) / math.sqrt(reps))

    etas = variant_dual_at_time(k, params, t, reps, rng)
    if np.any(etas > FACTORIAL_GUARD):
        raise ValueError(f"occupation numbers above {FACTORIAL_GUARD} are not supported")
    site_cols = etas[:, 1:-1]
    rhs_vals = params.T0 ** etas[:, 0].astype(float)
    rhs_vals = rhs_vals * params.T1 ** etas[:, -1].astype(float)
    rhs_vals = rhs_vals * np.prod(zeta[None, :] ** site_cols / _FACTORIALS[site_cols],
                                  axis=1)
    rhs = float(rhs_vals.mean())
    se_rhs = float(rhs_vals.std(ddof=1) / math.sqrt(reps))
    return DualityCheck(lhs=lhs, se_lhs=se_lhs, rhs=rhs, se_rhs=se_rhs,
                        t=float(t), reps=int(reps))
