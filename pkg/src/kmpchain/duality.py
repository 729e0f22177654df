"""The duality pairing and its Monte Carlo verification.

F(n, xi) = beta+^{-n(delta+)} * beta-^{-n(delta-)} * prod_x xi_x^{n_x} / n_x!

pairs an occupation array n with an energy configuration xi. The two-sided
check compares E_zeta[F(k, xi_t)] (energy chain run from zeta) against
E_k[F(eta_t, zeta)] (occupation process run from k) at a fixed time t; the
stationary check compares a long time average of F(k, .) against the exact
absorption-law prediction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exact, model
from .dual import DELTA_MINUS, dual_at_time, dual_config_from_sites, expand_sites
from .params import ModelParams

FACTORIAL_GUARD = 20  # occupation numbers above this overflow double factorials

_FACTORIALS = np.array([math.factorial(i) for i in range(FACTORIAL_GUARD + 1)],
                       dtype=float)


def duality_function(counts, xi, params: ModelParams) -> float:
    """F(n, xi) for one occupation array and one energy configuration."""
    counts = np.asarray(counts, dtype=np.int64)
    xi = np.asarray(xi, dtype=float)
    if counts.size != 2 * params.L + 3:
        raise ValueError(f"counts must have length {2 * params.L + 3}")
    if xi.size != params.n_sites:
        raise ValueError(f"xi must have length {params.n_sites}")
    if np.any(counts < 0):
        raise ValueError("occupation numbers must be nonnegative")
    if np.any(counts > FACTORIAL_GUARD):
        raise ValueError(f"occupation numbers above {FACTORIAL_GUARD} are not supported")
    site_counts = counts[1:-1]
    val = params.beta_plus ** (-float(counts[-1])) * \
        params.beta_minus ** (-float(counts[DELTA_MINUS]))
    val *= np.prod(xi ** site_counts / _FACTORIALS[site_counts])
    return float(val)


def _eval_many(count_rows: np.ndarray, xi: np.ndarray, params: ModelParams) -> np.ndarray:
    """duality_function across rows of occupation arrays (vectorized)."""
    if np.any(count_rows > FACTORIAL_GUARD):
        raise ValueError(f"occupation numbers above {FACTORIAL_GUARD} are not supported")
    site_counts = count_rows[:, 1:-1]
    vals = params.beta_plus ** (-count_rows[:, -1].astype(float))
    vals = vals * params.beta_minus ** (-count_rows[:, 0].astype(float))
    vals = vals * np.prod(xi[None, :] ** site_counts / _FACTORIALS[site_counts], axis=1)
    return vals


@dataclass(frozen=True)
class DualityCheck:
    lhs: float       # mean of F(k, xi_t) over energy-chain replicas
    se_lhs: float
    rhs: float       # mean of F(eta_t, zeta) over occupation replicas
    se_rhs: float
    t: float
    reps: int

    @property
    def combined_se(self) -> float:
        return math.hypot(self.se_lhs, self.se_rhs)

    @property
    def z(self) -> float:
        return (self.lhs - self.rhs) / self.combined_se


def verify_duality(k: dict, zeta, t: float, reps: int, params: ModelParams,
                   rng: np.random.Generator | None = None) -> DualityCheck:
    """Two-sided Monte Carlo comparison of the duality identity at time t.

    k is the dual start {site: count} (cemeteries empty); zeta is the fixed
    energy start. Replica streams for the two sides are derived from the
    same generator, so a single seed pins the whole check.
    """
    if rng is None:
        rng = params.rng()
    zeta = np.asarray(zeta, dtype=float)
    k_counts = dual_config_from_sites(params, k)

    configs = model.config_at_time(zeta, params, t, reps, rng)
    site_counts = k_counts[1:-1]
    lhs_vals = np.prod(configs ** site_counts[None, :] / _FACTORIALS[site_counts][None, :],
                       axis=1)
    lhs = float(lhs_vals.mean())
    se_lhs = float(lhs_vals.std(ddof=1) / math.sqrt(reps))

    etas = dual_at_time(k, params, t, reps, rng)
    rhs_vals = _eval_many(etas, zeta, params)
    rhs = float(rhs_vals.mean())
    se_rhs = float(rhs_vals.std(ddof=1) / math.sqrt(reps))
    return DualityCheck(lhs=lhs, se_lhs=se_lhs, rhs=rhs, se_rhs=se_rhs,
                        t=float(t), reps=int(reps))


@dataclass(frozen=True)
class StationaryMomentCheck:
    simulated: float
    se: float
    predicted: float
    k: tuple

    @property
    def z(self) -> float:
        return (self.simulated - self.predicted) / self.se


def verify_stationary_moment(k: dict, params: ModelParams,
                             t_burn: float | None = None,
                             t_measure: float | None = None,
                             n_batches: int = 30,
                             rng: np.random.Generator | None = None) -> StationaryMomentCheck:
    """Long-run time average of F(k, xi) against the exact prediction
    sum_j q_L(k, j) beta+^{-j} beta-^{-(|k|-j)}."""
    prof = model.simulate_stationary(params, t_burn=t_burn, t_measure=t_measure,
                                     n_batches=n_batches, rng=rng, moment_k=k)
    predicted = exact.stationary_moment_prediction(expand_sites(k), params)
    return StationaryMomentCheck(simulated=prof.moment_mean, se=prof.moment_se,
                                 predicted=predicted,
                                 k=tuple(sorted(k.items())))
