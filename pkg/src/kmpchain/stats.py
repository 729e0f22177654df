"""Statistics for Monte Carlo runs: mergeable moment accumulators,
batch-means errors, the exponential-marginal moment test, profile fits,
and the monotone-trend check used by the limit experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.stats


@dataclass
class MomentAccumulator:
    """Streaming power sums up to order 4. Merging two accumulators is exact
    field-wise addition, so replica streams can be combined in any order.
    Array ingestion uses numpy pairwise summation to keep roundoff at the
    1e-15 level for the pooled-variance identity."""
    n: float = 0.0
    s1: float = 0.0
    s2: float = 0.0
    s3: float = 0.0
    s4: float = 0.0

    def add(self, value: float) -> None:
        v = float(value)
        self.n += 1.0
        self.s1 += v
        self.s2 += v * v
        self.s3 += v ** 3
        self.s4 += v ** 4

    def add_array(self, values) -> None:
        v = np.asarray(values, dtype=float).ravel()
        self.n += v.size
        self.s1 += float(np.sum(v))
        self.s2 += float(np.sum(v * v))
        self.s3 += float(np.sum(v ** 3))
        self.s4 += float(np.sum(v ** 4))

    def moment(self, j: int) -> float:
        """Raw sample moment m_j = (1/n) sum x^j, j = 1..4."""
        if self.n <= 0:
            raise ValueError("empty accumulator")
        return (self.s1, self.s2, self.s3, self.s4)[j - 1] / self.n

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def var(self) -> float:
        """Unbiased sample variance."""
        if self.n < 2:
            raise ValueError("need n >= 2 for a variance")
        return (self.s2 - self.s1 * self.s1 / self.n) / (self.n - 1.0)

    @property
    def se(self) -> float:
        return float(np.sqrt(self.var / self.n))

    def moment_se(self, j: int) -> float:
        """Standard error of the raw j-th moment (needs moments up to 2j)."""
        if 2 * j > 4:
            raise ValueError("moment_se supports j <= 2")
        m2j = self.moment(2 * j)
        mj = self.moment(j)
        return float(np.sqrt(max(m2j - mj * mj, 0.0) / self.n))


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    return MomentAccumulator(n=a.n + b.n, s1=a.s1 + b.s1, s2=a.s2 + b.s2,
                             s3=a.s3 + b.s3, s4=a.s4 + b.s4)


def batch_se(batch_values) -> float:
    """Standard error of the grand mean from batch means (ddof=1)."""
    v = np.asarray(batch_values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least 2 batches")
    return float(np.std(v, ddof=1) / np.sqrt(v.size))


# ----------------------------------------------------------------------
# exponential-marginal diagnostics
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpMomentReport:
    ratio: float        # m2 / (2 m1^2); 1 for an exponential law
    m1: float
    m2: float
    z1: float           # (m1 - 1/beta) / se(m1)
    z2: float           # (m2 - 2/beta^2) / se(m2)
    ks_stat: float      # Kolmogorov-Smirnov distance, reported but non-gating


def exp_moment_test(samples, beta_hypothesis: float) -> ExpMomentReport:
    """Moment comparison of samples against Exponential(beta)."""
    acc = MomentAccumulator()
    acc.add_array(samples)
    m1 = acc.moment(1)
    m2 = acc.moment(2)
    z1 = (m1 - 1.0 / beta_hypothesis) / acc.moment_se(1)
    z2 = (m2 - 2.0 / beta_hypothesis ** 2) / acc.moment_se(2)
    ks = scipy.stats.kstest(np.asarray(samples, dtype=float),
                            "expon", args=(0.0, 1.0 / beta_hypothesis)).statistic
    return ExpMomentReport(ratio=m2 / (2.0 * m1 * m1), m1=m1, m2=m2,
                           z1=float(z1), z2=float(z2), ks_stat=float(ks))


# ----------------------------------------------------------------------
# profile fitting
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileFit:
    slope: float            # per unit u = x/L
    intercept: float        # value at u = 0
    residual_norm: float    # rms deviation from the fitted line
    max_abs_dev: float | None = None   # vs a supplied prediction, if any


def fit_profile(sites, means, L: int, predicted=None) -> ProfileFit:
    """Least-squares line through (u = x/L, mean). `predicted`, if given, is
    an array of predicted values at the same sites; max_abs_dev reports the
    largest |mean - predicted|."""
    x = np.asarray(sites, dtype=float)
    y = np.asarray(means, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need matching site/mean arrays with >= 2 points")
    u = x / float(L)
    if np.ptp(u) == 0.0:
        raise ValueError("degenerate fit: all sites coincide")
    coeffs = np.polyfit(u, y, 1)
    resid = y - np.polyval(coeffs, u)
    mad = None
    if predicted is not None:
        mad = float(np.max(np.abs(y - np.asarray(predicted, dtype=float))))
    return ProfileFit(slope=float(coeffs[0]), intercept=float(coeffs[1]),
                      residual_norm=float(np.sqrt(np.mean(resid ** 2))),
                      max_abs_dev=mad)


# ----------------------------------------------------------------------
# trend check
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrendResult:
    passed: bool
    diffs: tuple          # consecutive differences value[i+1] - value[i]
    allowances: tuple     # 2 * combined SE per step


def trend_check(values, ses=None) -> TrendResult:
    """Pass iff every step is non-increasing, up to 2 combined standard
    errors when uncertainties are supplied."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least 2 values for a trend")
    if ses is None:
        s = np.zeros_like(v)
    else:
        s = np.asarray(ses, dtype=float)
        if s.shape != v.shape:
            raise ValueError("ses must match values")
    diffs = np.diff(v)
    allow = 2.0 * np.hypot(s[:-1], s[1:])
    return TrendResult(passed=bool(np.all(diffs <= allow)),
                       diffs=tuple(float(d) for d in diffs),
                       allowances=tuple(float(a) for a in allow))
