"""Exact steady-state analysis: absorption probabilities of dual walkers,
their closed form, the L -> infinity limit profile, and moment predictions.

Conventions. A single dual walker on sites -L..L moves only when an adjacent
bond clock rings *and* the uniform redistribution sends it across (probability
1/2), so its effective jump rate is 1/2 per direction. The boundary clocks
absorb at rates c = A*L^-a (left, into delta-) and d = B*L^-b (right, into
delta+). First-step analysis therefore gives

    a_{-(L+1)} = 0,  a_{L+1} = 1,
    (1+2c) a_{-L} = a_{-L+1},
    2 a_x = a_{x-1} + a_{x+1}           (-L < x < L),
    (1+2d) a_L = a_{L-1} + 2d,

with closed-form solution

    a_x = (2AB(x+L) + B L^a) / (4ABL + A L^b + B L^a).

The limit p(u) = lim a_{floor(uL)} follows by keeping the terms of maximal
growth exponent among {1, a, b} in numerator and denominator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .params import ModelParams

JOINT_MAX_PARTICLES = 4
JOINT_MAX_L = 6


class StateSpaceError(ValueError):
    """Joint absorbing-chain request exceeds the exact-solve guard."""


# ----------------------------------------------------------------------
# single-walker absorption
# ----------------------------------------------------------------------

def hitting_closed_form(params: ModelParams, x: int) -> float:
    """P(walker started at x is absorbed at delta+), closed form."""
    L, A, B, a, b = params.L, params.A, params.B, params.a, params.b
    if not -L <= x <= L:
        raise ValueError(f"site {x} outside [-{L}, {L}]")
    La = float(L) ** a
    Lb = float(L) ** b
    return (2.0 * A * B * (x + L) + B * La) / (4.0 * A * B * L + A * Lb + B * La)


def hitting_oracle(params: ModelParams) -> np.ndarray:
    """Absorption-at-delta+ probabilities for all start points, solved from
    the first-step linear system by direct tridiagonal elimination.

    Returns an array over x = -(L+1)..(L+1) (length 2L+3); the endpoints are
    the absorbed states delta- (0) and delta+ (1). Independent of
    hitting_closed_form.
    """
    L = params.L
    c = params.left_rate
    d = params.right_rate
    n = 2 * L + 1

    # rows x = -L..L: diag*a_x + upper*a_{x+1} + lower*a_{x-1} = rhs
    lower = np.full(n, -1.0)
    diag = np.full(n, 2.0)
    upper = np.full(n, -1.0)
    rhs = np.zeros(n)
    diag[0] = 1.0 + 2.0 * c
    upper[0] = -1.0
    diag[-1] = 1.0 + 2.0 * d
    rhs[-1] = 2.0 * d

    # Thomas sweep
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

    out = np.empty(n + 2)
    out[0] = 0.0
    out[1:-1] = sol
    out[-1] = 1.0
    return out


# ----------------------------------------------------------------------
# joint absorption law of n labelled walkers
# ----------------------------------------------------------------------

def exact_joint_hitting(positions, params: ModelParams) -> np.ndarray:
    """Joint absorption-pattern law of n labelled walkers started at the given
    sites, from the embedded jump chain on the full product state space.

    Returns an array of shape (2,)*n; axis i indexes walker i's endpoint
    (0 = delta-, 1 = delta+). Entries sum to 1.

    When a bond holding m of the walkers rings, the label mechanics put a
    uniform size-U subset on the left site: a subset S lands left with
    probability 1 / ((m+1) * C(m, |S|)).
    """
    positions = [int(x) for x in positions]
    n = len(positions)
    L = params.L
    if n < 1 or n > JOINT_MAX_PARTICLES or L > JOINT_MAX_L:
        raise StateSpaceError(
            f"exact joint solve limited to n <= {JOINT_MAX_PARTICLES} walkers "
            f"and L <= {JOINT_MAX_L}; got n={n}, L={L}"
        )
    for x in positions:
        if not -L <= x <= L:
            raise ValueError(f"site {x} outside [-{L}, {L}]")

    base = 2 * L + 3            # walker codes: 0 = delta-, 1..2L+1 = sites, base-1 = delta+
    right_code = base - 1
    c = params.left_rate
    d = params.right_rate
    total = 2 * L + c + d       # every clock rings regardless of occupancy

    n_states = base ** n
    weights = base ** np.arange(n)

    def encode(pos):
        s = 0
        for i in range(n):
            s += pos[i] * weights[i]
        return s

    codes = np.array([x + L + 1 for x in positions])
    start = encode(codes)

    decoded = np.empty((n_states, n), dtype=np.int64)  # decoded[s] = walker codes
    rem = np.arange(n_states)
    for i in range(n):
        decoded[:, i] = rem % base
        rem = rem // base

    absorbed = (decoded == 0) | (decoded == right_code)
    is_absorbing = absorbed.all(axis=1)
    transient = np.flatnonzero(~is_absorbing)
    trans_row = -np.ones(n_states, dtype=np.int64)
    trans_row[transient] = np.arange(transient.size)

    pattern_id = ((decoded == right_code) << np.arange(n)).sum(axis=1)

    rows, cols, vals = [], [], []        # transitions into transient states
    prows, pcols, pvals = [], [], []     # transitions into absorbing patterns

    def emit(row, target_state, prob):
        tr = trans_row[target_state]
        if tr >= 0:
            rows.append(row)
            cols.append(tr)
            vals.append(prob)
        else:
            prows.append(row)
            pcols.append(pattern_id[target_state])
            pvals.append(prob)

    subset_cache = {}
    for m in range(n + 1):
        subsets = []
        for size in range(m + 1):
            w = 1.0 / ((m + 1) * math.comb(m, size))
            for sub in itertools.combinations(range(m), size):
                subsets.append((sub, w))
        subset_cache[m] = subsets

    for s in transient:
        row = trans_row[s]
        pos = decoded[s]
        # left boundary clock: everything at site -L (code 1) is absorbed
        new = pos.copy()
        new[new == 1] = 0
        emit(row, encode(new), c / total)
        # right boundary clock
        new = pos.copy()
        new[new == right_code - 1] = right_code
        emit(row, encode(new), d / total)
        # bond clocks: bond k couples codes k and k+1, k = 1..2L
        for k in range(1, 2 * L + 1):
            pool = [i for i in range(n) if pos[i] == k or pos[i] == k + 1]
            if not pool:
                emit(row, s, 1.0 / total)
                continue
            for sub, w in subset_cache[len(pool)]:
                new = pos.copy()
                left_members = {pool[j] for j in sub}
                for i in pool:
                    new[i] = k if i in left_members else k + 1
                emit(row, encode(new), w / total)

    nt = transient.size
    P_tt = sp.coo_matrix((vals, (rows, cols)), shape=(nt, nt)).tocsc()
    R_pat = sp.coo_matrix((pvals, (prows, pcols)), shape=(nt, 2 ** n)).tocsc()

    lhs = (sp.identity(nt, format="csc") - P_tt).T.tocsc()
    e = np.zeros(nt)
    e[trans_row[start]] = 1.0
    w = spla.spsolve(lhs, e)
    law = np.asarray(w @ R_pat).ravel()
    # pattern bit i (weight 2^i) is walker i's endpoint, so unflatten F-order
    return law.reshape((2,) * n, order="F")


def pattern_counts(joint: np.ndarray) -> np.ndarray:
    """Collapse a joint pattern law to the law of (number absorbed at delta+)."""
    n = joint.ndim
    out = np.zeros(n + 1)
    for pattern in itertools.product((0, 1), repeat=n):
        out[sum(pattern)] += joint[pattern]
    return out


# ----------------------------------------------------------------------
# macroscopic limit
# ----------------------------------------------------------------------

def p_limit(A: float, B: float, a: float, b: float, u: float) -> float:
    """lim_L a_{floor(uL)} for u in the open interval (-1, 1).

    Keeps numerator/denominator terms whose growth exponent (1 for the bulk
    term, a and b for the boundary terms) attains the maximum; exponent ties
    contribute jointly. Exponents are compared exactly.
    """
    if not -1.0 < u < 1.0:
        raise ValueError(f"u must lie in (-1, 1), got {u}")
    m = max(1.0, a, b)
    num = 0.0
    den = 0.0
    if 1.0 == m:
        num += 2.0 * A * B * (1.0 + u)
        den += 4.0 * A * B
    if a == m:
        num += B
        den += B
    if b == m:
        den += A
    return num / den


REGIME_TAGS = ("i", "ii", "iii", "iv", "v", "vi", "vii")


def regime_classify(a: float, b: float) -> str:
    """Phase-diagram cell of the exponent pair (boundaries compared exactly)."""
    if a < 1.0 and b < 1.0:
        return "i"
    if a == 1.0 and b < 1.0:
        return "ii"
    if a < 1.0 and b == 1.0:
        return "iii"
    if a == 1.0 and b == 1.0:
        return "iv"
    if a == b:          # both exceed 1
        return "v"
    return "vi" if a > b else "vii"


@dataclass(frozen=True)
class RegimeProfile:
    tag: str
    coeff_minus: float
    coeff_plus: float
    value: float


def temperature_profile(A: float, B: float, a: float, b: float,
                        T_minus: float, T_plus: float, u: float) -> RegimeProfile:
    """T(u) = (1 - p(u)) T_minus + p(u) T_plus via the per-regime closed forms.

    The coefficient pair is computed from the regime table (not from p_limit),
    so agreement with the p_limit route is a meaningful consistency check on
    the open interval. The endpoints u = -1, 1 are allowed here and give the
    one-sided limits T(-1+), T(1-) (the near-boundary plateau values).
    """
    if not -1.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [-1, 1], got {u}")
    tag = regime_classify(a, b)
    if tag == "i":
        cp = (1.0 + u) / 2.0
    elif tag == "ii":
        cp = (2.0 * A * (1.0 + u) + 1.0) / (4.0 * A + 1.0)
    elif tag == "iii":
        cp = 2.0 * B * (1.0 + u) / (4.0 * B + 1.0)
    elif tag == "iv":
        cp = (2.0 * A * B * (1.0 + u) + B) / (4.0 * A * B + A + B)
    elif tag == "v":
        cp = B / (A + B)
    elif tag == "vi":
        cp = 1.0
    else:
        cp = 0.0
    cm = 1.0 - cp
    return RegimeProfile(tag=tag, coeff_minus=cm, coeff_plus=cp,
                         value=cm * T_minus + cp * T_plus)


# ----------------------------------------------------------------------
# stationary moments
# ----------------------------------------------------------------------

def stationary_moment_prediction(k_sites, params: ModelParams) -> float:
    """Exact stationary expectation of F(k, .) = prod_x xi_x^{k_x} / k_x! for
    the multiset of sites k_sites (one entry per dual particle).

    Equals sum_j q_L(k, j) beta+^{-j} beta-^{-(|k|-j)} with q_L the absorbed-
    count law of |k| walkers started on k_sites.
    """
    sites = [int(x) for x in k_sites]
    nk = len(sites)
    if nk == 0:
        return 1.0
    if nk == 1:
        p = hitting_oracle(params)[sites[0] + params.L + 1]
        q = np.array([1.0 - p, p])
    else:
        q = pattern_counts(exact_joint_hitting(sites, params))
    bp = params.beta_plus
    bm = params.beta_minus
    return float(sum(q[j] * bp ** (-j) * bm ** (-(nk - j)) for j in range(nk + 1)))
