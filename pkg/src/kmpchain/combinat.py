"""Exact combinatorial identities behind the uniform pair-redistribution.

All arithmetic is exact: Python integers via math.comb and rationals via
fractions.Fraction. The two identities here are what make the marginal of a
tagged subset under the label redistribution exactly uniform, which in turn
gives the restriction property of the multi-walker hitting law.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

ENUMERATION_LIMIT = 12  # brute-force permutation enumeration guard


def binom(n: int, m: int) -> int:
    """Binomial coefficient with the convention C(n, m) = 0 for m < 0 or n < m."""
    if m < 0 or n < 0 or n < m:
        return 0
    return math.comb(n, m)


def vandermonde_shift(N: int, M: int, q: int) -> tuple[int, int]:
    """Both sides of  sum_p C(p,q) C(N-p, M-q) = C(N+1, M+1),  p = 0..N.

    Returns (lhs, rhs) as exact integers so callers can assert equality.
    """
    if not (0 <= q <= M <= N):
        raise ValueError(f"need 0 <= q <= M <= N, got N={N}, M={M}, q={q}")
    lhs = sum(binom(p, q) * binom(N - p, M - q) for p in range(N + 1))
    rhs = math.comb(N + 1, M + 1)
    return lhs, rhs


def marginal_distribution(n_pair: int, M: int) -> list[Fraction]:
    """Law of Y = number of M tagged particles sent left when a pair holding
    n_pair particles is redistributed (q uniform on {0..n_pair}, assignment
    uniform among subsets).

    P[Y = q] = (1/(n_pair+1)) * sum_p C(p,q) C(n_pair-p, M-q) / C(n_pair, M),
    which collapses to the constant 1/(M+1); the exact sum is evaluated so the
    identity is checked rather than assumed.
    """
    if not (0 <= M <= n_pair):
        raise ValueError(f"need 0 <= M <= n_pair, got n_pair={n_pair}, M={M}")
    denom = (n_pair + 1) * math.comb(n_pair, M)
    out = []
    for q in range(M + 1):
        s = sum(binom(p, q) * binom(n_pair - p, M - q) for p in range(n_pair + 1))
        out.append(Fraction(s, denom))
    return out


def enumerate_marginal(n_pair: int, M: int) -> list[Fraction]:
    """Brute-force law of Y by enumerating slot choices directly.

    A redistribution draws U uniform on {0..n_pair} and a uniform permutation;
    the first U slots go left. Y counts tagged particles among the first U
    slots, so it suffices to enumerate which slots the M tagged particles
    occupy (C(n_pair, M) equally likely choices) jointly with U.
    """
    if not (0 <= M <= n_pair):
        raise ValueError(f"need 0 <= M <= n_pair, got n_pair={n_pair}, M={M}")
    if n_pair > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to n_pair <= {ENUMERATION_LIMIT}")
    counts = [0] * (M + 1)
    for slots in itertools.combinations(range(n_pair), M):
        for U in range(n_pair + 1):
            y = sum(1 for s in slots if s < U)
            counts[y] += 1
    total = (n_pair + 1) * math.comb(n_pair, M)
    return [Fraction(c, total) for c in counts]
