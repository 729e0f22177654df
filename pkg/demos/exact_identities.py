"""The exact combinatorial backbone behind the dual process.

Two facts make the dual tractable. First, when a bond ring redistributes a
pool of m labelled walkers, the number that lands on the left site is
uniform on {0..m} - an identity of binomial sums checked here in exact
integer arithmetic. Second, the hitting probability of a single walker has
a closed form that matches the tridiagonal first-step solve to machine
precision, and it drives the whole temperature-profile machinery.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

import kmpchain as kc
from kmpchain.params import ModelParams


def main():
    print("binomial index-shift identity, exact over 0 <= q <= M <= N <= 30:")
    checked = bad = 0
    for n in range(31):
        for m in range(n + 1):
            for q in range(m + 1):
                lhs, rhs = kc.vandermonde_shift(n, m, q)
                checked += 1
                bad += lhs != rhs
    print(f"  {checked} identities checked, {bad} mismatches\n")

    print("uniform split marginal (pair total 9, pool 5):")
    law = kc.marginal_distribution(9, 5)
    enum = kc.enumerate_marginal(9, 5)
    print(f"  computed law   {[str(f) for f in law]}")
    print(f"  enumerated law {[str(f) for f in enum]}")
    print(f"  uniform 1/6    {law == [Fraction(1, 6)] * 6}\n")

    print("hitting probability, closed form vs first-step solve (L = 50):")
    p = ModelParams(L=50, A=0.8, B=1.6, a=1.0, b=0.5)
    oracle = kc.hitting_oracle(p)[1:-1]
    closed = np.array([kc.hitting_closed_form(p, x) for x in range(-50, 51)])
    print(f"  max |closed - solve| = {np.abs(closed - oracle).max():.2e}")
    for x in (-50, -25, 0, 25, 50):
        print(f"  a_{x:<4d} = {kc.hitting_closed_form(p, x):.6f}")

    print("\nmacroscopic limit p(u) and the regime tags at u = 0:")
    for a, b in ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0),
                 (2.0, 2.0), (3.0, 1.5), (1.5, 3.0)):
        tag = kc.regime_classify(a, b)
        pl = kc.p_limit(1.0, 1.0, a, b, 0.0)
        print(f"  a = {a:.1f}, b = {b:.1f}: regime {tag:>3}, p(0) = {pl:.4f}")


if __name__ == "__main__":
    main()
