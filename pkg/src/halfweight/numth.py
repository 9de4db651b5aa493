"""Number-theoretic scalars: Bernoulli numbers, divisor sums, characters.

Conventions
-----------
* ``bernoulli`` uses B_1 = -1/2 (only even k >= 4 reach the Eisenstein
  constructors, so the B_1 convention stays internal).
* ``gen_bernoulli_chi4`` expands the defining exponential generating
  function sum_{a=1}^{4} chi(a) t e^{at} / (e^{4t} - 1) exactly over the
  rationals; chi is the primitive character mod 4.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, isqrt

import gmpy2

# chi(n) for n mod 4; the unique primitive character of conductor 4.
_CHI4 = (0, 1, 0, -1)

_bernoulli_cache = [Fraction(1)]


def bernoulli(k):
    """k-th Bernoulli number as a Fraction (B_1 = -1/2)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    while len(_bernoulli_cache) <= k:
        n = len(_bernoulli_cache)
        # sum_{j=0}^{n} C(n+1, j) B_j = 0
        s = sum(comb(n + 1, j) * _bernoulli_cache[j] for j in range(n))
        _bernoulli_cache.append(Fraction(-s, n + 1))
    return _bernoulli_cache[k]


_gen_bernoulli_cache = []


def gen_bernoulli_chi4(k):
    """k-th generalized Bernoulli number for the primitive character mod 4."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(_gen_bernoulli_cache) <= k:
        order = k + 1
        # numerator t(e^t - e^{3t}) and denominator e^{4t} - 1, both over t:
        # c_n = (1 - 3^n)/n!,  d_n = 4^{n+1}/(n+1)!
        fact = [1] * (order + 1)
        for i in range(1, order + 1):
            fact[i] = fact[i - 1] * i
        num = [Fraction(1 - 3**n, fact[n]) for n in range(order)]
        den = [Fraction(4 ** (n + 1), fact[n + 1]) for n in range(order)]
        quo = []
        for n in range(order):
            s = num[n] - sum(quo[j] * den[n - j] for j in range(n))
            quo.append(s / den[0])
        _gen_bernoulli_cache.clear()
        _gen_bernoulli_cache.extend(quo[n] * fact[n] for n in range(order))
    return _gen_bernoulli_cache[k]


def sigma(r, n):
    """Divisor power sum sum_{0 < d | n} d^r."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += d**r
            e = n // d
            if e != d:
                total += e**r
    return total


def sigma_table(r, limit):
    """sigma_r(n) for all 0 <= n < limit in one sieve pass; entry 0 is 0."""
    tab = [0] * limit
    for d in range(1, limit):
        pw = d**r
        for m in range(d, limit, d):
            tab[m] += pw
    return tab


def sigma1_odd_table(limit):
    """sigma_1(n) for odd n < limit, zero at even indices and at 0."""
    tab = [0] * limit
    for d in range(1, limit, 2):
        for m in range(d, limit, 2 * d):
            tab[m] += d
    return tab


def chi4(n):
    """The primitive Dirichlet character mod 4."""
    return _CHI4[n % 4]


def legendre(a, p):
    """Legendre symbol (a|p) for an odd prime p, via Euler's criterion."""
    if p < 3 or p % 2 == 0 or not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    e = pow(a, (p - 1) // 2, p)
    return 1 if e == 1 else -1


def kronecker2(a):
    """Kronecker symbol (a|2): 0 for even a, +1 for a = +-1, -1 for a = +-3 mod 8."""
    r = a % 8
    if r % 2 == 0:
        return 0
    return 1 if r in (1, 7) else -1


def half_binomial(x, m):
    """Generalized binomial x(x-1)...(x-m+1)/m! for rational x."""
    if m < 0:
        raise ValueError("m must be >= 0")
    num = Fraction(1)
    for i in range(m):
        num *= Fraction(x) - i
    return num / _factorial(m)


def _factorial(m):
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out
