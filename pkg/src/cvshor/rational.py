"""Exact rational arithmetic helpers: gcd, Euler phi, continued fractions.

Rationals are ``fractions.Fraction`` throughout; it already keeps values
reduced with a positive denominator and uses Python's unbounded ints.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence, Tuple

Convergent = Tuple[int, int]


def gcd(u: int, v: int) -> int:
    """Greatest common divisor of two nonnegative integers, gcd(0, 0) == 0."""
    if u < 0 or v < 0:
        raise ValueError("gcd expects nonnegative integers")
    return math.gcd(u, v)


def prime_factors(n: int) -> List[int]:
    """Distinct prime divisors of ``n`` by trial division, ascending."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    primes = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            primes.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        primes.append(n)
    return primes


def euler_phi(a: int) -> int:
    """Euler's totient via the product formula over the prime divisors of a."""
    if a < 1:
        raise ValueError(f"euler_phi is defined for a >= 1, got {a}")
    result = a
    for p in prime_factors(a):
        result -= result // p
    return result


def cf_expand(r) -> List[int]:
    """Canonical continued fraction coefficients [a0; a1, ..., an] of r >= 0.

    The last coefficient is >= 2 whenever there is more than one term, so the
    expansion is unique.
    """
    r = Fraction(r)
    if r < 0:
        raise ValueError("cf_expand only handles nonnegative rationals; take |r| first")
    p, q = r.numerator, r.denominator
    coeffs = []
    while q:
        a, rem = divmod(p, q)
        coeffs.append(a)
        p, q = q, rem
    # Euclid on a reduced fraction already ends on a coefficient >= 2 unless
    # the input is an integer; this guard keeps the invariant explicit.
    if len(coeffs) > 1 and coeffs[-1] == 1:
        coeffs.pop()
        coeffs[-1] += 1
    return coeffs


def cf_value(coeffs: Sequence[int]) -> Fraction:
    """Evaluate a finite continued fraction exactly."""
    if not coeffs:
        raise ValueError("empty continued fraction")
    value = Fraction(coeffs[-1])
    for a in reversed(coeffs[:-1]):
        value = a + 1 / value
    return value


def convergents(coeffs: Sequence[int]) -> List[Convergent]:
    """All convergents (p_k, q_k) of a continued fraction, in order."""
    p_prev, q_prev = 1, 0  # (p_-1, q_-1)
    p_prev2, q_prev2 = 0, 1  # (p_-2, q_-2)
    out = []
    for a in coeffs:
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        out.append((p, q))
        p_prev2, q_prev2 = p_prev, q_prev
        p_prev, q_prev = p, q
    return out


def convergents_of(r) -> List[Convergent]:
    return convergents(cf_expand(r))


def best_denominator_candidates(r, q_bound: int) -> List[Fraction]:
    """Convergents of r with denominator <= q_bound, increasing in q.

    Any n/P with |r - n/P| < 1/(2 P^2) and P <= q_bound shows up here
    (Legendre's theorem on continued fractions).
    """
    out = []
    for p, q in convergents_of(r):
        if q > q_bound:
            break
        f = Fraction(p, q)
        if not out or out[-1] != f:
            out.append(f)
    return out


def match_denominators_linear(
    list1: Sequence[Convergent], list2: Sequence[Convergent]
) -> List[Tuple[int, int]]:
    """Index pairs (k, l) with q1[k] == q2[l], by one merge over both lists.

    Denominators are nondecreasing (strictly after the first entry), so a
    two-pointer walk finds every match in O(K + L) steps, expanding runs of
    equal denominators into all their cross pairs.
    """
    pairs = []
    i = j = 0
    while i < len(list1) and j < len(list2):
        qi, qj = list1[i][1], list2[j][1]
        if qi < qj:
            i += 1
        elif qi > qj:
            j += 1
        else:
            i_end = i
            while i_end < len(list1) and list1[i_end][1] == qi:
                i_end += 1
            j_end = j
            while j_end < len(list2) and list2[j_end][1] == qj:
                j_end += 1
            pairs.extend((k, l) for k in range(i, i_end) for l in range(j, j_end))
            i, j = i_end, j_end
    return pairs
