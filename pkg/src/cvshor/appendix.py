"""Coprimality probabilities behind the two-sample success rate.

Exact values are Fractions over the uniform distribution on {1..N}; pairs
are ordered and drawn with replacement.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional

import numpy as np

from .rational import euler_phi, prime_factors

SIX_OVER_PI_SQUARED = 0.607927101854027
EXP_MINUS_GAMMA = 0.561459483566885
EXHAUSTIVE_LIMIT = 5000
MC_CHUNK = 10_000


def count_coprime(a: int, N: int) -> int:
    """#{1 <= n <= N : gcd(n, a) = 1} by inclusion-exclusion over squarefree d | a."""
    if a < 1 or N < 1:
        raise ValueError("a and N must be positive")
    primes = prime_factors(a)
    total = 0
    for r in range(len(primes) + 1):
        sign = -1 if r % 2 else 1
        for combo in combinations(primes, r):
            total += sign * (N // math.prod(combo))
    return total


def _check_range(a: int, N: int) -> None:
    if a < 1:
        raise ValueError("a must be positive")
    if N < a:
        raise ValueError(f"N={N} is below a={a}; the bounds assume N >= a")


def prob_coprime(a: int, N: int) -> Fraction:
    """Prob(gcd(a, n) = 1) for n uniform on 1..N; at least phi(a)/a."""
    _check_range(a, N)
    return Fraction(count_coprime(a, N), N)


def prob_pair_coprime_to_a(a: int, N: int) -> Fraction:
    return prob_coprime(a, N) ** 2


def _coprime_residues(a: int, N: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=np.int64)
    return n[np.gcd(n, a) == 1]


def _count_coprime_pairs(values: np.ndarray) -> int:
    """Ordered pairs (u, v) from ``values`` with gcd(u, v) = 1, by enumeration."""
    count = 0
    step = max(1, 2_000_000 // max(len(values), 1))
    for start in range(0, len(values), step):
        block = values[start:start + step]
        count += int(np.count_nonzero(np.gcd.outer(block, values) == 1))
    return count


def _exhaustive_counts(a: int, N: int):
    _check_range(a, N)
    if N > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive enumeration is capped at N={EXHAUSTIVE_LIMIT}; use monte_carlo_condition_a")
    residues = _coprime_residues(a, N)
    return _count_coprime_pairs(residues), len(residues)


def prob_pairwise_coprime_given(a: int, N: int) -> Fraction:
    """Prob(gcd(n1, n2) = 1 | both coprime to a), exact by pair enumeration."""
    good, k = _exhaustive_counts(a, N)
    return Fraction(good, k * k)


def prob_condition_a(a: int, N: int) -> Fraction:
    """Prob(gcd(n1, n2) = gcd(a, n1) = gcd(a, n2) = 1), exact by pair enumeration."""
    good, _ = _exhaustive_counts(a, N)
    return Fraction(good, N * N)


def phi_ratio(a: int) -> Fraction:
    return Fraction(euler_phi(a), a)


def condition_a_bound(a: int) -> float:
    return SIX_OVER_PI_SQUARED * float(phi_ratio(a)) ** 2


@dataclass
class ProbabilityReport:
    a: int
    N: int
    lower_bound: float
    exact_probability: Optional[Fraction] = None
    monte_carlo_estimate: Optional[float] = None
    standard_error: Optional[float] = None
    trials: Optional[int] = None

    @property
    def bound_satisfied(self) -> bool:
        if self.exact_probability is not None:
            return self.exact_probability >= self.lower_bound
        return self.monte_carlo_estimate >= self.lower_bound - 3 * self.standard_error

    def to_json(self) -> dict:
        out = {"a": self.a, "N": self.N, "lower_bound": self.lower_bound}
        if self.exact_probability is not None:
            out["exact_probability"] = {
                "numer": self.exact_probability.numerator,
                "denom": self.exact_probability.denominator,
                "value": float(self.exact_probability),
            }
        if self.monte_carlo_estimate is not None:
            out["monte_carlo_estimate"] = self.monte_carlo_estimate
            out["standard_error"] = self.standard_error
            out["trials"] = self.trials
        out["bound_satisfied"] = self.bound_satisfied
        return out


def monte_carlo_condition_a(a: int, N: int, trials: int, seed: int, lower_bound: Optional[float] = None) -> ProbabilityReport:
    """Estimate the Condition-A probability from ``trials`` random pairs.

    Trials are split into fixed-size chunks, each with its own child seed, so
    the estimate depends only on (a, N, trials, seed) however chunks are run.
    """
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    _check_range(a, N)
    children = np.random.SeedSequence(seed).spawn(math.ceil(trials / MC_CHUNK))
    hits = 0
    remaining = trials
    for child in children:
        size = min(MC_CHUNK, remaining)
        remaining -= size
        rng = np.random.default_rng(child)
        n1 = rng.integers(1, N, size=size, endpoint=True)
        n2 = rng.integers(1, N, size=size, endpoint=True)
        ok = (np.gcd(n1, n2) == 1) & (np.gcd(n1, a) == 1) & (np.gcd(n2, a) == 1)
        hits += int(ok.sum())
    p = hits / trials
    return ProbabilityReport(
        a=a, N=N,
        lower_bound=condition_a_bound(a) if lower_bound is None else lower_bound,
        monte_carlo_estimate=p,
        standard_error=math.sqrt(p * (1 - p) / trials),
        trials=trials,
    )


def _phi_sieve(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # untouched, so prime
            phi[p::p] -= phi[p::p] // p
    return phi


def primorials(limit: int) -> List[int]:
    out, prod, p = [], 1, 2
    while True:
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            if prod * p > limit:
                return out
            prod *= p
            out.append(prod)
        p += 1


@dataclass
class PhiRatioScan:
    rows: List[tuple]  # (a, phi(a), phi(a) ln ln a / a)
    running_minimum: List[tuple]  # (a, ratio) at each new minimum
    primorial_rows: List[tuple]

    @property
    def minimum(self) -> tuple:
        return self.running_minimum[-1]

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["a", "phi", "ratio"])
        for a, phi, ratio in self.rows:
            writer.writerow([a, phi, repr(ratio)])


def phi_ratio_scan(a_max: int) -> PhiRatioScan:
    """phi(a) ln ln a / a for 10 <= a <= a_max, against the e^-gamma liminf."""
    if a_max < 10:
        raise ValueError("a_max must be at least 10")
    phi = _phi_sieve(a_max)
    rows, running = [], []
    for a in range(10, a_max + 1):
        ratio = int(phi[a]) * math.log(math.log(a)) / a
        rows.append((a, int(phi[a]), ratio))
        if not running or ratio < running[-1][1]:
            running.append((a, ratio))
    prim = set(primorials(a_max))
    return PhiRatioScan(rows, running, [r for r in rows if r[0] in prim])


def verify_appendix(a: int, N: int, exhaustive: bool = True, trials: int = 100_000, seed: int = 0) -> dict:
    """All four lower bounds for (a, N), each with its value and pass flag."""
    _check_range(a, N)
    ratio = phi_ratio(a)
    p1 = prob_coprime(a, N)
    pair = p1 ** 2
    checks = [
        _exact_check("coprime_to_a", p1, ratio, float(ratio)),
        _exact_check("pair_coprime_to_a", pair, ratio ** 2, float(ratio) ** 2),
    ]
    if exhaustive:
        checks.append(_exact_check(
            "pairwise_coprime_given", prob_pairwise_coprime_given(a, N), None, SIX_OVER_PI_SQUARED))
        checks.append(_exact_check(
            "condition_a", prob_condition_a(a, N), None, condition_a_bound(a)))
    else:
        report = monte_carlo_condition_a(a, N, trials, seed)
        est, se = report.monte_carlo_estimate, report.standard_error
        cond_est, cond_se = est / float(pair), se / float(pair)
        checks.append(_mc_check("pairwise_coprime_given", cond_est, cond_se, SIX_OVER_PI_SQUARED))
        checks.append(_mc_check("condition_a", est, se, condition_a_bound(a)))
    return {
        "a": a,
        "N": N,
        "mode": "exhaustive" if exhaustive else "monte_carlo",
        "phi": euler_phi(a),
        "bounds": checks,
        "all_pass": all(c["pass"] for c in checks),
    }


def _exact_check(name: str, value: Fraction, exact_bound: Optional[Fraction], bound: float) -> dict:
    passed = value >= exact_bound if exact_bound is not None else value >= bound
    out = {
        "name": name,
        "value": {"numer": value.numerator, "denom": value.denominator},
        "value_float": float(value),
        "bound": bound,
    }
    if exact_bound is not None:
        out["bound_exact"] = {"numer": exact_bound.numerator, "denom": exact_bound.denominator}
    out["pass"] = bool(passed)
    return out


def _mc_check(name: str, estimate: float, stderr: float, bound: float) -> dict:
    return {
        "name": name,
        "estimate": estimate,
        "standard_error": stderr,
        "bound": bound,
        "pass": bool(estimate >= bound - 3 * stderr),
    }
