"""Exact period values: rationals (``Fraction``) and quadratic surds r*sqrt(d)."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .rational import prime_factors


@dataclass(frozen=True)
class SqrtPeriod:
    """The irrational number coeff * sqrt(d), d > 1 squarefree, coeff > 0."""

    coeff: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff <= 0:
            raise ValueError("sqrt period coefficient must be positive")
        if self.d < 2 or any(self.d % (p * p) == 0 for p in prime_factors(self.d)):
            raise ValueError(f"d must be a squarefree integer > 1, got {self.d}")

    def __float__(self):
        return float(self.coeff) * math.sqrt(self.d)

    def __str__(self):
        return f"sqrt:{self.d}*{self.coeff}"


Period = Union[Fraction, SqrtPeriod]


def make_sqrt(d: int, coeff=1) -> Period:
    """coeff*sqrt(d) with square factors of d pulled into the coefficient."""
    if d < 1:
        raise ValueError("d must be positive")
    coeff = Fraction(coeff)
    k = 2
    while k * k <= d:
        while d % (k * k) == 0:
            d //= k * k
            coeff *= k
        k += 1
    if d == 1:
        return coeff
    return SqrtPeriod(coeff, d)


def is_rational(period: Period) -> bool:
    return isinstance(period, Fraction)


def period_float(period: Period) -> float:
    return float(period)


def denominator_bound(period: Period) -> int:
    """Reduced denominator of a rational period, ceil(P) for an irrational one."""
    if isinstance(period, Fraction):
        return period.denominator
    return math.ceil(float(period))


def numerator_bound(period: Period) -> int:
    """Reduced numerator a of P = a/b; ceil(P) for irrational periods."""
    if isinstance(period, Fraction):
        return period.numerator
    return math.ceil(float(period))


def floor_q_times(n: int, period: Period, Q: int) -> int:
    """Exact floor(Q * n / P) for n >= 0."""
    if n < 0:
        raise ValueError("expected n >= 0")
    if isinstance(period, Fraction):
        return (Q * n * period.denominator) // period.numerator
    # Q n / (r sqrt d) >= 0, so floor = isqrt(floor(Q^2 n^2 / (r^2 d)))
    r = period.coeff
    num = Q * Q * n * n * r.denominator ** 2
    den = r.numerator ** 2 * period.d
    return math.isqrt(num // den)


_SQRT_RE = re.compile(r"^sqrt:(\d+)(?:\*([0-9/]+))?$")


def parse_period(text: str) -> Period:
    """Parse ``p``, ``a/b`` or ``sqrt:d*r`` into an exact positive period."""
    text = text.strip()
    m = _SQRT_RE.match(text)
    try:
        if m:
            value = make_sqrt(int(m.group(1)), Fraction(m.group(2) or "1"))
        else:
            if not re.fullmatch(r"\d+(/\d+)?|\d*\.\d+", text):
                raise ValueError
            value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed period {text!r}; expected p, a/b or sqrt:d*r") from None
    if float(value) <= 0:
        raise ValueError(f"period must be positive, got {text!r}")
    return value
