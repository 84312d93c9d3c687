"""Classical post-processing: turning measured eigenvalues m/Q into a period."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .functions import PeriodicFunctionSpec, is_period, period_defect
from .periods import is_rational, numerator_bound
from .rational import convergents_of, match_denominators_linear
from .simulator import (
    MeasurementOutcome,
    apply_fourier,
    default_n_max,
    ideal_lattice_sample,
    left_register_distribution,
    measure_observable,
    prepare_superposition,
)

GOLDEN = (math.sqrt(5) - 1) / 2
IRRATIONAL_ROUNDS = 8
# a continuity bound wider than this fraction of phi's range cannot tell
# candidates apart, so the round escalates Q instead
INFORMATIVE_FRACTION = 0.05


@dataclass(frozen=True)
class RecoveryConfig:
    Q: Union[int, str] = "auto"
    n_max: Optional[int] = None
    epsilon_period: Optional[float] = None
    max_iterations: int = 50
    seed: int = 0
    mode: str = "ideal"
    weighting: str = "register"
    M: int = 64
    W: int = 16
    period_bound: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("ideal", "grid"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.Q != "auto" and (not isinstance(self.Q, int) or self.Q < 1):
            raise ValueError("Q must be a positive integer or 'auto'")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def resolve_Q(self, spec: PeriodicFunctionSpec) -> int:
        if self.Q != "auto":
            return self.Q
        a = self.period_bound or numerator_bound(spec.period)
        return 2 * a * a

    def resolve_n_max(self, spec: PeriodicFunctionSpec) -> int:
        return self.n_max or default_n_max(spec.period)

    def resolve_epsilon(self, spec: PeriodicFunctionSpec) -> float:
        return self.epsilon_period or spec.epsilon


@dataclass
class RecoveryResult:
    period: Union[Fraction, Tuple[float, float], None]
    iterations_used: int
    Q: int
    samples: List[Tuple[MeasurementOutcome, MeasurementOutcome]] = field(default_factory=list)
    condition_a: List[Optional[bool]] = field(default_factory=list)
    minimal: Optional[bool] = None

    @property
    def success(self) -> bool:
        return self.period is not None

    def to_json(self) -> dict:
        if isinstance(self.period, Fraction):
            period = {"numer": self.period.numerator, "denom": self.period.denominator}
        elif self.period is not None:
            period = {"lo": self.period[0], "hi": self.period[1]}
        else:
            period = None
        out = {
            "success": self.success,
            "period": period,
            "iterations_used": self.iterations_used,
            "Q": self.Q,
            "samples": [[o.to_json() for o in pair] for pair in self.samples],
            "condition_a": self.condition_a,
        }
        if self.minimal is not None:
            out["minimal"] = self.minimal
        return out


def recover_integer_period(
    outcome: MeasurementOutcome, Q: int, p_bound: int, spec: PeriodicFunctionSpec, eps: float
) -> Optional[int]:
    """Largest convergent denominator q <= p_bound of |m|/Q that is a period."""
    if Q < 2 * p_bound * p_bound:
        raise ValueError(f"Q={Q} is below 2 * p_bound^2 = {2 * p_bound * p_bound}")
    if outcome.m == 0:
        return None
    qs = sorted({q for _, q in convergents_of(Fraction(abs(outcome.m), Q)) if q <= p_bound}, reverse=True)
    for q in qs:
        if is_period(spec, q, eps):
            return q
    return None


@functools.lru_cache(maxsize=32)
def _grid_distribution(spec: PeriodicFunctionSpec, M: int, W: int):
    state = apply_fourier(prepare_superposition(spec, M, W))
    return left_register_distribution(state).over_y()


def sample_outcome(spec: PeriodicFunctionSpec, config: RecoveryConfig, Q: int, rng) -> MeasurementOutcome:
    if config.mode == "grid":
        return measure_observable(_grid_distribution(spec, config.M, config.W), Q, rng)
    return ideal_lattice_sample(spec, config.resolve_n_max(spec), Q, rng, config.weighting)


def part1_sample_pair(
    spec: PeriodicFunctionSpec, config: RecoveryConfig, rng: np.random.Generator, Q: Optional[int] = None
) -> Tuple[MeasurementOutcome, MeasurementOutcome]:
    """Two independent runs of the quantum steps, each yielding m/Q."""
    Q = Q or config.resolve_Q(spec)
    return sample_outcome(spec, config, Q, rng), sample_outcome(spec, config, Q, rng)


def part2_match(m1: int, m2: int, Q: int, spec: PeriodicFunctionSpec, eps: float) -> Optional[Fraction]:
    """First alpha = q / gcd(p1, p2) over equal convergent denominators that is a period."""
    if Q < 1:
        raise ValueError("Q must be positive")
    c1 = convergents_of(Fraction(abs(m1), Q))
    c2 = convergents_of(Fraction(abs(m2), Q))
    tried = set()
    for k, l in match_denominators_linear(c1, c2):
        (p1, q), (p2, _) = c1[k], c2[l]
        if p1 == 0 or p2 == 0:
            continue
        alpha = Fraction(q, math.gcd(p1, p2))
        if alpha in tried:
            continue
        tried.add(alpha)
        if is_period(spec, alpha, eps):
            return alpha
    return None


def condition_a(n1: Optional[int], n2: Optional[int], a: int) -> Optional[bool]:
    """gcd(n1, n2) = gcd(n1, a) = gcd(n2, a) = 1, or None if an index is unknown."""
    if n1 is None or n2 is None:
        return None
    n1, n2 = abs(n1), abs(n2)
    return math.gcd(n1, n2) == 1 and math.gcd(n1, a) == 1 and math.gcd(n2, a) == 1


def is_minimal(spec: PeriodicFunctionSpec, alpha, eps: float, divisors=range(2, 8)) -> bool:
    return not any(is_period(spec, Fraction(alpha) / k, eps) for k in divisors)


def _child_rng(seed: int, *counters: int) -> np.random.Generator:
    return np.random.default_rng([seed, *counters])


def recover_rational_period(spec: PeriodicFunctionSpec, config: RecoveryConfig) -> RecoveryResult:
    """Repeat Part 1 (two samples) and Part 2 (denominator matching) until a period turns up."""
    if not is_rational(spec.period):
        raise ValueError("rational recovery needs a rational ground-truth period")
    a = spec.period.numerator
    Q = config.resolve_Q(spec)
    if Q < 2 * a * a:
        raise ValueError(f"Q={Q} is below 2a^2 = {2 * a * a}")
    eps = config.resolve_epsilon(spec)
    result = RecoveryResult(period=None, iterations_used=0, Q=Q)
    for it in range(1, config.max_iterations + 1):
        o1, o2 = part1_sample_pair(spec, config, _child_rng(config.seed, it), Q)
        result.samples.append((o1, o2))
        result.condition_a.append(condition_a(o1.lattice_index, o2.lattice_index, a))
        result.iterations_used = it
        alpha = part2_match(o1.m, o2.m, Q, spec, eps)
        if alpha is not None:
            result.period = alpha
            result.minimal = is_minimal(spec, alpha, eps)
            break
    return result


def golden_section(f, lo: float, hi: float, width: float) -> Tuple[float, float]:
    """Shrink [lo, hi] around a minimum of unimodal f until hi - lo <= width."""
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > width:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    return lo, hi


def _value_range(spec: PeriodicFunctionSpec) -> float:
    return float(np.ptp(spec.profile(np.linspace(0.0, 1.0, 4097))))


def sample_bracket(
    spec: PeriodicFunctionSpec, outcome: MeasurementOutcome, n_max: int, tol_ceiling: float
) -> Optional[Tuple[Fraction, Fraction, int]]:
    """Bracket (lo, hi] for P from one outcome, guessing |n| = t = 1, 2, ...

    m = floor(Q |n| / P) puts P in (|n| Q / (m+1), |n| Q / m]. The smallest t
    whose bracket midpoint has a period defect within the continuity bound
    for the bracket width is taken as |n|.
    """
    m, Q = outcome.m, outcome.Q
    if m <= 0:
        return None
    for t in range(1, n_max + 1):
        lo, hi = Fraction(t * Q, m + 1), Fraction(t * Q, m)
        width = float(hi - lo)
        tol = period_defect(spec, width)
        if tol > tol_ceiling:
            return None
        if period_defect(spec, float((lo + hi) / 2)) <= tol:
            return lo, hi, t
    return None


def recover_irrational_period(
    spec: PeriodicFunctionSpec, precision: float, config: RecoveryConfig
) -> RecoveryResult:
    """Interval of width <= precision around the period of a continuous phi.

    Each round samples pairs at a fixed Q, brackets P from each sample,
    intersects the two brackets and narrows the result by golden-section
    search on the period defect. Q grows fourfold per round.
    """
    if not spec.continuous:
        raise ValueError("irrational-period recovery requires a continuous function")
    if precision <= 0:
        raise ValueError("precision must be positive")
    n_max = config.resolve_n_max(spec)
    if config.Q == "auto":
        bound = config.period_bound or math.ceil(spec.period_value)
        Q0 = 2 * bound * bound
    else:
        Q0 = config.Q
    tol_ceiling = INFORMATIVE_FRACTION * _value_range(spec)
    result = RecoveryResult(period=None, iterations_used=0, Q=Q0)
    for rnd in range(IRRATIONAL_ROUNDS):
        Q = Q0 * 4**rnd
        result.Q = Q
        for it in range(1, config.max_iterations + 1):
            pair = part1_sample_pair(spec, config, _child_rng(config.seed, rnd, it), Q)
            result.samples.append(pair)
            result.condition_a.append(None)
            result.iterations_used += 1
            brackets = [b for b in (sample_bracket(spec, o, n_max, tol_ceiling) for o in pair) if b]
            if not brackets:
                continue
            lo = max(b[0] for b in brackets)
            hi = min(b[1] for b in brackets)
            if lo > hi:
                continue
            margin = 1e-9 * float(hi - lo) + 4 * np.finfo(float).eps * float(hi)
            a, b = golden_section(
                lambda alpha: period_defect(spec, alpha), float(lo) - margin, float(hi) + margin, precision
            )
            if period_defect(spec, (a + b) / 2) <= period_defect(spec, max(b - a, precision)):
                result.period = (float(a), float(b))
                return result
    return result
