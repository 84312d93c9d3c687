"""Periodic test functions with known minimum period, and their Fourier data.

Every function is described by a profile over one normalized period,
``t in [0, 1)``, so ``phi(x) = profile(frac(x / P))``. Keeping the phase
exact is what lets the grid simulator see perfectly repeating values.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .periods import Period, SqrtPeriod, is_rational

KINDS = ("sawtooth", "triangle", "square", "trig-polynomial", "tabulated")

EPS_CLOSED_FORM = 1e-9
EPS_TABULATED = 1e-6
QUAD_TOL = 1e-10


class QuadratureError(RuntimeError):
    def __init__(self, n: int, achieved: float):
        super().__init__(
            f"quadrature for coefficient n={n} did not reach {QUAD_TOL:g} (achieved {achieved:.3g})"
        )
        self.n = n
        self.achieved = achieved


@dataclass(frozen=True)
class PeriodicFunctionSpec:
    """A periodic admissible function with exact ground-truth period.

    Only the fields relevant to ``kind`` are consulted:

    * sawtooth: ``amplitude * (x mod P)``
    * triangle: ``amplitude * (1 - |2t - 1|)``, zero at multiples of P
    * square: ``levels[1]`` on ``t < duty``, ``levels[0]`` otherwise
    * trig-polynomial: ``cos_coeffs[0] + sum a_k cos(2 pi k t) + b_k sin(2 pi k t)``
    * tabulated: linear interpolation through ``table`` of (t, value) nodes
      spanning t = 0..1, shifted by ``origin``
    """

    kind: str
    period: Period
    amplitude: float = 1.0
    levels: Tuple[float, float] = (0.0, 1.0)
    duty: float = 0.5
    cos_coeffs: Tuple[float, ...] = ()
    sin_coeffs: Tuple[float, ...] = ()
    table: Tuple[Tuple[float, float], ...] = ()
    origin: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if not isinstance(self.period, SqrtPeriod):
            object.__setattr__(self, "period", Fraction(self.period))
            if self.period <= 0:
                raise ValueError("period must be positive")
        if self.kind == "square" and not 0 < self.duty < 1:
            raise ValueError("duty must lie strictly between 0 and 1")
        if self.kind == "tabulated":
            ts = [t for t, _ in self.table]
            if len(ts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
                raise ValueError("table must span normalized phase 0..1")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("table abscissae must be strictly increasing")

    @property
    def period_value(self) -> float:
        return float(self.period)

    @property
    def continuous(self) -> bool:
        # decided per kind analytically
        if self.kind == "sawtooth":
            return self.amplitude == 0
        if self.kind == "square":
            return self.levels[0] == self.levels[1]
        if self.kind == "tabulated":
            return abs(self.table[0][1] - self.table[-1][1]) <= EPS_TABULATED
        return True

    @property
    def epsilon(self) -> float:
        return EPS_TABULATED if self.kind == "tabulated" else EPS_CLOSED_FORM

    def breakpoints(self) -> List[float]:
        """Phases in (0, 1) where the profile is not smooth."""
        if self.kind == "triangle":
            return [0.5]
        if self.kind == "square":
            return [self.duty]
        if self.kind == "tabulated":
            return [t for t, _ in self.table[1:-1]]
        return []

    def profile(self, t):
        """Function value at normalized phase t in [0, 1) (array friendly)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sawtooth":
            return self.amplitude * self.period_value * t
        if self.kind == "triangle":
            return self.amplitude * (1.0 - np.abs(2.0 * t - 1.0))
        if self.kind == "square":
            low, high = self.levels
            return np.where(t < self.duty, high, low)
        if self.kind == "trig-polynomial":
            out = np.zeros_like(t)
            if self.cos_coeffs:
                out = out + self.cos_coeffs[0]
            for k, a in enumerate(self.cos_coeffs[1:], start=1):
                out = out + a * np.cos(2 * np.pi * k * t)
            for k, b in enumerate(self.sin_coeffs[1:], start=1):
                out = out + b * np.sin(2 * np.pi * k * t)
            return out
        ts, vals = self._table_arrays
        return np.interp(t, ts, vals)

    @functools.cached_property
    def _table_arrays(self):
        ts = np.array([t for t, _ in self.table])
        vals = np.array([v for _, v in self.table])
        return ts, vals

    def __call__(self, x):
        return evaluate(self, x)


def sawtooth(period, amplitude: float = 1.0) -> PeriodicFunctionSpec:
    return PeriodicFunctionSpec("sawtooth", period, amplitude=amplitude)


def triangle(period, amplitude: float = 1.0) -> PeriodicFunctionSpec:
    return PeriodicFunctionSpec("triangle", period, amplitude=amplitude)


def square(period, low: float = 0.0, high: float = 1.0, duty: float = 0.5) -> PeriodicFunctionSpec:
    return PeriodicFunctionSpec("square", period, levels=(low, high), duty=duty)


def trig_polynomial(period, cos_coeffs=(), sin_coeffs=()) -> PeriodicFunctionSpec:
    """``cos_coeffs[k]``/``sin_coeffs[k]`` multiply harmonic k; ``sin_coeffs[0]`` is ignored."""
    return PeriodicFunctionSpec(
        "trig-polynomial", period, cos_coeffs=tuple(map(float, cos_coeffs)),
        sin_coeffs=tuple(map(float, sin_coeffs)),
    )


def cosine(period) -> PeriodicFunctionSpec:
    return trig_polynomial(period, cos_coeffs=(0.0, 1.0))


def constant(value: float = 1.0, period=1) -> PeriodicFunctionSpec:
    """A constant function; its nominal period carries no information."""
    return trig_polynomial(period, cos_coeffs=(value,))


def tabulated(xs: Sequence[float], values: Sequence[float], period=None) -> PeriodicFunctionSpec:
    """Build a tabulated function from samples covering exactly one period."""
    xs = [Fraction(str(x)) if not isinstance(x, Fraction) else x for x in xs]
    if len(xs) < 2:
        raise ValueError("need at least two samples")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("x must be strictly increasing")
    span = xs[-1] - xs[0]
    if period is None:
        period = span
    if Fraction(period) != span:
        raise ValueError(f"samples cover {span}, not one period {period}")
    table = tuple((float((x - xs[0]) / span), float(v)) for x, v in zip(xs, values))
    return PeriodicFunctionSpec("tabulated", Fraction(period), table=table, origin=float(xs[0]))


def load_tabulated_csv(path) -> PeriodicFunctionSpec:
    """Read a ``x,phi_x`` CSV (header required) covering exactly one period."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "phi_x"]:
            raise ValueError(f"{path}: expected header 'x,phi_x'")
        xs, vals = [], []
        for row in reader:
            if not row:
                continue
            xs.append(Fraction(row[0].strip()))
            vals.append(float(row[1]))
    return tabulated(xs, vals)


def phase(spec: PeriodicFunctionSpec, x):
    """Normalized phase frac((x - origin) / P) in [0, 1)."""
    t = np.mod((np.asarray(x, dtype=float) - spec.origin) / spec.period_value, 1.0)
    # mod can return exactly 1.0 for tiny negative inputs
    return np.where(t >= 1.0, 0.0, t)


def evaluate(spec: PeriodicFunctionSpec, x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("evaluate needs finite x")
    out = spec.profile(phase(spec, arr))
    return float(out) if np.ndim(out) == 0 else out


def analytic_coefficient(spec: PeriodicFunctionSpec, n: int) -> Optional[complex]:
    """Closed-form c_n where one is known, else None."""
    if spec.kind == "sawtooth":
        scale = spec.amplitude * spec.period_value
        return complex(scale / 2) if n == 0 else scale * 1j / (2 * math.pi * n)
    if spec.kind == "triangle":
        if n == 0:
            return complex(spec.amplitude / 2)
        if n % 2 == 0:
            return 0j
        return complex(-2 * spec.amplitude / (math.pi ** 2 * n * n))
    if spec.kind == "square":
        low, high = spec.levels
        d = spec.duty
        if n == 0:
            return complex(high * d + low * (1 - d))
        return (high - low) * (1 - np.exp(-2j * math.pi * n * d)) / (2j * math.pi * n)
    if spec.kind == "trig-polynomial":
        k = abs(n)
        a = spec.cos_coeffs[k] if k < len(spec.cos_coeffs) else 0.0
        if k == 0:
            return complex(a)
        b = spec.sin_coeffs[k] if k < len(spec.sin_coeffs) else 0.0
        return complex(a / 2, -b / 2 if n > 0 else b / 2)
    return None


def _pieces(spec: PeriodicFunctionSpec) -> List[Tuple[float, float]]:
    edges = [0.0, *spec.breakpoints(), 1.0]
    return list(zip(edges, edges[1:]))


@functools.lru_cache(maxsize=65536)
def fourier_coefficient(spec: PeriodicFunctionSpec, n: int) -> complex:
    """c_n = (1/P) int_0^P exp(-2 pi i x n / P) phi(x) dx by adaptive quadrature.

    Integrates piecewise between the kind's breakpoints in the normalized
    variable t = x / P, using QUADPACK's oscillatory-weight rule for n != 0.
    """
    if n < 0:
        return fourier_coefficient(spec, -n).conjugate()
    f = spec.profile
    re = im = 0.0
    worst = 0.0
    for lo, hi in _pieces(spec):
        if n == 0:
            val, err = integrate.quad(f, lo, hi, epsabs=QUAD_TOL / 10, epsrel=0, limit=200)
            re += val
            worst += err
            continue
        w = 2 * math.pi * n
        c, err_c = integrate.quad(f, lo, hi, weight="cos", wvar=w, epsabs=QUAD_TOL / 10, epsrel=0, limit=200)
        s, err_s = integrate.quad(f, lo, hi, weight="sin", wvar=w, epsabs=QUAD_TOL / 10, epsrel=0, limit=200)
        re += c
        im -= s
        worst += err_c + err_s
    if worst > QUAD_TOL:
        raise QuadratureError(n, worst)
    return complex(re, im)


def mean_square(spec: PeriodicFunctionSpec) -> float:
    """(1/P) int_0^P |phi|^2 dx."""
    total = 0.0
    for lo, hi in _pieces(spec):
        val, _ = integrate.quad(lambda t: spec.profile(t) ** 2, lo, hi, epsabs=1e-12, limit=200)
        total += val
    return total


@dataclass(frozen=True)
class LatticeComb:
    """delta_P(y) times a scalar factor: mass only at y = n / P.

    ``coefficients`` maps the lattice index n to the scalar factor c(n) at
    y = n / P, tabulated for |n| <= n_max.
    """

    period: Period
    coefficients: Dict[int, complex]

    @property
    def n_max(self) -> int:
        return max(abs(n) for n in self.coefficients)

    def support(self) -> list:
        """Lattice points n / P (exact Fractions for rational P)."""
        if is_rational(self.period):
            return [Fraction(n) / self.period for n in sorted(self.coefficients)]
        return [n / float(self.period) for n in sorted(self.coefficients)]

    def __getitem__(self, n: int) -> complex:
        return self.coefficients.get(n, 0j)


def fourier_transform(spec: PeriodicFunctionSpec, n_max: int) -> LatticeComb:
    if n_max < 1:
        raise ValueError("n_max must be positive")
    return LatticeComb(spec.period, {n: fourier_coefficient(spec, n) for n in range(-n_max, n_max + 1)})


@functools.lru_cache(maxsize=256)
def _coefficient_vector(spec: PeriodicFunctionSpec, n_terms: int) -> np.ndarray:
    return np.array([fourier_coefficient(spec, n) for n in range(-n_terms, n_terms + 1)])


def reconstruct(spec: PeriodicFunctionSpec, x, n_terms: int):
    """Truncated inverse transform Re sum_{|n|<=N} c_n exp(+2 pi i n x / P).

    Uses the e^{+} kernel, the conjugate of the forward one.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    coeffs = _coefficient_vector(spec, n_terms)
    ns = np.arange(-n_terms, n_terms + 1)
    t = (np.atleast_1d(np.asarray(x, dtype=float)) - spec.origin) / spec.period_value
    vals = np.exp(2j * np.pi * np.outer(t, ns)) @ coeffs
    out = vals.real
    return float(out[0]) if np.ndim(x) == 0 else out


@functools.lru_cache(maxsize=32)
def _sample_phases(n_samples: int) -> np.ndarray:
    return qmc.Halton(d=1, scramble=False).random(n_samples)[:, 0]


def sample_points(spec: PeriodicFunctionSpec, n_samples: int) -> np.ndarray:
    """Deterministic low-discrepancy points in [0, 2P)."""
    return spec.origin + 2 * spec.period_value * _sample_phases(n_samples)


def period_defect(spec: PeriodicFunctionSpec, alpha: float, n_samples: int = 1000) -> float:
    """max |phi(x + alpha) - phi(x)| over the fixed sample points."""
    x = sample_points(spec, n_samples)
    return float(np.max(np.abs(evaluate(spec, x + float(alpha)) - evaluate(spec, x))))


def is_period(spec: PeriodicFunctionSpec, alpha, epsilon: float = EPS_CLOSED_FORM, n_samples: int = 1000) -> bool:
    alpha = float(alpha)
    if alpha <= 0 or epsilon <= 0:
        raise ValueError("alpha and epsilon must be positive")
    return period_defect(spec, alpha, n_samples) <= epsilon
