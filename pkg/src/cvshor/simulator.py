"""Finite simulation of the two-register period-finding circuit.

Two routes are available:

* grid mode discretizes the left register to ``M * W`` points spanning
  ``W`` periods, loads phi(x) into value bins of the right register, applies
  a DFT to the left index per bin and measures;
* ideal mode samples the lattice index n of ``|n/P>`` directly from weights
  tabulated once per (function, window).
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .functions import PeriodicFunctionSpec, fourier_coefficient
from .periods import Period, floor_q_times, is_rational

EPS_BIN = 1e-9
IDEAL_GRID_MIN = 1024
WEIGHTINGS = ("register", "coefficient")


@dataclass(frozen=True, eq=False)
class DiscretizedTwoRegisterState:
    """Amplitudes indexed by (value bin, left grid index).

    Row ``b`` holds the left-register amplitudes entangled with right
    register value ``value_bins[b]``.
    """

    amplitudes: np.ndarray
    M: int
    W: int
    period: Period
    value_bins: Tuple[float, ...]
    transformed: bool = False

    @property
    def size(self) -> int:
        return self.M * self.W

    @property
    def x_step(self) -> float:
        return float(self.period) / self.M

    def total_probability(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class MeasurementOutcome:
    m: int
    Q: int
    mode: str
    lattice_index: Optional[int] = None

    @property
    def eigenvalue(self) -> Fraction:
        return Fraction(self.m, self.Q)

    def to_json(self) -> dict:
        out = {"m": self.m, "Q": self.Q}
        if self.lattice_index is not None:
            out["n"] = self.lattice_index
        return out


def cluster_values(values: np.ndarray, tol: float = EPS_BIN) -> Tuple[np.ndarray, np.ndarray]:
    """Group values that agree within ``tol``; returns (bin id per value, representatives)."""
    order = np.argsort(values, kind="stable")
    ids = np.empty(len(values), dtype=np.int64)
    reps = []
    start = None
    for idx in order:
        v = values[idx]
        if start is None or v - start > tol:
            start = v
            reps.append(v)
        ids[idx] = len(reps) - 1
    return ids, np.array(reps)


def prepare_superposition(spec: PeriodicFunctionSpec, M: int, W: int) -> DiscretizedTwoRegisterState:
    """Uniform superposition over the left grid with phi loaded on the right."""
    if M < 2 or W < 1:
        raise ValueError("need M >= 2 and W >= 1")
    j = np.arange(M * W)
    # exact phase (j mod M) / M keeps repeated values bit-identical
    values = np.asarray(spec.profile((j % M) / M), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("function produced non-finite values on the grid")
    ids, reps = cluster_values(values)
    amps = np.zeros((len(reps), M * W), dtype=complex)
    amps[ids, j] = 1.0 / math.sqrt(M * W)
    return DiscretizedTwoRegisterState(amps, M, W, spec.period, tuple(reps.tolist()))


def apply_fourier(state: DiscretizedTwoRegisterState) -> DiscretizedTwoRegisterState:
    """Unitary DFT over the left index, separately within each value bin."""
    amps = np.fft.fft(state.amplitudes, axis=1, norm="ortho")
    return DiscretizedTwoRegisterState(amps, state.M, state.W, state.period, state.value_bins, True)


@dataclass(frozen=True, eq=False)
class LeftRegisterDistribution:
    """Probability per DFT frequency; index k is stored unsigned (0..MW-1)."""

    probabilities: np.ndarray
    M: int
    W: int
    period: Period

    @property
    def size(self) -> int:
        return self.M * self.W

    def signed(self, k: int) -> int:
        # above Nyquist -> negative alias
        return k - self.size if k > self.size // 2 else k

    def y_of(self, k: int):
        """Physical frequency k / (W P), exact for rational P."""
        ks = self.signed(k)
        if is_rational(self.period):
            return Fraction(ks) / (self.W * self.period)
        return ks / (self.W * float(self.period))

    def as_dict(self, threshold: float = 1e-15) -> Dict[int, float]:
        return {
            self.signed(k): float(p)
            for k, p in enumerate(self.probabilities)
            if p > threshold
        }

    def over_y(self, threshold: float = 0.0) -> Dict[object, float]:
        return {self.y_of(k): float(p) for k, p in enumerate(self.probabilities) if p > threshold}

    def off_lattice_mass(self) -> float:
        mask = np.arange(self.size) % self.W != 0
        return float(self.probabilities[mask].sum())

    def lattice_weights(self, n_max: int) -> Dict[int, float]:
        """Mass at k = n W for |n| <= n_max, renormalized over that window."""
        out = {}
        for n in range(-n_max, n_max + 1):
            out[n] = float(self.probabilities[(n * self.W) % self.size])
        total = sum(out.values())
        return {n: p / total for n, p in out.items()}


def left_register_distribution(state: DiscretizedTwoRegisterState) -> LeftRegisterDistribution:
    probs = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    return LeftRegisterDistribution(probs, state.M, state.W, state.period)


def _inverse_cdf(weights: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(weights)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, len(weights) - 1)


def measure_observable(dist, Q: int, rng: np.random.Generator) -> MeasurementOutcome:
    """Sample y from ``dist`` and report the staircase eigenvalue floor(Q y) / Q.

    ``dist`` is a ``LeftRegisterDistribution`` or a mapping y -> probability.
    """
    if Q < 1:
        raise ValueError("Q must be positive")
    if isinstance(dist, LeftRegisterDistribution):
        dist = dist.over_y()
    ys = list(dist.keys())
    weights = np.array([dist[y] for y in ys], dtype=float)
    if weights.sum() <= 0:
        raise ValueError("distribution has no mass")
    y = ys[_inverse_cdf(weights, rng)]
    m = math.floor(y * Q)
    return MeasurementOutcome(m=m, Q=Q, mode="grid")


@dataclass(frozen=True)
class LatticeWeights:
    indices: np.ndarray
    weights: np.ndarray
    retained_mass: float


def _register_weights(spec: PeriodicFunctionSpec, n_max: int) -> Tuple[np.ndarray, float]:
    """Squared norms of the right-register vectors paired with each |n/P>.

    One period is sampled on a fine grid; grid points with equal phi values
    share a right-register basis state and interfere, distinct values do not.
    """
    M = max(IDEAL_GRID_MIN, 1 << math.ceil(math.log2(4 * n_max + 1)))
    values = np.asarray(spec.profile(np.arange(M) / M), dtype=float)
    ids, reps = cluster_values(values)
    sizes = np.bincount(ids, minlength=len(reps))
    ns = np.arange(-n_max, n_max + 1)
    singles = int(np.sum(sizes == 1))
    w = np.full(len(ns), singles / M**2)
    multi = np.flatnonzero(sizes > 1)
    if len(multi):
        in_multi = np.isin(ids, multi)
        indicator = np.zeros((len(multi), M))
        indicator[np.searchsorted(multi, ids[in_multi]), np.flatnonzero(in_multi)] = 1.0
        spectrum = np.fft.fft(indicator, axis=1) / M
        w = w + np.sum(np.abs(spectrum[:, ns % M]) ** 2, axis=0)
    return w, float(w.sum())


@functools.lru_cache(maxsize=256)
def lattice_weights(spec: PeriodicFunctionSpec, n_max: int, weighting: str = "register") -> LatticeWeights:
    """Normalized sampling weights over n = -n_max..n_max.

    ``register`` (default) weighs n by the norm of the right-register state
    paired with |n/P>, the same quantity grid mode produces. ``coefficient``
    uses |c_n|^2 instead, treating phi as an amplitude profile.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ns = np.arange(-n_max, n_max + 1)
    if weighting == "register":
        w, retained = _register_weights(spec, n_max)
    elif weighting == "coefficient":
        w = np.array([abs(fourier_coefficient(spec, int(n))) ** 2 for n in ns])
        retained = float("nan")
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    total = w.sum()
    if not total > 0:
        raise ValueError(f"all lattice weights vanish for |n| <= {n_max}; widen the window")
    return LatticeWeights(ns, w / total, retained)


def default_n_max(period: Period) -> int:
    if is_rational(period):
        return 4 * period.denominator
    return 4 * math.ceil(float(period))


def ideal_lattice_sample(
    spec: PeriodicFunctionSpec,
    n_max: int,
    Q: int,
    rng: np.random.Generator,
    weighting: str = "register",
) -> MeasurementOutcome:
    """Draw n from the lattice weights, return m = floor(Q |n| / P)."""
    if Q < 1:
        raise ValueError("Q must be positive")
    lw = lattice_weights(spec, n_max, weighting)
    n = int(lw.indices[_inverse_cdf(lw.weights, rng)])
    return MeasurementOutcome(m=floor_q_times(abs(n), spec.period, Q), Q=Q, mode="ideal", lattice_index=n)


def distribution_rows(dist: LeftRegisterDistribution, threshold: float = 0.0):
    """(k, y, probability) rows in signed-frequency order."""
    rows = []
    for k in sorted(range(dist.size), key=dist.signed):
        p = float(dist.probabilities[k])
        if p > threshold:
            rows.append((dist.signed(k), dist.y_of(k), p))
    return rows


def lattice_rows(spec: PeriodicFunctionSpec, n_max: int, weighting: str = "register"):
    lw = lattice_weights(spec, n_max, weighting)
    if not is_rational(spec.period):
        raise ValueError("lattice rows need a rational period")
    return [(int(n), Fraction(int(n)) / spec.period, float(w)) for n, w in zip(lw.indices, lw.weights)]


def write_distribution_csv(rows, fh) -> None:
    """CSV with columns k,y_numer,y_denom,probability."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["k", "y_numer", "y_denom", "probability"])
    for k, y, p in rows:
        if not isinstance(y, Fraction):
            raise ValueError("CSV export needs exact rational frequencies")
        writer.writerow([k, y.numerator, y.denominator, repr(p)])
