import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from cvshor.functions import constant, is_period, sawtooth, square, triangle, cosine
from cvshor.periods import make_sqrt
from cvshor.recovery import (
    RecoveryConfig,
    condition_a,
    golden_section,
    is_minimal,
    part1_sample_pair,
    part2_match,
    recover_integer_period,
    recover_irrational_period,
    recover_rational_period,
)
from cvshor.simulator import MeasurementOutcome, lattice_weights


def test_recover_integer_period_examples():
    assert recover_integer_period(MeasurementOutcome(0, 50, "ideal"), 50, 5, sawtooth(5), 1e-9) is None
    assert recover_integer_period(MeasurementOutcome(6, 20, "ideal"), 20, 3, sawtooth(3), 1e-9) == 3
    assert recover_integer_period(MeasurementOutcome(20, 50, "ideal"), 50, 5, sawtooth(5), 1e-9) == 5


def test_recover_integer_period_needs_large_q():
    with pytest.raises(ValueError):
        recover_integer_period(MeasurementOutcome(6, 20, "ideal"), 20, 5, sawtooth(5), 1e-9)


def test_part1_constant_gives_zero_pair():
    o1, o2 = part1_sample_pair(constant(1.0), RecoveryConfig(Q=50), np.random.default_rng(0))
    assert (o1.m, o2.m) == (0, 0)


def test_part1_reproducible():
    spec, cfg = sawtooth(Fraction(5, 3)), RecoveryConfig(Q=50)
    a = part1_sample_pair(spec, cfg, np.random.default_rng(17))
    b = part1_sample_pair(spec, cfg, np.random.default_rng(17))
    assert a == b


def test_part1_marginals_match_lattice_weights():
    spec, cfg = sawtooth(5), RecoveryConfig(Q=50)
    lw = lattice_weights(spec, cfg.resolve_n_max(spec), cfg.weighting)
    expected = 10_000 * lw.weights
    rng = np.random.default_rng(2)
    pairs = [part1_sample_pair(spec, cfg, rng) for _ in range(10_000)]
    for side in (0, 1):
        idx = [p[side].lattice_index for p in pairs]
        observed = [idx.count(int(n)) for n in lw.indices]
        assert stats.chisquare(observed, expected).pvalue > 1e-3


def test_part2_examples():
    assert part2_match(30, 60, 50, sawtooth(Fraction(5, 3)), 1e-9) == Fraction(5, 3)
    assert part2_match(0, 0, 50, sawtooth(5), 1e-9) is None
    assert part2_match(10, 30, 50, sawtooth(5), 1e-9) == 5


def test_condition_a():
    assert condition_a(1, 2, 5)
    assert not condition_a(2, 4, 5)
    assert not condition_a(5, 3, 5)
    assert condition_a(None, 3, 5) is None
    assert condition_a(-3, 2, 5)


def test_part2_exhaustive_under_condition_a():
    failures = []
    for a in range(2, 21):
        Q = 2 * a * a
        for b in range(1, a):
            if math.gcd(a, b) != 1:
                continue
            spec = sawtooth(Fraction(a, b))
            for n1 in range(1, a):
                for n2 in range(1, a):
                    if not condition_a(n1, n2, a):
                        continue
                    m1, m2 = Q * n1 * b // a, Q * n2 * b // a
                    if part2_match(m1, m2, Q, spec, 1e-9) != Fraction(a, b):
                        failures.append((a, b, n1, n2))
    assert failures == []


def test_recover_rational_examples():
    res = recover_rational_period(sawtooth(5), RecoveryConfig(Q=50, seed=42))
    assert res.period == 5 and res.minimal
    assert is_period(sawtooth(5), res.period, 1e-9)

    res = recover_rational_period(sawtooth(Fraction(5, 3)), RecoveryConfig(Q=50, seed=1))
    assert res.period == Fraction(5, 3)


def test_recover_constant_fails():
    res = recover_rational_period(constant(1.0), RecoveryConfig(Q=50, max_iterations=5))
    assert not res.success and res.iterations_used == 5 and len(res.samples) == 5


def test_recover_rejects_small_q_and_irrational():
    with pytest.raises(ValueError):
        recover_rational_period(sawtooth(5), RecoveryConfig(Q=49))
    with pytest.raises(ValueError):
        recover_rational_period(triangle(make_sqrt(2)), RecoveryConfig())


def test_auto_q():
    assert RecoveryConfig().resolve_Q(sawtooth(Fraction(5, 3))) == 50
    assert RecoveryConfig(period_bound=7).resolve_Q(sawtooth(5)) == 98


def test_reproducible_results():
    spec = triangle(Fraction(7, 4))
    r1 = recover_rational_period(spec, RecoveryConfig(seed=123))
    r2 = recover_rational_period(spec, RecoveryConfig(seed=123))
    assert r1.to_json() == r2.to_json()


@pytest.mark.parametrize(
    "spec",
    [sawtooth(Fraction(7, 2)), triangle(Fraction(9, 4)), square(3), cosine(Fraction(11, 5))],
    ids=lambda s: f"{s.kind}-{s.period}",
)
def test_returned_period_valid_and_minimal(spec):
    for seed in range(5):
        res = recover_rational_period(spec, RecoveryConfig(seed=seed))
        assert res.success
        eps = spec.epsilon
        assert is_period(spec, res.period, eps)
        assert is_minimal(spec, res.period, eps)
        assert res.period == spec.period


def test_grid_mode_recovery():
    res = recover_rational_period(sawtooth(1), RecoveryConfig(Q=50, mode="grid", seed=3, period_bound=5))
    assert res.period == 1
    assert res.condition_a == [None] * res.iterations_used


def test_result_json_round_trip():
    res = recover_rational_period(sawtooth(Fraction(5, 3)), RecoveryConfig(seed=42))
    data = json.loads(json.dumps(res.to_json()))
    assert data["period"] == {"numer": 5, "denom": 3}
    assert data["Q"] == 50 and data["iterations_used"] == len(data["samples"])
    assert set(data["samples"][0][0]) == {"m", "Q", "n"}


def test_golden_section_brackets_minimum():
    lo, hi = golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-6)
    assert hi - lo <= 1e-6 and lo <= 0.3 <= hi


def test_irrational_sqrt2():
    res = recover_irrational_period(triangle(make_sqrt(2)), 1e-4, RecoveryConfig(seed=0))
    lo, hi = res.period
    assert hi - lo <= 1e-4 and lo <= math.sqrt(2) <= hi
    assert json.loads(json.dumps(res.to_json()))["period"] == {"lo": lo, "hi": hi}


def test_irrational_rational_consistency():
    res = recover_irrational_period(triangle(2), 1e-6, RecoveryConfig(seed=0))
    lo, hi = res.period
    assert hi - lo <= 1e-6 and lo <= 2 <= hi


def test_irrational_requires_continuity():
    with pytest.raises(ValueError):
        recover_irrational_period(sawtooth(make_sqrt(2)), 1e-4, RecoveryConfig())
    with pytest.raises(ValueError):
        recover_irrational_period(triangle(make_sqrt(2)), 0.0, RecoveryConfig())


def test_irrational_reproducible():
    spec = cosine(make_sqrt(3))
    r1 = recover_irrational_period(spec, 1e-5, RecoveryConfig(seed=8))
    r2 = recover_irrational_period(spec, 1e-5, RecoveryConfig(seed=8))
    assert r1.to_json() == r2.to_json()
    lo, hi = r1.period
    assert lo <= math.sqrt(3) <= hi
