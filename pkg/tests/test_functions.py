import math
from fractions import Fraction

import numpy as np
import pytest

from cvshor import functions as fm
from cvshor.functions import (
    QuadratureError,
    analytic_coefficient,
    constant,
    cosine,
    evaluate,
    fourier_coefficient,
    fourier_transform,
    is_period,
    load_tabulated_csv,
    mean_square,
    period_defect,
    reconstruct,
    sawtooth,
    square,
    tabulated,
    trig_polynomial,
    triangle,
)
from cvshor.periods import make_sqrt


def _tab():
    # piecewise linear bump over one period of length 2
    return tabulated([0, 0.5, 1.0, 1.5, 2.0], [0.0, 1.0, 0.25, 0.75, 0.0])


REGISTERED = [
    sawtooth(5),
    sawtooth(Fraction(5, 3)),
    triangle(1),
    triangle(make_sqrt(2)),
    square(1),
    square(Fraction(7, 2), low=-1.0, high=2.0, duty=0.3),
    cosine(5),
    trig_polynomial(3, cos_coeffs=(0.2, 1.0, 0.0, 0.5), sin_coeffs=(0.0, 0.0, 0.7)),
    _tab(),
]


def test_evaluate_examples():
    assert evaluate(sawtooth(5), 7.5) == pytest.approx(2.5, abs=1e-12)
    assert evaluate(square(1), 0.25) == 1.0
    for spec in REGISTERED:
        assert evaluate(spec, 0.0) == pytest.approx(evaluate(spec, spec.period_value), abs=1e-9)


def test_evaluate_rejects_non_finite():
    with pytest.raises(ValueError):
        evaluate(triangle(1), float("nan"))


@pytest.mark.parametrize("spec", REGISTERED, ids=lambda s: f"{s.kind}-{s.period}")
def test_periodicity_and_minimality(spec):
    rng = np.random.default_rng(5)
    x = rng.uniform(-10, 10, 1000)
    assert np.max(np.abs(evaluate(spec, x + spec.period_value) - evaluate(spec, x))) <= spec.epsilon
    for k in (2, 3, 5, 7):
        shifted = evaluate(spec, x + spec.period_value / k)
        assert np.max(np.abs(shifted - evaluate(spec, x))) > spec.epsilon


def test_continuity_flags():
    assert not sawtooth(1).continuous
    assert not square(1).continuous
    assert triangle(1).continuous
    assert cosine(2).continuous
    assert _tab().continuous
    assert not tabulated([0, 1, 2], [0.0, 1.0, 0.5]).continuous


def test_fourier_coefficient_examples():
    saw = sawtooth(1)
    assert fourier_coefficient(saw, 0) == pytest.approx(0.5, abs=1e-12)
    c3 = fourier_coefficient(saw, 3)
    assert c3 == pytest.approx(1j / (6 * math.pi), abs=1e-12)
    assert abs(c3) == pytest.approx(1 / (6 * math.pi), abs=1e-12)
    for n in (1, 2, 5, -4):
        assert abs(fourier_coefficient(constant(2.0), n)) < 1e-12


@pytest.mark.parametrize(
    "spec", [sawtooth(1), sawtooth(Fraction(5, 3), 0.5), triangle(1), square(1), square(2, -1, 3, 0.3),
             trig_polynomial(1, (0.1, 0.3, 0.2), (0, 0.4, -0.6))],
    ids=lambda s: s.kind,
)
def test_quadrature_matches_closed_form(spec):
    for n in range(-64, 65):
        assert abs(fourier_coefficient(spec, n) - analytic_coefficient(spec, n)) <= 1e-8


def test_tabulated_quadrature_matches_trapezoid_integral():
    # exact coefficient of a piecewise linear function, summed segment by segment
    spec = _tab()
    ts, vs = spec._table_arrays
    for n in (0, 1, 2, 7):
        fine = np.linspace(0, 1, 400_001)
        vals = np.interp(fine, ts, vs) * np.exp(-2j * np.pi * n * fine)
        ref = np.trapezoid(vals, fine) if hasattr(np, "trapezoid") else np.trapz(vals, fine)
        assert abs(fourier_coefficient(spec, n) - ref) < 1e-9


def test_quadrature_error_reported(monkeypatch):
    monkeypatch.setattr(fm.integrate, "quad", lambda *a, **k: (0.0, 1e-3))
    fm.fourier_coefficient.cache_clear()
    with pytest.raises(QuadratureError) as info:
        fourier_coefficient(triangle(3), 2)
    assert info.value.achieved > fm.QUAD_TOL
    fm.fourier_coefficient.cache_clear()


def test_fourier_transform_examples():
    comb = fourier_transform(sawtooth(5), 8)
    assert comb.support() == [Fraction(n, 5) for n in range(-8, 9)]
    cos_comb = fourier_transform(cosine(1), 2)
    for n in range(-2, 3):
        expected = 0.5 if abs(n) == 1 else 0.0
        assert cos_comb[n] == pytest.approx(expected, abs=1e-12)
    one = fourier_transform(constant(1.0), 3)
    assert one[0] == pytest.approx(1.0, abs=1e-12)
    assert all(abs(one[n]) < 1e-12 for n in range(-3, 4) if n)


def test_reconstruct_examples():
    for x in (0.0, 0.3, 12.7):
        assert reconstruct(constant(1.0), x, 5) == pytest.approx(1.0, abs=1e-12)
    assert reconstruct(triangle(1), 0.25, 100) == pytest.approx(evaluate(triangle(1), 0.25), abs=0.01)
    assert reconstruct(sawtooth(1), 0.5, 500) == pytest.approx(0.5, abs=0.01)


def test_reconstruct_uses_conjugate_kernel():
    # with the forward kernel the sine content would flip sign
    spec = trig_polynomial(1, (0.0,), (0.0, 1.0))
    assert reconstruct(spec, 0.25, 3) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("spec", [sawtooth(1), triangle(2), square(1), _tab()], ids=lambda s: s.kind)
def test_parseval_partial_sums(spec):
    bound = mean_square(spec)
    partial = [sum(abs(fourier_coefficient(spec, n)) ** 2 for n in range(-N, N + 1)) for N in range(0, 40, 3)]
    assert all(b >= a - 1e-12 for a, b in zip(partial, partial[1:]))
    assert partial[-1] <= bound + 1e-6


@pytest.mark.parametrize("spec", [triangle(1), cosine(2), _tab()], ids=lambda s: s.kind)
def test_reconstruction_error_shrinks(spec):
    x = spec.origin + spec.period_value * np.linspace(0.01, 0.99, 97)
    truth = evaluate(spec, x)
    errs = [np.max(np.abs(reconstruct(spec, x, n) - truth)) for n in (25, 50, 100, 200, 400)]
    assert all(b <= 1.1 * a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_is_period_examples():
    saw = sawtooth(5)
    assert is_period(saw, 5, 1e-9, 1000)
    assert is_period(saw, 10, 1e-9, 1000)
    assert not is_period(saw, 2.5, 1e-9, 1000)
    assert period_defect(saw, 2.5) == pytest.approx(2.5, abs=1e-9)


def test_is_period_is_deterministic_and_validates():
    assert period_defect(triangle(1), 0.37) == period_defect(triangle(1), 0.37)
    with pytest.raises(ValueError):
        is_period(triangle(1), 0, 1e-9)
    with pytest.raises(ValueError):
        is_period(triangle(1), 1, 0)


def test_load_tabulated_csv(tmp_path):
    path = tmp_path / "phi.csv"
    path.write_text("x,phi_x\n1.0,0\n1.5,2\n2.0,1\n3.0,0\n")
    spec = load_tabulated_csv(path)
    assert spec.period == Fraction(2)
    assert evaluate(spec, 1.5) == pytest.approx(2.0)
    assert evaluate(spec, 3.5) == pytest.approx(2.0)
    assert evaluate(spec, 2.5) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "body", ["a,b\n0,1\n1,1\n", "x,phi_x\n0,1\n0,2\n1,1\n", "x,phi_x\n0,1\n"],
)
def test_load_tabulated_csv_rejects(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ValueError):
        load_tabulated_csv(path)
