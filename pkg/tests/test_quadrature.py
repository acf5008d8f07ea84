import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from massosc.core import PhysicalConfig, build_spectrum
from massosc.massshell import peak_intervals
from massosc.quadrature import QuadratureSpec, integrate_1d, integrate_2d_peaks

SPEC = QuadratureSpec()

# mpmath.quad at 40 digits, 40 subintervals, of exp(20 i sqrt(5 + x^2)) over [-1, 1]
OSC_REF = complex(-0.2022723444274130494, 0.7890233474998084447)


def test_constant():
    r = integrate_1d(lambda x: np.ones_like(x, dtype=complex), 0.0, 1.0)
    assert r.converged
    assert abs(r.value - 1) < 1e-14
    assert r.est_error < 1e-14


def test_full_periods_vanish():
    r = integrate_1d(lambda x: np.exp(40j * x), 0.0, 2 * math.pi, phase_rate=40.0)
    assert r.converged
    assert abs(r.value) < SPEC.abs_tol


def test_oscillatory_against_mpmath():
    s, m_sq = 20.0, 5.0
    r = integrate_1d(lambda x: np.exp(1j * s * np.sqrt(m_sq + x * x)), -1.0, 1.0,
                     phase_rate=lambda x: s * np.abs(x) / np.sqrt(m_sq + x * x))
    assert r.converged
    assert abs(r.value - OSC_REF) < 1e-12


def test_panel_sizing_resolves_phase():
    rate = 500.0
    r = integrate_1d(lambda x: np.exp(1j * rate * x), 0.0, 1.0, phase_rate=rate)
    width = 1.0 / r.panels_used
    assert rate * width <= SPEC.max_phase_per_panel
    exact = (np.exp(1j * rate) - 1) / (1j * rate)
    assert abs(r.value - exact) < 1e-12


def test_non_convergence_is_flagged():
    tight = QuadratureSpec(nodes_per_panel=2, max_panels=4, rel_tol=1e-14, abs_tol=1e-300)
    r = integrate_1d(lambda x: np.exp(1j * 300 * x), 0.0, 1.0, spec=tight)
    assert not r.converged
    assert r.panels_used <= 4


def test_nan_aborts():
    with pytest.raises(FloatingPointError):
        integrate_1d(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate_1d(np.cos, 1.0, 0.0)


def test_vector_valued():
    r = integrate_1d(lambda x: np.vstack([x, x ** 2]), 0.0, 1.0)
    assert r.value == pytest.approx([0.5, 1 / 3], rel=1e-14)


def test_2d_area_one_peak():
    peak = SimpleNamespace(lo=1.0, hi=1.5)
    r = integrate_2d_peaks(lambda m, k: np.ones(np.broadcast(m, k).shape, complex), [peak], -2.0, 1.0)
    assert r.value == pytest.approx(0.5 * 3.0, rel=1e-14)


def test_2d_area_paper_peaks():
    peaks = peak_intervals(build_spectrum(PhysicalConfig()))
    r = integrate_2d_peaks(lambda m, k: np.ones(np.broadcast(m, k).shape, complex), peaks, -1.0, 1.0)
    expected = sum(4 * p.center_mass * 7.6e-8 for p in peaks) * 2
    assert r.value.real == pytest.approx(expected, rel=1e-13, abs=0)


def test_2d_per_peak():
    peaks = [SimpleNamespace(lo=0.0, hi=1.0), SimpleNamespace(lo=2.0, hi=4.0)]
    r = integrate_2d_peaks(lambda m, k: m + 0 * k + 0j, peaks, 0.0, 1.0, per_peak=True)
    assert r.value == pytest.approx([0.5, 6.0], rel=1e-14)


def _osc(s, X):
    return lambda x: np.exp(1j * (s * np.sqrt(0.01 + x * x) + X * x)) / np.sqrt(0.01 + x * x)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 60), st.floats(-60, 60), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                                                                 allow_infinity=False))
def test_linearity_and_conjugation(s, X, alpha):
    f = _osc(s, X)
    rate = lambda x: s * np.abs(x) / np.sqrt(0.01 + x * x) + abs(X)
    base = integrate_1d(f, -1.0, 1.0, rate)
    scaled = integrate_1d(lambda x: alpha * f(x), -1.0, 1.0, rate)
    conj = integrate_1d(lambda x: np.conj(f(x)), -1.0, 1.0, rate)
    assert abs(scaled.value - alpha * base.value) <= 2 * SPEC.rel_tol * abs(alpha * base.value) + SPEC.abs_tol
    assert conj.value == np.conj(base.value)


@pytest.mark.parametrize("s,X", [(5, 5), (20, 20), (40, 10), (0, 35)])
def test_refinement_monotonicity(s, X):
    rate = lambda x: s * np.abs(x) / np.sqrt(0.01 + x * x) + abs(X)
    a = integrate_1d(_osc(s, X), -1.0, 1.0, rate, SPEC)
    b = integrate_1d(_osc(s, X), -1.0, 1.0, rate, QuadratureSpec(nodes_per_panel=32))
    assert a.converged and b.converged
    assert abs(a.value - b.value) < 2 * SPEC.rel_tol * abs(b.value)
