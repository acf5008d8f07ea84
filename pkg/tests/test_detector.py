import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from massosc.core import SpaceTimePoint
from massosc.detector import (SERIES_WINDOW, WellDetector, enumerate_modes, shift_phase,
                              sin_over_quadratic, well_mode_mass, well_space_factor,
                              well_time_factor)

mp.mp.dps = 40


def direct(z, n):
    """High-precision reference for sin(z/2 - n pi/2) / (z^2 - (n pi)^2)."""
    z = mp.mpf(z)
    return float(mp.sin(z / 2 - n * mp.pi / 2) / (z * z - (n * mp.pi) ** 2))


def test_shift_phase():
    assert shift_phase(1.0, 1.0, SpaceTimePoint(0, 0)) == 1
    assert shift_phase(math.pi, 0.0, SpaceTimePoint(1, 0)) == pytest.approx(-1 + 0j, abs=1e-15)
    m3 = 0.1025
    assert shift_phase(m3, 0.0, SpaceTimePoint(20, 20)) == pytest.approx(np.exp(20j * m3), abs=1e-15)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-10, 10), st.floats(-10, 10))
def test_shift_phase_unit_modulus(k0, k1, s, X):
    assert abs(shift_phase(k0, k1, SpaceTimePoint(s, X))) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n0,n1,L0,L1,expected", [
    (1, 1, math.pi, math.pi, 0.0),
    (2, 1, 2, 2, 0.75 * math.pi ** 2),
    (1, 2, 1, 1, -3 * math.pi ** 2),
])
def test_well_mode_mass(n0, n1, L0, L1, expected):
    assert well_mode_mass(n0, n1, L0, L1) == pytest.approx(expected, abs=1e-14)


@given(st.integers(1, 20), st.integers(1, 20), st.floats(0.1, 100), st.floats(0.1, 100),
       st.floats(0.1, 10))
def test_mode_mass_scaling(n0, n1, L0, L1, a):
    got = well_mode_mass(n0, n1, a * L0, a * L1)
    ref = well_mode_mass(n0, n1, L0, L1) / a ** 2
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-12 * abs(well_mode_mass(n0, 0, L0, L1)) / a ** 2)


@pytest.mark.parametrize("n0", [1, 2, 7])
def test_time_factor_at_singularity(n0):
    L0 = 3.0
    u = n0 * math.pi / L0
    assert well_time_factor(u, n0, L0) == pytest.approx(1 / (4 * n0 * math.pi), rel=1e-10)


def test_time_factor_at_zero():
    assert well_time_factor(0.0, 1, 1.0) == pytest.approx(1 / math.pi ** 2, rel=1e-14)


def test_time_factor_near_singularity():
    # reference: 40-digit evaluation of the direct formula at pi + 1e-9
    got = well_time_factor(math.pi + 1e-9, 1, 1.0)
    assert got == pytest.approx(0.07957747153328251993, rel=1e-8)
    assert got == pytest.approx(1 / (4 * math.pi), rel=1e-8)


def test_time_factor_rejects_negative():
    with pytest.raises(ValueError):
        well_time_factor(-1.0, 1, 1.0)


@pytest.mark.parametrize("n1", [1, 2, 3])
def test_space_factor_both_singularities(n1):
    L1 = 2.0
    k = n1 * math.pi / L1
    assert well_space_factor(k, n1, L1) == pytest.approx(1 / (4 * n1 * math.pi), rel=1e-12)
    assert well_space_factor(-k, n1, L1) == pytest.approx((-1) ** (n1 + 1) / (4 * n1 * math.pi),
                                                          rel=1e-12)


def test_space_factor_zero():
    assert well_space_factor(0.0, 2, 1.0) == pytest.approx(0.0, abs=1e-17)


@given(st.floats(-60, 60).filter(lambda z: min(abs(abs(z) - n * math.pi) for n in (1, 2, 3)) > 1e-3),
       st.integers(1, 3))
def test_matches_direct_formula(z, n):
    assert sin_over_quadratic(z, n) == pytest.approx(direct(z, n), rel=1e-11, abs=1e-17)


@given(st.floats(0.01, 30), st.integers(1, 4))
def test_space_parity(k, n1):
    # parity check against the direct formula at -k
    assert well_space_factor(-k, n1, 1.0) == pytest.approx(direct(-k, n1), rel=1e-10, abs=1e-17)


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("side", [-1, 1])
def test_series_window_stitch(n, side):
    a = n * math.pi
    inside = a + side * SERIES_WINDOW * (1 - 1e-9)
    outside = a + side * SERIES_WINDOW * (1 + 1e-9)
    vi, vo = sin_over_quadratic(inside, n), sin_over_quadratic(outside, n)
    assert vi == pytest.approx(direct(inside, n), rel=1e-12)
    assert vo == pytest.approx(direct(outside, n), rel=1e-12)
    assert abs(vi - vo) / abs(vo) < 1e-10


def test_enumerate_modes_order():
    d = WellDetector(2.0, 3.0, n0_max=2, n1_max=2)
    assert [(m.n0, m.n1) for m in enumerate_modes(d)] == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_symmetric_well_single_mode():
    (m,) = enumerate_modes(WellDetector(5.0, 5.0, n0_max=1, n1_max=1))
    assert m.mD_sq == 0.0 and m.physical


def test_tachyonic_modes_kept_in_enumeration():
    modes = enumerate_modes(WellDetector(1.0, 1.0, n0_max=1, n1_max=3))
    assert [m.physical for m in modes] == [True, False, False]


def test_well_validation():
    with pytest.raises(ValueError):
        WellDetector(0.0, 1.0)
    with pytest.raises(ValueError):
        WellDetector(1.0, 1.0, phase_variant="shifted")
    assert WellDetector(1.0, 1.0).time_offset == 1.0
    assert WellDetector(1.0, 1.0, phase_variant="center").time_offset == 0.5
