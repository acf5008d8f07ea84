import pytest
from hypothesis import given, strategies as st

from massosc.core import (ConfigError, MassSpectrum, PhysicalConfig, build_spectrum,
                          validate)
from massosc.massshell import peak_intervals


def test_literal_spectrum_matches_parameter_block():
    sp = build_spectrum(PhysicalConfig(m1=0.1, dm2_12=7.6e-5, dm2_13=2.5e-3))
    assert sp.masses == pytest.approx((0.1, 0.100076, 0.1025), rel=1e-15)


def test_quadratic_spectrum():
    # reference values from mpmath at 40 digits
    sp = build_spectrum(PhysicalConfig(mass_convention="quadratic"))
    assert sp.masses[1] == pytest.approx(0.1003792807306368379, rel=1e-15)
    assert sp.masses[2] == pytest.approx(0.1118033988749894848, rel=1e-15)


def test_degenerate_splitting_rejected():
    with pytest.raises(ConfigError):
        build_spectrum(PhysicalConfig(m1=1.0, dm2_12=0.0, dm2_13=0.5))


def test_unknown_convention():
    with pytest.raises(ConfigError):
        build_spectrum(PhysicalConfig(mass_convention="cubic"))


def test_paper_config_is_clean():
    assert validate(PhysicalConfig()) == []


def test_delta2_equal_to_m1_is_an_error():
    diags = validate(PhysicalConfig(delta2=0.1))
    assert [d.severity for d in diags] == ["error"]
    assert "peak intervals overlap or reach zero" in diags[0].message


def test_narrow_profile_warns():
    diags = validate(PhysicalConfig(delta0=0.1 * 7.6e-5))
    assert diags and all(d.severity == "warning" for d in diags)
    assert any("covers only one mass peak" in d.message for d in diags)


@pytest.mark.parametrize("bad", [dict(m1=-1.0), dict(W=0.0), dict(m0_index=4),
                                 dict(dm2_12=3e-3)])
def test_invalid_fields(bad):
    assert any(d.severity == "error" for d in validate(PhysicalConfig(**bad)))


def test_mass_spectrum_requires_increasing():
    with pytest.raises(ConfigError):
        MassSpectrum((0.2, 0.1, 0.3), 1e-6)


@pytest.mark.parametrize("convention", ["literal", "quadratic"])
def test_paper_peaks_are_disjoint(convention):
    peaks = peak_intervals(build_spectrum(PhysicalConfig(mass_convention=convention)))
    assert all(a.hi < b.lo for a, b in zip(peaks, peaks[1:]))


@given(st.floats(0.01, 10.0), st.floats(0.01, 10.0))
def test_spectrum_monotone_in_m1(m1, bump):
    for conv in ("literal", "quadratic"):
        a = build_spectrum(PhysicalConfig(m1=m1, mass_convention=conv))
        b = build_spectrum(PhysicalConfig(m1=m1 + bump, mass_convention=conv))
        assert all(x < y for x, y in zip(a.masses, b.masses))
        assert a == build_spectrum(PhysicalConfig(m1=m1, mass_convention=conv))
