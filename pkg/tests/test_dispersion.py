import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mp_surface_speed
from surfwave.dispersion import (
    GEL,
    SPONGE,
    DispersionPoint,
    VoigtMaterial,
    fit_objective,
    fit_voigt,
    read_dispersion_csv,
    shear_wave_speed,
    surface_wave_speed,
    voigt_moduli,
    write_dispersion_csv,
    write_fit_csv,
)
from surfwave.errors import ConvergenceError, DomainError, InsufficientDataError

FREQS = [100.0, 150.0, 200.0, 250.0, 300.0]


@pytest.mark.parametrize("f", FREQS)
def test_forward_matches_arbitrary_precision(f):
    expected = float(mp_surface_speed(6830, 24, 1500, f))
    assert surface_wave_speed(SPONGE, f) == pytest.approx(expected, rel=1e-12)


def test_forward_reference_values():
    assert surface_wave_speed(SPONGE, 100) == pytest.approx(3.7646843518694518, rel=1e-12)
    assert surface_wave_speed(SPONGE, 300) == pytest.approx(6.9385628356223798, rel=1e-12)
    assert shear_wave_speed(SPONGE, 100) == pytest.approx(1.05 * 3.7646843518694518, rel=1e-12)


def test_elastic_limit_is_frequency_independent():
    m = VoigtMaterial(6830, 0.0, 1500)
    expected = math.sqrt(6830 / 1500) / 1.05
    for f in (1.0, 100.0, 1e4):
        assert surface_wave_speed(m, f) == pytest.approx(expected, rel=1e-14)


def test_moduli():
    g = voigt_moduli(SPONGE, 100)
    assert g.storage == 6830
    assert g.long_term == 6830
    assert g.loss == pytest.approx(15079.644737231, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(mu1=0, mu2=1, rho=1), dict(mu1=1, mu2=-1, rho=1), dict(mu1=1, mu2=1, rho=0),
                                    dict(mu1=math.nan, mu2=1, rho=1)])
def test_material_domain(kwargs):
    with pytest.raises(DomainError):
        VoigtMaterial(**kwargs)


def test_nonpositive_frequency_rejected():
    with pytest.raises(DomainError):
        surface_wave_speed(SPONGE, 0.0)


@given(
    mu1=st.floats(10, 1e6),
    mu2=st.floats(0, 1e3),
    rho=st.floats(100, 3000),
    f1=st.floats(1, 1e3),
    f2=st.floats(1, 1e3),
)
def test_monotone_in_frequency(mu1, mu2, rho, f1, f2):
    m = VoigtMaterial(mu1, mu2, rho)
    lo, hi = sorted((f1, f2))
    assert surface_wave_speed(m, lo) <= surface_wave_speed(m, hi) * (1 + 1e-12)


@given(mu1=st.floats(10, 1e6), mu2=st.floats(0, 1e3), rho=st.floats(100, 3000), f=st.floats(1, 1e3))
def test_speed_bounded_below_by_elastic_limit(mu1, mu2, rho, f):
    m = VoigtMaterial(mu1, mu2, rho)
    assert surface_wave_speed(m, f) >= math.sqrt(mu1 / rho) / 1.05 * (1 - 1e-12)


@given(mu1=st.floats(10, 1e6), mu2=st.floats(0, 1e3), rho=st.floats(100, 3000), f=st.floats(1, 1e3), s=st.floats(0.1, 10))
def test_density_scaling(mu1, mu2, rho, f, s):
    a = surface_wave_speed(VoigtMaterial(mu1, mu2, rho), f)
    b = surface_wave_speed(VoigtMaterial(mu1, mu2, rho * s), f)
    assert b == pytest.approx(a / math.sqrt(s), rel=1e-12)


def test_objective_broadcasts():
    c = [surface_wave_speed(SPONGE, f) for f in FREQS]
    grid = fit_objective(np.array([[6830.0], [7000.0]]), np.array([[24.0, 30.0]]), 1500, FREQS, c)
    assert grid.shape == (2, 2)
    assert grid[0, 0] == pytest.approx(0.0, abs=1e-25)
    assert np.all(grid.ravel()[1:] > 0)


def synthetic(mat, freqs=FREQS):
    return [DispersionPoint(f, surface_wave_speed(mat, f)) for f in freqs]


@pytest.mark.parametrize("mat", [SPONGE, VoigtMaterial(1300, 24, 1500), VoigtMaterial(20000, 5, 1500)])
def test_fit_recovers_noiseless(mat):
    fit = fit_voigt(synthetic(mat))
    assert fit.material.mu1 == pytest.approx(mat.mu1, rel=1e-6)
    assert fit.material.mu2 == pytest.approx(mat.mu2, rel=1e-6)
    assert fit.rms_residual < 1e-8
    assert fit.n_points == 5


def test_fit_elastic_data_gives_small_viscosity():
    mat = VoigtMaterial(5000, 0.0, 1500)
    fit = fit_voigt(synthetic(mat))
    assert fit.material.mu1 == pytest.approx(5000, rel=1e-6)
    assert fit.material.mu2 < 1e-2


def test_two_point_fit_is_global_least_squares_optimum():
    # this pair is outside the model's reachable speed ratio; the fit is
    # still the global minimiser of the residual
    pts = [DispersionPoint(100, 3.28), DispersionPoint(300, 7.43)]
    fit = fit_voigt(pts)
    f = [p.frequency for p in pts]
    c = [p.speed for p in pts]
    mu1 = np.logspace(2, 5, 601)[:, None]
    mu2 = np.linspace(0, 80, 801)[None, :]
    brute = fit_objective(mu1, mu2, 1500, f, c).min()
    best = fit_objective(fit.material.mu1, fit.material.mu2, 1500, f, c)
    assert best <= brute * (1 + 1e-9)
    assert fit.material.mu1 == pytest.approx(6212.68, rel=1e-3)
    assert fit.material.mu2 == pytest.approx(24.916, rel=1e-3)


def test_fit_needs_two_frequencies():
    with pytest.raises(InsufficientDataError):
        fit_voigt([DispersionPoint(100, 3.0)])
    with pytest.raises(InsufficientDataError):
        fit_voigt([DispersionPoint(100, 3.0), DispersionPoint(100, 3.1)])


def test_fit_restart_cap_reports_best():
    with pytest.raises(ConvergenceError) as info:
        fit_voigt([DispersionPoint(100, 3.28), DispersionPoint(300, 7.43), DispersionPoint(200, 5.0)], rtol=0.0, max_restarts=1)
    assert info.value.best is not None


@settings(max_examples=25, deadline=None)
@given(mu1=st.floats(500, 50000), mu2=st.floats(0.5, 100))
def test_fit_round_trip_property(mu1, mu2):
    mat = VoigtMaterial(mu1, mu2, 1500)
    fit = fit_voigt(synthetic(mat))
    assert fit.material.mu1 == pytest.approx(mu1, rel=1e-4)
    assert fit.material.mu2 == pytest.approx(mu2, rel=1e-4)


def test_gel_defaults():
    assert (GEL.mu1, GEL.mu2, GEL.rho) == (1300, 24, 1000)


def test_csv_round_trip(tmp_path):
    pts = synthetic(SPONGE)
    pts[0] = DispersionPoint(pts[0].frequency, pts[0].speed, 0.08)
    p = tmp_path / "d.csv"
    write_dispersion_csv(p, pts)
    assert read_dispersion_csv(p) == pts
    fit = fit_voigt(pts)
    write_fit_csv(tmp_path / "fit.csv", fit)
    header, row = (tmp_path / "fit.csv").read_text().splitlines()
    assert header == "mu1_pa,mu2_pas,rho_kgm3,rms_residual_mps,n_points"
    assert row.endswith(",5")


def test_csv_missing_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("freq,speed\n100,3\n")
    with pytest.raises(ValueError, match="missing"):
        read_dispersion_csv(p)
