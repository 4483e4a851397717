"""
Tests for the closed-form intensities and asymptotic variances.
"""

import math

import pytest

from tessnest.exceptions import InvalidInputError, UnsupportedModelError
from tessnest.moments import (
    brakke_constant,
    component_section_intensity,
    component_surface_intensity,
    miles_intensity,
    pht_intensity,
    pht_nesting_moments,
    pht_sigma2,
    pht_sigma2_hyperfacet,
    pvt_facet_intensity,
    stereo_coeff,
    theory_moments,
    typical_cell_perimeter,
    unit_ball_volume,
    weak_nesting_moments,
)
from tessnest.nesting import ModelSpec
from tessnest.tessellate import TessellationKind, TessellationSpec

PLT1 = TessellationSpec(TessellationKind.PLT, 1.0)
PVT1 = TessellationSpec(TessellationKind.PVT, 1.0)


def test_unit_ball_volume():
    """Test 1: Volumes of the unit balls"""
    assert unit_ball_volume(0) == pytest.approx(1.0)
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)
    with pytest.raises(InvalidInputError):
        unit_ball_volume(-1)


def test_stereo_coeff():
    """Test 2: Stereological coefficients"""
    assert stereo_coeff(1, 2) == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert stereo_coeff(2, 3) == pytest.approx(math.pi / 4.0, rel=1e-12)
    assert stereo_coeff(1, 3) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(InvalidInputError):
        stereo_coeff(0, 2)
    with pytest.raises(InvalidInputError):
        stereo_coeff(2, 2)


def test_pht_hyperfacet_intensity_is_lambda():
    """Test 3: The (d-1)-facet intensity of a hyperplane tessellation is lambda"""
    for d in range(2, 7):
        assert pht_intensity(1.0, d, d - 1) == pytest.approx(1.0, rel=1e-12)
        assert pht_intensity(2.5, d, d - 1) == pytest.approx(2.5, rel=1e-12)
    # vertices of a planar line tessellation
    assert pht_intensity(1.0, 2, 0) == pytest.approx(1.0 / math.pi, rel=1e-12)
    assert pht_intensity(2.0, 2, 0) == pytest.approx(4.0 / math.pi, rel=1e-12)
    with pytest.raises(InvalidInputError):
        pht_intensity(-1.0, 2, 1)
    with pytest.raises(InvalidInputError):
        pht_intensity(1.0, 2, 2)


def test_general_variance_matches_hyperfacet_form():
    """Test 4: The general variance formula reduces to the direction-free one at k = d-1"""
    for d in range(2, 7):
        for lam in (0.5, 1.0, 3.0):
            assert pht_sigma2(lam, d, d - 1) == pytest.approx(pht_sigma2_hyperfacet(lam, d), rel=1e-12)
    assert pht_sigma2(1.0, 2, 1) == pytest.approx(16.0 / (3.0 * math.pi**1.5), rel=1e-12)
    with pytest.raises(InvalidInputError):
        pht_sigma2_hyperfacet(1.0, 1)


def test_miles_formula():
    """Test 5: Planar Poisson-Voronoi edge density and scaling"""
    assert miles_intensity(2, 1) == pytest.approx(2.0, rel=1e-12)
    assert pvt_facet_intensity(4.0, 2, 1) == pytest.approx(4.0, rel=1e-12)
    # surface density of the spatial Poisson-Voronoi tessellation
    assert miles_intensity(3, 2) == pytest.approx((256.0 * math.pi / 3.0) ** (1.0 / 3.0) * math.gamma(5.0 / 3.0) / 2.0, rel=1e-3)
    assert typical_cell_perimeter(1.0) == pytest.approx(4.0)
    assert typical_cell_perimeter(4.0) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        typical_cell_perimeter(0.0)


def test_component_intensities():
    """Test 6: Surface and section intensities of the components"""
    assert component_surface_intensity(TessellationKind.PLT, 2.0) == pytest.approx(2.0)
    assert component_surface_intensity(TessellationKind.PVT, 1.0) == pytest.approx(2.0)
    assert component_section_intensity(TessellationKind.PLT, 1.0) == pytest.approx(2.0 / math.pi)
    assert component_section_intensity(TessellationKind.PVT, 1.0) == pytest.approx(4.0 / math.pi)
    with pytest.raises(UnsupportedModelError):
        component_surface_intensity(TessellationKind.PLT, 1.0, d=3)


def test_integer_intensities_give_float_reports():
    """Test 6b: Integer intensities produce float-valued reports"""
    assert type(component_surface_intensity(TessellationKind.PLT, 2)) is float
    report = theory_moments(ModelSpec(PLT1, TessellationSpec(TessellationKind.PLT, 1)))
    assert type(report.component_surface_intensity) is float
    assert type(report.component_section_intensity) is float
    assert type(report.mean_density) is float


def test_brakke_constant():
    """Test 7: Brakke constant and its override"""
    assert brakke_constant() == pytest.approx(1.0445685)
    assert brakke_constant(1.2) == 1.2
    with pytest.raises(InvalidInputError):
        brakke_constant(-1.0)


def test_constant_reconciliation():
    """Test 8: (2 lambda_0^(1,2))^2 times Brakke equals 1.6934 (lambda_0^(2,2))^2"""
    lam0 = component_section_intensity(TessellationKind.PVT, 1.0)
    surface = component_surface_intensity(TessellationKind.PVT, 1.0)
    assert (2.0 * lam0) ** 2 * brakke_constant() == pytest.approx(1.6934 * surface**2, abs=5e-4)


def test_pvt_plt_moments():
    """Test 9: PVT(1)/PLT(1) mean 8/pi and variance 16/pi + 1.6934"""
    report = theory_moments(ModelSpec(PVT1, PLT1))
    assert report.mean_density == pytest.approx(8.0 / math.pi, rel=1e-12)
    assert f"{report.mean_density:.9g}" == "2.54647909"
    assert report.asym_variance == pytest.approx(16.0 / math.pi + 1.6934, abs=1e-4)
    assert report.norm_exponent == 0.5
    assert report.m == 2
    assert report.model == "PVT(1)/PLT(1)"


def test_pvt_pvt_moments():
    """Test 10: PVT(1)/PVT(1) mean 16/pi and variance 9.4759"""
    report = weak_nesting_moments(1.0, PVT1)
    assert report.mean_density == pytest.approx(16.0 / math.pi, rel=1e-12)
    assert report.asym_variance == pytest.approx(9.4759, abs=1e-4)


def test_weak_moments_scaling():
    """Test 11: Weak-dependence mean scales like sqrt(gamma) lambda for a PLT component"""
    report = weak_nesting_moments(4.0, TessellationSpec(TessellationKind.PLT, 3.0))
    assert report.mean_density == pytest.approx(8.0 / math.pi * 2.0 * 3.0, rel=1e-12)
    with pytest.raises(UnsupportedModelError):
        weak_nesting_moments(1.0, PLT1, d=3, k=2)


def test_plt_plt_moments():
    """Test 12: PLT(1)/PLT(1) mean 4/pi, exponent 3/4 and composed variance"""
    report = theory_moments(ModelSpec(PLT1, PLT1))
    assert report.mean_density == pytest.approx(4.0 / math.pi, rel=1e-12)
    assert report.norm_exponent == pytest.approx(0.75)
    assert report.asym_variance == pytest.approx((4.0 / math.pi) ** 2 * 16.0 / (3.0 * math.pi**1.5), rel=1e-12)
    assert report.asym_variance == pytest.approx(1.55274, rel=1e-4)


def test_pht_moments_in_higher_dimension():
    """Test 13: Hyperplane nesting moments in space"""
    report = pht_nesting_moments(1.0, PVT1, d=3, k=2)
    assert report.m == 2
    assert report.norm_exponent == pytest.approx(1.0 - 1.0 / 6.0)
    lam0 = component_section_intensity(TessellationKind.PVT, 1.0, 3, 2)
    assert report.mean_density == pytest.approx(2.0 * lam0 * 1.0)
    edges = pht_nesting_moments(1.0, PVT1, d=3, k=1)
    assert edges.m == 4
    with pytest.raises(UnsupportedModelError):
        pht_nesting_moments(1.0, PLT1, d=3, k=2)


def test_report_dict():
    """Test 14: Moment reports convert to plain dicts"""
    data = theory_moments(ModelSpec(PVT1, PLT1)).to_dict()
    assert set(data) >= {"mean_density", "asym_variance", "norm_exponent", "model"}
    assert data["d"] == 2 and data["k"] == 1
