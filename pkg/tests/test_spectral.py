"""Tests for spectral data types, domains, densities, and condensate sampling."""

import math

import mpmath as mp
import numpy as np
import pytest

from sslab.errors import (DegenerateDomain, EmptyDomainSample, ValidationError)
from sslab.spectral import (AnalyticDensity, BreatherDatum, EllipseDomain,
                            QuadratureDomain, SolitonDatum, SpectralData,
                            alpha_density, domain_area, domain_integral,
                            evaluate_density, radial_extent, sample_condensate)

mp.mp.dps = 30

ONE = AnalyticDensity([1.0])
IDENT = AnalyticDensity([0.0, 1.0])
DISK = QuadratureDomain(d0=0.5j, d1=0.0, rho=0.3, m=1)
ELLIPSE = EllipseDomain(eta1=1.0, eta2=2.0, rho=0.6)


def _root_domain_area_oracle(d1: complex, rho: float, m: int) -> float:
    """Independent oracle: area of |(w-d0)^m - d1| < rho by the m-to-1 change
    of variables u = (w-d0)^m, reduced to a 1D integral of the u-plane radial
    profile r_u(psi) = Re(d1 e^{-i psi}) + sqrt(rho^2 - Im(d1 e^{-i psi})^2)."""
    c = mp.mpc(d1)

    def f(psi):
        e = c * mp.exp(-1j * psi)
        return (mp.re(e) + mp.sqrt(rho ** 2 - mp.im(e) ** 2)) ** (mp.mpf(2) / m)

    return float(mp.quad(f, [0, 2 * mp.pi]) / 2)


# -------------------------------------------------------------- point types

def test_soliton_datum_strict_requires_imaginary_pole():
    SolitonDatum(kappa=0.5j, h=-1j)
    with pytest.raises(ValidationError):
        SolitonDatum(kappa=0.1 + 0.5j, h=-1j)
    SolitonDatum(kappa=0.1 + 0.5j, h=-1j, strict=False)


def test_soliton_datum_rejects_lower_half_plane_and_zero_h():
    with pytest.raises(ValidationError):
        SolitonDatum(kappa=-0.5j, h=1.0)
    with pytest.raises(ValidationError):
        SolitonDatum(kappa=0.5j, h=0.0)


def test_soliton_zeta():
    assert SolitonDatum(kappa=0.8j, h=-1j).zeta == 0.8


def test_breather_datum_first_quadrant_only():
    BreatherDatum(z=1 + 1j, c=1.0)
    with pytest.raises(ValidationError):
        BreatherDatum(z=-1 + 1j, c=1.0)
    with pytest.raises(ValidationError):
        BreatherDatum(z=1 - 1j, c=1.0)
    with pytest.raises(ValidationError):
        BreatherDatum(z=1 + 1j, c=0.0)


def test_spectral_data_rejects_duplicate_poles():
    s = SolitonDatum(kappa=0.5j, h=-1j)
    with pytest.raises(ValidationError):
        SpectralData(solitons=(s, SolitonDatum(kappa=0.5j, h=-2j)))


def test_spectral_data_counts():
    data = SpectralData(solitons=(SolitonDatum(0.5j, -1j),),
                        breathers=(BreatherDatum(1 + 1j, 1.0),))
    assert data.n_poles == 2


# ----------------------------------------------------------------- domains

def test_quadrature_domain_rejects_large_d1():
    with pytest.raises(DegenerateDomain):
        QuadratureDomain(d0=1j, d1=0.02, rho=0.01, m=2)


def test_quadrature_domain_rejects_lower_half_plane_boundary():
    with pytest.raises(DegenerateDomain):
        QuadratureDomain(d0=0.1j, d1=0.0, rho=0.3, m=1)


def test_quadrature_domain_boundary_on_curve_and_closed():
    dom = QuadratureDomain(d0=1j, d1=0.004, rho=0.01, m=2)
    phi, w, dw = dom.boundary_with_derivative(256)
    assert np.max(np.abs(np.abs((w - dom.d0) ** 2 - dom.d1) - dom.rho)) < 1e-12
    # finite-difference check of the derivative
    h = phi[1] - phi[0]
    fd = (np.roll(w, -1) - np.roll(w, 1)) / (2 * h)
    assert np.max(np.abs(fd - dw)) < 1e-3


def test_quadrature_domain_contains():
    dom = QuadratureDomain(d0=0.5j, d1=0.0, rho=0.3, m=1)
    assert bool(dom.contains(0.5j)) is True
    assert bool(dom.contains(0.5j + 0.31)) is False


def test_ellipse_domain_validation():
    with pytest.raises(DegenerateDomain):
        EllipseDomain(eta1=2.0, eta2=1.0, rho=0.6)
    with pytest.raises(DegenerateDomain):
        EllipseDomain(eta1=1.0, eta2=2.0, rho=0.4)  # rho <= focal half-distance
    with pytest.raises(DegenerateDomain):
        EllipseDomain(eta1=0.1, eta2=2.0, rho=1.1)  # dips below the real axis


def test_ellipse_contains_foci_and_boundary():
    assert bool(ELLIPSE.contains(1j)) and bool(ELLIPSE.contains(2j))
    b = ELLIPSE.boundary(64)
    dist = np.abs(b - 1j) + np.abs(b - 2j)
    assert np.max(np.abs(dist - 1.2)) < 1e-12


# ---------------------------------------------------------------- densities

def test_evaluate_density_constant():
    assert evaluate_density(ONE, 3 + 2j) == 1.0


def test_evaluate_density_identity():
    assert evaluate_density(IDENT, 1j) == 1j


def test_evaluate_density_quadratic():
    # 2 + z^2 at z = i -> 2 + (-1) = 1
    assert evaluate_density(AnalyticDensity([2.0, 0.0, 1.0]), 1j) == 1.0


def test_density_rejects_empty():
    with pytest.raises(ValidationError):
        AnalyticDensity([])


def test_alpha_density_quadrature_includes_conjugate_factor():
    dom = QuadratureDomain(d0=1j, d1=0.004, rho=0.01, m=2)
    w = 1.05j + 0.01
    expected = 2.0 * (np.conj(w) - np.conj(1j)) * 1.0
    assert abs(alpha_density(dom, ONE, w) - expected) < 1e-14


def test_alpha_density_ellipse_is_plain_density():
    assert alpha_density(ELLIPSE, IDENT, 1.5j) == 1.5j


# -------------------------------------------------------------------- areas

def test_disk_area():
    assert abs(domain_area(DISK) - math.pi * 0.09) < 1e-6 * math.pi * 0.09


def test_ellipse_area_closed_form():
    exact = math.pi * 0.6 * math.sqrt(0.36 - 0.25)
    assert abs(domain_area(ELLIPSE) - exact) < 1e-6 * exact


def test_two_root_domain_area_vs_oracle():
    dom = QuadratureDomain(d0=1j, d1=0.001, rho=0.01, m=2)
    oracle = _root_domain_area_oracle(0.001, 0.01, 2)
    assert abs(domain_area(dom) - oracle) < 1e-6 * oracle


def test_three_root_domain_area_vs_oracle():
    dom = QuadratureDomain(d0=1j, d1=0.008, rho=0.02, m=3)
    oracle = _root_domain_area_oracle(0.008, 0.02, 3)
    assert abs(domain_area(dom) - oracle) < 1e-6 * oracle


def test_radial_extent_matches_disk_radius():
    r = radial_extent(DISK, np.array([0.0, 1.0, 2.5]))
    assert np.max(np.abs(r - 0.3)) < 1e-9


# ---------------------------------------------------------- area integrals

def test_domain_integral_constant_recovers_area():
    val = domain_integral(DISK, lambda w: np.ones_like(w))
    assert abs(val - math.pi * 0.09) < 1e-10


def test_domain_integral_centroid():
    val = domain_integral(DISK, lambda w: w)
    assert abs(val - math.pi * 0.09 * 0.5j) < 1e-10


def test_domain_integral_ellipse_second_moment():
    # int (z - center)^2 over an ellipse with semi-axes a (imag) and b (real):
    # area * (b^2 - a^2)/4 in this orientation
    a, b = 0.6, ELLIPSE.semi_minor
    exact = math.pi * a * b * (b * b - a * a) / 4.0
    val = domain_integral(ELLIPSE, lambda w: (w - ELLIPSE.center) ** 2)
    assert abs(val - exact) < 1e-9


# ----------------------------------------------------------------- sampling

def test_sample_constant_density_equal_weights():
    data = sample_condensate(DISK, (ONE, ONE), 0, 4, "grid", 0)
    S = domain_area(DISK)
    assert len(data.solitons) == 4
    for s in data.solitons:
        assert abs(s.h - S / (4 * math.pi)) < 1e-14


def test_sample_single_point_weight():
    data = sample_condensate(DISK, (ONE, IDENT), 0, 1, "grid", 0)
    s = data.solitons[0]
    S = domain_area(DISK)
    assert abs(s.h - S * alpha_density(DISK, IDENT, s.kappa) / math.pi) < 1e-14


def test_sample_sum_rule_constant_density_exact():
    S = domain_area(DISK)
    for scheme in ("grid", "halton"):
        data = sample_condensate(DISK, (ONE, ONE), 0, 256, scheme, 0)
        total = sum(s.h for s in data.solitons)
        assert abs(total - S / math.pi) < 1e-12


def test_sample_sum_rule_identity_density_riemann():
    # sum h_j approximates (1/pi) * integral of w over the disk = (S/pi) d0
    S = domain_area(DISK)
    target = S / math.pi * 0.5j
    for scheme in ("grid", "halton"):
        data = sample_condensate(DISK, (ONE, IDENT), 0, 1024, scheme, 0)
        total = sum(s.h for s in data.solitons)
        assert abs(total - target) < 0.02 * abs(target)


def test_sample_points_inside_domain():
    data = sample_condensate(ELLIPSE, (ONE, ONE), 0, 64, "halton", 5)
    pts = np.array([s.kappa for s in data.solitons])
    assert np.all(ELLIPSE.contains(pts))


def test_sample_deterministic():
    a = sample_condensate(DISK, (ONE, IDENT), 0, 128, "grid", 0)
    b = sample_condensate(DISK, (ONE, IDENT), 0, 128, "grid", 0)
    assert a == b
    c = sample_condensate(DISK, (ONE, IDENT), 0, 128, "halton", 7)
    d = sample_condensate(DISK, (ONE, IDENT), 0, 128, "halton", 7)
    assert c == d


def test_sample_halton_seed_changes_points():
    a = sample_condensate(DISK, (ONE, ONE), 0, 16, "halton", 0)
    b = sample_condensate(DISK, (ONE, ONE), 0, 16, "halton", 99)
    assert a != b


def test_sample_strict_solitons_on_axis():
    data = sample_condensate(DISK, (ONE, ONE), 0, 5, "grid", 0, strict_solitons=True)
    for s in data.solitons:
        assert s.kappa.real == 0.0
        assert 0.2 <= s.kappa.imag <= 0.8


def test_sample_strict_raises_off_axis():
    off = QuadratureDomain(d0=1 + 1j, d1=0.0, rho=0.3, m=1)
    with pytest.raises(EmptyDomainSample):
        sample_condensate(off, (ONE, ONE), 0, 3, "grid", 0, strict_solitons=True)


def test_sample_breathers_right_half_domain():
    off = QuadratureDomain(d0=1 + 1j, d1=0.0, rho=0.3, m=1)
    data = sample_condensate(off, (ONE, ONE), 6, 0, "halton", 3)
    assert len(data.breathers) == 6
    S = domain_area(off)
    for b in data.breathers:
        assert abs(b.c - S / (6 * math.pi)) < 1e-14


def test_sample_rejects_empty_request():
    with pytest.raises(ValidationError):
        sample_condensate(DISK, (ONE, ONE), 0, 0, "grid", 0)
    with pytest.raises(ValidationError):
        sample_condensate(DISK, (ONE, ONE), 0, 4, "sobol", 0)
