"""Tests for the quadrature-domain shielding machinery.

Independent oracles used here:
  - quadrature nodes against numpy's polynomial root finder on the
    expanded defining polynomial (z - d0)^m - d1;
  - norming constants against the derivative identity
    prod_{s != j} (kappa_j - kappa_s) = p'(kappa_j) for p = (z-d0)^m - d1;
  - the area representation against the exact first moment
    (1/pi) * area integral of 1 = rho^2 for the disk;
  - the soliton peak position against x0 = ln(|h| / (2 zeta)) / (2 zeta)
    from the hand-solved one-soliton closed form.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from sslab.dressing import PhaseParams, expand_spectrum, recover_q, solve_M
from sslab.errors import (
    BranchAmbiguityError,
    PoleEvaluationError,
    ProbeInsideDomain,
    ValidationError,
)
from sslab.grids import EvaluationGrid
from sslab.shielding import (
    DEFAULT_PROBES,
    ShieldingReport,
    domain_integral_direct,
    domain_integral_green,
    effective_norming,
    finite_sum_jump,
    quadrature_nodes,
    residue_sum,
    schwarz_quadrature,
    verify_shielding,
)
from sslab.spectral import (
    AnalyticDensity,
    BreatherDatum,
    QuadratureDomain,
    SolitonDatum,
    SpectralData,
    alpha_density,
    sample_condensate,
)

ONE = AnalyticDensity((1.0,))
DISK = QuadratureDomain(d0=0.5j, d1=0.0, rho=0.3, m=1)
DOMAIN_M2 = QuadratureDomain(d0=1j, d1=0.004, rho=0.01, m=2)
DOMAIN_M3 = QuadratureDomain(d0=1j, d1=0.008, rho=0.02, m=3)
REFERENCES = (DISK, DOMAIN_M2, DOMAIN_M3)


# --------------------------------------------------------------------- nodes

class TestQuadratureNodes:
    def test_m3_reference_star(self):
        nodes = quadrature_nodes(DOMAIN_M3, 3)
        want = np.array([1j + 0.2 * np.exp(2j * math.pi * j / 3) for j in range(3)])
        assert np.max(np.abs(nodes - want)) < 1e-12
        # defining equation and membership
        assert np.max(np.abs((nodes - 1j) ** 3 - 0.008)) < 1e-12
        assert np.all(DOMAIN_M3.contains(nodes))

    def test_polynomial_root_oracle(self):
        d0, d1 = 1j, 0.006 + 0.004j
        dom = QuadratureDomain(d0=d0, d1=d1, rho=0.02, m=3)
        nodes = quadrature_nodes(dom, 3)
        roots = np.roots([1.0, -3.0 * d0, 3.0 * d0**2, -(d0**3 + d1)])
        got = np.sort_complex(nodes)
        want = np.sort_complex(roots)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_disk_single_node(self):
        nodes = quadrature_nodes(DISK, 1)
        assert nodes.shape == (1,)
        assert nodes[0] == 0.5j

    def test_count_must_match_symmetry_order(self):
        with pytest.raises(ValidationError):
            quadrature_nodes(DOMAIN_M3, 2)

    def test_zero_d1_rejected_for_higher_m(self):
        dom = QuadratureDomain(d0=1j, d1=0.0, rho=0.01, m=2)
        with pytest.raises(ValidationError):
            quadrature_nodes(dom, 2)


# ------------------------------------------------------------------- Schwarz

class TestSchwarzFunction:
    @pytest.mark.parametrize("domain", REFERENCES, ids=("m1", "m2", "m3"))
    def test_boundary_identity(self, domain):
        samples = domain.boundary(200)
        worst = max(abs(schwarz_quadrature(z, domain) - np.conj(z))
                    for z in samples)
        assert worst < 1e-10

    def test_disk_closed_form(self):
        d0, rho = DISK.d0, DISK.rho
        for z in (d0 + rho, d0 + 0.5, d0 - 0.2j + 0.1):
            want = np.conj(d0) + rho**2 / (z - d0)
            assert abs(schwarz_quadrature(z, DISK) - want) < 1e-14
        boundary_pt = d0 + rho
        assert abs(schwarz_quadrature(boundary_pt, DISK) - np.conj(boundary_pt)) < 1e-14

    def test_branch_continuity_m2(self):
        samples = DOMAIN_M2.boundary(400)
        values = np.array([schwarz_quadrature(z, DOMAIN_M2) for z in samples])
        step_w = np.max(np.abs(np.diff(np.append(samples, samples[0]))))
        step_s = np.max(np.abs(np.diff(np.append(values, values[0]))))
        # a branch flip would jump by O(node spacing) ~ 0.1, far above this
        assert step_s <= 1.5 * step_w

    def test_power_matches_contour_closed_form(self):
        for domain in (DOMAIN_M2, DOMAIN_M3):
            for z in domain.boundary(64):
                s = schwarz_quadrature(z, domain)
                lhs = (s - np.conj(domain.d0)) ** domain.m
                rhs = (np.conj(domain.d1)
                       + domain.rho**2 / ((z - domain.d0) ** domain.m - domain.d1))
                assert abs(lhs - rhs) < 1e-12

    def test_far_point_is_ambiguous(self):
        with pytest.raises(BranchAmbiguityError):
            schwarz_quadrature(3.0 + 3.0j, DOMAIN_M2)

    def test_node_is_a_pole(self):
        node = quadrature_nodes(DISK, 1)[0]
        with pytest.raises(PoleEvaluationError):
            schwarz_quadrature(node, DISK)


# ----------------------------------------------------------- norming factors

class TestEffectiveNorming:
    def test_disk_empty_product(self):
        values = effective_norming(DISK, ONE, 1)
        assert values.shape == (1,)
        assert abs(values[0] - DISK.rho**2) < 1e-15

    def test_disk_with_polynomial_density(self):
        varpi = AnalyticDensity((1.0, 0.5))
        values = effective_norming(DISK, varpi, 1)
        assert abs(values[0] - DISK.rho**2 * (1.0 + 0.5 * 0.5j)) < 1e-15

    def test_m3_derivative_identity(self):
        # prod_{s != j}(k_j - k_s) = p'(k_j) = 3 (k_j - d0)^2 = 3 r^2 w^{2j}
        r = 0.2
        omega = np.exp(2j * math.pi / 3)
        values = effective_norming(DOMAIN_M3, ONE, 3)
        scale = DOMAIN_M3.rho**2 / (3.0 * r**2)
        for j, got in enumerate(values):
            assert abs(got - scale * omega**j) < 1e-12
        moduli = np.abs(values)
        assert np.max(moduli) - np.min(moduli) < 1e-14


class TestDiskPeakPosition:
    def test_sech_maximum_at_predicted_x0(self):
        h = effective_norming(DISK, ONE, 1)[0]
        zeta = 0.5
        x0 = math.log(abs(h) / (2.0 * zeta)) / (2.0 * zeta)
        data = SpectralData(solitons=(SolitonDatum(kappa=0.5j, h=h),))
        system = expand_spectrum(data)

        def neg_abs_q(x: float) -> float:
            return -abs(recover_q(solve_M(system, PhaseParams(x, 0.0))))

        res = minimize_scalar(neg_abs_q, bounds=(x0 - 2.0, x0 + 2.0),
                              method="bounded",
                              options={"xatol": 1e-10})
        assert abs(res.x - x0) < 1e-6


# ----------------------------------------------------- three representations

PHASES = (PhaseParams(0.0, 0.0), PhaseParams(0.3, 0.02))


class TestRepresentationEquivalence:
    @pytest.mark.parametrize("domain", REFERENCES, ids=("m1", "m2", "m3"))
    def test_green_vs_residue(self, domain):
        for phase in PHASES:
            for probe in DEFAULT_PROBES:
                g = domain_integral_green(probe, domain, ONE, domain.m, phase)
                r = residue_sum(probe, domain, ONE, domain.m, phase)
                assert abs(g - r) < 1e-8

    @pytest.mark.parametrize("domain", REFERENCES, ids=("m1", "m2", "m3"))
    def test_direct_vs_green(self, domain):
        for phase in PHASES:
            for probe in DEFAULT_PROBES:
                d, _ = domain_integral_direct(
                    probe, domain, lambda w: alpha_density(domain, ONE, w), phase)
                g = domain_integral_green(probe, domain, ONE, domain.m, phase)
                assert abs(d - g) < 1e-4

    def test_residue_disk_formula(self):
        phase = PhaseParams(0.4, 0.1)
        z = 2.0 + 1.0j
        kappa = 0.5j
        want = (DISK.rho**2 * np.exp(2j * phase.theta(kappa)) / (z - kappa))
        assert abs(residue_sum(z, DISK, ONE, 1, phase) - want) < 1e-14

    def test_direct_zero_density(self):
        value, _ = domain_integral_direct(
            3.0 + 3.0j, DISK, lambda w: np.zeros_like(w), PhaseParams(0.0, 0.0))
        assert value == 0.0

    def test_direct_far_field_moment(self):
        # (1/pi) * area of the disk = rho^2 is the exact 1/z coefficient
        phase = PhaseParams(0.0, 0.0)
        v3, _ = domain_integral_direct(
            1e3, DISK, lambda w: alpha_density(DISK, ONE, w), phase)
        v4, _ = domain_integral_direct(
            1e4, DISK, lambda w: alpha_density(DISK, ONE, w), phase)
        assert abs(v3 * 1e3 - DISK.rho**2) < 5e-4
        assert abs((v3 * 1e3) / (v4 * 1e4) - 1.0) < 5e-3

    def test_probe_inside_rejected(self):
        with pytest.raises(ProbeInsideDomain):
            domain_integral_direct(DISK.d0, DISK,
                                   lambda w: alpha_density(DISK, ONE, w),
                                   PhaseParams(0.0, 0.0))
        with pytest.raises(ProbeInsideDomain):
            domain_integral_green(DISK.d0, DISK, ONE, 1, PhaseParams(0.0, 0.0))

    def test_green_exponent_mismatch(self):
        with pytest.raises(ValidationError):
            domain_integral_green(3 + 3j, DOMAIN_M3, ONE, 2, PhaseParams(0.0, 0.0))


# ------------------------------------------------------------ finite samples

class TestFiniteSumJump:
    def test_single_soliton_term(self):
        phase = PhaseParams(0.2, 0.05)
        data = SpectralData(solitons=(SolitonDatum(0.5j, -1j),))
        z = 1.0 + 2.0j
        want = -1j * np.exp(2j * phase.theta(0.5j)) / (z - 0.5j)
        assert abs(finite_sum_jump(z, data, phase) - want) < 1e-15

    def test_single_breather_terms(self):
        phase = PhaseParams(0.1, 0.02)
        zk, ck = 0.8 + 0.6j, 0.3 - 0.2j
        data = SpectralData(breathers=(BreatherDatum(zk, ck),))
        z = 2.0 + 1.0j
        want = (ck * np.exp(2j * phase.theta(zk)) / (z - zk)
                - np.conj(ck) * np.exp(2j * phase.theta(-np.conj(zk)))
                / (z + np.conj(zk)))
        assert abs(finite_sum_jump(z, data, phase) - want) < 1e-15

    def test_riemann_sum_against_direct(self):
        phase = PhaseParams(0.0, 0.0)
        z = 3.0 + 3.0j
        direct, _ = domain_integral_direct(
            z, DISK, lambda w: alpha_density(DISK, ONE, w), phase)
        data = sample_condensate(DISK, (ONE, ONE), n1=0, n2=256)
        assert abs(finite_sum_jump(z, data, phase) - direct) < 5e-3

    def test_error_decreases_with_sample_size(self):
        phase = PhaseParams(0.0, 0.0)
        z = 3.0 + 3.0j
        direct, _ = domain_integral_direct(
            z, DISK, lambda w: alpha_density(DISK, ONE, w), phase)
        errors = []
        for n in (64, 256, 1024):
            data = sample_condensate(DISK, (ONE, ONE), n1=0, n2=n)
            errors.append(abs(finite_sum_jump(z, data, phase) - direct))
        assert errors[1] <= 1.1 * errors[0]
        assert errors[2] <= 1.1 * errors[1]


# ------------------------------------------------------------------- reports

class TestVerifyShielding:
    GRID = EvaluationGrid.from_ranges(-5.0, 5.0, 0.5, (0.0,))

    def test_disk_report(self):
        report = verify_shielding(DISK, ONE, self.GRID, (64, 256))
        assert report.nodes == (0.5j,)
        assert abs(report.effective_constants[0] - 0.09) < 1e-15
        assert report.sample_sizes == (64, 256)
        assert report.q_discrepancy == report.sample_errors[-1]
        # convergence trend, with the contract's 10% slack
        assert report.sample_errors[1] <= 1.1 * report.sample_errors[0]
        assert report.integral_discrepancies["green_vs_residue"] < 1e-8
        assert report.integral_discrepancies["direct_vs_green"] < 1e-4

    def test_report_is_deterministic(self):
        a = verify_shielding(DISK, ONE, self.GRID, (64,))
        b = verify_shielding(DISK, ONE, self.GRID, (64,))
        assert a.nodes == b.nodes
        assert a.effective_constants == b.effective_constants
        assert a.sample_errors == b.sample_errors
        assert a.integral_discrepancies == b.integral_discrepancies

    def test_negative_error_rejected(self):
        with pytest.raises(ValidationError):
            ShieldingReport(
                nodes=(0.5j,), effective_constants=(0.09 + 0j,),
                integral_discrepancies={"direct_vs_green": -1.0},
                sample_sizes=(64,), sample_errors=(0.1,), q_discrepancy=0.1,
            )

    def test_empty_sizes_rejected(self):
        with pytest.raises(ValidationError):
            verify_shielding(DISK, ONE, self.GRID, ())
