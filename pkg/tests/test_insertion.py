"""Barrier insertion: nodal detection, compartment projections, energy series."""

import math

import numpy as np
import pytest

from splitwell import (
    BoxState,
    ContractError,
    DomainError,
    WellGeometry,
    compartment_probability,
    eval_state,
    insertion_energy_diagnostics,
    is_nodal,
    midpoint_coefficients_n1,
    quadrature,
    split,
)
from splitwell.insertion import CONVERGENT, LINEAR_DIVERGENT

GEOM = WellGeometry()
PHI_N2 = BoxState.pure(GEOM, 2)
PSI_N1 = BoxState.pure(GEOM, 1)
SQRT2 = math.sqrt(2.0)


def projection_by_quadrature(state, a, n, side):
    """Independent oracle: project onto compartment mode n by quadrature."""
    geom = state.geometry
    x0, x1 = (geom.x_left, a) if side == "left" else (a, geom.x_right)
    width = x1 - x0

    def part(selector):
        def f(x):
            mode = math.sqrt(2.0 / width) * math.sin(n * math.pi * (x - x0) / width)
            value = eval_state(state, x) * mode
            return value.real if selector == "re" else value.imag
        return f

    return complex(quadrature(part("re"), x0, x1, 1e-13),
                   quadrature(part("im"), x0, x1, 1e-13))


class TestIsNodal:
    def test_second_mode_midpoint_is_nodal(self):
        assert is_nodal(PHI_N2, 0.5, 1e-9) is True

    def test_ground_state_midpoint_is_not(self):
        assert is_nodal(PSI_N1, 0.5, 1e-9) is False

    def test_third_mode_third_point(self):
        assert is_nodal(BoxState.pure(GEOM, 3), 1.0 / 3.0, 1e-9) is True

    @pytest.mark.parametrize("a", [0.0, 1.0, -0.5, 2.0])
    def test_walls_and_outside_rejected(self, a):
        with pytest.raises(DomainError):
            is_nodal(PHI_N2, a)

    def test_unnormalized_rejected(self):
        with pytest.raises(ContractError):
            is_nodal(BoxState(GEOM, [0.3, 0.3]), 0.5)


class TestSplitNodal:
    def test_second_mode_becomes_compartment_ground_modes(self):
        sp = split(PHI_N2, 0.5, 6)
        left = sp.left.coefficients
        right = sp.right.coefficients
        assert left[0] == pytest.approx(1 / SQRT2, abs=1e-13)
        # right compartment modes are measured from the barrier, which flips
        # the sign of the restriction of sin(2 pi x)
        assert right[0] == pytest.approx(-1 / SQRT2, abs=1e-13)
        assert np.max(np.abs(left[1:])) <= 1e-13
        assert np.max(np.abs(right[1:])) <= 1e-13
        assert sp.nodal is True
        assert sp.truncation_residual <= 1e-13

    def test_probabilities_exactly_half(self):
        probs = compartment_probability(split(PHI_N2, 0.5, 4))
        assert probs[0] == pytest.approx(0.5, abs=1e-13)
        assert probs[1] == pytest.approx(0.5, abs=1e-13)


class TestSplitGroundState:
    def test_matches_quadrature_oracle(self):
        sp = split(PSI_N1, 0.5, 2)
        for n in (1, 2):
            for side, state in (("left", sp.left), ("right", sp.right)):
                oracle = projection_by_quadrature(PSI_N1, 0.5, n, side)
                assert abs(state.coefficients[n - 1] - oracle) <= 1e-10

    def test_frozen_leading_coefficients(self):
        sp = split(PSI_N1, 0.5, 2)
        b1 = 4 * SQRT2 / (3 * math.pi)
        b2 = 8 * SQRT2 / (15 * math.pi)
        assert sp.left.coefficients[0].real == pytest.approx(b1, abs=1e-12)
        assert sp.left.coefficients[1].real == pytest.approx(-b2, abs=1e-12)
        assert sp.right.coefficients[0].real == pytest.approx(b1, abs=1e-12)
        assert sp.right.coefficients[1].real == pytest.approx(b2, abs=1e-12)

    @pytest.mark.parametrize("n_cut,expected", [
        (100, 4.032717e-03),
        (1000, 4.050822e-04),
        (10000, 4.052645e-05),
    ])
    def test_truncation_residual_follows_exact_tail(self, n_cut, expected):
        sp = split(PSI_N1, 0.5, n_cut)
        assert sp.truncation_residual == pytest.approx(expected, rel=1e-5)
        # exact law: the total deficit is 8/(pi^2 (2N+1)) + O(N^-3),
        # i.e. close to 4/(pi^2 N); each side individually stays
        # below 3/(pi^2 N)
        scaled = sp.truncation_residual * math.pi ** 2 * n_cut
        assert 3.9 <= scaled <= 4.01
        for side in compartment_probability(sp):
            assert abs(side - 0.5) <= 3.0 / (math.pi ** 2 * n_cut)

    def test_residual_decreases_with_cutoff(self):
        rng = np.random.default_rng(5)
        coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        state = BoxState(GEOM, coeffs / np.linalg.norm(coeffs))
        residuals = [split(state, 0.37, n).truncation_residual for n in (32, 128, 512)]
        assert residuals[0] > residuals[1] > residuals[2] >= 0.0


class TestSplitGeneralPoint:
    def test_third_point_probabilities_match_density_integral(self):
        sp = split(PSI_N1, 1.0 / 3.0, 10000)
        oracle = quadrature(lambda x: 2.0 * math.sin(math.pi * x) ** 2,
                            0.0, 1.0 / 3.0, 1e-13)
        probs = compartment_probability(sp)
        assert oracle == pytest.approx(0.19550110947788527, abs=1e-12)
        assert probs[0] == pytest.approx(oracle, abs=1e-4)
        assert probs[1] == pytest.approx(1.0 - oracle, abs=1e-4)

    def test_nodal_insertion_off_center(self):
        # mode 3 has a node at L/3; the split is exact with one mode per side
        sp = split(BoxState.pure(GEOM, 3), 1.0 / 3.0, 8)
        assert sp.nodal is True
        assert sp.truncation_residual <= 1e-12
        probs = compartment_probability(sp)
        assert probs[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert probs[1] == pytest.approx(2.0 / 3.0, abs=1e-12)
        report = insertion_energy_diagnostics(sp, 8)
        assert report.energy_conservation_gap <= 1e-9

    def test_linearity_in_the_parent_state(self):
        rng = np.random.default_rng(17)
        for a in (0.5, 1.0 / 3.0, 0.37):
            cu = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            cv = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            u = BoxState(GEOM, cu / np.linalg.norm(cu))
            v = BoxState(GEOM, cv / np.linalg.norm(cv))
            alpha, beta = 0.6, complex(0.5, -0.3)
            mix = alpha * u.coefficients + beta * v.coefficients
            mixed = BoxState(GEOM, mix / np.linalg.norm(mix))
            scale = 1.0 / np.linalg.norm(mix)
            sp_mix = split(mixed, a, 32)
            sp_u, sp_v = split(u, a, 32), split(v, a, 32)
            for side in ("left", "right"):
                combined = scale * (alpha * getattr(sp_u, side).coefficients
                                    + beta * getattr(sp_v, side).coefficients)
                assert np.max(np.abs(getattr(sp_mix, side).coefficients - combined)) <= 1e-10

    @pytest.mark.parametrize("a", [0.0, 1.0])
    def test_boundary_insertion_rejected(self, a):
        with pytest.raises(DomainError):
            split(PSI_N1, a, 4)

    def test_bad_cutoff_rejected(self):
        with pytest.raises(DomainError):
            split(PSI_N1, 0.5, 0)

    def test_unnormalized_state_rejected(self):
        with pytest.raises(ContractError):
            split(BoxState(GEOM, [0.1]), 0.5, 4)


class TestMidpointClosedForms:
    def test_frozen_values(self):
        assert midpoint_coefficients_n1(1) == pytest.approx(
            (0.6002108774380708, 0.6002108774380708), abs=1e-12)
        assert midpoint_coefficients_n1(2) == pytest.approx(
            (-0.24008435097522832, 0.24008435097522832), abs=1e-12)

    def test_symmetry_relation(self):
        for n in range(1, 65):
            b_left, b_right = midpoint_coefficients_n1(n)
            assert b_left == pytest.approx((-1.0) ** n * (-b_right), rel=1e-14)

    def test_agrees_with_split(self):
        sp = split(PSI_N1, 0.5, 64)
        for n in range(1, 65):
            b_left, b_right = midpoint_coefficients_n1(n)
            assert abs(sp.left.coefficients[n - 1] - b_left) <= 1e-12
            assert abs(sp.right.coefficients[n - 1] - b_right) <= 1e-12

    def test_rejects_bad_mode(self):
        with pytest.raises(DomainError):
            midpoint_coefficients_n1(0)


class TestEnergyDiagnostics:
    def test_nodal_split_conserves_energy(self):
        report = insertion_energy_diagnostics(split(PHI_N2, 0.5, 16), 16)
        assert report.nodal is True
        assert report.divergence_class == CONVERGENT
        s_left, s_right = report.energy_partial_sums
        assert s_left[-1] + s_right[-1] == pytest.approx(19.739208802178716, abs=1e-9)
        assert report.energy_conservation_gap <= 1e-9

    def test_ground_state_split_diverges_linearly(self):
        report = insertion_energy_diagnostics(split(PSI_N1, 0.5, 1000), 1000)
        assert report.divergence_class == LINEAR_DIVERGENT
        s_left, s_right = report.energy_partial_sums
        # first term of the per-compartment series is 64/9
        assert s_left[0] == pytest.approx(64.0 / 9.0, abs=1e-10)
        assert s_right[0] == pytest.approx(64.0 / 9.0, abs=1e-10)
        for s in (s_left, s_right):
            assert abs(s[-1] / 1000.0 - 4.0) <= 0.02  # S_N = 4N + O(1)
        for slope in report.fit_slopes:
            assert slope == pytest.approx(4.0, abs=1e-4)
        for intercept in report.fit_intercepts:
            assert intercept == pytest.approx(2.0 + math.pi ** 2 / 4.0, abs=0.05)

    def test_partial_sums_monotone(self):
        report = insertion_energy_diagnostics(split(PSI_N1, 0.5, 200), 200)
        for s in report.energy_partial_sums:
            assert np.all(np.diff(s) >= 0.0)

    def test_term_count_beyond_cutoff_rejected(self):
        sp = split(PSI_N1, 0.5, 10)
        with pytest.raises(ContractError):
            insertion_energy_diagnostics(sp, 11)
        with pytest.raises(DomainError):
            insertion_energy_diagnostics(sp, 0)
