import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairent import meanfield
from pairent.errors import GapBracketError, InvalidModelError, QuadratureError
from pairent.model import DensityProfile

ALL_PROFILES = list(DensityProfile)


# Closed-form antiderivatives of the ALC integral, per profile; independent
# oracles for the quadrature route. asinh(w/gap) integrates 1/sqrt(e^2+gap^2).
def alc_exact(profile, gap, w=1.0):
    root = math.hypot(w, gap)
    arc = math.asinh(w / gap)
    if profile is DensityProfile.UNIFORM:
        return gap * arc / w
    if profile is DensityProfile.ABS:
        return 2.0 * gap * (root - gap) / w**2
    if profile is DensityProfile.SQUARE:
        return 3.0 * gap * (w * root - gap * gap * arc) / (2.0 * w**3)
    if profile is DensityProfile.PARABOLIC:
        return gap * ((w * w + gap * gap / 2.0) * arc - w * root / 2.0) / (2.0 * w**3 / 3.0)
    if profile is DensityProfile.TENT:
        return 2.0 * gap * (w * arc - root + gap) / w**2
    raise AssertionError(profile)


class TestBulkGap:
    def test_reference_value_at_unit_coupling(self):
        assert meanfield.bulk_gap(1.0) == pytest.approx(1.0 / math.sinh(1.0), abs=1e-15)
        assert meanfield.bulk_gap(1.0) == pytest.approx(0.8509181282393216, abs=1e-12)

    def test_half_coupling(self):
        assert meanfield.bulk_gap(0.5) == pytest.approx(1.0 / math.sinh(2.0), abs=1e-15)

    def test_strong_coupling_scales_linearly(self):
        lam = 1e6
        assert meanfield.bulk_gap(lam) / lam == pytest.approx(1.0, abs=1e-9)

    def test_zero_coupling_limit(self):
        assert meanfield.bulk_gap(0.0) == 0.0

    def test_negative_coupling_rejected(self):
        with pytest.raises(InvalidModelError):
            meanfield.bulk_gap(-0.2)

    def test_scales_with_cutoff(self):
        assert meanfield.bulk_gap(1.0, 2.5) == pytest.approx(2.5 * meanfield.bulk_gap(1.0))


class TestConcurrenceProfile:
    def test_fermi_surface_level_is_maximal(self):
        assert meanfield.concurrence_profile(0.0, 0.3) == 1.0

    def test_symmetry_point(self):
        gap = 0.42
        assert meanfield.concurrence_profile(gap, gap) == pytest.approx(1 / math.sqrt(2))

    def test_matches_pair_amplitude_product(self):
        # cross-check against 4 u^2 v^2 with u^2, v^2 = (1 +- e/E)/2
        gap = meanfield.bulk_gap(1.0)
        for e in (0.1, 0.5, 0.9):
            quasi = math.hypot(e, gap)
            u2 = (1.0 + e / quasi) / 2.0
            v2 = (1.0 - e / quasi) / 2.0
            expected = math.sqrt(4.0 * u2 * v2)
            assert meanfield.concurrence_profile(e, gap) == pytest.approx(expected, abs=1e-14)

    def test_no_pairing_convention(self):
        assert meanfield.concurrence_profile(0.0, 0.0) == 0.0

    def test_negative_gap_rejected(self):
        with pytest.raises(InvalidModelError):
            meanfield.concurrence_profile(0.1, -0.1)

    @given(st.floats(min_value=-1.0, max_value=1.0))
    def test_even_and_bounded(self, e):
        gap = 0.3
        value = meanfield.concurrence_profile(e, gap)
        assert 0.0 < value <= 1.0
        assert value == meanfield.concurrence_profile(-e, gap)

    def test_strictly_decreasing_in_energy_magnitude(self):
        gap = 0.25
        values = [meanfield.concurrence_profile(e, gap) for e in np.linspace(0, 1, 50)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestAlcThermo:
    def test_uniform_matches_closed_form_at_unit_coupling(self):
        assert meanfield.alc_thermo(1.0) == pytest.approx(0.8509181282393216, abs=1e-11)

    def test_uniform_quadrature_vs_closed_form_grid(self):
        for lam in np.geomspace(0.05, 20.0, 25):
            quad_value = meanfield.alc_thermo(lam, DensityProfile.UNIFORM)
            assert abs(quad_value - meanfield.alc_closed_uniform(lam)) < 1e-10

    @pytest.mark.parametrize("profile", ALL_PROFILES)
    def test_strong_coupling_limit_is_one(self, profile):
        assert meanfield.alc_thermo(1e4, profile, gap_policy="B") > 1.0 - 1e-6

    @pytest.mark.parametrize("profile", ALL_PROFILES)
    @pytest.mark.parametrize("lam", [0.3, 1.0, 5.0])
    def test_policy_b_matches_antiderivative(self, profile, lam):
        gap = meanfield.bulk_gap(lam)
        expected = alc_exact(profile, gap)
        assert meanfield.alc_thermo(lam, profile, gap_policy="B") == pytest.approx(
            expected, abs=1e-10)

    @pytest.mark.parametrize("profile", ALL_PROFILES)
    @pytest.mark.parametrize("lam", [1.0, 2.0, 5.0])
    def test_policy_a_matches_antiderivative(self, profile, lam):
        gap = meanfield.gap_general(lam, profile)
        expected = alc_exact(profile, gap)
        assert meanfield.alc_thermo(lam, profile, gap_policy="A") == pytest.approx(
            expected, abs=1e-10)

    def test_zero_coupling(self):
        assert meanfield.alc_thermo(0.0, DensityProfile.TENT) == 0.0

    def test_bad_policy_rejected(self):
        with pytest.raises(InvalidModelError):
            meanfield.alc_thermo(1.0, gap_policy="C")

    def test_monotone_increasing_in_coupling(self):
        grid = np.geomspace(0.05, 10.0, 40)
        values = [meanfield.alc_closed_uniform(l) for l in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("gap_policy,lams", [("A", (1.0, 2.0, 5.0)),
                                                 ("B", (0.2, 1.0, 5.0))])
    def test_density_ordering_at_fixed_coupling(self, gap_policy, lams):
        # increasing weight at the Fermi level: square < abs < uniform < parabolic < tent
        order = (DensityProfile.SQUARE, DensityProfile.ABS, DensityProfile.UNIFORM,
                 DensityProfile.PARABOLIC, DensityProfile.TENT)
        for lam in lams:
            values = [meanfield.alc_thermo(lam, p, gap_policy=gap_policy) for p in order]
            assert all(a < b for a, b in zip(values, values[1:])), (gap_policy, lam, values)


class TestGapGeneral:
    @pytest.mark.parametrize("lam", [0.3, 1.0, 5.0])
    def test_uniform_reduces_to_closed_form(self, lam):
        assert meanfield.gap_general(lam, DensityProfile.UNIFORM) == pytest.approx(
            meanfield.bulk_gap(lam), abs=1e-13)

    def test_abs_profile_has_rational_solution_at_unit_coupling(self):
        # 1 = 2 lam (sqrt(1 + gap^2) - gap) solved by gap = 3/4 at lam = 1
        assert meanfield.gap_general(1.0, DensityProfile.ABS) == pytest.approx(
            0.75, abs=1e-12)

    def test_gap_ordering_follows_fermi_level_density(self):
        gaps = {p: meanfield.gap_general(1.0, p) for p in ALL_PROFILES}
        assert (gaps[DensityProfile.SQUARE] < gaps[DensityProfile.ABS]
                < gaps[DensityProfile.UNIFORM] < gaps[DensityProfile.PARABOLIC]
                < gaps[DensityProfile.TENT])

    def test_tent_gap_exceeds_uniform(self):
        assert meanfield.gap_general(1.0, DensityProfile.TENT) > meanfield.bulk_gap(1.0)

    @pytest.mark.parametrize("profile,lam", [(DensityProfile.SQUARE, 0.3),
                                             (DensityProfile.ABS, 0.4)])
    def test_no_bracket_below_pairing_threshold(self, profile, lam):
        # square stops pairing below lam = 2/3, abs below 1/2
        with pytest.raises(GapBracketError):
            meanfield.gap_general(lam, profile)

    def test_zero_coupling(self):
        assert meanfield.gap_general(0.0, DensityProfile.TENT) == 0.0


class TestCondEnergyThermo:
    def test_unit_coupling(self):
        expected = (1.0 / math.tanh(1.0) - 1.0) / 2.0
        assert meanfield.cond_energy_thermo(1.0) == pytest.approx(expected, abs=1e-16)
        assert meanfield.cond_energy_thermo(1.0) == pytest.approx(
            0.15651764274966565, abs=1e-14)

    def test_weak_coupling_vanishes(self):
        assert meanfield.cond_energy_thermo(0.01) < 1e-80
        assert meanfield.cond_energy_thermo(0.0) == 0.0

    def test_strong_coupling_value(self):
        # (coth(1/10) - 1)/2; sits about 9.7% below the lambda/2 asymptote
        assert meanfield.cond_energy_thermo(10.0) == pytest.approx(
            4.516655566126994, abs=1e-12)

    def test_monotone_increasing(self):
        grid = np.geomspace(0.05, 10.0, 40)
        values = [meanfield.cond_energy_thermo(l) for l in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_differential_relation_with_alc(self):
        # 2 dE/dlambda = ALC^2, central differences at h = 1e-4
        h = 1e-4
        for lam in np.linspace(0.1, 10.0, 34):
            deriv = (meanfield.cond_energy_thermo(lam + h)
                     - meanfield.cond_energy_thermo(lam - h)) / (2 * h)
            assert abs(2 * deriv - meanfield.alc_closed_uniform(lam) ** 2) < 1e-6


class TestRatioThermo:
    def test_matches_quotient_where_representable(self):
        for lam in (0.2, 1.0, 5.0):
            quotient = (meanfield.alc_closed_uniform(lam) ** 2
                        / meanfield.cond_energy_thermo(lam))
            assert meanfield.ratio_thermo(lam) == pytest.approx(quotient, rel=1e-12)

    def test_survives_cond_energy_underflow(self):
        # the naive quotient divides by zero below lambda ~ 0.053
        assert meanfield.cond_energy_thermo(0.02) == 0.0
        assert meanfield.ratio_thermo(0.02) == pytest.approx(4.0 / 0.02**2, rel=1e-10)

    def test_strictly_decreasing(self):
        grid = np.geomspace(0.02, 20.0, 60)
        values = [meanfield.ratio_thermo(l) for l in grid]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_requires_positive_coupling(self):
        with pytest.raises(InvalidModelError):
            meanfield.ratio_thermo(0.0)


class TestOrderParameter:
    def test_consistency_with_gap_at_unit_coupling(self):
        alc = meanfield.alc_closed_uniform(1.0)
        assert meanfield.order_parameter(1.0, 1.0, alc) == pytest.approx(
            meanfield.bulk_gap(1.0), abs=1e-15)

    def test_no_pairing_no_order(self):
        assert meanfield.order_parameter(2.0, 1.0, 0.0) == 0.0

    def test_half_coupling_equals_gap(self):
        alc = meanfield.alc_closed_uniform(0.5)
        assert meanfield.order_parameter(0.5, 1.0, alc) == pytest.approx(
            1.0 / math.sinh(2.0), abs=1e-15)


class TestBulkSolve:
    def test_uniform_fields(self):
        bulk = meanfield.bulk_solve(1.0)
        assert bulk.gap == pytest.approx(0.8509181282393216, abs=1e-12)
        assert bulk.alc == pytest.approx(0.8509181282393216, abs=1e-12)
        assert bulk.order_param == pytest.approx(bulk.gap, abs=1e-14)
        assert bulk.cond_energy == pytest.approx(0.15651764274966565, abs=1e-14)

    def test_zero_coupling_row(self):
        bulk = meanfield.bulk_solve(0.0)
        assert (bulk.gap, bulk.alc, bulk.cond_energy, bulk.order_param) == (0, 0, 0, 0)

    def test_non_uniform_has_nan_cond_energy(self):
        bulk = meanfield.bulk_solve(1.0, DensityProfile.TENT)
        assert math.isnan(bulk.cond_energy)
        assert bulk.alc > 0

    def test_policy_a_order_parameter_equals_gap(self):
        # the self-consistent gap equation makes lam * omega * ALC = gap
        bulk = meanfield.bulk_solve(1.5, DensityProfile.ABS, gap_policy="A")
        assert bulk.order_param == pytest.approx(bulk.gap, abs=1e-10)


def test_quadrature_error_carries_estimate():
    with pytest.raises(QuadratureError):
        meanfield._quad_checked(lambda e: math.sin(1e9 * e * e), 0.0, 1.0)
