# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Test the integrators of T_r."""

from dataclasses import replace

import numpy as np
import pytest
from pyfracsieve.errors import ConfigurationError, ConvergenceError, DomainError
from pyfracsieve.quadrature import (
    NESTED_ADAPTIVE,
    QMC,
    QuadSpec,
    integrand,
    integrand_support,
    integrate_Tr,
    integrate_Tr_qmc,
    region_volume,
    standard_lower_exponent,
)


def ones(t):
    return np.ones(len(t))


class TestQuadSpec(object):
    @pytest.mark.parametrize("r", [3, 8, 9])
    def test_invalid_dimension(self, r):
        with pytest.raises(ConfigurationError):
            QuadSpec(r)

    def test_invalid_settings(self):
        with pytest.raises(ConfigurationError):
            QuadSpec(4, lower_exponent=1.5)
        with pytest.raises(ConfigurationError):
            QuadSpec(4, abs_tol=0)
        with pytest.raises(ConfigurationError):
            QuadSpec(4, mc_mapping="sphere")
        with pytest.raises(ConfigurationError):
            QuadSpec(4, mc_replicates=1)

    def test_limits(self):
        spec = QuadSpec(4)
        assert spec.lower == pytest.approx(1 / 14)
        assert spec.upper == pytest.approx(1 / 5)
        assert spec.omega_range == pytest.approx(10)
        assert QuadSpec(6).lower == standard_lower_exponent(6) == pytest.approx(1 / 12)

    def test_for_r(self):
        spec = QuadSpec(4, lower_exponent=0.1, rel_tol=1e-6)
        other = spec.for_r(5)
        assert other.r == 5
        assert other.lower == pytest.approx(1 / 12)
        assert other.rel_tol == 1e-6


class TestIntegrand(object):
    def test_value_inside(self, tables):
        spec = QuadSpec(4)
        t = np.array([0.1, 0.1, 0.1, 0.1])
        assert integrand(t, spec, tables) == pytest.approx(tables.omega(6.0) * 1e5)

    def test_zero_outside(self, tables):
        spec = QuadSpec(4)
        points = np.array(
            [
                [0.05, 0.1, 0.1, 0.1],  # t1 below L
                [0.1, 0.09, 0.1, 0.1],  # not ordered
                [0.1, 0.1, 0.1, 0.5],  # above the last cap
            ]
        )
        assert not integrand_support(points, spec).any()
        assert np.all(integrand(points, spec, tables) == 0.0)

    def test_dimension_mismatch(self, tables):
        with pytest.raises(DomainError):
            integrand(np.array([0.1, 0.1, 0.1]), QuadSpec(4), tables)


class TestRegionVolume(object):
    def test_empty_region(self):
        assert region_volume(QuadSpec(4, lower_exponent=0.2)) == 0.0

    @pytest.mark.parametrize("r", [4, 5])
    def test_against_qmc(self, tables, r):
        spec = QuadSpec(r, mc_samples=2**16)
        expected = region_volume(spec)
        assert expected > 0
        estimate = integrate_Tr_qmc(spec, tables, function=ones)
        assert estimate.value == pytest.approx(expected, rel=0.02)

    def test_box_mapping(self, tables):
        spec = QuadSpec(4, mc_samples=2**18, mc_mapping="box")
        estimate = integrate_Tr_qmc(spec, tables, function=ones)
        assert estimate.value == pytest.approx(region_volume(spec), rel=0.05)


class TestNestedAdaptive(object):
    def test_empty_region(self, tables):
        result = integrate_Tr(QuadSpec(4, lower_exponent=0.2), tables)
        assert result.value == 0.0
        assert result.error_estimate == 0.0
        assert result.method == NESTED_ADAPTIVE

    @pytest.mark.parametrize("r", [4, 5, 6, 7])
    def test_converges(self, tables, r):
        spec = QuadSpec(r)
        result = integrate_Tr(spec, tables)
        assert result.value > 0
        assert result.error_estimate <= max(spec.abs_tol, spec.rel_tol * result.value)
        assert result.evaluations > 0
        assert result.provenance["r"] == r

    def test_small_values(self, tables):
        assert integrate_Tr(QuadSpec(4), tables).value < 0.4530097
        assert integrate_Tr(QuadSpec(7), tables).value < 0.000830

    def test_decreasing_in_lower_exponent(self, tables):
        values = [
            integrate_Tr(QuadSpec(4, lower_exponent=L), tables).value
            for L in (1 / 14, 0.09, 0.1, 0.15)
        ]
        assert values == sorted(values, reverse=True)

    @pytest.mark.parametrize("r", [4, 5])
    def test_tighter_tolerance(self, tables, r):
        spec = QuadSpec(r)
        coarse = integrate_Tr(spec, tables)
        fine = integrate_Tr(replace(spec, rel_tol=spec.rel_tol / 2), tables)
        assert abs(fine.value - coarse.value) <= coarse.error_estimate + fine.error_estimate

    def test_threads(self, tables):
        single = integrate_Tr(QuadSpec(5), tables)
        multi = integrate_Tr(QuadSpec(5, threads=3), tables)
        assert multi.value == pytest.approx(single.value, rel=1e-12)

    def test_budget_exhausted(self, tables):
        spec = QuadSpec(4, rel_tol=0, abs_tol=1e-300, max_depth=0)
        with pytest.raises(ConvergenceError) as excinfo:
            integrate_Tr(spec, tables)
        best = excinfo.value.best_estimate
        assert best is not None
        assert best.value == pytest.approx(integrate_Tr(QuadSpec(4), tables).value, rel=1e-2)


class TestQuasiMonteCarlo(object):
    @pytest.mark.parametrize(
        "r",
        [4, 5, pytest.param(6, marks=pytest.mark.slow), pytest.param(7, marks=pytest.mark.slow)],
    )
    def test_agrees_with_nested(self, tables, r):
        nested = integrate_Tr(QuadSpec(r), tables)
        qmc = integrate_Tr_qmc(QuadSpec(r, mc_samples=2**18), tables)
        assert qmc.method == QMC
        bound = 3 * qmc.error_estimate + nested.error_estimate + 1e-3 * nested.value
        assert abs(qmc.value - nested.value) <= bound

    def test_reproducible(self, tables):
        spec = QuadSpec(4, mc_samples=2**14, mc_seed=7)
        first = integrate_Tr_qmc(spec, tables)
        assert integrate_Tr_qmc(spec, tables).value == first.value
        threaded = integrate_Tr_qmc(replace(spec, threads=2), tables)
        assert threaded.value == first.value
        assert integrate_Tr_qmc(replace(spec, mc_seed=8), tables).value != first.value

    def test_too_few_samples(self, tables):
        with pytest.raises(ConfigurationError):
            integrate_Tr_qmc(QuadSpec(4, mc_samples=1000), tables)

    def test_empty_region(self, tables):
        spec = QuadSpec(4, lower_exponent=0.25, mc_samples=2**14)
        assert integrate_Tr_qmc(spec, tables).value == 0.0
