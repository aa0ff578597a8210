# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Test the census of the primes with a small fractional part of sqrt p."""

import math
from dataclasses import replace
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from pyfracsieve.census import (
    CensusConfig,
    equidistribution_report,
    frac_sqrt_mask,
    frac_sqrt_test,
    omega_count,
    pr_lower_bound,
    predicted_main_term,
    rough_count,
    run_census,
    sifting_product,
)
from pyfracsieve.errors import ConfigurationError, DomainError, UndecidableError


def naive_census(x, lambda_, r):
    """Plain loop counting primes, solutions and P_r solutions in (x, 2x]."""
    primes = solutions = pr = 0
    for p in range(x + 1, 2 * x + 1):
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            continue
        primes += 1
        if math.sqrt(p) - math.isqrt(p) < p ** -float(lambda_):
            solutions += 1
            if naive_omega(p + 2) <= r:
                pr += 1
    return primes, solutions, pr


def plain_primes(limit):
    """Sieve of Eratosthenes on a bytearray, primes up to limit."""
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for d in range(2, math.isqrt(limit) + 1):
        if flags[d]:
            flags[d * d :: d] = bytearray(len(range(d * d, limit + 1, d)))
    return [n for n in range(limit + 1) if flags[n]]


def naive_omega(n):
    count, d = 0, 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            count += 1
        d += 1
    return count + (n > 1)


class TestFracSqrt(object):
    @pytest.mark.parametrize(
        "p, expected", [(101, True), (3, True), (7, False), (10**6 + 3, True)]
    )
    def test_examples(self, p, expected):
        result = frac_sqrt_test(p, Fraction(6, 25))
        assert result.passed is expected
        assert not result.escalated

    def test_perfect_square_neighbour(self):
        assert frac_sqrt_test(10**8 + 1, Fraction(1, 12)).passed

    def test_escalation(self):
        frac = mpmath.sqrt(101) - 10
        lambda_ = float(-mpmath.log(frac) / mpmath.log(101))
        result = frac_sqrt_test(101, lambda_)
        assert result.escalated
        with mpmath.workprec(256):
            exact = mpmath.sqrt(101) - 10 < mpmath.exp(-mpmath.mpf(lambda_) * mpmath.log(101))
        assert result.passed is bool(exact)

    def test_undecidable(self):
        frac = mpmath.sqrt(101) - 10
        lambda_ = float(-mpmath.log(frac) / mpmath.log(101))
        with pytest.raises(UndecidableError):
            frac_sqrt_test(101, lambda_, max_bits=32)

    def test_mask_matches_scalar(self):
        values = np.arange(2, 3000)
        mask, _ = frac_sqrt_mask(values, Fraction(1, 12))
        expected = [frac_sqrt_test(int(v), Fraction(1, 12)).passed for v in values]
        assert mask.tolist() == expected

    @pytest.mark.parametrize("p", [2**63 - 25, 2**64 + 13, 10**30 + 57])
    def test_beyond_double_precision(self, p):
        result = frac_sqrt_test(p, Fraction(1, 12))
        with mpmath.workprec(400):
            frac = mpmath.sqrt(p) - math.isqrt(p)
            expected = frac < mpmath.mpf(p) ** (-mpmath.mpf(1) / 12)
        assert result.passed is bool(expected)

    def test_large_value_near_one(self):
        # {sqrt(2^63 - 25)} is close to 1.
        assert not frac_sqrt_test(2**63 - 25, Fraction(1, 12)).passed

    def test_mask_rejects_large_values(self):
        with pytest.raises(DomainError):
            frac_sqrt_mask([101, 2**60], Fraction(1, 12))

    def test_monotone_in_lambda(self):
        rng = np.random.default_rng(20251019)
        primes = rng.choice(np.array(plain_primes(2 * 10**6)), size=10**4, replace=False)
        masks = [
            frac_sqrt_mask(primes, lam)[0]
            for lam in (Fraction(1, 100), Fraction(1, 20), Fraction(1, 12), Fraction(1, 5))
        ]
        for wider, narrower in zip(masks, masks[1:]):
            assert np.all(narrower <= wider)
        assert masks[0].sum() > masks[-1].sum()

    def test_domain(self):
        with pytest.raises(DomainError):
            frac_sqrt_test(1, 0.1)


def test_omega_count_reexport():
    assert omega_count(12, [2, 3]) == 3
    assert omega_count(1024, [2]) == 10


class TestCensusConfig(object):
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"x": 100},
            {"x": 10**4, "segment_size": 100},
            {"x": 3 * 10**9},
            {"x": 10**4, "segment_size": 10**9},
            {"x": 10**4, "residue_moduli": (1,)},
            {"x": 10**4, "threads": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            CensusConfig(lambda_=Fraction(1, 12), **kwargs)

    @pytest.mark.parametrize("lambda_", [0, Fraction(1, 4), 0.3])
    def test_invalid_lambda(self, lambda_):
        with pytest.raises(DomainError):
            CensusConfig(10**4, lambda_)

    def test_relaxed(self):
        config = CensusConfig(100, Fraction(1, 12), segment_size=10, strict=False)
        assert config.x == 100


class TestCensus(object):
    @pytest.mark.parametrize("x, segment", [(100, 10), (1000, 37), (5000, 4999)])
    def test_against_naive_loop(self, x, segment):
        lambda_ = Fraction(1, 12)
        config = CensusConfig(x, lambda_, segment_size=segment, strict=False)
        result = run_census(config)
        assert (result.prime_count, result.solution_count, result.pr_count) == naive_census(
            x, lambda_, 4
        )

    def test_invariants(self):
        result = run_census(CensusConfig(10**5, Fraction(1, 12), r=3, segment_size=10**4))
        result.check()
        assert result.pr_count <= result.solution_count <= result.prime_count
        assert sum(result.omega_histogram.values()) == result.solution_count
        assert result.pr_count == result.pr_count_at(3)
        assert result.residue_breakdown[(2, 1)] == result.solution_count
        assert result.non_coprime_breakdown[(2, 0)] == 0
        assert min(result.omega_histogram) >= 1

    def test_pr_counts_grow_with_r(self):
        result = run_census(CensusConfig(10**5, Fraction(1, 20), segment_size=10**4))
        counts = [result.pr_count_at(r) for r in range(1, 12)]
        assert counts == sorted(counts)
        assert counts[-1] == result.solution_count

    def test_independent_of_segments_and_threads(self):
        config = CensusConfig(10**5, Fraction(1, 10), segment_size=10**4)
        reference = run_census(config)
        assert run_census(replace(config, segment_size=33333)) == reference
        assert run_census(replace(config, threads=4)) == reference

    def test_decreasing_in_lambda(self):
        counts = [
            run_census(CensusConfig(10**5, lam, segment_size=10**5)).solution_count
            for lam in (Fraction(1, 20), Fraction(1, 12), Fraction(1, 6))
        ]
        assert counts == sorted(counts, reverse=True)

    @pytest.mark.slow
    def test_tiny_lambda(self):
        result = run_census(CensusConfig(10**6, Fraction(1, 10**9)))
        expected = sum(1 for p in plain_primes(2 * 10**6) if p > 10**6)
        assert expected == 70435
        assert result.prime_count == expected
        assert result.solution_count == expected

    @pytest.mark.slow
    def test_main_term(self):
        result = run_census(CensusConfig(10**6, Fraction(10, 151)))
        assert result.prime_count == 70435
        assert result.solution_count == pytest.approx(result.predicted_main_term, rel=0.2)


def test_predicted_main_term():
    x, lam = 10**6, 0.1
    expected = ((2 * x) ** 0.9 - x**0.9) / (0.9 * math.log(x))
    assert predicted_main_term(x, lam) == pytest.approx(expected)


class TestEquidistribution(object):
    def test_balanced_classes(self):
        result = run_census(CensusConfig(10**6, Fraction(1, 12), residue_moduli=(3, 4)))
        rows, non_coprime = equidistribution_report(result, 3)
        assert [row.residue for row in rows] == [1, 2]
        for row in rows:
            assert row.share_ratio == pytest.approx(1, abs=0.1)
        assert sum(non_coprime.values()) <= 1
        assert sum(row.observed for row in rows) + sum(non_coprime.values()) == (
            result.solution_count
        )

    def test_untallied_modulus(self):
        result = run_census(CensusConfig(10**4, Fraction(1, 12), residue_moduli=(3,)))
        with pytest.raises(DomainError):
            equidistribution_report(result, 7)


class TestRoughCount(object):
    def test_buchstab_density(self, tables):
        result = rough_count(10**6, 10**5, 10**3, tables)
        assert result.u == pytest.approx(2)
        assert result.predicted == pytest.approx(7238.2, abs=0.1)
        assert result.observed == pytest.approx(result.predicted, rel=0.05)

    def test_primes_only(self, tables):
        # For u < 2 the rough integers of the interval are its primes.
        result = rough_count(10**6, 10**5, 10**4, tables)
        assert result.u == pytest.approx(1.5)
        assert result.predicted == pytest.approx(2 / 3 * 10**5 / math.log(10**4))
        assert result.observed == sum(1 for p in plain_primes(1100000) if p > 10**6)
        assert result.observed == pytest.approx(result.predicted, rel=0.05)

    @pytest.mark.parametrize("z", [10**5, 1000, 100, 32])
    def test_density_band(self, tables, z):
        result = rough_count(10**6, 10**5, z, tables)
        assert 1.2 - 1e-9 <= result.u <= 4
        assert 0.9 <= result.observed / result.predicted <= 1.1

    def test_against_naive_loop(self, tables):
        result = rough_count(5000, 1000, 30, tables, segment_size=77)
        expected = sum(
            all(n % p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)) for n in range(5001, 6001)
        )
        assert result.observed == expected

    @pytest.mark.parametrize("x, y, z", [(100, 10, 1), (100, 200, 10), (100, 10, 100)])
    def test_domain(self, tables, x, y, z):
        with pytest.raises(DomainError):
            rough_count(x, y, z, tables)


def test_sifting_product(tables):
    result = sifting_product(10**5, tables)
    assert result.ratio == pytest.approx(1, abs=0.01)
    with pytest.raises(DomainError):
        sifting_product(3, tables)


def test_pr_lower_bound(tables):
    bound = pr_lower_bound(10**6, Fraction(10, 151), 4, tables)
    assert bound.delta_report.verdict == "positive"
    assert 0 < bound.value < bound.main_term
