# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Test the sieving and factorisation helpers."""

import numpy as np
import pytest
from pyfracsieve.errors import ConsistencyError, DomainError
from pyfracsieve.primes import (
    iter_segments,
    omega_count,
    omega_counts,
    prime_factors,
    rough_mask,
    sieve_segment,
    small_primes,
    totient,
)


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def test_small_primes():
    assert small_primes(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert small_primes(1).size == 0
    assert len(small_primes(10**6)) == 78498


def test_iter_segments():
    assert list(iter_segments(5, 17, 5)) == [(5, 10), (10, 15), (15, 17)]
    assert list(iter_segments(5, 5, 5)) == []


@pytest.mark.parametrize("start, stop", [(0, 50), (100, 200), (997, 1009), (10**6, 10**6 + 500)])
def test_sieve_segment(start, stop):
    base = small_primes(int(stop**0.5) + 1)
    expected = [n for n in range(start, stop) if naive_is_prime(n)]
    assert sieve_segment(start, stop, base).tolist() == expected


def test_sieve_segment_count():
    base = small_primes(1415)
    count = sum(len(sieve_segment(a, b, base)) for a, b in iter_segments(10**6 + 1, 2 * 10**6 + 1, 10**5))
    assert count == 70435


def test_rough_mask():
    base = small_primes(10)
    mask = rough_mask(100, 130, 10, base)
    expected = [all(n % p for p in (2, 3, 5, 7)) for n in range(100, 130)]
    assert mask.tolist() == expected


class TestOmegaCount(object):
    def test_values(self):
        primes = small_primes(100)
        assert omega_count(12, primes) == 3
        assert omega_count(1024, primes) == 10
        assert omega_count(97, primes) == 1
        assert omega_count(2 * 3 * 5 * 7 * 11, primes) == 5

    def test_large_cofactor(self):
        # 101 * 103 > 100^2 cannot be certified from the primes below 100.
        with pytest.raises(ConsistencyError):
            omega_count(101 * 103, small_primes(100))
        assert omega_count(101 * 103, small_primes(103)) == 2

    def test_domain(self):
        with pytest.raises(DomainError):
            omega_count(1, small_primes(10))

    def test_vectorised(self):
        primes = small_primes(100)
        values = np.arange(2, 5000)
        expected = [omega_count(int(v), primes) for v in values]
        assert omega_counts(values, primes).tolist() == expected
        with pytest.raises(ConsistencyError):
            omega_counts(np.array([10**6]), small_primes(100))


def test_prime_factors_and_totient():
    assert prime_factors(101) == [101]
    assert prime_factors(360) == [2, 3, 5]
    assert totient(1) == 1
    assert totient(12) == 4
    assert totient(101) == 100
    with pytest.raises(DomainError):
        totient(0)
