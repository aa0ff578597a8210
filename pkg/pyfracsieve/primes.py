# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Prime sieving helpers shared by the sieve functions and the census.

Functions
---------
small_primes : All primes up to a limit (plain sieve of Eratosthenes).
iter_segments : Split a half-open integer range into segments.
sieve_segment : Primes of a segment, given the base primes.
rough_mask : Mark the integers of a segment free of prime factors below z.
omega_count : Number of prime factors counted with multiplicity.
omega_counts : Vectorised version of omega_count.
totient : Euler's phi of a small integer.

"""

import logging
from math import isqrt

import numpy as np

from .errors import ConsistencyError, DomainError

logger = logging.getLogger(__name__)


def small_primes(limit):
    """Return the primes p <= limit as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def iter_segments(start, stop, segment_size):
    """Yield consecutive half-open segments [a, b) covering [start, stop)."""
    a = start
    while a < stop:
        b = min(a + segment_size, stop)
        yield a, b
        a = b


def sieve_segment(start, stop, base_primes):
    """Return the primes in [start, stop).

    Parameters
    ----------
    start, stop : int
        Bounds of the half-open segment.
    base_primes : np.ndarray
        Sorted primes covering at least isqrt(stop - 1).

    """
    if stop <= start:
        return np.array([], dtype=np.int64)
    mask = np.ones(stop - start, dtype=bool)
    if start < 2:
        mask[: 2 - start] = False
    for p in base_primes:
        p = int(p)
        if p * p >= stop:
            break
        first = max(p * p, -(-start // p) * p)
        mask[first - start :: p] = False
    return start + np.flatnonzero(mask).astype(np.int64)


def rough_mask(start, stop, z, base_primes):
    """Mask of the integers of [start, stop) having no prime factor below z.

    Integers below z are never considered: the caller guarantees start >= z.

    """
    mask = np.ones(max(stop - start, 0), dtype=bool)
    for p in base_primes:
        p = int(p)
        if p >= z:
            break
        first = -(-start // p) * p
        mask[first - start :: p] = False
    return mask


def omega_count(m, prime_list, sieve_limit=None):
    """Return Omega(m), the number of prime factors of m with multiplicity.

    Parameters
    ----------
    m : int
        Integer >= 2 to factor.
    prime_list : sequence of int
        Sorted list of all the primes up to sieve_limit.
    sieve_limit : int, optional
        Bound up to which prime_list is complete. Defaults to the largest
        listed prime.

    Raises
    ------
    DomainError : if m < 2.
    ConsistencyError : if the prime list does not reach the square root of
        the remaining cofactor.

    """
    if m < 2:
        raise DomainError("Omega is only defined for m >= 2, got {}".format(m))
    if sieve_limit is None:
        sieve_limit = int(prime_list[-1]) if len(prime_list) else 1
    count = 0
    rest = int(m)
    for p in prime_list:
        p = int(p)
        if p * p > rest:
            break
        while rest % p == 0:
            rest //= p
            count += 1
    else:
        if rest > 1 and isqrt(rest) > sieve_limit:
            mess = "Prime list up to {} cannot certify the cofactor {} of {}"
            raise ConsistencyError(mess.format(sieve_limit, rest, m))
    if rest > 1:
        count += 1
    return count


def omega_counts(values, prime_list, sieve_limit=None):
    """Vectorised Omega for an array of integers, all >= 2.

    prime_list must hold every prime up to sieve_limit (default: its last
    entry) and sieve_limit must reach isqrt(max(values)).

    """
    rest = np.array(values, dtype=np.int64)
    counts = np.zeros(rest.shape, dtype=np.int64)
    if rest.size == 0:
        return counts
    if rest.min() < 2:
        raise DomainError("Omega is only defined for integers >= 2")
    if sieve_limit is None:
        sieve_limit = int(prime_list[-1]) if len(prime_list) else 1
    top = int(rest.max())
    if isqrt(top) > sieve_limit:
        mess = "Prime list up to {} does not cover the square root of {}"
        raise ConsistencyError(mess.format(sieve_limit, top))
    for p in prime_list:
        p = int(p)
        if p * p > top:
            break
        divisible = rest % p == 0
        while divisible.any():
            counts += divisible
            rest = np.where(divisible, rest // p, rest)
            divisible = rest % p == 0
    counts += rest > 1
    return counts


def prime_factors(n):
    """Return the distinct prime factors of a small positive integer."""
    factors = []
    rest = n
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            factors.append(p)
            while rest % p == 0:
                rest //= p
        p += 1 if p == 2 else 2
    if rest > 1:
        factors.append(rest)
    return factors


def totient(n):
    """Euler's phi of a small positive integer."""
    if n < 1:
        raise DomainError("phi is only defined for n >= 1, got {}".format(n))
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result
