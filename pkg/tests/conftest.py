# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Fixtures shared by the test modules."""

import pytest
from pyfracsieve.init import get_default_tables
from pyfracsieve.sieve_functions import build_tables


@pytest.fixture(scope="session")
def tables():
    """Default tables, shared with the command line so that T_r is memoised."""
    return get_default_tables()


@pytest.fixture(scope="session")
def coarse_tables():
    return build_tables(6, 0.005)
