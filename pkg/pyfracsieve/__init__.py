# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
import logging

from .census import CensusConfig, CensusResult, frac_sqrt_test, rough_count, run_census
from .errors import PyFracSieveError
from .init import auto_init, get_default_tables, init, omega, sieve_f, sieve_F
from .quadrature import IntegralResult, QuadSpec, integrate_Tr, integrate_Tr_qmc
from .sieve_functions import SieveTables, build_tables, load_tables, twin_prime_constant
from .verdict import DeltaReport, ThresholdResult, check_theorem, critical_lambda, delta

logging.getLogger("pyfracsieve").addHandler(logging.NullHandler())

__all__ = (
    "CensusConfig",
    "CensusResult",
    "DeltaReport",
    "IntegralResult",
    "PyFracSieveError",
    "QuadSpec",
    "SieveTables",
    "ThresholdResult",
    "auto_init",
    "build_tables",
    "check_theorem",
    "critical_lambda",
    "delta",
    "frac_sqrt_test",
    "get_default_tables",
    "init",
    "integrate_Tr",
    "integrate_Tr_qmc",
    "load_tables",
    "omega",
    "rough_count",
    "run_census",
    "sieve_F",
    "sieve_f",
    "twin_prime_constant",
)
