# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Errors that can happen while tabulating, integrating or counting."""


class PyFracSieveError(Exception):
    """Base exception for all PyFracSieve exceptions."""

    pass


class DomainError(PyFracSieveError, ValueError):
    """Exception signaling that an argument lies outside the domain of the
    function it was passed to (u < 1 for omega, s <= 0 for f and F, ...).

    """

    pass


class ConfigurationError(PyFracSieveError, ValueError):
    """Exception signaling that a table, quadrature or census configuration
    cannot be honoured.

    """

    pass


class PrecisionError(PyFracSieveError):
    """Exception signaling that a requested tolerance is out of reach with the
    configured resources.

    """

    pass


class ConvergenceError(PyFracSieveError):
    """Exception signaling that an adaptive quadrature did not meet its error
    budget.

    Parameters
    ----------
    message : str
        Human readable description.

    best_estimate : IntegralResult, optional
        Best result obtained before giving up.

    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class BracketingError(PyFracSieveError):
    """Exception signaling that a root search did not start from a sign
    change.

    """

    pass


class ConsistencyError(PyFracSieveError):
    """Exception signaling that an internal invariant has been broken."""

    pass


class UndecidableError(PyFracSieveError):
    """Exception signaling that a comparison could not be decided at the
    maximal allowed working precision.

    """

    pass


class TableFileError(PyFracSieveError):
    """Exception signaling that a table file is malformed or was written by an
    incompatible version.

    """

    pass
