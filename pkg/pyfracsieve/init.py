# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Initialisation routines.

Those build the process-wide default sieve tables and can be run only once.
Library functions taking an optional ``tables`` argument fall back on those
defaults, initialising them lazily through auto_init.

"""

import logging
from threading import RLock

from .sieve_functions import (
    DEFAULT_C2_TOL,
    DEFAULT_GRID_END,
    DEFAULT_STEP,
    build_tables,
    load_tables,
)

logger = logging.getLogger(__name__)

_LOCK = RLock()

_DEFAULT_TABLES = None


def init(grid_end=DEFAULT_GRID_END, step=DEFAULT_STEP, c2_tol=DEFAULT_C2_TOL, path=None):
    """Build (or load) the default sieve tables.

    Parameters
    ----------
    grid_end : float, optional
        Right end of the tables.
    step : float, optional
        Grid spacing.
    c2_tol : float, optional
        Absolute tolerance on the twin prime constant.
    path : str, optional
        Table file written by SieveTables.dump. When given the other
        parameters are ignored.

    """
    global _DEFAULT_TABLES
    with _LOCK:
        if _DEFAULT_TABLES is not None:
            raise RuntimeError("Can only initialise the default tables once")
        if path:
            tables = load_tables(path)
        else:
            tables = build_tables(grid_end, step, c2_tol)
        logger.info("Default sieve tables initialised: {}".format(tables))
        _DEFAULT_TABLES = tables


def auto_init(**kwargs):
    """Initialise the default tables unless it was already done.

    Keyword arguments are forwarded to init.

    """
    with _LOCK:
        if _DEFAULT_TABLES is None:
            init(**kwargs)


def get_default_tables():
    """Default tables, built on first access."""
    auto_init()
    return _DEFAULT_TABLES


def omega(u):
    """Buchstab's function evaluated with the default tables."""
    return get_default_tables().omega(u)


def sieve_f(s):
    """Lower sieve function evaluated with the default tables."""
    return get_default_tables().sieve_f(s)


def sieve_F(s):
    """Upper sieve function evaluated with the default tables."""
    return get_default_tables().sieve_F(s)


def _reset():
    """Forget the default tables. Only meant for the test suite."""
    global _DEFAULT_TABLES
    with _LOCK:
        _DEFAULT_TABLES = None
