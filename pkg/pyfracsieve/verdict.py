# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Sign of the decisive quantity

    Delta_r(lambda) = e^-gamma s f(s) - 2 T_r,     s = k (1/4 - lambda),

with k = 14 for r = 4 and k = 12 for 5 <= r <= 7. A positive Delta_r(lambda),
beyond its error bar, establishes that {sqrt p} < p^-lambda has infinitely
many prime solutions with p + 2 having at most r prime factors.

"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from threading import RLock

from .errors import BracketingError, ConvergenceError, DomainError
from .init import get_default_tables
from .quadrature import NESTED_ADAPTIVE, QMC, QuadSpec, integrate_Tr, integrate_Tr_qmc

logger = logging.getLogger(__name__)


POSITIVE = "positive"

NEGATIVE = "negative"

INDETERMINATE = "indeterminate"

#: Pairs (lambda, r) for which the inequality is claimed to hold.
THEOREM_PAIRS = (
    (Fraction(10, 151), 4),
    (Fraction(5, 62), 5),
    (Fraction(100, 1203), 6),
    (Fraction(100, 1201), 7),
)

#: Width of the final bracket of critical_lambda.
BISECTION_TOL = 1e-8

#: Largest number of bisection steps.
BISECTION_MAX_ITER = 60

#: Left end of the initial bracket of critical_lambda.
BISECTION_START = 1e-9


@dataclass(frozen=True)
class DeltaReport:
    """Evaluation of Delta_r at one lambda.

    Attributes
    ----------
    lambda_ : Fraction or float
        Exponent lambda as it was given.
    r, k : int
        Dimension of T_r and the associated multiplier.
    s : float
        k (1/4 - lambda), computed exactly before rounding.
    f_s : float
        Lower sieve function at s.
    T_r, T_r_error : float
        Integral and its error estimate.
    lower_term, upper_term : float
        e^-gamma s f(s) and 2 T_r.
    delta : float
        lower_term - upper_term.
    error_bar : float
        Combined error of delta.
    verdict : str
        positive, negative or indeterminate.
    margin_ratio : float
        delta / error_bar.
    method : str
        Integrator used for T_r.

    """

    lambda_: Fraction | float
    r: int
    k: int
    s: float
    f_s: float
    T_r: float
    T_r_error: float
    lower_term: float
    upper_term: float
    delta: float
    error_bar: float
    verdict: str
    margin_ratio: float
    method: str = NESTED_ADAPTIVE
    notes: list = field(default_factory=list, compare=False)


@dataclass(frozen=True)
class ThresholdResult:
    """Critical exponent lambda* at which Delta_r changes sign.

    uncertainty is the half width of the interval of lambda over which Delta_r
    stays within its error bar; certified tells whether Delta_r is certified
    positive and negative at twice that distance on each side of lambda*.
    classical_r is the dimension classical_dimension gives at lambda*, for
    comparison with r.

    """

    r: int
    lambda_star: float
    bracket: tuple
    delta_at_bracket: tuple
    iterations: int
    closed_form: float
    uncertainty: float
    certified: bool
    T_r: float
    T_r_error: float
    classical_r: int

class _IntegralCache(object):
    """Thread safe memo of T_r keyed by tables and quadrature settings."""

    def __init__(self):
        self._values = {}
        self._lock = RLock()

    def get(self, spec, tables, method):
        key = (tables.step, tables.grid_end, tables.tolerance, spec.cache_key(), method)
        if method == QMC:
            key += (spec.mc_samples, spec.mc_seed, spec.mc_replicates, spec.mc_mapping)
        with self._lock:
            if key in self._values:
                logger.debug("T_{} cache hit".format(spec.r))
                return self._values[key]
            logger.debug("T_{} cache miss".format(spec.r))
            if method == QMC:
                result = integrate_Tr_qmc(spec, tables)
            else:
                result = integrate_Tr(spec, tables)
            self._values[key] = result
            return result

    def clear(self):
        with self._lock:
            self._values.clear()


_CACHE = _IntegralCache()


def clear_cache():
    """Forget every memoised T_r."""
    _CACHE.clear()


def multiplier(r):
    """Multiplier k: 14 for r = 4, 12 for 5 <= r <= 7."""
    _check_r(r)
    return 14 if r == 4 else 12


def limit_analysis(r):
    """Exponent 1/4 - 2/k above which s <= 2 and f(s) vanishes.

    Returns Fraction(3, 28) for r = 4 and Fraction(1, 12) for 5 <= r <= 7.

    """
    return Fraction(1, 4) - Fraction(2, multiplier(r))


def classical_dimension(lambda_):
    """Number of prime factors r = floor(8 / (1 - 4 lambda)) reached by the
    classical linear sieve weights at the same exponent.

    Computed exactly for rational lambda, it gives 10 at lambda = 10/151
    where Delta_4 is positive.

    """
    _check_lambda(lambda_)
    return math.floor(8 / (1 - 4 * Fraction(lambda_)))


def delta(lambda_, r, tables=None, quad_settings=None, method=NESTED_ADAPTIVE):
    """Evaluate Delta_r(lambda) and classify its sign.

    Parameters
    ----------
    lambda_ : Fraction or float
        Exponent, 0 < lambda < 1/4.
    r : int
        Dimension, 4 <= r <= 7.
    tables : SieveTables, optional
        Tables used for f and omega, the default ones if omitted.
    quad_settings : QuadSpec, optional
        Quadrature settings. A spec for another dimension is transposed to r
        with its standard lower exponent.
    method : {"nested_adaptive", "qmc"}
        Integrator used for T_r.

    Returns
    -------
    report : DeltaReport

    Raises
    ------
    DomainError : if lambda or r are out of range.

    """
    _check_lambda(lambda_)
    k = multiplier(r)
    tables = tables or get_default_tables()
    spec = _spec_for(quad_settings, r)

    notes = []
    try:
        integral = _CACHE.get(spec, tables, method)
        converged = True
    except ConvergenceError as e:
        if e.best_estimate is None:
            raise
        logger.warning("T_{} did not converge: {}".format(r, e))
        notes.append(str(e))
        integral = e.best_estimate
        converged = False

    s = float(k * (Fraction(1, 4) - Fraction(lambda_)))
    f_s = tables.sieve_f(s)
    lower_term = tables.constants.e_minus_gamma * s * f_s
    upper_term = 2 * integral.value
    value = lower_term - upper_term
    error_bar = 2 * integral.error_estimate + s * tables.tolerance
    if not converged:
        verdict = INDETERMINATE
    elif value > error_bar:
        verdict = POSITIVE
    elif value < -error_bar:
        verdict = NEGATIVE
    else:
        verdict = INDETERMINATE

    report = DeltaReport(
        lambda_,
        r,
        k,
        s,
        f_s,
        integral.value,
        integral.error_estimate,
        lower_term,
        upper_term,
        value,
        error_bar,
        verdict,
        value / error_bar,
        integral.method,
        notes,
    )
    mess = "Delta_{}({}) = {!r} +/- {:.3g}: {}"
    logger.info(mess.format(r, lambda_, value, error_bar, verdict))
    return report


def check_theorem(tables=None, quad_settings=None):
    """Evaluate Delta_r at the four pairs of THEOREM_PAIRS.

    Returns
    -------
    reports : list[DeltaReport]
        One report per pair. The statement holds iff all are positive.

    """
    return [delta(lam, r, tables, quad_settings) for lam, r in THEOREM_PAIRS]


def theorem_holds(reports):
    """Whether every report carries a positive verdict."""
    return all(report.verdict == POSITIVE for report in reports)


def critical_lambda(r, tables=None, quad_settings=None, tol=BISECTION_TOL):
    """Locate the sign change of Delta_r by bisection.

    The initial bracket is [BISECTION_START, limit_analysis(r)] where Delta_r
    is respectively positive and equal to -2 T_r.

    Raises
    ------
    BracketingError : if Delta_r has the same sign at both ends.

    """
    tables = tables or get_default_tables()
    low, high = BISECTION_START, float(limit_analysis(r))
    d_low = delta(low, r, tables, quad_settings)
    d_high = delta(high, r, tables, quad_settings)
    if not (d_low.delta > 0 > d_high.delta):
        mess = "Delta_{} does not change sign on [{}, {}]: {!r}, {!r}"
        raise BracketingError(mess.format(r, low, high, d_low.delta, d_high.delta))

    iterations = 0
    while high - low > tol and iterations < BISECTION_MAX_ITER:
        mid = (low + high) / 2
        d_mid = delta(mid, r, tables, quad_settings)
        if d_mid.delta > 0:
            low, d_low = mid, d_mid
        else:
            high, d_high = mid, d_mid
        iterations += 1
    logger.debug("Bracketed lambda* for r = {} after {} steps".format(r, iterations))

    lambda_star = (low + high) / 2
    slope = (d_high.delta - d_low.delta) / (high - low)
    uncertainty = d_low.error_bar / abs(slope) if slope else math.inf
    room = min(lambda_star - BISECTION_START, float(limit_analysis(r)) - lambda_star)
    certified = False
    if 2 * uncertainty < room:
        below = delta(lambda_star - 2 * uncertainty, r, tables, quad_settings)
        above = delta(lambda_star + 2 * uncertainty, r, tables, quad_settings)
        certified = below.verdict == POSITIVE and above.verdict == NEGATIVE

    T_r = d_low.T_r
    closed_form = 0.25 - (1 + math.exp(T_r)) / multiplier(r)
    return ThresholdResult(
        r,
        lambda_star,
        (low, high),
        (d_low.delta, d_high.delta),
        iterations,
        closed_form,
        uncertainty,
        certified,
        T_r,
        d_low.T_r_error,
        classical_dimension(lambda_star),
    )


def _spec_for(quad_settings, r):
    if quad_settings is None:
        return QuadSpec(r)
    if quad_settings.r == r:
        return quad_settings
    return quad_settings.for_r(r)


def _check_r(r):
    if r not in range(4, 8):
        raise DomainError("r must be between 4 and 7, got {}".format(r))


def _check_lambda(lambda_):
    if not 0 < lambda_ < Fraction(1, 4):
        raise DomainError("lambda must lie in (0, 1/4), got {}".format(lambda_))
