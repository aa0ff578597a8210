# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""
Special functions of the linear sieve: Buchstab's omega, the lower and upper
sieve functions f and F, and the constants e^gamma and C2.

omega, f and F are solutions of delay differential equations whose initial
segments have closed forms. Beyond those segments they are tabulated on a
uniform grid by advancing the equivalent integral recurrences

    u omega(u) = 1 + int_1^{u-1} omega(t) dt,               u >= 2
    s F(s)     = 2 e^gamma + int_3^s f(t - 1) dt,           s >= 3
    s f(s)     = int_2^s F(t - 1) dt,                       s >= 2

unit interval by unit interval. The functions are smooth between integers
only, so every quadrature and interpolation stencil stays inside a single
unit piece.

"""

import json
import logging
import math
import os
from collections import namedtuple
from dataclasses import dataclass, field
from threading import RLock

import numpy as np

from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    PrecisionError,
    TableFileError,
)
from .primes import small_primes

logger = logging.getLogger(__name__)


__all__ = [
    "BuchstabTable",
    "Constants",
    "SievePairTable",
    "SieveTables",
    "build_tables",
    "load_tables",
    "twin_prime_constant",
]


#: Euler's constant and its exponentials to 30 significant digits.
EULER_GAMMA_DIGITS = "0.577215664901532860606512090082"
E_GAMMA_DIGITS = "1.78107241799019798523650410311"
E_MINUS_GAMMA_DIGITS = "0.561459483566885169824143214791"

EULER_GAMMA = float(EULER_GAMMA_DIGITS)
E_GAMMA = float(E_GAMMA_DIGITS)
E_MINUS_GAMMA = float(E_MINUS_GAMMA_DIGITS)

#: Default table range and step.
DEFAULT_GRID_END = 12
DEFAULT_STEP = 1e-3

#: Beyond this argument omega equals e^-gamma and f, F equal 1 to double
#: precision, tables are not extended past it.
SATURATION = 30.0

#: Target error of the tabulated values.
TABLE_TOLERANCE = 1e-8

#: Default tolerance on C2 when building tables.
DEFAULT_C2_TOL = 1e-7

#: Largest prime bound twin_prime_constant may sieve up to.
C2_PRIME_LIMIT = 5 * 10**7

#: Smallest prime bound used for C2.
C2_MIN_TERMS_BOUND = 10**5

#: Increment every time the layout of table files changes.
# 1 : initial layout (npz with a JSON header)
TABLE_FILE_VERSION = 1

#: Constant of the explicit bound pi(x) < 1.25506 x / log x, x > 1.
_PI_BOUND = 1.25506


BoundedValue = namedtuple("BoundedValue", "value error terms")


# --- Tables ------------------------------------------------------------------


@dataclass(frozen=True)
class BuchstabTable:
    """Samples of Buchstab's function on a uniform grid starting at u = 1.

    Attributes
    ----------
    grid_start, grid_end : float
        Range of the table.
    step : float
        Grid spacing, a unit fraction.
    values : np.ndarray
        omega(1 + k step).
    cumulative : np.ndarray
        int_1^{1 + k step} omega(t) dt.
    interpolation_order : int
        Degree of the local interpolating polynomial.
    knot_mismatch : float
        Largest disagreement between successive pieces at integer knots.

    """

    grid_start: float
    grid_end: float
    step: float
    values: np.ndarray = field(repr=False)
    cumulative: np.ndarray = field(repr=False)
    interpolation_order: int = 3
    knot_mismatch: float = 0.0

    def __call__(self, u):
        return _interpolate(u, self.grid_start, self.step, self.values)

    def integral(self, v):
        """Return int_1^v omega(t) dt by interpolating the cumulative table."""
        return _interpolate(v, self.grid_start, self.step, self.cumulative)


@dataclass(frozen=True)
class SievePairTable:
    """Samples of the linear sieve functions f and F starting at s = 1."""

    grid_start: float
    grid_end: float
    step: float
    f_values: np.ndarray = field(repr=False)
    F_values: np.ndarray = field(repr=False)
    knot_mismatch: float = 0.0

    def f(self, s):
        return _interpolate(s, self.grid_start, self.step, self.f_values)

    def F(self, s):
        return _interpolate(s, self.grid_start, self.step, self.F_values)


@dataclass(frozen=True)
class Constants:
    """Universal constants used by the sieve bounds."""

    euler_gamma: float = EULER_GAMMA
    e_gamma: float = E_GAMMA
    e_minus_gamma: float = E_MINUS_GAMMA
    c2: float = 0.0
    c2_error: float = 0.0
    c2_terms: int = 0


class SieveTables(object):
    """Immutable bundle of the omega, f/F tables and the constants.

    Arguments outside the closed-form segments are answered by interpolation.
    Arguments beyond grid_end transparently trigger the construction of a
    table covering twice the range, built once and reused.

    Parameters
    ----------
    buchstab : BuchstabTable
        Table of omega.
    pair : SievePairTable
        Table of f and F.
    constants : Constants
        Euler's constant, its exponentials and C2.

    """

    def __init__(self, buchstab, pair, constants):
        self.buchstab = buchstab
        self.pair = pair
        self.constants = constants
        self._extension = None
        self._lock = RLock()

    @property
    def grid_end(self):
        return self.buchstab.grid_end

    @property
    def step(self):
        return self.buchstab.step

    @property
    def tolerance(self):
        """Error bound claimed for any value returned by the tables."""
        mismatch = max(self.buchstab.knot_mismatch, self.pair.knot_mismatch)
        return max(1e-12, 10 * mismatch, 24 * self.step**4)

    def omega(self, u):
        """Buchstab's function omega(u), u >= 1.

        Closed forms are used on [1, 3], omega(1) = 1 being the right limit.

        """
        u, scalar = _as_array(u)
        if not np.all(u >= 1.0):
            raise DomainError("omega(u) requires u >= 1")
        far = self._saturated(u)
        if far.any():
            out = np.full_like(u, self.constants.e_minus_gamma)
            if not far.all():
                out[~far] = self.omega(u[~far])
            return float(out[0]) if scalar else out
        if u.size and u.max() > self.grid_end:
            return self._extended(u.max()).omega(u[0] if scalar else u)
        out = np.empty_like(u)
        first = u <= 2.0
        second = (u > 2.0) & (u <= 3.0)
        rest = u > 3.0
        out[first] = 1.0 / u[first]
        out[second] = (1.0 + np.log(u[second] - 1.0)) / u[second]
        out[rest] = self.buchstab(u[rest])
        return float(out[0]) if scalar else out

    def omega_integral(self, v):
        """Return int_1^v omega(t) dt for 1 <= v <= grid_end."""
        v, scalar = _as_array(v)
        if not np.all(v >= 1.0):
            raise DomainError("The integral of omega starts at 1")
        far = self._saturated(v)
        if far.any():
            end = max(self.grid_end, SATURATION)
            out = np.empty_like(v)
            out[far] = self.omega_integral(end) + self.constants.e_minus_gamma * (
                v[far] - end
            )
            if not far.all():
                out[~far] = self.omega_integral(v[~far])
            return float(out[0]) if scalar else out
        if v.size and v.max() > self.grid_end:
            return self._extended(v.max()).omega_integral(v[0] if scalar else v)
        out = np.empty_like(v)
        first = v <= 2.0
        out[first] = np.log(v[first])
        out[~first] = self.buchstab.integral(v[~first])
        return float(out[0]) if scalar else out

    def sieve_f(self, s):
        """Lower bound function f(s) of the linear sieve, s > 0."""
        s, scalar = _as_array(s)
        if not np.all(s > 0.0):
            raise DomainError("f(s) requires s > 0")
        far = self._saturated(s)
        if far.any():
            out = np.ones_like(s)
            if not far.all():
                out[~far] = self.sieve_f(s[~far])
            return float(out[0]) if scalar else out
        if s.size and s.max() > self.grid_end:
            return self._extended(s.max()).sieve_f(s[0] if scalar else s)
        out = np.zeros_like(s)
        closed = (s > 2.0) & (s <= 4.0)
        rest = s > 4.0
        out[closed] = 2.0 * E_GAMMA * np.log(s[closed] - 1.0) / s[closed]
        out[rest] = self.pair.f(s[rest])
        return float(out[0]) if scalar else out

    def sieve_F(self, s):
        """Upper bound function F(s) of the linear sieve, s > 0."""
        s, scalar = _as_array(s)
        if not np.all(s > 0.0):
            raise DomainError("F(s) requires s > 0")
        far = self._saturated(s)
        if far.any():
            out = np.ones_like(s)
            if not far.all():
                out[~far] = self.sieve_F(s[~far])
            return float(out[0]) if scalar else out
        if s.size and s.max() > self.grid_end:
            return self._extended(s.max()).sieve_F(s[0] if scalar else s)
        out = np.empty_like(s)
        closed = s <= 3.0
        out[closed] = 2.0 * E_GAMMA / s[closed]
        out[~closed] = self.pair.F(s[~closed])
        return float(out[0]) if scalar else out

    def validate(self):
        """Check the invariants of the three tables.

        Raises
        ------
        ConsistencyError : if one invariant is broken.

        """
        b = self.buchstab
        u = _grid(b.grid_start, b.grid_end, b.step)
        if not (np.all(b.values > 0.5 - 1e-15) and np.all(b.values <= 1.0)):
            raise ConsistencyError("omega samples left the interval [0.5, 1]")
        head = u <= 2.0
        if np.max(np.abs(b.values[head] - 1.0 / u[head])) > 1e-12:
            raise ConsistencyError("omega samples differ from 1/u on [1, 2]")
        if b.knot_mismatch > TABLE_TOLERANCE:
            mess = "omega pieces disagree by {} at integer knots"
            raise ConsistencyError(mess.format(b.knot_mismatch))

        p = self.pair
        s = _grid(p.grid_start, p.grid_end, p.step)
        f, F = p.f_values, p.F_values
        if np.any(f[s <= 2.0] != 0.0):
            raise ConsistencyError("f does not vanish on s <= 2")
        if p.knot_mismatch > TABLE_TOLERANCE:
            mess = "f/F pieces disagree by {} at integer knots"
            raise ConsistencyError(mess.format(p.knot_mismatch))
        # Below the rounding floor F - 1 and 1 - f are no longer resolved.
        floor = 1e-12
        resolved = (s > 2.0) & (F - f > floor)
        if not (np.all(f[resolved] > 0.0) and np.all(f[resolved] < 1.0)):
            raise ConsistencyError("f left (0, 1) where it is resolved")
        if not np.all(F[resolved] > 1.0):
            raise ConsistencyError("F dropped below 1 where it is resolved")
        for name, values, sign in (("f", f, 1), ("F", F, -1), ("F - f", F - f, -1)):
            steps = sign * np.diff(values)[resolved[1:]]
            if np.any(steps < -floor):
                raise ConsistencyError("{} is not monotone".format(name))

        c = self.constants
        if abs(c.e_gamma * c.e_minus_gamma - 1.0) > 1e-14:
            raise ConsistencyError("e^gamma and e^-gamma are not inverse")
        if not 0.66 < c.c2 < 0.6602:
            raise ConsistencyError("C2 = {} is out of range".format(c.c2))

    def dump(self, path):
        """Write the tables to a binary file that round-trips bit-exactly.

        The file is a numpy archive holding the samples and a JSON header
        recording the file version, step, ranges and build tolerance.

        """
        header = {
            "version": TABLE_FILE_VERSION,
            "step": self.step,
            "buchstab": [self.buchstab.grid_start, self.buchstab.grid_end],
            "pair": [self.pair.grid_start, self.pair.grid_end],
            "tolerance": self.tolerance,
            "knot_mismatch": [self.buchstab.knot_mismatch, self.pair.knot_mismatch],
            "interpolation_order": self.buchstab.interpolation_order,
            "constants": {
                "euler_gamma": self.constants.euler_gamma,
                "e_gamma": self.constants.e_gamma,
                "e_minus_gamma": self.constants.e_minus_gamma,
                "c2": self.constants.c2,
                "c2_error": self.constants.c2_error,
                "c2_terms": self.constants.c2_terms,
            },
        }
        logger.debug("Writing table file '{}'".format(path))
        with open(path, "wb") as fp:
            np.savez(
                fp,
                header=np.array(json.dumps(header)),
                omega=self.buchstab.values,
                omega_cumulative=self.buchstab.cumulative,
                f=self.pair.f_values,
                F=self.pair.F_values,
            )

    def _saturated(self, x):
        return x > max(self.grid_end, SATURATION)

    def _extended(self, needed):
        with self._lock:
            if self._extension is None or self._extension.grid_end < needed:
                grid_end = 2 * self.grid_end
                while grid_end < needed:
                    grid_end *= 2
                mess = "Extending sieve tables from {} to {} to reach {}"
                logger.info(mess.format(self.grid_end, grid_end, needed))
                self._extension = build_tables(
                    grid_end, self.step, c2_tol=None, constants=self.constants
                )
            return self._extension

    def __repr__(self):
        return "SieveTables(grid_end={}, step={}, tolerance={:.3g})".format(
            self.grid_end, self.step, self.tolerance
        )


def build_tables(
    grid_end=DEFAULT_GRID_END, step=DEFAULT_STEP, c2_tol=DEFAULT_C2_TOL, constants=None
):
    """Tabulate omega, f and F and compute the constants.

    Parameters
    ----------
    grid_end : float, optional
        Right end of the tables, rounded up to an integer. Must be >= 5.
    step : float, optional
        Grid spacing, 0 < step <= 0.01, and 1/step must be an integer.
    c2_tol : float, optional
        Absolute tolerance on C2.
    constants : Constants, optional
        Reuse already computed constants instead of recomputing C2.

    Returns
    -------
    tables : SieveTables
        Validated, read-only tables.

    Raises
    ------
    ConfigurationError : if the grid cannot meet the table tolerance.

    """
    if not grid_end >= 5:
        raise ConfigurationError("grid_end must be >= 5, got {}".format(grid_end))
    if not 0 < step <= 0.01:
        mess = "step {} is too coarse to reach an interpolation error of {}"
        raise ConfigurationError(mess.format(step, TABLE_TOLERANCE))
    per_unit = int(round(1.0 / step))
    if abs(per_unit * step - 1.0) > 1e-9:
        mess = "step must divide the unit interval exactly, got {}"
        raise ConfigurationError(mess.format(step))
    step = 1.0 / per_unit
    end = int(math.ceil(grid_end - 1e-9))
    if end != grid_end:
        logger.debug("Rounding grid_end {} up to {}".format(grid_end, end))

    logger.debug("Building sieve tables on [1, {}] with step {}".format(end, step))
    omega, cumulative, b_mismatch = _tabulate_omega(end, per_unit)
    f, F, p_mismatch = _tabulate_pair(end, per_unit)
    for array in (omega, cumulative, f, F):
        array.flags.writeable = False

    if constants is None:
        constants = Constants()
        if c2_tol is not None:
            c2 = twin_prime_constant(c2_tol)
            constants = Constants(c2=c2.value, c2_error=c2.error, c2_terms=c2.terms)

    tables = SieveTables(
        BuchstabTable(1.0, float(end), step, omega, cumulative, 3, b_mismatch),
        SievePairTable(1.0, float(end), step, f, F, p_mismatch),
        constants,
    )
    if constants.c2:
        tables.validate()
    logger.debug("Built {}".format(tables))
    return tables


def load_tables(path):
    """Read tables written by SieveTables.dump.

    Raises
    ------
    TableFileError : if the file cannot be read or has another version.

    """
    if not os.path.isfile(path):
        raise TableFileError("Can't find table file {}".format(path))
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["header"]))
            arrays = {k: np.array(data[k]) for k in ("omega", "omega_cumulative", "f", "F")}
    except (OSError, ValueError, KeyError) as e:
        raise TableFileError("Table file {} is unreadable: {}".format(path, e))

    if header.get("version") != TABLE_FILE_VERSION:
        mess = "Table file version {} does not match {}"
        raise TableFileError(mess.format(header.get("version"), TABLE_FILE_VERSION))
    for array in arrays.values():
        array.flags.writeable = False

    step = header["step"]
    b_start, b_end = header["buchstab"]
    p_start, p_end = header["pair"]
    b_mismatch, p_mismatch = header["knot_mismatch"]
    if len(arrays["omega"]) != len(_grid(b_start, b_end, step)):
        raise TableFileError("Table file {} has a truncated grid".format(path))
    tables = SieveTables(
        BuchstabTable(
            b_start,
            b_end,
            step,
            arrays["omega"],
            arrays["omega_cumulative"],
            header["interpolation_order"],
            b_mismatch,
        ),
        SievePairTable(p_start, p_end, step, arrays["f"], arrays["F"], p_mismatch),
        Constants(**header["constants"]),
    )
    logger.debug("Loaded {} from '{}'".format(tables, path))
    return tables


# --- Constants ---------------------------------------------------------------


def twin_prime_constant(abs_tol, prime_limit=C2_PRIME_LIMIT):
    """Twin prime constant C2 = prod_{p > 2} (1 - 1/(p - 1)^2).

    The product is truncated at a bound P chosen so that the certified tail
    error is below abs_tol. The tail uses log(1 - x) >= -2x (x <= 1/4) and
    sum_{p > P} (p - 1)^-2 <= 2.51012 (1/(P - 1) + 1/(2 (P - 1)^2)) / log P,
    obtained by partial summation from pi(t) < 1.25506 t / log t.

    Parameters
    ----------
    abs_tol : float
        Requested absolute error.
    prime_limit : int, optional
        Largest admissible truncation bound.

    Returns
    -------
    result : BoundedValue
        value, certified error bound and number of primes used.

    Raises
    ------
    PrecisionError : if abs_tol needs a bound beyond prime_limit.

    """
    if not abs_tol > 0:
        raise DomainError("abs_tol must be positive, got {}".format(abs_tol))
    bound = C2_MIN_TERMS_BOUND
    while 2 * _c2_tail(bound) > abs_tol:
        bound *= 2
        if bound > prime_limit:
            mess = "C2 to {} needs primes beyond the configured limit {}"
            raise PrecisionError(mess.format(abs_tol, prime_limit))

    primes = small_primes(bound)[1:].astype(np.float64)
    logs = np.log1p(-1.0 / (primes - 1.0) ** 2)
    value = math.exp(math.fsum(logs))
    error = value * -math.expm1(-2 * _c2_tail(bound))
    mess = "C2 = {!r} +/- {:.3g} from {} primes up to {}"
    logger.debug(mess.format(value, error, len(primes), bound))
    return BoundedValue(value, error, len(primes))


def _c2_tail(bound):
    return 2 * _PI_BOUND * (1 / (bound - 1) + 0.5 / (bound - 1) ** 2) / math.log(bound)


# --- Private API -------------------------------------------------------------


def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr.reshape(-1) if arr.ndim == 0 else arr, arr.ndim == 0


def _grid(start, end, step):
    per_unit = int(round(1.0 / step))
    count = int(round((end - start) * per_unit))
    return start + np.arange(count + 1) / per_unit


def _interpolate(x, start, step, values):
    """Local cubic Lagrange interpolation on a uniform grid of unit pieces.

    The four-point stencil never straddles an integer knot.

    """
    x = np.asarray(x, dtype=np.float64)
    per_unit = int(round(1.0 / step))
    last_piece = (len(values) - 1) // per_unit - 1
    piece = np.clip(np.floor(x - start), 0, last_piece).astype(np.int64)
    lo = piece * per_unit
    pos = (x - start) * per_unit
    k = np.clip(np.floor(pos).astype(np.int64) - 1, lo, lo + per_unit - 3)
    t = pos - k
    w0 = -(t - 1) * (t - 2) * (t - 3) / 6
    w1 = t * (t - 2) * (t - 3) / 2
    w2 = -t * (t - 1) * (t - 3) / 2
    w3 = t * (t - 1) * (t - 2) / 6
    return w0 * values[k] + w1 * values[k + 1] + w2 * values[k + 2] + w3 * values[k + 3]


def _cumulative(values, per_unit):
    """Cumulative integral of samples on unit pieces, fourth order accurate.

    Interior cells use the centred four-point rule, the first and last cell
    of each piece one-sided rules, so no stencil crosses an integer knot.

    """
    h = 1.0 / per_unit
    pieces = (len(values) - 1) // per_unit
    y = np.lib.stride_tricks.sliding_window_view(values, per_unit + 1)[::per_unit]
    y = y[:pieces]
    cells = np.empty((pieces, per_unit))
    cells[:, 0] = 9 * y[:, 0] + 19 * y[:, 1] - 5 * y[:, 2] + y[:, 3]
    cells[:, 1:-1] = 13 * (y[:, 1:-2] + y[:, 2:-1]) - y[:, :-3] - y[:, 3:]
    cells[:, -1] = y[:, -4] - 5 * y[:, -3] + 19 * y[:, -2] + 9 * y[:, -1]
    out = np.zeros(len(values))
    out[1:] = np.cumsum(cells.reshape(-1) * (h / 24))
    return out


def _tabulate_omega(end, per_unit):
    n = per_unit
    u = 1.0 + np.arange((end - 1) * n + 1) / n
    omega = np.empty_like(u)
    omega[: n + 1] = 1.0 / u[: n + 1]
    omega[n : 2 * n + 1] = (1.0 + np.log(u[n : 2 * n + 1] - 1.0)) / u[n : 2 * n + 1]
    mismatch = 0.0
    for m in range(3, end):
        # omega on [m, m + 1] from the integral of omega over [1, m].
        integral = _cumulative(omega[: (m - 1) * n + 1], n)
        lo, hi = (m - 1) * n, m * n
        piece = (1.0 + integral[(m - 2) * n : (m - 1) * n + 1]) / u[lo : hi + 1]
        mismatch = max(mismatch, abs(piece[0] - omega[lo]))
        omega[lo + 1 : hi + 1] = piece[1:]
    return omega, _cumulative(omega, n), mismatch


def _tabulate_pair(end, per_unit):
    n = per_unit
    s = 1.0 + np.arange((end - 1) * n + 1) / n
    f = np.zeros_like(s)
    F = np.empty_like(s)
    F[: 2 * n + 1] = 2.0 * E_GAMMA / s[: 2 * n + 1]
    top = min(3 * n, len(s) - 1)
    f[n : top + 1] = 2.0 * E_GAMMA * np.log(s[n : top + 1] - 1.0) / s[n : top + 1]
    mismatch = 0.0
    for m in range(3, end):
        # F on [m, m + 1] from the integral of f over [2, m].
        integral = _cumulative(f[: (m - 1) * n + 1], n)
        lo, hi = (m - 1) * n, m * n
        piece = (2.0 * E_GAMMA + integral[(m - 2) * n : (m - 1) * n + 1] - integral[n])
        piece /= s[lo : hi + 1]
        mismatch = max(mismatch, abs(piece[0] - F[lo]))
        F[lo + 1 : hi + 1] = piece[1:]
        # f on [m + 1, m + 2] from the integral of F over [1, m + 1].
        if m + 1 >= 4 and m + 2 <= end:
            integral = _cumulative(F[: m * n + 1], n)
            lo, hi = m * n, (m + 1) * n
            piece = integral[(m - 1) * n : m * n + 1] / s[lo : hi + 1]
            mismatch = max(mismatch, abs(piece[0] - f[lo]))
            f[lo + 1 : hi + 1] = piece[1:]
    return f, F, mismatch
