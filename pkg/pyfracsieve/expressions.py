# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Grammar of the numeric arguments accepted on the command line.

Exponents are rationals: ``a/b`` with decimal a and b is exact (``1/15.1`` is
10/151), a bare decimal is replaced by the nearest rational whose denominator
does not exceed 10^6, unless that rounds it to zero in which case its exact
decimal value is kept (``1e-9`` is 1/10^9).

Arguments of the special functions are a number or an inclusive range
``start:stop[:step]``.

"""

import logging
from fractions import Fraction

import numpy as np
from pyparsing import Literal, Optional, ParseException, Regex, StringEnd, Suppress

from .errors import ConfigurationError

logger = logging.getLogger(__name__)


#: Largest denominator used when rationalising a bare decimal.
MAX_DENOMINATOR = 10**6

#: Step used by ranges given without one.
DEFAULT_RANGE_STEP = 0.1

# Unsigned decimal with an optional exponent: 12, 15.1, .5, 1e-9.
decimal = Regex(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
decimal.setParseAction(lambda t: Fraction(t[0]))

slash = Suppress(Literal("/"))
colon = Suppress(Literal(":"))

ratio = decimal + slash + decimal + StringEnd()

interval = (
    decimal("start") + colon + decimal("stop") + Optional(colon + decimal("step"))
) + StringEnd()
point = decimal("start") + StringEnd()


def parse_lambda(text):
    """Parse an exponent written as a/b or as a decimal.

    Returns
    -------
    value : Fraction

    Raises
    ------
    ConfigurationError : if the text is not a positive number.

    """
    text = text.strip()
    try:
        parts = (ratio if "/" in text else point).parseString(text)
    except ParseException as e:
        raise ConfigurationError("Invalid exponent '{}': {}".format(text, e))
    if len(parts) == 2:
        num, den = parts
        if den == 0:
            raise ConfigurationError("Zero denominator in '{}'".format(text))
        value = num / den
    else:
        exact = parts[0]
        value = exact.limit_denominator(MAX_DENOMINATOR) or exact
    logger.debug("Exponent '{}' read as {}".format(text, value))
    return value


def parse_range(text):
    """Parse a number or an inclusive range start:stop[:step].

    Returns
    -------
    values : np.ndarray
        The points of the range, a single point for a number.

    """
    text = text.strip()
    try:
        if ":" in text:
            res = interval.parseString(text)
        else:
            res = point.parseString(text)
    except ParseException as e:
        raise ConfigurationError("Invalid argument '{}': {}".format(text, e))
    start = float(res["start"])
    if "stop" not in res:
        return np.array([start])
    stop = float(res["stop"])
    step = float(res["step"]) if "step" in res else DEFAULT_RANGE_STEP
    if step <= 0 or stop < start:
        raise ConfigurationError("Empty range '{}'".format(text))
    count = int(round((stop - start) / step)) + 1
    return np.linspace(start, start + (count - 1) * step, count)
