# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Test the grammar of the numeric arguments."""

from fractions import Fraction

import numpy as np
import pytest
from pyfracsieve.errors import ConfigurationError
from pyfracsieve.expressions import parse_lambda, parse_range


class TestParseLambda(object):
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("1/15.1", Fraction(10, 151)),
            ("10/151", Fraction(10, 151)),
            ("1/12.01", Fraction(100, 1201)),
            (" 5/62 ", Fraction(5, 62)),
            ("0.25", Fraction(1, 4)),
            ("1e-9", Fraction(1, 10**9)),
            (".08", Fraction(2, 25)),
        ],
    )
    def test_valid(self, text, expected):
        assert parse_lambda(text) == expected

    def test_rationalised_decimal(self):
        value = parse_lambda("0.0662251655629")
        assert value.denominator <= 10**6
        assert abs(value - Fraction("0.0662251655629")) < 1e-12

    @pytest.mark.parametrize("text", ["", "abc", "1/0", "-1/2", "1/2/3", "1/", "0x10"])
    def test_invalid(self, text):
        with pytest.raises(ConfigurationError):
            parse_lambda(text)


class TestParseRange(object):
    def test_single_point(self):
        assert parse_range("2.5").tolist() == [2.5]

    def test_range(self):
        np.testing.assert_allclose(parse_range("2:3:0.5"), [2, 2.5, 3])
        values = parse_range("1:2")
        assert len(values) == 11
        assert values[-1] == pytest.approx(2)

    @pytest.mark.parametrize("text", ["3:2", "1:2:0", "a:b", "1:2:3:4", "-1"])
    def test_invalid(self, text):
        with pytest.raises(ConfigurationError):
            parse_range(text)
