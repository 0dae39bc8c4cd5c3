import argparse
from fractions import Fraction
import re

RATIONAL_PATTERN = re.compile(r'^-?\d+(/\d+)?$')


def parse_rational(rational_str):
    """
    Parse an exact rational written as an integer or p/q.
    Decimal notation is refused so every value stays exact as written.

    :param str rational_str: e.g. '1/2', '0', '-3/4'
    :return Fraction value: Reduced rational
    :raise ValueError: If the string isn't an integer or p/q
    """
    if RATIONAL_PATTERN.match(rational_str) is None:
        raise ValueError(
            "Rational should be an integer or p/q, not {}".format(rational_str),
        )
    try:
        return Fraction(rational_str)
    except ZeroDivisionError:
        raise ValueError("Zero denominator in {}".format(rational_str))


def format_rational(value):
    """
    :param Fraction/int value: Rational value
    :return str rational_str: 'p/q', or 'p' for integers
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "{}/{}".format(value.numerator, value.denominator)


def nonnegative_int(int_str):
    """
    Argparse type for integers >= 0.

    :param str int_str: Command line argument
    :return int value: Parsed integer
    :raise ArgumentTypeError: If negative or not an integer
    """
    try:
        value = int(int_str)
    except ValueError:
        raise argparse.ArgumentTypeError(
            "Expected an integer, not {}".format(int_str),
        )
    if value < 0:
        raise argparse.ArgumentTypeError(
            "Expected a nonnegative integer, not {}".format(int_str),
        )
    return value
