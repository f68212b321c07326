from fractions import Fraction
from math import gcd
import numbers

import pandas as pd


def to_rat(value):
    """Convert an integer, a Fraction or a "p/q" string into an exact rational.

    :param value: the value to convert.
    :type value: int, Fraction or string
    :returns: Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("Booleans are not rationals.")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            if sep:
                if not den.strip().isdigit():
                    raise ValueError
                return Fraction(int(num), int(den))
            return Fraction(int(num))
        except (ValueError, ZeroDivisionError):
            raise ValueError("Malformed rational '" + value + "'.")
    raise ValueError(
        "Cannot convert value of type " + type(value).__name__ + " to a rational."
    )


def rat_str(value):
    """Exact "p/q" form of a rational (integers print without denominator)."""
    return str(Fraction(value))


def primitive_scale(values):
    """Positive factor that turns a vector of rationals into coprime integers.

    :param values: the rationals to scale, zeros allowed.
    :type values: iterable of Fraction
    :returns: Fraction (1 for the zero vector)"""
    values = [Fraction(v) for v in values if v != 0]
    if not values:
        return Fraction(1)
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    common = 0
    for v in values:
        common = gcd(common, abs(v.numerator * (lcm // v.denominator)))
    return Fraction(lcm, common)


def jsonable(item):
    """Recursively convert report content into JSON/YAML friendly values.

    Rationals become exact strings, tuples and sets become lists."""
    if isinstance(item, Fraction):
        return rat_str(item)
    if isinstance(item, bool) or item is None:
        return item
    if isinstance(item, numbers.Integral):
        return int(item)
    if isinstance(item, (float, str)):
        return item
    if isinstance(item, dict):
        return {str(key): jsonable(val) for key, val in item.items()}
    if isinstance(item, (list, tuple, set, frozenset)):
        return [jsonable(val) for val in item]
    if isinstance(item, pd.DataFrame):
        return [jsonable(row) for row in item.to_dict(orient="records")]
    if hasattr(item, "to_dict"):
        return jsonable(item.to_dict())
    return str(item)
