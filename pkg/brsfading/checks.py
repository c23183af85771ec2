"""Predicates used to validate options and parameter fields
"""
import math


def is_positive(x):
    try:
        return x > 0
    except TypeError:
        return False


def is_non_negative(x):
    try:
        return x >= 0
    except TypeError:
        return False


def is_finite(x):
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def is_probability(x):
    """True for 0 <= x <= 1"""
    return is_non_negative(x) and x <= 1


def at_least(bound):
    """Return a predicate testing ``x >= bound``"""

    def check(x):
        try:
            return x >= bound
        except TypeError:
            return False

    check.__name__ = f"at_least({bound})"
    return check


def is_grid(x):
    """True for a non-empty sequence of finite numbers"""
    try:
        return len(x) > 0 and all(is_finite(v) for v in x)
    except TypeError:
        return False


NoneType = type(None)
