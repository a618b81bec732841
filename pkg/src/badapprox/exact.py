"""Exact rational arithmetic helpers.

Everything on the game/certificate path works over ``fractions.Fraction``;
comparisons against square roots are decided by squaring, never by floating
point.  The only floats in the package live in reporting and in the
measure-theoretic oracles, which are clearly marked as such.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Union[int, Fraction]


def rat(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing to coerce float {value!r}; pass a string or Fraction")
    raise TypeError(f"cannot coerce {type(value).__name__} to Fraction")


def rat_str(value: Rat) -> str:
    """Canonical "p/q" rendering (denominator always present, lowest terms)."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def rat_vec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(rat(v) for v in values)


def rat_vec_str(values: Sequence[Rat]) -> list[str]:
    return [rat_str(v) for v in values]


# -- square-root comparators -------------------------------------------------
#
# All of these decide an inequality involving sqrt(X) for rational X >= 0
# using only rational arithmetic.


def gt_sqrt(lhs: Rat, x_sq: Rat) -> bool:
    """Decide lhs > sqrt(x_sq) exactly (x_sq >= 0)."""
    if x_sq < 0:
        raise ValueError("x_sq must be nonnegative")
    if lhs <= 0:
        return x_sq == 0 and lhs > 0
    return lhs * lhs > x_sq


def ge_sqrt(lhs: Rat, x_sq: Rat) -> bool:
    """Decide lhs >= sqrt(x_sq) exactly (x_sq >= 0)."""
    if x_sq < 0:
        raise ValueError("x_sq must be nonnegative")
    if lhs < 0:
        return False
    return lhs * lhs >= x_sq


def lt_sqrt(lhs: Rat, x_sq: Rat) -> bool:
    return not ge_sqrt(lhs, x_sq)


def gt_sum_two_sqrt(lhs: Rat, x_sq: Rat, y_sq: Rat) -> bool:
    """Decide lhs > sqrt(x_sq) + sqrt(y_sq) exactly.

    Standard double-squaring: with D = lhs^2 - x - y, the inequality holds
    iff lhs > 0, D > 0 and D^2 > 4xy.  (Both x_sq and y_sq nonnegative.)
    """
    if x_sq < 0 or y_sq < 0:
        raise ValueError("squared operands must be nonnegative")
    if lhs <= 0:
        return lhs > 0 and x_sq == 0 and y_sq == 0
    d = lhs * lhs - x_sq - y_sq
    if d <= 0:
        return False
    return d * d > 4 * x_sq * y_sq


# -- rational sqrt bounds (reporting only) -----------------------------------


def sqrt_lower(x_sq: Rat, bits: int = 64) -> Fraction:
    """A rational lower bound on sqrt(x_sq), within 2^-bits relative-ish slack.

    Used only for human-readable report fields, never for decisions.
    """
    x = Fraction(x_sq)
    if x < 0:
        raise ValueError("x_sq must be nonnegative")
    if x == 0:
        return Fraction(0)
    scale = 1 << bits
    n = x.numerator * scale * scale
    d = x.denominator
    # floor(sqrt(n/d)) / scale <= sqrt(x)
    root = math.isqrt(n // d)
    return Fraction(root, scale)


def sqrt_upper(x_sq: Rat, bits: int = 64) -> Fraction:
    """A rational upper bound on sqrt(x_sq).  Reporting only."""
    x = Fraction(x_sq)
    if x < 0:
        raise ValueError("x_sq must be nonnegative")
    if x == 0:
        return Fraction(0)
    scale = 1 << bits
    n = x.numerator * scale * scale
    d = x.denominator
    root = math.isqrt(-(-n // d)) + 1
    return Fraction(root, scale)


def ceil_frac(x: Rat) -> int:
    return -((-Fraction(x).numerator) // Fraction(x).denominator)


def floor_frac(x: Rat) -> int:
    f = Fraction(x)
    return f.numerator // f.denominator
