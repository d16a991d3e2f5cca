"""Configurable-precision real arithmetic backed by mpmath.

Values are plain ``mpf`` objects produced by a per-precision ``MPContext``;
this module only adds the context cache and margin-aware comparisons.
"""

import enum
from fractions import Fraction
from functools import lru_cache

import mpmath

DEFAULT_PRECISION = 128


def default_epsilon(precision=DEFAULT_PRECISION):
    """Comparison margin: 1e-12 at 128 bits, widened for low precisions."""
    return max(1e-12, 2.0 ** (20 - precision))


@lru_cache(maxsize=None)
def context(precision=DEFAULT_PRECISION):
    """Return a private mpmath context working at ``precision`` bits."""
    if precision < 24:
        raise ValueError(f"precision must be at least 24 bits, got {precision}")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


class Ordering(enum.Enum):
    LESS = -1
    GREATER = 1
    MARGINAL = 0


def compare(a, b, epsilon):
    """Compare two reals; anything within ``epsilon`` of equality is MARGINAL.

    The margin is absolute for small magnitudes and relative above 1.
    """
    diff = a - b
    scale = max(1, abs(a), abs(b))
    if abs(diff) <= epsilon * scale:
        return Ordering.MARGINAL
    return Ordering.LESS if diff < 0 else Ordering.GREATER


def as_mpf(x, ctx):
    """Convert int, float, Fraction or mpf to an mpf of ``ctx``."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def to_fraction(x):
    """Exact rational value of an mpf (or int/Fraction)."""
    if isinstance(x, (int, float, Fraction)):
        return Fraction(x)
    man, exp = x.man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


def to_fixed(x, bits):
    """Round ``x`` to the nearest integer multiple of 2**-bits, returned scaled."""
    if isinstance(x, (int, Fraction)):
        return round(Fraction(x) * (1 << bits))
    man, exp = x.man_exp
    man, exp = int(man), int(exp) + bits
    if exp >= 0:
        return man << exp
    return round(Fraction(man, 1 << -exp))
