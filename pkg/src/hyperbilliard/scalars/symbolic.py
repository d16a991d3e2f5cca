"""Exact arithmetic in Q(t_1, ..., t_d).

Elements are sympy ``FracElement`` objects of a graded-lex fraction field;
sympy keeps them reduced (gcd removed). ``canonical`` additionally makes the
denominator monic so that printed forms and hashes are deterministic.
"""

from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.fields import field
from sympy.polys.orderings import grlex


@lru_cache(maxsize=None)
def symbolic_field(d):
    """Return ``(K, (t_1, ..., t_d))`` for the field Q(t_1..t_d)."""
    if d < 1:
        raise ValueError("need at least one indeterminate")
    names = ",".join(f"t{k}" for k in range(1, d + 1))
    K, *gens = field(names, QQ, grlex)
    return K, tuple(gens)


def is_symbolic(x):
    return hasattr(x, "numer") and hasattr(x, "denom") and hasattr(x, "field")


def symbolic_add(a, b):
    return a + b


def symbolic_mul(a, b):
    return a * b


def symbolic_div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by the zero rational function")
    return a / b


def canonical(x):
    """Return ``(numerator, denominator)`` with the denominator monic."""
    num, den = x.numer, x.denom
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def canonical_str(x):
    num, den = canonical(x)
    if den == 1:
        return str(num)
    return f"({num})/({den})"


def _poly_terms(poly):
    """Terms of a polynomial as ``(exponent tuple, Fraction)`` pairs."""
    return [(tuple(m), Fraction(int(c.numerator), int(c.denominator)))
            for m, c in poly.terms()]


def integer_affine_coefficients(a):
    """If ``a = c_0 + sum_k c_k t_k`` with integer c's, return ``(c_0, ..., c_d)``.

    Returns None when ``a`` is not a polynomial, has a term of total degree
    above one, or has a non-integer coefficient.
    """
    num, den = canonical(a)
    if not den.is_ground:
        return None
    d = len(a.field.gens)
    coeffs = [0] * (d + 1)
    for monom, c in _poly_terms(num):
        if sum(monom) > 1 or c.denominator != 1:
            return None
        if sum(monom) == 0:
            coeffs[0] = int(c)
        else:
            coeffs[1 + monom.index(1)] = int(c)
    return tuple(coeffs)


def integer_affine_pattern(a, k):
    """Decide whether ``a == c0 + c1 * t_k`` for integers c0, c1.

    ``k`` is 1-based. Returns ``(c0, c1)`` or None.
    """
    coeffs = integer_affine_coefficients(a)
    if coeffs is None:
        return None
    if any(c != 0 for j, c in enumerate(coeffs[1:], start=1) if j != k):
        return None
    return coeffs[0], coeffs[k]


def polynomial_coefficients(poly):
    """Map exponent tuple -> Fraction for a sympy PolyElement."""
    return dict(_poly_terms(poly))


def evaluate(x, values, ctx=None):
    """Numerically evaluate ``x`` at ``t_k = values[k-1]``.

    ``values`` may be mpf, float or Fraction; with a context the result is
    an mpf at that context's precision.
    """
    def ev(poly):
        total = ctx.mpf(0) if ctx is not None else 0
        for monom, c in _poly_terms(poly):
            term = ctx.mpf(c.numerator) / c.denominator if ctx is not None else c
            for v, e in zip(values, monom):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    den = ev(x.denom)
    if den == 0:
        raise ZeroDivisionError("denominator vanishes at the evaluation point")
    return ev(x.numer) / den


def lcm_denominator(values):
    """Least common multiple of the denominators of a list of field elements."""
    den = None
    for v in values:
        den = v.denom if den is None else den.lcm(v.denom)
    return den
