"""Arithmetic backends: mpmath reals, exact rational functions, integer solver.

The direction parser lives in :mod:`hyperbilliard.scalars.parser`.
"""

from .diophantine import solve_integer_system
from .numeric import DEFAULT_PRECISION, Ordering, compare, context, default_epsilon
from .symbolic import (
    canonical,
    canonical_str,
    integer_affine_coefficients,
    integer_affine_pattern,
    symbolic_add,
    symbolic_div,
    symbolic_field,
    symbolic_mul,
)

__all__ = [
    "DEFAULT_PRECISION",
    "Ordering",
    "canonical",
    "canonical_str",
    "compare",
    "context",
    "default_epsilon",
    "integer_affine_coefficients",
    "integer_affine_pattern",
    "solve_integer_system",
    "symbolic_add",
    "symbolic_div",
    "symbolic_field",
    "symbolic_mul",
]
