"""Fast invariant checks across every module, used by ``hyperbilliard selftest``."""

from collections import Counter

from .balance import VerdictKind, balance_verdict, discrepancy_series
from .brs import (
    Status,
    build_cells_d2,
    gl_polygon_verdict,
    group_membership,
    verify_witness,
)
from .direction import Direction
from .dynamics import exchange_inverse, exchange_step, generate_word, sample_generic_parameter
from .geometry import dual_vectors, independence_minors, letter_discrepancy_bound, window
from .language import _pair_table, factor_table, letter_frequency
from .scalars.diophantine import solve_integer_system
from .scalars.parser import format_expression, parse_direction, parse_expression

REFERENCE = "1,sqrt(3),sqrt(2)"


class SelfTestFailure(AssertionError):
    pass


def _expect(condition):
    if not condition:
        raise SelfTestFailure("invariant violated")


def _scalars():
    node = parse_expression("(1+sqrt(5))/2 - 3/4*t1")
    text = format_expression(node)
    _expect(format_expression(parse_expression(text)) == text)
    _expect(solve_integer_system([[2, 4, 6], [1, 1, 1]], [8, 3]) is not None)
    _expect(solve_integer_system([[2, 4]], [3]) is None)
    t1, t2 = Direction.generic_symbolic(2).thetas
    _expect(sum(_pair_table(t1, t2).values()) == 1)


def _geometry():
    d = parse_direction(REFERENCE)
    W = window(d)
    _expect(abs(W.volume() - (1 + sum(d.thetas))) < 1e-20)
    _expect(all(abs(m) > d.epsilon for m in independence_minors(d)))
    for v, alpha in dual_vectors(d):
        _expect(abs(sum(a * b for a, b in zip(v, d.components))) < 1e-20)


def _dynamics():
    d = parse_direction(REFERENCE)
    m = sample_generic_parameter(d, 7)
    i, p = exchange_step(m, d)
    j, q = exchange_inverse(p, d)
    _expect(i == j and q == m)
    w = generate_word(m, d, 100, 1000)
    _expect(len(w) == 1100)


def _language():
    d = parse_direction(REFERENCE)
    w = generate_word(sample_generic_parameter(d, 1), d, 0, 20000, track_margin=False)
    _expect(set(factor_table(w, 2).counts) == {"12", "21", "13", "31", "23", "32", "22"})
    for a in (1, 2, 3):
        emp = factor_table(w, 1).frequency(str(a))
        _expect(abs(emp - float(letter_frequency(d, a).value)) < 1e-3)


def _balance():
    d = parse_direction(REFERENCE)
    w = generate_word(sample_generic_parameter(d, 2), d, 0, 20000, track_margin=False)
    for a in (1, 2, 3):
        C = float(letter_discrepancy_bound(d, a))
        s = discrepancy_series(w, str(a), letter_frequency(d, a), [200, 2000, 20000])
        _expect(balance_verdict(s, C).kind is VerdictKind.CERTIFIED)


def _brs():
    d = parse_direction(REFERENCE)
    cells = build_cells_d2(d)
    verdicts = Counter((v.status, v.reason.value) for v in map(gl_polygon_verdict, cells))
    expected = Counter({(Status.NOT_BRS, "NoSymmetryCenter"): 6,
                        (Status.NOT_BRS, "Condition2Fail"): 1})
    _expect(verdicts == expected)
    for cell in cells:
        for a, b in zip(cell.vertices, cell.vertices[1:] + cell.vertices[:1]):
            wit = group_membership(b - a)
            _expect(wit is None or verify_witness(b - a, wit))


CHECKS = {
    "scalars": _scalars,
    "geometry": _geometry,
    "dynamics": _dynamics,
    "language": _language,
    "balance": _balance,
    "brs": _brs,
}


def run_selftest():
    """Return a list of ``(name, passed, detail)``."""
    results = []
    for name, check in CHECKS.items():
        try:
            check()
        except Exception as exc:  # report every failure, keep going
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append((name, True, ""))
    return results
