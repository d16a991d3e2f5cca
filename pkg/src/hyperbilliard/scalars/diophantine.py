"""Integer solutions of linear systems ``A n = b``.

Column-style Hermite reduction with a unimodular transform: ``A U = H`` where
H is in column echelon form. The solution set is ``U y`` with y determined on
pivot columns and free on the rest.
"""

from fractions import Fraction
from math import lcm


def _egcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _integer_rows(A, b):
    rows = []
    for row, rhs in zip(A, b):
        row = [Fraction(v) for v in row] + [Fraction(rhs)]
        scale = lcm(*(v.denominator for v in row))
        rows.append([int(v * scale) for v in row])
    return [r[:-1] for r in rows], [r[-1] for r in rows]


def solve_integer_system(A, b, ncols=None):
    """Solve ``A n = b`` over the integers.

    ``A`` is a list of rows with rational entries. Returns ``(particular,
    kernel)`` where kernel is a list of integer vectors spanning all integer
    solutions of the homogeneous system, or None if there is no integer
    solution.
    """
    if ncols is None:
        ncols = len(A[0]) if A else 0
    H, rhs = _integer_rows(A, b)
    H = [list(r) for r in H]
    m = len(H)
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(c, j, x, y, u, v):
        # (col_c, col_j) <- (x col_c + y col_j, u col_c + v col_j)
        for M in (H, U):
            for row in M:
                row[c], row[j] = x * row[c] + y * row[j], u * row[c] + v * row[j]

    pivots = []  # (row, col)
    c = 0
    for i in range(m):
        if c >= ncols:
            break
        for j in range(c + 1, ncols):
            a, bb = H[i][c], H[i][j]
            if bb == 0:
                continue
            if a == 0:
                colop(c, j, 0, 1, 1, 0)
                continue
            g, x, y = _egcd(a, bb)
            colop(c, j, x, y, -bb // g, a // g)
        if H[i][c] != 0:
            if H[i][c] < 0:
                for M in (H, U):
                    for row in M:
                        row[c] = -row[c]
            pivots.append((i, c))
            c += 1

    y = [0] * ncols
    pivot_rows = dict(pivots)
    for i in range(m):
        acc = sum(H[i][k] * y[k] for k in range(c))
        if i in pivot_rows:
            k = pivot_rows[i]
            acc -= H[i][k] * y[k]
            q, r = divmod(rhs[i] - acc, H[i][k])
            if r:
                return None
            y[k] = q
        elif acc != rhs[i]:
            return None

    particular = [sum(U[r][k] * y[k] for k in range(ncols)) for r in range(ncols)]
    kernel = [[U[r][k] for r in range(ncols)] for k in range(c, ncols)]
    return particular, kernel
