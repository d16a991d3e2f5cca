"""Projection onto the internal hyperplane, the window zonotope and its pieces.

Internal points are stored by their coefficients over (f_2, ..., f_{d+1}),
where f_i is the projection of the i-th canonical basis vector. In these
coordinates f_{j+1} is the j-th unit vector and f_1 = -(theta_1, ..., theta_d),
so the relation f_1 + sum_j theta_j f_{j+1} = 0 holds by construction.
"""

from dataclasses import dataclass
from itertools import product

from .scalars.numeric import Ordering, as_mpf, compare


class NearBoundary(ArithmeticError):
    """A point lies within the comparison margin of a piece boundary."""

    def __init__(self, piece, margin, step=None):
        where = "" if step is None else f" at step {step}"
        super().__init__(f"point within margin of piece {piece} boundary{where} "
                         f"(margin {float(margin):.3g})")
        self.piece = piece
        self.margin = margin
        self.step = step


class OutsideWindow(ArithmeticError):
    """A point is not in the window W_theta."""


@dataclass(frozen=True)
class InternalPoint:
    coords: tuple

    def __add__(self, other):
        return InternalPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return InternalPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return InternalPoint(tuple(-a for a in self.coords))

    def __mul__(self, scalar):
        return InternalPoint(tuple(a * scalar for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return InternalPoint(tuple(a / scalar for a in self.coords))

    def __eq__(self, other):
        if not isinstance(other, InternalPoint):
            return NotImplemented
        return len(self.coords) == len(other.coords) and all(
            a - b == 0 for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(len(self.coords))

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    @classmethod
    def zero(cls, d, zero=0):
        return cls((zero,) * d)


def _zero_one(direction):
    c = direction.components[0]
    return c - c, c


def projection_matrix(direction):
    """Orthogonal projection onto the hyperplane normal to theta, I - theta theta^T / |theta|^2."""
    theta = direction.components
    zero, one = _zero_one(direction)
    norm2 = zero
    for c in theta:
        norm2 = norm2 + c * c
    n = len(theta)
    return [[(one if i == j else zero) - theta[i] * theta[j] / norm2 for j in range(n)]
            for i in range(n)]


def basis_vectors(direction):
    """The d+1 projected basis vectors f_1..f_{d+1} as internal points."""
    zero, one = _zero_one(direction)
    d = direction.d
    f1 = InternalPoint(tuple(-t for t in direction.thetas))
    rest = [InternalPoint(tuple(one if k == j else zero for k in range(d))) for j in range(d)]
    return [f1] + rest


def combination(coeffs, direction):
    """sum_i coeffs[i] f_{i+1} as an internal point."""
    fs = basis_vectors(direction)
    zero, _ = _zero_one(direction)
    if not direction.symbolic:
        coeffs = [as_mpf(c, direction.ctx) for c in coeffs]
    out = InternalPoint.zero(direction.d, zero)
    for c, f in zip(coeffs, fs):
        if c:
            out = out + f * c
    return out


def to_ambient(p, direction):
    """Ambient coordinates of an internal point (through the projection columns)."""
    P = projection_matrix(direction)
    zero, _ = _zero_one(direction)
    n = direction.d + 1
    out = []
    for i in range(n):
        acc = zero
        for j, a in enumerate(p.coords, start=1):
            acc = acc + a * P[i][j]
        out.append(acc)
    return tuple(out)


def dot(u, v):
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def piece_coefficients(p, direction, piece):
    """Coefficients (s_j)_{j != piece} with p = sum_{j != piece} s_j f_j.

    ``piece`` is 1-based. The d x d system has the closed-form solution below
    because the chosen f_j are f_1 and all but one coordinate unit vector.
    Returns a dict {j: s_j}.
    """
    a = p.coords
    if not direction.symbolic:
        a = tuple(as_mpf(c, direction.ctx) for c in a)
    th = direction.thetas
    if piece == 1:
        return {j + 2: a[j] for j in range(direction.d)}
    k = piece - 2
    s1 = -a[k] / th[k]
    out = {1: s1}
    for j in range(direction.d):
        if j != k:
            out[j + 2] = a[j] + s1 * th[j]
    return out


def locate_piece(p, direction, epsilon=None):
    """Return ``(i, margin)`` for the unique piece W^(i) containing p.

    ``margin`` is the smallest distance of a coefficient to {0, 1}. Raises
    NearBoundary when the best candidate is within ``epsilon`` of its
    boundary, OutsideWindow when no piece contains p.
    """
    if direction.symbolic:
        raise TypeError("piece membership needs an ordered (numeric) direction")
    eps = direction.epsilon if epsilon is None else epsilon
    best, best_margin = None, None
    for i in range(1, direction.d + 2):
        s = piece_coefficients(p, direction, i).values()
        margin = min(min(v, 1 - v) for v in s)
        if best_margin is None or margin > best_margin:
            best, best_margin = i, margin
    if best_margin > eps:
        return best, best_margin
    if best_margin < -eps:
        raise OutsideWindow(f"point {tuple(float(c) for c in p.coords)} is outside W_theta")
    raise NearBoundary(best, best_margin)


def window_vertices(direction):
    """All 2^{d+1} subset sums of the f_i (a superset of the zonotope vertices)."""
    fs = basis_vectors(direction)
    zero, _ = _zero_one(direction)
    out = []
    for mask in product((0, 1), repeat=len(fs)):
        v = InternalPoint.zero(direction.d, zero)
        for bit, f in zip(mask, fs):
            if bit:
                v = v + f
        out.append((mask, v))
    return out


@dataclass(frozen=True)
class WindowZonotope:
    generators: tuple
    direction: object

    def piece_generators(self, i):
        return tuple(f for j, f in enumerate(self.generators, start=1) if j != i)

    def piece_volume(self, i):
        """Volume of W^(i) in coefficient coordinates (|det| of its generators)."""
        return abs(_det([list(f.coords) for f in self.piece_generators(i)]))

    def volume(self):
        return sum(self.piece_volume(i) for i in range(1, len(self.generators) + 1))


def window(direction):
    return WindowZonotope(tuple(basis_vectors(direction)), direction)


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def independence_minors(direction):
    """Determinants of every d-subset of {f_1..f_{d+1}} (all nonzero for irrational theta)."""
    fs = basis_vectors(direction)
    return [_det([list(f.coords) for j, f in enumerate(fs) if j != skip])
            for skip in range(len(fs))]


def dual_vectors(direction):
    """Vectors v_a in the hyperplane with <f_b, v_a> = 1 for b != a.

    Returns a list of ``(v_a, alpha_a)`` with v_a in ambient coordinates and
    alpha_a = <f_a, v_a>. Solved as a (d+1) x (d+1) linear system.
    """
    if direction.symbolic:
        raise TypeError("dual vectors are computed for numeric directions")
    ctx = direction.ctx
    P = projection_matrix(direction)
    theta = direction.components
    n = len(theta)
    f_amb = [[P[i][b] for i in range(n)] for b in range(n)]
    out = []
    for a in range(n):
        rows = [list(theta)] + [f_amb[b] for b in range(n) if b != a]
        rhs = [0] + [1] * (n - 1)
        v = ctx.lu_solve(ctx.matrix(rows), ctx.matrix(rhs))
        v = tuple(v[i] for i in range(n))
        out.append((v, dot(f_amb[a], v)))
    return out


def letter_discrepancy_bound(direction, letter):
    """Certified bound C_a on |count of a in x_0..x_{n-1} - n mu[a]|.

    The count deviation equals -mu[a] <v_a, sigma^n(m) - m> and both points
    lie in the window, so C_a = mu[a] * (width of W_theta along v_a); the
    width is taken over all subset sums of the f_i.
    """
    from .language import letter_frequency

    v, _ = dual_vectors(direction)[letter - 1]
    P = projection_matrix(direction)
    n = direction.d + 1
    values = []
    for mask, _ in window_vertices(direction):
        amb = [sum(P[i][b] for b in range(n) if mask[b]) for i in range(n)]
        values.append(dot(amb, v))
    mu = letter_frequency(direction, letter).value
    return mu * (max(values) - min(values))


def classify(value, direction):
    """Margin-aware sign of a numeric value: -1, +1, or 0 for marginal."""
    o = compare(value, 0, direction.epsilon)
    return {Ordering.LESS: -1, Ordering.GREATER: 1, Ordering.MARGINAL: 0}[o]
