"""Length-2 cells of the cubic billiard and exact bounded-remainder tests.

Every geometric object carries exact coordinates in Q(t_1, t_2) over the
basis (f_2, f_3) together with a numeric shadow at the working direction.
Orientation and ordering questions (which side of a line, does a shift lie
in an interval) are answered numerically with a margin; equalities and
group memberships are answered exactly.
"""

import enum
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
import sympy

from .direction import IRRATIONALITY_CAVEAT, Direction
from .geometry import InternalPoint, basis_vectors
from .language import ChamberError, chamber_permutation
from .scalars.diophantine import solve_integer_system
from .scalars.numeric import to_fixed, to_fraction
from .scalars.symbolic import (
    canonical_str,
    integer_affine_coefficients,
    integer_affine_pattern,
    lcm_denominator,
    polynomial_coefficients,
)

DEFAULT_SCAN_BOUND = 10


class DegenerateIntersection(ArithmeticError):
    """A cell vertex sits within the margin of a cutting line."""


class UncertifiedGenerator(ValueError):
    """A parallelepiped generator is not in Z alpha + Z^d."""


class Status(enum.Enum):
    NOT_BRS = "NotBRS"
    BRS = "BRS"
    UNDETERMINED = "Undetermined"


class Reason(enum.Enum):
    NO_SYMMETRY_CENTER = "NoSymmetryCenter"
    CONDITION1_FAIL = "Condition1Fail"
    CONDITION2_FAIL = "Condition2Fail"
    PARALLELEPIPED = "ParallelepipedCriterion"
    KESTEN = "KestenCriterion"
    ALL_CONDITIONS_PASS = "AllConditionsPass"
    NON_CONVEX = "NonConvex"
    SCAN_BOUND = "ScanBoundExceeded"


@dataclass(frozen=True)
class IntegerWitness:
    coeffs: tuple

    def vector(self, d=2):
        """sum n_i f_i in the generic symbolic coordinates."""
        fs = basis_vectors(Direction.generic_symbolic(d))
        out = fs[0] * 0
        for n, f in zip(self.coeffs, fs):
            out = out + f * n
        return out


@dataclass
class BRSVerdict:
    status: Status
    reason: Reason
    edge_pair: tuple = None
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)


class _V:
    """A point with exact coordinates and a numeric shadow."""

    __slots__ = ("sym", "num")

    def __init__(self, sym, num):
        self.sym = tuple(sym)
        self.num = tuple(num)

    def __add__(self, o):
        return _V((a + b for a, b in zip(self.sym, o.sym)),
                  (a + b for a, b in zip(self.num, o.num)))

    def __sub__(self, o):
        return _V((a - b for a, b in zip(self.sym, o.sym)),
                  (a - b for a, b in zip(self.num, o.num)))

    def scale(self, s_sym, s_num):
        return _V((a * s_sym for a in self.sym), (a * s_num for a in self.num))

    def same(self, o):
        return all(a - b == 0 for a, b in zip(self.sym, o.sym))


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


@dataclass
class CellPolygon:
    label: str
    vertices: list  # InternalPoint with symbolic coordinates, cyclic order
    numeric: list  # tuples of mpf, same order
    canonical_label: str = None
    direction: object = None  # canonical numeric direction

    def _v(self):
        return [_V(p.coords, q) for p, q in zip(self.vertices, self.numeric)]

    def edges(self):
        vs = self._v()
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def area(self):
        pts = self.numeric
        acc = 0
        for i in range(len(pts)):
            acc = acc + _cross(pts[i], pts[(i + 1) % len(pts)])
        return abs(acc) / 2

    def is_convex(self, epsilon=1e-12):
        pts = self.numeric
        n = len(pts)
        signs = set()
        for i in range(n):
            a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
            cr = _cross((b[0] - a[0], b[1] - a[1]), (c[0] - b[0], c[1] - b[1]))
            if abs(cr) <= epsilon:
                return False
            signs.add(cr > 0)
        return len(signs) == 1

    def vertex_strings(self):
        return [[canonical_str(c) for c in p.coords] for p in self.vertices]


class _Frame:
    """Symbolic and numeric f_i for the canonical (chamber) direction."""

    def __init__(self, canon):
        self.canon = canon
        self.eps = canon.epsilon
        fs_sym = basis_vectors(Direction.generic_symbolic(2))
        fs_num = basis_vectors(canon)
        self.f = [_V(a.coords, b.coords) for a, b in zip(fs_sym, fs_num)]
        ctx = canon.ctx
        self.zero = _V((fs_sym[0].coords[0] * 0,) * 2, (ctx.mpf(0),) * 2)

    def side(self, a, b, p):
        """Sign of cross(b - a, p - a): exact zero first, then numeric."""
        u, w = b - a, p - a
        if _cross(u.sym, w.sym) == 0:
            return 0
        val = _cross(u.num, w.num)
        if abs(val) <= self.eps:
            raise DegenerateIntersection("cell vertex within margin of a cutting line")
        return 1 if val > 0 else -1

    def intersect(self, a, b, p, q):
        u = b - a
        num_s = -_cross(u.sym, (p - a).sym)
        den_s = _cross(u.sym, (q - p).sym)
        num_n = -_cross(u.num, (p - a).num)
        den_n = _cross(u.num, (q - p).num)
        return p + (q - p).scale(num_s / den_s, num_n / den_n)

    def ccw(self, pts):
        acc = 0
        for i in range(len(pts)):
            acc = acc + _cross(pts[i].num, pts[(i + 1) % len(pts)].num)
        return pts if acc > 0 else pts[::-1]

    def piece(self, i, shift=None):
        a, b = [self.f[j] for j in range(3) if j != i - 1]
        pts = [self.zero, a, a + b, b]
        if shift is not None:
            pts = [p + shift for p in pts]
        return self.ccw(pts)


def _clip(frame, subject, clip):
    out = subject
    for k in range(len(clip)):
        a, b = clip[k], clip[(k + 1) % len(clip)]
        src, out = out, []
        if not src:
            break
        for j in range(len(src)):
            p, q = src[j - 1], src[j]
            sp, sq = frame.side(a, b, p), frame.side(a, b, q)
            if sq >= 0:
                if sp < 0 and sq > 0:
                    out.append(frame.intersect(a, b, p, q))
                out.append(q)
            elif sp > 0:
                out.append(frame.intersect(a, b, p, q))
    return _simplify(out)


def _simplify(pts):
    pts = [p for i, p in enumerate(pts) if not p.same(pts[i - 1])] if len(pts) > 1 else pts
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if _cross((b - a).sym, (c - b).sym) == 0:
                del pts[i]
                changed = True
                break
    return pts if len(pts) >= 3 else []


def _polygon(label, pts, canon_label, canon):
    return CellPolygon(label, [InternalPoint(p.sym) for p in pts], [p.num for p in pts],
                       canon_label, canon)


def build_cells_d2(direction):
    """The cells W^(i) cap E^{-1} W^(j), one per length-2 factor ij.

    Works in the chamber theta_1 > theta_2 > 0, theta_1 > 1 (after the
    letter relabelling of :func:`chamber_permutation`); labels are reported
    in the original letters.
    """
    if direction.d != 2 or direction.symbolic:
        raise ChamberError("cells are built for a numeric direction with d = 2")
    canon, mapping = chamber_permutation(direction)
    inverse = {v: k for k, v in mapping.items()}
    frame = _Frame(canon)
    cells = []
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            # points x of W^(i) with x + f_i in W^(j)
            shift = _V((-c for c in frame.f[i - 1].sym), (-c for c in frame.f[i - 1].num))
            pts = _clip(frame, frame.piece(i), frame.piece(j, shift))
            if pts:
                label = f"{inverse[i]}{inverse[j]}"
                cells.append(_polygon(label, pts, f"{i}{j}", canon))
    return sorted(cells, key=lambda c: c.label)


def window_polygon(direction):
    """The hexagon W_theta itself as an exact polygon (d = 2)."""
    canon, _ = chamber_permutation(direction)
    frame = _Frame(canon)
    pts = []
    for mask in itertools.product((0, 1), repeat=3):
        p = frame.zero
        for bit, f in zip(mask, frame.f):
            if bit:
                p = p + f
        pts.append(p)
    hull = _hull(pts)
    return _polygon("W", hull, "W", canon)


def _hull(pts):
    pts = sorted(pts, key=lambda p: (p.num[0], p.num[1]))

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and _cross((h[-1] - h[-2]).num, (p - h[-1]).num) <= 0:
                h.pop()
            h.append(p)
        return h

    lower, upper = half(pts), half(pts[::-1])
    return lower[:-1] + upper[:-1]


def symmetry_center(poly):
    """Exact center c with v_{i+k/2} - c = c - v_i for all i, or None."""
    vs = poly.vertices
    k = len(vs)
    if k % 2:
        return None
    c = (vs[0] + vs[k // 2]) / 2
    for i in range(k // 2):
        if not vs[i] + vs[i + k // 2] == c * 2:
            return None
    return c


def group_membership(v):
    """Witness (n_1, ..., n_{d+1}) with v = sum n_i f_i, or None.

    With f_1 = -(t_1..t_d) and f_{j+1} = e_j, coordinate j must equal
    n_{j+1} - n_1 t_j with one shared n_1.
    """
    n1 = None
    rest = []
    for j, a in enumerate(v.coords, start=1):
        pat = integer_affine_pattern(a, j)
        if pat is None:
            return None
        c0, c1 = pat
        if n1 is None:
            n1 = -c1
        elif n1 != -c1:
            return None
        rest.append(c0)
    return IntegerWitness((n1,) + tuple(rest))


def verify_witness(v, witness):
    return witness.vector(len(v.coords)) == v


def _parallel_pairs(edges):
    pairs = []
    for a, b in itertools.combinations(range(len(edges)), 2):
        u = edges[a][1] - edges[a][0]
        w = edges[b][1] - edges[b][0]
        if _cross(u.sym, w.sym) == 0:
            pairs.append((a, b))
    return pairs


@dataclass
class Condition1Result:
    holds: object  # True, False, or None when undetermined
    witness: IntegerWitness = None
    shift: object = None
    detail: str = ""


def parallel_edge_condition1(e, e2, canon, scan_bound=DEFAULT_SCAN_BOUND):
    """Do some p on e and q on e2 differ by an element of sum Z f_i?

    Points of the group on the line through D = start(e2) - start(e) with
    direction u are the integer solutions of an exact linear system obtained
    by matching monomial coefficients of cross(g - D, u) = 0; each solution
    gives an exact shift w with g = D + w u, feasible when w lies in [-1, r]
    (r = |e2| / |e| along u).
    """
    frame = _Frame(canon)
    p0, p1 = e
    r0, r1 = e2
    u = p1 - p0
    if _cross(u.sym, (r1 - r0).sym) != 0:
        raise ValueError("edges are not parallel")
    c = 0 if u.sym[0] != 0 else 1
    if ((r1 - r0).num[c] / u.num[c]) < 0:
        r0, r1 = r1, r0
    ratio_s = (r1 - r0).sym[c] / u.sym[c]
    ratio_n = (r1 - r0).num[c] / u.num[c]
    D = r0 - p0

    coeffs = [_cross(f.sym, u.sym) for f in frame.f]
    rhs = _cross(D.sym, u.sym)
    q = lcm_denominator(coeffs + [rhs])
    polys = []
    for x in coeffs + [rhs]:
        y = x * q
        den = y.denom
        if not den.is_ground:
            raise ArithmeticError("common denominator did not clear")
        lc = polynomial_coefficients(den)[(0,) * len(frame.f[0].sym)]
        polys.append({m: v / lc for m, v in polynomial_coefficients(y.numer).items()})
    monomials = sorted(set().union(*polys))
    A = [[polys[i].get(m, 0) for i in range(3)] for m in monomials]
    b = [polys[3].get(m, 0) for m in monomials]
    sol = solve_integer_system(A, b, ncols=3)
    if sol is None:
        return Condition1Result(False, detail="no integer solution of the line system")
    particular, kernel = sol

    def shift(n):
        g = frame.zero
        for ni, f in zip(n, frame.f):
            if ni:
                g = g + f.scale(ni, ni)
        diff = g - D
        return diff.sym[c] / u.sym[c], diff.num[c] / u.num[c]

    eps = canon.epsilon

    def feasible(n):
        ws, wn = shift(n)
        if -1 + eps < wn < ratio_n - eps:
            return True
        if ws == -1 or ws - ratio_s == 0:
            return True
        if abs(wn + 1) <= eps or abs(wn - ratio_n) <= eps:
            return None
        return False

    def vec(base, combo):
        return [base[i] + sum(k * z[i] for k, z in zip(combo, kernel)) for i in range(3)]

    undetermined = False
    if len(kernel) == 0:
        candidates = [particular]
    elif len(kernel) == 1:
        w0 = shift(particular)[1]
        wz = shift(vec(particular, [1]))[1] - w0
        if shift(vec(particular, [1]))[0] - shift(particular)[0] == 0:
            candidates = [particular]
        else:
            lo, hi = sorted(((-1 - w0) / wz, (ratio_n - w0) / wz))
            s_lo, s_hi = int(np.floor(float(lo))) - 1, int(np.ceil(float(hi))) + 1
            if s_hi - s_lo > 10_000:
                s_hi = s_lo + 10_000
                undetermined = True
            candidates = [vec(particular, [s]) for s in range(s_lo, s_hi + 1)]
    else:
        rng = range(-scan_bound, scan_bound + 1)
        candidates = [vec(particular, combo)
                      for combo in itertools.product(rng, repeat=len(kernel))]
        undetermined = True
    for n in candidates:
        ok = feasible(n)
        if ok:
            return Condition1Result(True, IntegerWitness(tuple(int(v) for v in n)),
                                    shift(n)[0])
        if ok is None:
            undetermined = True
    if undetermined:
        return Condition1Result(None, detail="no feasible witness within the scan bound")
    return Condition1Result(False, detail="no group element gives a feasible shift")


def parallel_edge_condition2(e, e2):
    """Midpoints group-related, or both edge vectors in the group."""
    mid = InternalPoint(tuple((a + b - c - d) / 2 for a, b, c, d in
                              zip(e2[0].sym, e2[1].sym, e[0].sym, e[1].sym)))
    if group_membership(mid) is not None:
        return True
    ve = InternalPoint((e[1] - e[0]).sym)
    ve2 = InternalPoint((e2[1] - e2[0]).sym)
    return group_membership(ve) is not None and group_membership(ve2) is not None


def gl_polygon_verdict(poly, scan_bound=DEFAULT_SCAN_BOUND):
    """Bounded-remainder verdict for a convex polygon, decided exactly.

    Requires a symmetry center, then checks each pair of parallel edges.
    """
    canon = poly.direction
    if not poly.is_convex(canon.epsilon):
        return BRSVerdict(Status.UNDETERMINED, Reason.NON_CONVEX,
                          notes=["criterion applies to convex polygons only"])
    if symmetry_center(poly) is None:
        return BRSVerdict(Status.NOT_BRS, Reason.NO_SYMMETRY_CENTER)
    edges = poly.edges()
    witnesses = []
    undetermined = None
    for a, b in _parallel_pairs(edges):
        c1 = parallel_edge_condition1(edges[a], edges[b], canon, scan_bound)
        if c1.holds is False:
            return BRSVerdict(Status.NOT_BRS, Reason.CONDITION1_FAIL, (a, b), witnesses,
                              [c1.detail])
        if c1.holds is None:
            undetermined = undetermined or (a, b)
            continue
        witnesses.append({"edges": [a, b], "condition1": list(c1.witness.coeffs),
                          "shift": canonical_str(c1.shift)})
        if not parallel_edge_condition2(edges[a], edges[b]):
            return BRSVerdict(Status.NOT_BRS, Reason.CONDITION2_FAIL, (a, b), witnesses)
    if undetermined is not None:
        return BRSVerdict(Status.UNDETERMINED, Reason.SCAN_BOUND, undetermined, witnesses)
    return BRSVerdict(Status.BRS, Reason.ALL_CONDITIONS_PASS, None, witnesses)


def kbcd_points():
    """Named vertices of the cell 22 in the chamber, exact: K, B, C, D (and A, O)."""
    f1, f2, f3 = basis_vectors(Direction.generic_symbolic(2))
    t1, _ = Direction.generic_symbolic(2).thetas
    lam = 1 - 1 / t1
    return {
        "O": f1 * 0,
        "A": f1,
        "B": f1 + f3 * (Direction.generic_symbolic(2).thetas[1] / t1),
        "C": f1 + f3,
        "D": f3 + f1 * (1 / t1),
        "K": -f2,
        "lambda": lam,
    }


def torus_translation(direction):
    """alpha = (theta_1, ..., theta_d) / (1 + sum theta_j)."""
    comps = direction.components
    total = comps[0]
    for c in comps[1:]:
        total = total + c
    return tuple(c / total for c in comps[1:])


def to_torus_coords(v):
    """Coordinates of v over the lattice basis (f_1 - f_2, f_1 - f_3) (d = 2)."""
    f1, f2, f3 = basis_vectors(Direction.generic_symbolic(2))
    b1, b2 = f1 - f2, f1 - f3
    det = _cross(b1.coords, b2.coords)
    x = _cross(v.coords, b2.coords) / det
    y = _cross(b1.coords, v.coords) / det
    return x, y


def torus_group_membership(z):
    """(k, m_1, ..., m_d) with z = k alpha + m exactly, or None."""
    d = len(z)
    gens = Direction.generic_symbolic(d).thetas
    total = 1 + sum(gens)
    k = None
    ms = []
    for j, zj in enumerate(z, start=1):
        coeffs = _affine(zj * total)
        if coeffs is None:
            return None
        m = coeffs[0]
        if any(coeffs[i] != m for i in range(1, d + 1) if i != j):
            return None
        kj = coeffs[j] - m
        if k is None:
            k = kj
        elif k != kj:
            return None
        ms.append(m)
    return (k,) + tuple(ms)


def _affine(x):
    return integer_affine_coefficients(x)


def parallelepiped_brs(generators, certificates):
    """Parallelepiped spanned by vectors of Z alpha + Z^d: always a BRS.

    ``generators`` are exact vectors in Q(t)^d (torus coordinates) and
    ``certificates`` give (k, m_1..m_d) with generator = k alpha + m; each is
    re-verified exactly.
    """
    if not generators:
        raise ValueError("need at least one generator")
    d = len(generators[0])
    alpha = torus_translation(Direction.generic_symbolic(d))
    for g, cert in zip(generators, certificates, strict=True):
        k, *m = cert
        if len(m) != d or any(g[i] - (alpha[i] * k + m[i]) != 0 for i in range(d)):
            raise UncertifiedGenerator(f"generator {g} does not match certificate {cert}")
    reason = Reason.KESTEN if d == 1 else Reason.PARALLELEPIPED
    return BRSVerdict(Status.BRS, reason,
                      witnesses=[{"generator": [canonical_str(x) for x in g],
                                  "certificate": list(c)}
                                 for g, c in zip(generators, certificates)])


def kesten_interval_brs(length, certificate):
    """Interval of length k alpha + m under the rotation by alpha (d = 1)."""
    return parallelepiped_brs([(length,)], [certificate])


def torus_visits(alpha, generators, N, bits=64, guard=1e-9):
    """Visit multiplicities of R^n(0), n = 0..N-1, to the half-open parallelepiped.

    The orbit runs modulo 1 in ``bits``-bit fixed point and membership is
    tested in floating point. Points within ``guard`` of a face are re-tested
    exactly, using the rational values of ``alpha`` and the generators.
    """
    d = len(alpha)
    scale = 1 << bits
    A = np.array([to_fixed(a, bits) % scale for a in alpha], dtype=np.uint64)
    n = np.arange(N, dtype=np.uint64)
    Xint = n[:, None] * A[None, :]  # wraps modulo 2**64
    X = Xint.astype(np.float64) / float(scale)
    G_exact = sympy.Matrix([[sympy.Rational(to_fraction(g[i])) for g in generators]
                            for i in range(d)])
    Ginv_exact = G_exact.inv()
    G = np.array(G_exact.tolist(), dtype=np.float64)
    Ginv = np.array(Ginv_exact.tolist(), dtype=np.float64)
    verts = np.array([G @ np.array(mask) for mask in itertools.product((0, 1), repeat=d)])
    lo = np.floor(verts.min(axis=0)).astype(int) - 1
    hi = np.ceil(verts.max(axis=0)).astype(int) + 1
    shifts = list(itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))))
    counts = np.zeros(N, dtype=np.int64)
    close = np.zeros(N, dtype=bool)
    for k in shifts:
        coef = (X + np.array(k, dtype=np.float64)) @ Ginv.T
        counts += np.all((coef >= 0) & (coef < 1), axis=1)
        close |= np.any((np.abs(coef) < guard) | (np.abs(coef - 1) < guard), axis=1)
    alpha_exact = [sympy.Rational(to_fraction(a)) for a in alpha]
    for i in np.flatnonzero(close):
        x = [(int(i) * a) % 1 for a in alpha_exact]
        total = 0
        for k in shifts:
            coef = Ginv_exact * sympy.Matrix([xi + ki for xi, ki in zip(x, k)])
            total += all(0 <= c < 1 for c in coef)
        counts[i] = total
    volume = float(abs(G_exact.det()))
    return counts, volume


def verdict_report(direction, cells, verdicts):
    """JSON-ready per-cell report."""
    out = []
    for cell, v in zip(cells, verdicts):
        out.append({
            "label": cell.label,
            "canonical_label": cell.canonical_label,
            "vertices": cell.vertex_strings(),
            "vertices_numeric": [[float(x) for x in p] for p in cell.numeric],
            "status": v.status.value,
            "reason": v.reason.value,
            "edge_pair": list(v.edge_pair) if v.edge_pair else None,
            "witnesses": v.witnesses,
        })
    return out


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


__all__ = [
    "IRRATIONALITY_CAVEAT", "BRSVerdict", "CellPolygon", "IntegerWitness", "Reason",
    "Status", "build_cells_d2", "gl_polygon_verdict", "group_membership",
    "parallel_edge_condition1", "parallel_edge_condition2", "parallelepiped_brs",
    "symmetry_center", "torus_visits", "window_polygon",
]
