import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Polygon

from hyperbilliard.balance import VerdictKind, balance_verdict, discrepancy_series
from hyperbilliard.brs import (
    CellPolygon,
    DegenerateIntersection,
    IntegerWitness,
    Reason,
    Status,
    UncertifiedGenerator,
    _Frame,
    _V,
    build_cells_d2,
    dumps,
    gl_polygon_verdict,
    group_membership,
    kbcd_points,
    kesten_interval_brs,
    parallel_edge_condition1,
    parallel_edge_condition2,
    parallelepiped_brs,
    symmetry_center,
    to_torus_coords,
    torus_group_membership,
    torus_translation,
    torus_visits,
    verdict_report,
    verify_witness,
    window_polygon,
)
from hyperbilliard.direction import Direction
from hyperbilliard.geometry import InternalPoint, basis_vectors
from hyperbilliard.language import PAIR_FACTORS_D2, pair_frequency_d2
from hyperbilliard.scalars.numeric import as_mpf, to_fraction
from hyperbilliard.scalars.parser import parse_direction

SYM = Direction.generic_symbolic(2)
T1, T2 = SYM.thetas
F1, F2, F3 = basis_vectors(SYM)
P = kbcd_points()


@pytest.fixture(scope="module")
def cells(ref_dir):
    return {c.label: c for c in build_cells_d2(ref_dir)}


def test_seven_cells(cells):
    assert set(cells) == set(PAIR_FACTORS_D2)
    for c in cells.values():
        assert c.is_convex()


def test_cell_22_is_kbcd(cells):
    got = cells["22"].vertices
    want = [P["K"], P["B"], P["C"], P["D"]]
    assert len(got) == 4
    assert all(any(v == w for v in got) for w in want)
    assert P["B"] == InternalPoint((-T1, T2 / T1 - T2))


def test_edge_kb(cells):
    assert P["B"] - P["K"] == F1 * (1 - 1 / T1)
    # AB runs along f_3 with coefficient t2/t1
    assert P["B"] - P["A"] == F3 * (T2 / T1)
    vs = cells["22"].vertices
    edges = [vs[(i + 1) % 4] - vs[i] for i in range(4)]
    kb = P["B"] - P["K"]
    assert any(e == kb or e == -kb for e in edges)


def test_cell_vertices_lie_on_defining_lines(cells, ref_dir):
    """Every vertex is exactly on two edge lines of the two parallelograms."""
    frame = _Frame(ref_dir)
    for label, cell in cells.items():
        i, j = int(label[0]), int(label[1])
        shift = _V((-c for c in frame.f[i - 1].sym), (-c for c in frame.f[i - 1].num))
        polys = [frame.piece(i), frame.piece(j, shift)]
        lines = [(p[k], p[(k + 1) % 4]) for p in polys for k in range(4)]
        for v in cell._v():
            on = [ab for ab in lines
                  if ((ab[1] - ab[0]).sym[0] * (v - ab[0]).sym[1]
                      - (ab[1] - ab[0]).sym[1] * (v - ab[0]).sym[0]) == 0]
            assert len(on) >= 2


def test_cell_areas(cells, ref_dir):
    total_w = 1 + sum(ref_dir.thetas)
    total = sum(c.area() for c in cells.values())
    assert abs(total - total_w) <= 1e-9 * total_w
    for label, cell in cells.items():
        mu = pair_frequency_d2(ref_dir, label).value
        assert abs(cell.area() / total_w - mu) <= 1e-9 * mu


def test_cells_against_shapely_oracle(cells, ref_dir):
    t1, t2 = (float(t) for t in ref_dir.thetas)
    f = {1: (-t1, -t2), 2: (1.0, 0.0), 3: (0.0, 1.0)}

    def rhombus(i, shift=(0.0, 0.0)):
        a, b = [f[j] for j in (1, 2, 3) if j != i]
        pts = [(0, 0), a, (a[0] + b[0], a[1] + b[1]), b]
        return Polygon([(x + shift[0], y + shift[1]) for x, y in pts]).convex_hull

    for i in (1, 2, 3):
        for j in (1, 2, 3):
            inter = rhombus(i).intersection(rhombus(j, (-f[i][0], -f[i][1])))
            label = f"{i}{j}"
            if label in cells:
                assert abs(inter.area - float(cells[label].area())) < 1e-12
                ours = Polygon([tuple(map(float, p)) for p in cells[label].numeric])
                assert ours.symmetric_difference(inter).area < 1e-12
            else:
                assert inter.area < 1e-12


def test_symmetry_centers(cells):
    assert symmetry_center(cells["22"]) == (P["K"] + P["C"]) / 2
    assert symmetry_center(cells["13"]) is None
    assert sum(symmetry_center(c) is None for c in cells.values()) == 6


def test_group_membership_examples():
    assert group_membership(F1) == IntegerWitness((1, 0, 0))
    assert group_membership(P["B"]) is None
    assert group_membership(P["D"]) is None
    assert group_membership(P["C"] - P["K"]) == IntegerWitness((1, 1, 1))
    assert group_membership(P["K"]) == IntegerWitness((0, -1, 0))
    assert group_membership(P["B"] - P["K"]) is None


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_group_membership_recovers_planted_witness(a, b, c):
    v = F1 * a + F2 * b + F3 * c
    wit = group_membership(v)
    assert wit == IntegerWitness((a, b, c))
    assert verify_witness(v, wit)


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
       st.fractions(max_denominator=6))
def test_group_membership_rejects_fractional_offsets(a, b, c, q):
    v = F1 * a + F2 * b + F3 * (c + q)
    assert (group_membership(v) is None) == (q.denominator != 1)


def test_group_membership_general_d():
    d3 = Direction.generic_symbolic(3)
    fs = basis_vectors(d3)
    v = fs[0] * 2 - fs[3] * 5
    assert group_membership(v) == IntegerWitness((2, 0, 0, -5))
    assert verify_witness(v, group_membership(v))


def _edge(a, b, ref_dir):
    frame = _Frame(ref_dir)

    def shadow(p):
        from hyperbilliard.scalars.symbolic import evaluate
        return tuple(evaluate(c, ref_dir.thetas, ref_dir.ctx) for c in p.coords)

    return (_V(a.coords, shadow(a)), _V(b.coords, shadow(b))), frame


def test_condition1_on_kbcd(ref_dir):
    K, B, C, D = P["K"], P["B"], P["C"], P["D"]
    for e, e2 in (((K, B), (D, C)), ((B, C), (K, D))):
        (s1, _), (s2, _) = _edge(*e, ref_dir), _edge(*e2, ref_dir)
        res = parallel_edge_condition1(s1, s2, ref_dir)
        assert res.holds is True
        assert verify_witness(res.witness.vector(), res.witness)


def test_condition1_translated_copies(ref_dir):
    a, b = InternalPoint((Fraction(1, 3) + 0 * T1, Fraction(1, 7) + 0 * T1)), None
    b = a + F3 * (T2 / T1)
    (e, _), (e2, _) = _edge(a, b, ref_dir), _edge(a + F2, b + F2, ref_dir)
    res = parallel_edge_condition1(e, e2, ref_dir)
    assert res.holds is True and res.shift == 0


def test_condition1_fails_off_lattice(ref_dir):
    o = InternalPoint((0 * T1, 0 * T1))
    shift = InternalPoint((Fraction(1, 2) + 0 * T1, Fraction(1, 3) + 0 * T1))
    (e, _), (e2, _) = _edge(o, F2, ref_dir), _edge(shift, shift + F2, ref_dir)
    res = parallel_edge_condition1(e, e2, ref_dir)
    assert res.holds is False


def test_condition1_rejects_non_parallel(ref_dir):
    o = InternalPoint((0 * T1, 0 * T1))
    (e, _), (e2, _) = _edge(o, F2, ref_dir), _edge(o, F3, ref_dir)
    with pytest.raises(ValueError):
        parallel_edge_condition1(e, e2, ref_dir)


def test_condition2_on_kbcd(ref_dir):
    K, B, C, D = P["K"], P["B"], P["C"], P["D"]
    mid = (D + C) / 2 - (K + B) / 2
    assert mid == F3 * (1 - T2 / T1)
    assert group_membership(mid) is None
    (e, _), (e2, _) = _edge(K, B, ref_dir), _edge(D, C, ref_dir)
    assert parallel_edge_condition2(e, e2) is False


def test_reference_verdicts(cells):
    verdicts = {label: gl_polygon_verdict(c) for label, c in cells.items()}
    counts = Counter((v.status, v.reason) for v in verdicts.values())
    assert counts == {(Status.NOT_BRS, Reason.NO_SYMMETRY_CENTER): 6,
                      (Status.NOT_BRS, Reason.CONDITION2_FAIL): 1}
    assert verdicts["22"].reason is Reason.CONDITION2_FAIL
    for wit in verdicts["22"].witnesses:
        w = IntegerWitness(tuple(wit["condition1"]))
        assert verify_witness(w.vector(), w)


def test_window_is_brs(ref_dir):
    W = window_polygon(ref_dir)
    assert len(W.vertices) == 6
    assert abs(W.area() - (1 + sum(ref_dir.thetas))) < 1e-30
    v = gl_polygon_verdict(W)
    assert v.status is Status.BRS and v.reason is Reason.ALL_CONDITIONS_PASS


def test_non_convex_is_undetermined(ref_dir):
    pts = [(0, 0), (2, 0), (1, Fraction(1, 2)), (2, 2), (0, 2)]
    verts = [InternalPoint((x + 0 * T1, y + 0 * T1)) for x, y in pts]
    numeric = [tuple(as_mpf(c, ref_dir.ctx) for c in p) for p in pts]
    poly = CellPolygon("xx", verts, numeric, "xx", ref_dir)
    assert gl_polygon_verdict(poly).status is Status.UNDETERMINED


def test_permuted_direction_same_verdicts():
    d = parse_direction("1,sqrt(2),sqrt(3)")
    verdicts = Counter(gl_polygon_verdict(c).reason for c in build_cells_d2(d))
    assert verdicts == {Reason.NO_SYMMETRY_CENTER: 6, Reason.CONDITION2_FAIL: 1}
    labels = {c.label for c in build_cells_d2(d)}
    assert "33" in labels and "22" not in labels


def test_degenerate_intersection_predicate(ref_dir):
    frame = _Frame(ref_dir)
    r = to_fraction(ref_dir.thetas[1])
    p = _V((0 * T1, T2 - r), (ref_dir.ctx.mpf(0), ref_dir.thetas[1] - as_mpf(r, ref_dir.ctx)))
    with pytest.raises(DegenerateIntersection):
        frame.side(frame.zero, frame.f[1], p)


def test_cells_need_d2(golden_dir):
    from hyperbilliard.language import ChamberError
    with pytest.raises(ChamberError):
        build_cells_d2(golden_dir)


def test_parallelepiped_certificates():
    alpha = torus_translation(SYM)
    gens = [alpha, (1 + alpha[0], alpha[1])]
    v = parallelepiped_brs(gens, [(1, 0, 0), (1, 1, 0)])
    assert v.status is Status.BRS and v.reason is Reason.PARALLELEPIPED
    with pytest.raises(UncertifiedGenerator):
        parallelepiped_brs(gens, [(1, 0, 0), (1, 0, 0)])
    assert [torus_group_membership(g) for g in gens] == [(1, 0, 0), (1, 1, 0)]


def test_kesten_interval():
    (alpha,) = torus_translation(Direction.generic_symbolic(1))
    v = kesten_interval_brs(alpha, (1, 0))
    assert v.reason is Reason.KESTEN
    with pytest.raises(UncertifiedGenerator):
        kesten_interval_brs(alpha / 2, (1, 0))


@settings(max_examples=100)
@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_dictionary_soundness(n1, n2, n3):
    v = F1 * n1 + F2 * n2 + F3 * n3
    z = to_torus_coords(v)
    alpha = torus_translation(SYM)
    k = n1 + n2 + n3
    assert z == (alpha[0] * k - n2, alpha[1] * k - n3)
    assert torus_group_membership(z) == (k, -n2, -n3)


@pytest.mark.parametrize("name", ["B", "D"])
def test_dictionary_non_members(name):
    assert torus_group_membership(to_torus_coords(P[name])) is None


def test_torus_visits_parallelogram(ref_dir):
    alpha = torus_translation(ref_dir)
    counts, vol = torus_visits(alpha, [alpha, (1 + alpha[0], alpha[1])], 100_000)
    assert abs(vol - float(alpha[1])) < 1e-12
    assert abs(counts.mean() - vol) < 1e-4


def test_verdict_empirics_agreement(cells, ref_dir, ref_word):
    for label, cell in cells.items():
        if gl_polygon_verdict(cell).status is Status.NOT_BRS:
            s = discrepancy_series(ref_word, label, pair_frequency_d2(ref_dir, label),
                                   [10**4, 10**5, 10**6])
            assert balance_verdict(s).kind is VerdictKind.GROWTH


def test_verdict_report_json(cells, ref_dir):
    cl = list(cells.values())
    report = verdict_report(ref_dir, cl, [gl_polygon_verdict(c) for c in cl])
    data = json.loads(dumps(report))
    assert {r["label"] for r in data} == set(PAIR_FACTORS_D2)
    assert all({"vertices", "vertices_numeric", "status", "reason", "witnesses"} <= set(r)
               for r in data)
