from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import tree_sphere_orbit
from tdlc import scale as sc
from tdlc.fields import LaurentField, PAdicField
from tdlc.lattice import LinearAuto
from tdlc.tree import (ELLIPTIC, HYPERBOLIC, INVERSION, SegmentStabilizer, TreeModel, Vertex, act, ball,
                       bfs_min_displacement, classify, elliptic_product_demo, geodesic, neighbors,
                       solvable_nonflat_probe, stab_index, unipotent, vertex_distance)

Q2, Q3 = PAdicField(2), PAdicField(3)


def test_vertex_distance_examples():
    v = Vertex.standard(Q3)
    assert vertex_distance(v, Vertex.from_matrix(Q3, [[9, 0], [0, 1]])) == 2
    assert vertex_distance(v, v) == 0
    assert vertex_distance(v, Vertex.from_matrix(Q3, [[1, 1], [0, 1]])) == 0


def test_neighbors_and_geodesics():
    v = Vertex.standard(Q3)
    assert len(set(neighbors(v))) == 4
    w = Vertex.from_matrix(Q3, [[27, 0], [0, 1]])
    path = geodesic(v, w)
    assert len(path) == 4 and path[0] == v and path[-1] == w
    assert all(vertex_distance(a, b) == 1 for a, b in zip(path, path[1:]))


@pytest.mark.parametrize("p", [2, 3])
def test_classify_examples(p):
    K = PAdicField(p)
    c = classify(LinearAuto.diag(K, [p, 1]))
    assert (c.kind, c.translation_length) == (HYPERBOLIC, 1)
    assert bfs_min_displacement(LinearAuto.diag(K, [p, 1]), Vertex.standard(K), 4) == 1
    c = classify(LinearAuto(K, [[0, -1], [1, 0]]))
    assert (c.kind, c.translation_length) == (ELLIPTIC, 0)
    # equal root valuations 1/2 with odd determinant valuation: every vertex moves by exactly 1
    c = classify(LinearAuto(K, [[0, 1], [p, 0]]))
    assert (c.kind, c.translation_length) == (INVERSION, 1)
    assert c.root_valuations == (Fraction(1, 2), Fraction(1, 2))


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_stab_index_matches_finite_quotient(p, d):
    K = PAdicField(p)
    v = Vertex.standard(K)
    w = Vertex.from_matrix(K, [[p**d, 0], [0, 1]])
    T = TreeModel(K)
    got = stab_index(T.stab([v]), T.stab([w]))
    assert got == tree_sphere_orbit(p, d) == (p + 1) * p ** (d - 1)


def test_stab_index_examples():
    T = TreeModel(Q2)
    v = Vertex.standard(Q2)
    w = neighbors(v)[1]
    assert stab_index(T.stab([v]), T.stab([w])) == 3
    F = T.stab([v, Vertex.from_matrix(Q2, [[4, 0], [0, 1]])])
    assert stab_index(F, T.stab([v])) == 1
    u = Vertex.from_matrix(Q2, [[4, 0], [0, 1]])
    assert stab_index(T.stab([v]), T.stab([u])) == 6


def test_fixed_closure_forces_last_neighbor():
    v = Vertex.standard(Q2)
    ns = neighbors(v)
    S = SegmentStabilizer.of([ns[0], ns[1]], 2)
    assert ns[2] in S.vertices and v in S.vertices


def test_model_adapter_examples():
    T = TreeModel(Q2)
    g = LinearAuto.diag(Q2, [2, 1])
    cert = sc.tidy(T, g, T.base())
    assert cert.minimizing_index == 2 == sc.scale(T, g)
    assert len(cert.output.vertices) >= 2
    rot = LinearAuto(Q2, [[0, -1], [1, 0]])
    cert = sc.tidy(T, rot, T.base())
    assert T.equals(cert.output, T.base()) and sc.scale(T, rot) == 1
    assert sc.scale(T, LinearAuto.diag(Q2, [2, Fraction(1, 2)])) == 4


@pytest.mark.parametrize("p", [2, 3, 5])
def test_elliptic_product(p):
    rep = elliptic_product_demo(p)
    assert (rep.scale_x, rep.scale_y, rep.scale_xy) == (1, 1, p**2)
    assert rep.scale_x * rep.scale_y < rep.scale_xy
    assert rep.kinds == {"x": ELLIPTIC, "y": ELLIPTIC, "xy": HYPERBOLIC}


def test_solvable_probe():
    tab = solvable_nonflat_probe(6)
    disp = [row["product"] for row in tab.rows]
    assert disp[0] == 1
    assert all(a < b for a, b in zip(disp, disp[1:]))
    assert tab.unipotent_scales == [1] * 7
    F2 = LaurentField(2)
    assert act(unipotent(F2, 0), Vertex.standard(F2)) == Vertex.standard(F2)


def _mat(p):
    entry = st.builds(lambda n, e: Fraction(n) * Fraction(p) ** e, st.integers(-3, 3), st.integers(-1, 1))
    return st.lists(st.lists(entry, min_size=2, max_size=2), min_size=2, max_size=2).filter(
        lambda m: m[0][0] * m[1][1] != m[0][1] * m[1][0])


@settings(max_examples=30)
@given(_mat(2))
def test_scale_law_and_bfs(m):
    K = Q2
    g = LinearAuto(K, m)
    # check=True compares the Newton length with BFS on a ball reaching the axis
    c = classify(g, check=True)
    ell = c.translation_length
    expect = K.q**ell if c.kind == HYPERBOLIC else 1
    assert sc.scale(TreeModel(K), g) == expect


@given(_mat(3), _mat(3))
def test_stab_index_conjugation_invariant(m, h):
    K = Q3
    g = LinearAuto(K, m)
    v = Vertex.standard(K)
    F1 = SegmentStabilizer.of([v, act(g, v)], 3)
    F2 = SegmentStabilizer.of([Vertex.from_matrix(K, [[3, 0], [0, 1]])], 3)
    H = LinearAuto(K, h)
    T = TreeModel(K)
    assert stab_index(T.apply(H, F1), T.apply(H, F2)) == stab_index(F1, F2)


def test_ball_sizes():
    b = ball(Vertex.standard(Q2), 3)
    sizes = [sum(1 for d in b.values() if d == r) for r in range(4)]
    assert sizes == [1, 3, 6, 12]
