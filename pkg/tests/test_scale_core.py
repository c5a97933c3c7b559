import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import diagonal_scale
from tdlc import scale as sc
from tdlc.errors import KNotStable, NoStabilization, NotFlat
from tdlc.fields import PAdicField
from tdlc.lattice import Lattice, LatticeModel, LinearAuto
from tdlc.shift import AnnihilatorCode, ShiftModel, Window, apply_space, displacement as shift_displacement
from tdlc.tree import TreeModel, Vertex, act, axis_segment, classify, neighbors, on_axis, vertex_distance

Q2, Q3, Q5 = PAdicField(2), PAdicField(3), PAdicField(5)
M3 = LatticeModel(Q3, 2)
Z3 = M3.base()
SKEW = Lattice.from_matrix(Q3, [[1, 0], [1, 3]])
A3 = LinearAuto.diag(Q3, [3, Fraction(1, 3)])
ID3 = LinearAuto.eye(Q3, 2)


def lat(rows):
    return Lattice.from_matrix(Q3, rows)


# ---------- index and displacement


def test_index_examples():
    assert sc.index(M3, Z3, lat([[3, 0], [0, 1]])) == 3
    assert sc.index(M3, SKEW, SKEW) == 1
    T = TreeModel(Q2)
    v = Vertex.standard(Q2)
    w = neighbors(v)[0]
    assert sc.index(T, T.stab([v]), T.stab([w])) == 3


def test_displacement_examples():
    d = sc.displacement(M3, Z3, lat([[3, 0], [0, 1]]))
    # W is a subgroup of U, so the backward index is 1
    assert (d.forward.value, d.backward.value, d.product) == (3, 1, 3)
    d = sc.displacement(M3, Z3, M3.apply(A3, Z3))
    assert (d.forward.value, d.backward.value, d.product) == (3, 3, 9)
    d0 = sc.displacement(M3, Z3, Z3)
    assert (d0.forward.value, d0.backward.value) == (1, 1)
    K = AnnihilatorCode.upsilon(4)
    w = Window(4)
    moved = apply_space("tau", K.space, w)
    assert shift_displacement(moved, K.space, w).product == 4


# ---------- plus/minus parts and tidiness


def test_plus_minus_split_diagonal():
    pm = sc.plus_minus_parts(M3, A3, Z3)
    assert pm.depth == 1
    # truncations of the infinite intersections: the first coordinate shrinks, the line 0 + Z_3 survives
    assert pm.plus == lat([[3, 0], [0, 1]]) and pm.minus == lat([[1, 0], [0, 3]])
    assert pm.plus.contains_vector([0, 1]) and not pm.plus.contains_vector([1, 0])
    assert pm.minus.contains_vector([1, 0]) and not pm.minus.contains_vector([0, 1])


def test_plus_minus_identity():
    pm = sc.plus_minus_parts(M3, ID3, SKEW)
    assert pm.plus == SKEW and pm.minus == SKEW and pm.depth == 0


def test_plus_minus_tree_axis():
    T = TreeModel(Q2)
    g = LinearAuto.diag(Q2, [2, 1])
    V = T.stab([Vertex.standard(Q2)])
    pm = sc.plus_minus_parts(T, g, V)
    v0, ginv = Vertex.standard(Q2), g.inverse()
    forward = {v0}
    backward = {v0}
    for _ in range(pm.depth):
        forward.add(act(g, max(forward, key=lambda v: vertex_distance(v, v0))))
        backward.add(act(ginv, max(backward, key=lambda v: vertex_distance(v, v0))))
    assert forward <= pm.plus.vertices and backward <= pm.minus.vertices
    assert not backward - {v0} & pm.plus.vertices
    # increments settle at q^length
    assert pm.plus_increments[-1] == 2 and pm.minus_increments[-1] == 2


def test_is_tidy_above_examples():
    assert sc.is_tidy_above(M3, A3, Z3)
    assert not sc.is_tidy_above(M3, A3, SKEW)
    assert sc.is_tidy_above(M3, ID3, SKEW)


def test_tidy_examples():
    cert = sc.tidy(M3, A3, SKEW)
    assert cert.minimizing_index == 3 and cert.input_index == 9
    assert sc.is_tidy_above(M3, A3, cert.output)
    assert cert.output.basis[0][1] == 0 and cert.output.basis[1][0] == 0
    T = TreeModel(Q3)
    rot = LinearAuto(Q3, [[0, -1], [1, 0]])
    V = T.stab([Vertex.standard(Q3)])
    cert = sc.tidy(T, rot, V)
    assert T.equals(cert.output, V) and cert.minimizing_index == 1
    S = ShiftModel(4)
    cert = sc.tidy(S, 1, S.window_code())
    assert cert.minimizing_index == 2 == S.scale_oracle(1)


def test_scale_examples():
    assert sc.scale(LatticeModel(Q5, 2), LinearAuto.diag(Q5, [5, Fraction(1, 5)])) == 5
    assert sc.scale(M3, ID3) == 1
    T = TreeModel(Q2)
    g = LinearAuto.diag(Q2, [2, Fraction(1, 2)])
    assert classify(g).translation_length == 2
    assert sc.scale(T, g) == 4


def test_is_minimizing_examples():
    assert sc.is_minimizing(M3, A3, Z3)
    assert not sc.is_minimizing(M3, A3, SKEW)
    assert sc.is_minimizing(M3, ID3, SKEW)


def test_no_stabilization_is_loud():
    with pytest.raises(NoStabilization):
        sc.tidy(M3, LinearAuto.diag(Q3, [27, Fraction(1, 27)]), lat([[1, 0], [1, 3**6]]), max_depth=1)


# ---------- compact part


def test_join_compact_examples():
    assert sc.join_compact(M3, SKEW, None) == SKEW
    K = lat([[0, 0], [0, 1]])
    assert sc.join_compact(M3, Z3, K, [ID3]) == Z3
    with pytest.raises(KNotStable):
        sc.join_compact(M3, Z3, K, [LinearAuto(Q3, [[0, 1], [1, 0]])])
    S = ShiftModel(4)
    V = S.tail_code(0)
    at_zero = S.sub([S.w.e(S.top)])
    joined = sc.join_compact(S, V, at_zero)
    assert S.index(joined, V) == 1


# ---------- reports and word bounds


def test_scale_report_examples():
    M5 = LatticeModel(Q5, 2)
    rep = sc.scale_report(M5, LinearAuto.diag(Q5, [5, Fraction(1, 5)]), 4)
    assert rep.passed and rep.modular == 1
    rep = sc.scale_report(M5, LinearAuto.diag(Q5, [25, Fraction(1, 5)]), 3)
    assert (rep.scale.value, rep.inverse_scale.value, rep.modular) == (5, 25, Fraction(1, 5))
    assert rep.passed
    T = TreeModel(Q3)
    rot = LinearAuto(Q3, [[0, -1], [1, 0]])
    rep = sc.scale_report(T, rot, 3)
    assert rep.scale == 1 == rep.inverse_scale and rep.checks["uniscalar_criterion"]


def test_word_bound_examples():
    gens = [A3, LinearAuto(Q3, [[1, 1], [0, 1]])]
    assert sc.word_displacement_bound(M3, gens, (), Z3) == (1, 1)
    measured, bound = sc.word_displacement_bound(M3, gens, ((0, 1),), Z3)
    assert measured == sc.moved_index(M3, A3, Z3) and bound == 3
    T = TreeModel(Q2)
    tg = [LinearAuto(Q2, [[0, -1], [1, 0]]), LinearAuto.diag(Q2, [2, 1])]
    V = T.stab([Vertex.standard(Q2)])
    rng = random.Random(5)
    gaps = 0
    for _ in range(5):
        w = sc.random_word(rng, 2, 5)
        measured, bound = sc.word_displacement_bound(T, tg, w, V)
        assert measured <= bound
        gaps += measured < bound
    assert gaps > 0


# ---------- flat factoring


def test_flat_factor_paper_pair():
    gens = [LinearAuto.diag(Q2, [2, 2, 2]), LinearAuto.diag(Q2, [2, 4, 8])]
    ff = sc.flat_factor(LatticeModel(Q2, 3), gens)
    assert ff.q == 3 and ff.rank == 2
    for w in sc.all_words(2, 3):
        a = sum(e for i, e in w if i == 0)
        b = sum(e for i, e in w if i == 1)
        entries = [Fraction(2) ** (a + b * j) for j in (1, 2, 3)]
        assert ff.predicted_scale(w) == diagonal_scale(entries, 2)


def test_flat_factor_single_generator():
    ff = sc.flat_factor(M3, [A3])
    assert ff.q == 2 and ff.rank == 1


def test_flat_factor_uniscalar():
    T = TreeModel(Q3)
    gens = [LinearAuto(Q3, [[0, -1], [1, 0]]), LinearAuto(Q3, [[1, 1], [0, 1]])]
    ff = sc.flat_factor(T, gens)
    assert ff.q == 0 and ff.rank == 0


def test_flat_factor_rejects_non_commuting():
    gens = [A3, LinearAuto(Q3, [[1, 1], [0, 1]])]
    with pytest.raises(NotFlat):
        sc.flat_factor(M3, gens)


diag_exps = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


@given(st.lists(diag_exps, min_size=1, max_size=3))
def test_flatness_properties(exps):
    gens = [LinearAuto.diag(Q2, [Fraction(2) ** e for e in row]) for row in exps]
    model = LatticeModel(Q2, 3)
    ff = sc.flat_factor(model, gens, samples=8)
    assert ff.rank <= ff.q
    scales = [diagonal_scale([Fraction(2) ** e for e in row], 2) for row in exps]
    inv_scales = [diagonal_scale([Fraction(2) ** -e for e in row], 2) for row in exps]
    for w in sc.all_words(len(gens), 2):
        got = model.scale_oracle(sc.compose_word(model, gens, w)).value
        assert ff.predicted_scale(w) == got
        bound = 1
        for i, e in w:
            bound *= scales[i] if e > 0 else inv_scales[i]
        assert got <= bound
        inverse = tuple((i, -e) for i, e in reversed(w))
        norm = got * ff.predicted_scale(inverse)
        assert norm == _prod(f.base ** abs(r) for f, r in zip(ff.factors, ff.rho(w)))


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def test_commutators_in_flat_set_are_uniscalar():
    gens = [LinearAuto.diag(Q2, [2, 2, 2]), LinearAuto.diag(Q2, [2, 4, 8]),
            LinearAuto.diag(Q2, [1, Fraction(1, 2), 4])]
    model = LatticeModel(Q2, 3)
    for a, b in product(gens, repeat=2):
        c = a @ b @ a.inverse() @ b.inverse()
        assert model.scale_oracle(c) == 1 and sc.scale(model, c) == 1


# ---------- metric and closure properties


entry = st.builds(lambda n, d: Fraction(n, d), st.integers(-9, 9), st.sampled_from([1, 3]))
mat2 = st.lists(st.lists(entry, min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda m: m[0][0] * m[1][1] != m[0][1] * m[1][0])


@given(mat2, mat2, mat2, mat2)
def test_metric_lattice(a, b, c, g):
    U, V, W = (Lattice.from_matrix(Q3, m) for m in (a, b, c))
    uw = sc.index(M3, U, W).value
    assert uw <= sc.index(M3, U, V).value * sc.index(M3, V, W).value
    d_uw = sc.displacement(M3, U, W).product
    assert d_uw <= sc.displacement(M3, U, V).product * sc.displacement(M3, V, W).product
    assert (d_uw == 1) == M3.equals(U, W)
    G = LinearAuto(Q3, g)
    moved = sc.displacement(M3, M3.apply(G, U), M3.apply(G, W))
    assert moved.product == d_uw


@given(mat2, st.integers(1, 3))
def test_scale_calculus_lattice(m, n):
    A = LinearAuto(Q3, m)
    s = sc.scale(M3, A)
    assert sc.scale(M3, A ** n) == s.value ** n
    B = LinearAuto(Q3, [[1, 1], [3, 4]])
    assert sc.scale(M3, B @ A @ B.inverse()) == s


@given(mat2)
def test_minimizing_closure(m):
    A = LinearAuto(Q3, m)
    V1 = sc.tidy(M3, A, Z3).output
    V2 = sc.tidy(M3, A, SKEW).output
    assert sc.is_minimizing(M3, A, M3.intersect(V1, V2))
    assert sc.is_minimizing(M3, A, M3.apply(A ** 2, V1))
    lhs = M3.intersect(V1, M3.apply(A ** 2, V1))
    rhs = M3.intersect(M3.intersect(V1, M3.apply(A, V1)), M3.apply(A ** 2, V1))
    assert M3.equals(lhs, rhs)


def test_tidy_stabilization_certificate():
    cert = sc.tidy(M3, A3, SKEW)
    pm = cert.parts
    # one further step repeats the last increment
    deeper = sc.plus_minus_parts(M3, A3, cert.output, pm.depth + 1)
    assert deeper.plus_increments[-1] == pm.plus_increments[-1]
    assert pm.plus_increments[-1] == pm.plus_increments[-2]
    assert M3.product_equals(cert.output, pm.plus, pm.minus)
    assert cert.input_index.value % cert.minimizing_index.value == 0


def test_tree_axis_segments_minimize():
    T = TreeModel(Q2)
    g = LinearAuto.diag(Q2, [2, 1])
    v0 = Vertex.standard(Q2)
    seg = T.stab(axis_segment(g, v0, 1))
    assert sc.is_minimizing(T, g, seg)
    off_axis = T.stab([v0, next(w for w in neighbors(v0) if not on_axis(g, w, 1))])
    assert not sc.is_minimizing(T, g, off_axis)
