from hypothesis import given, strategies as st

from tdlc import gf2

DIM = 7
vec = st.integers(0, (1 << DIM) - 1)
vecs = st.lists(vec, max_size=6)


def _span(vs):
    out = {0}
    for v in vs:
        out |= {x ^ v for x in out}
    return out


@given(vecs)
def test_rref_is_canonical_basis(vs):
    basis = gf2.rref(vs)
    assert _span(basis) == _span(vs)
    assert len(basis) == gf2.rank(vs)
    assert gf2.rref(reversed(vs)) == basis
    leads = [b.bit_length() for b in basis]
    assert len(set(leads)) == len(leads)


@given(vecs)
def test_null_space(vs):
    ns = gf2.null(vs, DIM)
    assert len(ns) + gf2.rank(vs) == DIM
    assert all(gf2.parity(a & b) == 0 for a in ns for b in vs)


@given(vecs, vecs)
def test_intersect_and_sum(a, b):
    cap = gf2.intersect(a, b, DIM)
    assert _span(cap) == _span(a) & _span(b)
    assert len(gf2.span_sum(a, b)) + len(cap) == gf2.rank(a) + gf2.rank(b)
    assert gf2.is_subspace(cap, gf2.rref(a))


@given(vecs, st.dictionaries(st.integers(0, DIM - 1), st.integers(0, 1), max_size=3))
def test_solve_in(vs, fixed):
    sol = gf2.solve_in(gf2.rref(vs), fixed)
    brute = [x for x in _span(vs) if all(x >> p & 1 == b for p, b in fixed.items())]
    if sol is None:
        assert not brute
    else:
        assert gf2.contains(gf2.rref(vs), sol)
        assert all(sol >> p & 1 == b for p, b in fixed.items())
