from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import root_valuations, vp
from tdlc.errors import DivisionByZero, PrecisionExhausted
from tdlc.fields import (LaurentField, PAdicField, RatFunc, arith, make_field, newton_slopes, pmul,
                         scale_from_charpoly)

INF = float("inf")
rationals = st.fractions(max_denominator=200).filter(lambda x: abs(x.numerator) < 10**6)
primes = st.sampled_from([2, 3, 5, 7])


def test_arith_examples():
    Q3 = PAdicField(3)
    assert arith("mul", Fraction(1, 3), Q3.from_int(3)) == 1
    assert PAdicField(5).valuation(Fraction(25)) == 2
    F2 = LaurentField(2)
    assert F2.valuation(F2.parse("t^-1 + 1")) == -1


def test_arith_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        arith("inv", Fraction(0))
    with pytest.raises(DivisionByZero):
        arith("inv", LaurentField(2).zero)


def test_make_field_round_trip():
    assert make_field({"field": "Qp", "p": 3}).to_json()["p"] == 3
    assert make_field({"field": "Fq_t", "q": 2}).q == 2
    with pytest.raises(ValueError):
        make_field({"field": "R"})


def test_precision_budget():
    K = PAdicField(3, precision=4)
    K.check_valuation(4)
    with pytest.raises(PrecisionExhausted):
        K.check_valuation(5)
    with pytest.raises(PrecisionExhausted):
        K.check_valuation(-5)


@given(rationals, rationals, primes)
def test_ultrametric_qp(a, b, p):
    K = PAdicField(p)
    va, vb, vs = K.valuation(a), K.valuation(b), K.valuation(a + b)
    assert vs >= min(va, vb)
    if va != vb:
        assert vs == min(va, vb)
    assert K.valuation(a * b) == va + vb
    assert K.valuation(a) == vp(a, p)


polys = st.lists(st.integers(0, 1), min_size=1, max_size=5)


@given(polys, polys, polys, polys, st.integers(-3, 3), st.integers(-3, 3))
def test_ultrametric_laurent(n1, d1, n2, d2, s1, s2):
    K = LaurentField(2)
    t = K.t

    def make(n, d, s):
        if not any(d):
            d = [1]
        return RatFunc(2, tuple(n), tuple(d)) * t**s

    a, b = make(n1, d1, s1), make(n2, d2, s2)
    va, vb = K.valuation(a), K.valuation(b)
    assert K.valuation(a + b) >= min(va, vb)
    if va != vb:
        assert K.valuation(a + b) == min(va, vb)
    assert K.valuation(a * b) == va + vb


@given(st.lists(rationals, min_size=2, max_size=6), primes)
def test_truncate_is_congruent(xs, p):
    K = PAdicField(p)
    for x in xs:
        for e in range(4):
            r = K.truncate(x, e)
            assert r == 0 or K.valuation(x - r) >= e


def test_ratfunc_field_ops():
    K = LaurentField(3)
    x = K.parse("(t + 2)/(t^2 + 1)")
    assert x * (1 / x) == K.one
    assert x - x == K.zero
    assert pmul((1, 1), (1, 1), 2) == (1, 0, 1)


def test_newton_examples():
    K5 = PAdicField(5)
    poly = newton_slopes(K5, [Fraction(1), -(5 + Fraction(1, 5)), Fraction(1)])
    assert sorted(poly.slopes) == [-1, 1]
    assert poly.root_valuations == [-1, 1]
    zero = newton_slopes(K5, [Fraction(0), Fraction(-1), Fraction(1)])
    assert zero.root_valuations == [INF, 0]
    K3 = PAdicField(3)
    ram = newton_slopes(K3, [Fraction(-3), Fraction(0), Fraction(1)])
    assert ram.slopes == [Fraction(-1, 2)] * 2
    assert ram.root_valuations == [Fraction(1, 2)] * 2


def test_scale_from_charpoly_examples():
    K5 = PAdicField(5)
    assert scale_from_charpoly(K5, [Fraction(1), -(5 + Fraction(1, 5)), Fraction(1)]) == 5
    assert scale_from_charpoly(K5, [Fraction(1), Fraction(-2), Fraction(1)]) == 1
    assert scale_from_charpoly(K5, [Fraction(5), -(25 + Fraction(1, 5)), Fraction(1)]) == 5
    # companion of x^2 - 1/3: two roots of valuation -1/2
    assert scale_from_charpoly(PAdicField(3), [Fraction(-1, 3), Fraction(0), Fraction(1)]) == 3
    with pytest.raises(ValueError):
        scale_from_charpoly(K5, [Fraction(0), Fraction(1)])


def _mul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


nonzero = rationals.filter(lambda x: x != 0)
monic = st.lists(rationals, min_size=0, max_size=3).flatmap(
    lambda xs: nonzero.map(lambda c0: [c0] + xs + [Fraction(1)]))


@given(monic, monic, primes)
def test_newton_of_product_concatenates_slopes(f, g, p):
    K = PAdicField(p)
    got = newton_slopes(K, _mul(f, g)).root_valuations
    want = sorted(newton_slopes(K, f).root_valuations + newton_slopes(K, g).root_valuations)
    assert got == want
    assert got == sorted(root_valuations(_mul(f, g), p))
