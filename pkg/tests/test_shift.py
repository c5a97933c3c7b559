import pytest
from hypothesis import given, strategies as st

import oracles
from tdlc import gf2
from tdlc.errors import SupportOverflow, WindowTooSmall
from tdlc.shift import (AnnihilatorCode, ShiftModel, Window, apply_space, commensuration_index, conjugate_space,
                        counterexample_suite, orthogonal, pair, shift_flip, sigma, space_index, tail_detect,
                        tau, tau_inv, tau_power)
from tdlc import scale as sc

W = Window(4)
window_vec = st.integers(0, W.mask)


def test_shift_flip_examples():
    assert shift_flip("tau", W.e(0), W) == W.e(-1)
    assert shift_flip("sigma", W.e(3), W) == W.e(-3)
    with pytest.raises(ValueError):
        shift_flip("rho", 1, W)
    with pytest.raises(WindowTooSmall):
        Window(1)


@given(window_vec)
def test_dihedral_relations(x):
    assert sigma(W, sigma(W, x)) == x
    # tau loses the coordinate at -N; away from it the relation is exact
    y = x & ~W.e(W.N)
    assert sigma(W, tau(W, sigma(W, y))) == tau_inv(W, y)


def test_pair_examples():
    assert pair(W.e(0), W.e(0), W) == 1
    assert pair(W.e(1), W.e(1), W) == 0
    assert pair(W.e(1), W.e(-1), W) == 1


@given(window_vec, window_vec)
def test_pair_adjointness(h, k):
    assert pair(tau(W, h), k, W) == pair(h, tau(W, k), W)
    assert pair(sigma(W, h), k, W) == pair(h, sigma(W, k), W)


def test_orthogonal_examples():
    assert orthogonal(W.full(), W) == ()
    assert len(orthogonal((), W)) == W.dim
    assert len(orthogonal((W.vec([0, 1]),), W)) == W.dim - 1


spans = st.lists(window_vec, max_size=5)


@given(spans)
def test_duality(xs):
    perp = orthogonal(xs, W)
    assert len(perp) + gf2.rank(xs) == W.dim
    assert orthogonal(perp, W) == gf2.rref(xs)


@given(spans, window_vec)
def test_equivariance(xs, k):
    perp = orthogonal(xs, W)
    # sigma is a bijection of the window: exact equality of subspaces
    assert orthogonal(apply_space("sigma", xs, W), W) == apply_space("sigma", perp, W)
    # tau is not: k annihilates tau(span) exactly when tau(k) annihilates span
    in_left = gf2.contains(orthogonal(apply_space("tau", xs, W), W), k)
    assert in_left == gf2.contains(perp, tau(W, k))


def test_commensuration_examples():
    ups = AnnihilatorCode.upsilon(4)
    assert commensuration_index(ups, "t") == 2
    full = AnnihilatorCode.full(4)
    for word in ("t", "T", "s", "tts"):
        assert commensuration_index(full, word) == 1
    for k in range(-3, 4):
        assert commensuration_index(ups, tau_power(k)) == 2 ** abs(k)
    with pytest.raises(SupportOverflow):
        commensuration_index(ups, tau_power(4))


@pytest.mark.parametrize("k", range(-3, 4))
def test_commensuration_matches_brute_force(k):
    N = 4
    K = oracles.tail_code_set(N)
    moved = {oracles.shift_down(x, k, N) for x in K}
    assert commensuration_index(AnnihilatorCode.upsilon(N), tau_power(k)) == oracles.set_index(K, moved)


inner = st.integers(0, W.mask).map(lambda x: x & ~W.e(-4) & ~W.e(4) & ~W.e(-3) & ~W.e(3))


@given(st.lists(inner, max_size=4), st.sampled_from(["t", "s", "ts"]))
def test_index_swap_symmetry(xs, word):
    K = gf2.rref(xs)
    inverse = "".join({"t": "T", "T": "t", "s": "s"}[c] for c in reversed(word))
    moved = conjugate_space(K, word, W)
    assert space_index(K, moved, W) == space_index(moved, conjugate_space(moved, inverse, W), W)


def test_tail_detect_examples():
    v = tail_detect(AnnihilatorCode.upsilon(6))
    assert (v.verdict, v.J) == ("cofinite-tail", 0)
    v = tail_detect(AnnihilatorCode(6, ((0, 1),), "stable"))
    assert v.verdict == "finite" and v.evidence["dim"] <= 1
    v = tail_detect(AnnihilatorCode.full(5))
    assert (v.verdict, v.J) == ("cofinite-tail", -5)
    with pytest.raises(WindowTooSmall):
        tail_detect(AnnihilatorCode(2, ((-1, 1),), "forward"))


def test_stable_difference_code_dimension_is_bounded():
    dims = {AnnihilatorCode(N, ((0, 1),), "stable").dim for N in (3, 4, 6, 8)}
    assert max(dims) <= 1


@pytest.mark.parametrize("N", [4, 6, 8])
def test_counterexample_suite(N):
    rep = counterexample_suite(N)
    assert rep.tau_ok and rep.passed
    assert rep.tau_indices == {k: 2 ** abs(k) for k in range(-(N - 1), N)}
    assert rep.commensurable_with_upsilon == []
    assert rep.stable_codes_checked == 128


def test_suite_examples_n4():
    rep = counterexample_suite(4)
    assert rep.tau_indices[2] == 4
    assert rep.sigma_index == 2**4


def test_sigma_growth():
    assert [counterexample_suite(N).sigma_index for N in (4, 6, 8)] == [16, 64, 256]


def test_shift_model_scales():
    S = ShiftModel(4)
    assert sc.scale(S, 1) == 2
    assert sc.scale(S, -1) == 1
    assert sc.scale(S, 3) == 8
