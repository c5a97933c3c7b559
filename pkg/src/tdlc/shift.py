"""Binary sequences indexed by Z, truncated to a window [-N, N].

A vector on the window is an int whose bit l+N holds the coordinate l.
Subgroups of the product group are described by annihilators: finitely
supported h, paired with k by <h, k> = sum_l h(-l) k(l).  Windowed subgroups
are taken to vanish outside the window unless stated otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from . import gf2
from .errors import SupportOverflow, WindowTooSmall
from .index import Displacement, IndexValue


@dataclass(frozen=True)
class Window:
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise WindowTooSmall(f"window half-width must be at least 2, got {self.N}")

    @property
    def dim(self) -> int:
        return 2 * self.N + 1

    @property
    def mask(self) -> int:
        return (1 << self.dim) - 1

    def inside(self, l: int) -> bool:
        return -self.N <= l <= self.N

    def e(self, l: int) -> int:
        if not self.inside(l):
            raise SupportOverflow(f"coordinate {l} outside window [-{self.N}, {self.N}]")
        return 1 << (l + self.N)

    def vec(self, support: Iterable[int]) -> int:
        x = 0
        for l in support:
            x ^= self.e(l)
        return x

    def support(self, x: int) -> list[int]:
        return [i - self.N for i in range(self.dim) if x >> i & 1]

    def range_mask(self, lo: int, hi: int) -> int:
        """Bits for coordinates lo..hi clipped to the window."""
        lo, hi = max(lo, -self.N), min(hi, self.N)
        if lo > hi:
            return 0
        return ((1 << (hi - lo + 1)) - 1) << (lo + self.N)

    def full(self) -> tuple[int, ...]:
        return tuple(1 << i for i in reversed(range(self.dim)))


def tau(w: Window, x: int) -> int:
    """(tau k)(l) = k(l+1); the coordinate at -N leaves the window."""
    return x >> 1


def tau_inv(w: Window, x: int) -> int:
    return (x << 1) & w.mask


def sigma(w: Window, x: int) -> int:
    """(sigma k)(l) = k(-l)."""
    return int(format(x, f"0{w.dim}b")[::-1], 2)


def shift_flip(op: str, x: int, w: Window) -> int:
    if op == "tau":
        return tau(w, x)
    if op == "tau_inv":
        return tau_inv(w, x)
    if op == "sigma":
        return sigma(w, x)
    raise ValueError(f"unknown operation {op!r}")


def pair(h: int, k: int, w: Window) -> int:
    """<h, k> = sum_l h(-l) k(l) mod 2."""
    return gf2.parity(sigma(w, h) & k)


def pair_support(h_support, k: int, w: Window) -> int:
    for l in h_support:
        if not w.inside(l):
            raise SupportOverflow(f"annihilator support {l} exits window [-{w.N}, {w.N}]")
    return pair(w.vec(h_support), k, w)


def orthogonal(span, w: Window) -> tuple[int, ...]:
    """{k : <h, k> = 0 for all h in span}."""
    return gf2.null([sigma(w, h) for h in span], w.dim)


def apply_space(op, space, w: Window) -> tuple[int, ...]:
    return gf2.rref(shift_flip(op, x, w) for x in space)


# ---------- annihilator codes


CLOSURES = ("none", "forward", "stable")


@dataclass(frozen=True)
class AnnihilatorCode:
    """The subgroup {k : <tau^{-j} h, k> = 0} for listed h and the closure's range of j.

    closure "none" uses j = 0 only, "forward" all j >= 0, "stable" all j in Z;
    translates are kept while their support stays in the window.
    """

    N: int
    annihilators: tuple = ()
    closure: str = "none"

    def __post_init__(self):
        if self.closure not in CLOSURES:
            raise ValueError(f"closure must be one of {CLOSURES}")
        w = Window(self.N)
        for h in self.annihilators:
            for l in h:
                if not w.inside(l):
                    raise SupportOverflow(f"annihilator support {l} exits window [-{self.N}, {self.N}]")

    @classmethod
    def upsilon(cls, N: int) -> "AnnihilatorCode":
        """The one-sided tail code: k(l) = 0 for every l < 0."""
        return cls(N, ((1,),), "forward")

    @classmethod
    def full(cls, N: int) -> "AnnihilatorCode":
        return cls(N, (), "none")

    @property
    def window(self) -> Window:
        return Window(self.N)

    def translates(self):
        w = self.window
        out = []
        for h in self.annihilators:
            lo, hi = min(h), max(h)
            js = [0]
            if self.closure in ("forward", "stable"):
                js += list(range(1, self.N - hi + 1))
            if self.closure == "stable":
                js += list(range(-1, -(self.N + lo) - 1, -1))
            for j in js:
                out.append(w.vec(l + j for l in h))
        return out

    @property
    def space(self) -> tuple[int, ...]:
        return orthogonal(self.translates(), self.window)

    @property
    def dim(self) -> int:
        return len(self.space)

    def with_window(self, N: int) -> "AnnihilatorCode":
        return AnnihilatorCode(N, self.annihilators, self.closure)

    def to_json(self):
        return {"N": self.N, "closure": self.closure, "annihilators": [{"h": list(h)} for h in self.annihilators]}


def _space(K, w: Window):
    return K.space if isinstance(K, AnnihilatorCode) else tuple(K)


def conjugate_space(space, word: str, w: Window) -> tuple[int, ...]:
    """g K g^{-1} for a word over t (tau), T (tau^{-1}), s (sigma); translations act trivially.

    The rightmost letter acts first.
    """
    net = sum(1 if c == "t" else -1 if c == "T" else 0 for c in word)
    if abs(net) > w.N - 1 or sum(c in "tT" for c in word) > w.N - 1:
        raise SupportOverflow(f"word {word!r} moves supports past the reliable range of window {w.N}")
    ops = {"t": "tau", "T": "tau_inv", "s": "sigma"}
    out = tuple(space)
    for c in reversed(word):
        if c in ops:
            out = apply_space(ops[c], out, w)
        elif c not in "x":
            raise ValueError(f"unknown letter {c!r}")
    return out


def space_index(a, b, w: Window) -> IndexValue:
    """[A : A ∩ B] for window subspaces."""
    return IndexValue(2 ** (len(a) - len(gf2.intersect(a, b, w.dim))))


def commensuration_index(K, word: str, N: int | None = None) -> IndexValue:
    """[K : K ∩ gKg^{-1}] for g given as a word over t, T, s (and x for a translation)."""
    N = K.N if N is None else N
    if isinstance(K, AnnihilatorCode) and not K.annihilators:
        # the whole product is invariant; the window would drop boundary coordinates
        conjugate_space((), word, Window(N))
        return IndexValue(1)
    w = Window(N)
    S = _space(K, w)
    return space_index(S, conjugate_space(S, word, w), w)


def tau_power(k: int) -> str:
    return "t" * k if k >= 0 else "T" * (-k)


# ---------- tail detection


@dataclass(frozen=True)
class TailVerdict:
    verdict: str
    J: int | None
    window: int
    evidence: dict = field(default_factory=dict)

    def to_json(self):
        return {"verdict": self.verdict, "J": self.J, "window": self.window, "evidence": self.evidence}


def tail_detect(K: AnnihilatorCode) -> TailVerdict:
    """Decide whether K is finite or contains a one-sided tail, following the minimal-annihilator argument."""
    w = K.window
    if not K.annihilators:
        return TailVerdict("cofinite-tail", -K.N, K.N, {"dim": K.dim})
    if K.closure == "stable":
        d0, d1 = K.dim, K.with_window(K.N + 2).dim
        verdict = "finite" if d0 == d1 else "undecided"
        return TailVerdict(verdict, None, K.N, {"dim": d0, "dim_wider": d1})
    if K.closure == "none":
        return TailVerdict("undecided", None, K.N, {"reason": "no closure under translation"})
    hstar = min(K.annihilators, key=lambda h: (max(h) - min(h), min(h), tuple(h)))
    m, M = min(hstar), max(hstar)
    d = M - m
    if K.N < M + 1 or -m + 2 > K.N:
        raise WindowTooSmall(f"window {K.N} too small for annihilator support [{m}, {M}]")
    S = K.space
    proj = gf2.project(S, w.range_mask(-M, -m))
    if len(proj) != d:
        return TailVerdict("undecided", None, K.N, {"projection_dim": len(proj), "expected": d})
    J = -m + 1
    built = []
    for n in range(1, K.N + m + 1):
        pos = -m + n
        fixed = {pos + K.N: 1}
        fixed.update({j + K.N: 0 for j in range(-K.N, pos)})
        k = gf2.solve_in(S, fixed)
        if k is None:
            return TailVerdict("undecided", None, K.N, {"missing_k": n})
        built.append(w.support(k))
    return TailVerdict("cofinite-tail", J, K.N,
                       {"h_star": list(hstar), "m": m, "M": M, "projection_dim": d, "k_n_count": len(built)})


# ---------- the counterexample suite


def nonzero_patterns(length: int = 3):
    """Nonzero annihilator supports inside {0, ..., length-1}."""
    pts = range(length)
    return [c for r in range(1, length + 1) for c in combinations(pts, r)]


def stable_codes(N: int, length: int = 3):
    """Every tau-stable code cut out by a nonempty set of patterns on {0..length-1}, plus the full code."""
    pats = nonzero_patterns(length)
    out = [AnnihilatorCode.full(N)]
    for r in range(1, len(pats) + 1):
        for combo in combinations(pats, r):
            out.append(AnnihilatorCode(N, combo, "stable"))
    return out


@dataclass
class SuiteReport:
    N: int
    tau_indices: dict
    tau_ok: bool
    sigma_index: int
    stable_codes_checked: int
    commensurable_with_upsilon: list
    verdicts: dict
    upsilon_tail: TailVerdict

    @property
    def passed(self) -> bool:
        return self.tau_ok and not self.commensurable_with_upsilon

    def to_json(self):
        return {"N": self.N, "tau_indices": {str(k): v for k, v in self.tau_indices.items()}, "tau_ok": self.tau_ok,
                "sigma_index": self.sigma_index, "stable_codes_checked": self.stable_codes_checked,
                "commensurable_with_upsilon": self.commensurable_with_upsilon, "verdicts": self.verdicts,
                "upsilon_tail": self.upsilon_tail.to_json(), "passed": self.passed}


def _displacement_product(a, b, w: Window) -> int:
    return space_index(a, b, w).value * space_index(b, a, w).value


def counterexample_suite(N: int, pattern_length: int = 3) -> SuiteReport:
    if N < 4:
        raise WindowTooSmall(f"suite needs N >= 4, got {N}")
    w = Window(N)
    ups = AnnihilatorCode.upsilon(N)
    U = ups.space
    taus = {k: commensuration_index(ups, tau_power(k)).value for k in range(-(N - 1), N)}
    tau_ok = all(v == 2 ** abs(k) for k, v in taus.items())
    sig = commensuration_index(ups, "s").value
    # commensurable means the displacement from the tail code stays bounded as the window grows
    w2 = Window(N + 2)
    U2 = ups.with_window(N + 2).space
    bounded, verdicts = [], {"finite": 0, "cofinite-tail": 0, "undecided": 0}
    codes = stable_codes(N, pattern_length)
    for C in codes:
        d1 = _displacement_product(U, C.space, w)
        d2 = _displacement_product(U2, C.with_window(N + 2).space, w2)
        if d2 <= d1:
            bounded.append(C.to_json())
        verdicts[tail_detect(C).verdict] += 1
    return SuiteReport(N, taus, tau_ok, sig, len(codes), bounded, verdicts, tail_detect(ups))


def displacement(a, b, w: Window) -> Displacement:
    return Displacement(space_index(a, b, w), space_index(b, a, w))


# ---------- scale-core adapter


@dataclass(frozen=True)
class TailSpace:
    """A subgroup containing every coordinate beyond N, stored by its window part."""

    N: int
    space: tuple

    def to_json(self):
        w = Window(self.N)
        return {"N": self.N, "free_beyond": self.N, "basis": [w.support(x) for x in self.space]}


class ShiftModel:
    """Powers of tau acting on subgroups that contain the far right tail.

    Automorphisms are integers k standing for tau^k.  Subgroups are supported
    on coordinates >= -N; the window keeps ``reserve`` extra coordinates on
    each side so that tau can push supports below -N a bounded number of times.
    """

    name = "shift"

    def __init__(self, N: int, reserve: int = 8):
        self.N = N
        self.reserve = reserve
        self.w = Window(N + reserve)

    @property
    def top(self) -> int:
        return self.w.N

    def sub(self, space) -> TailSpace:
        return TailSpace(self.top, gf2.rref(space))

    def tail_code(self, start: int = 0) -> TailSpace:
        """{k : k(l) = 0 for l < start}."""
        return self.sub(self.w.e(l) for l in range(start, self.top + 1))

    def window_code(self) -> TailSpace:
        return self.tail_code(-self.N)

    def apply(self, k: int, U: TailSpace) -> TailSpace:
        space = U.space
        w = self.w
        for _ in range(abs(k)):
            if k > 0:
                if any(x & 1 for x in space):
                    raise SupportOverflow("tau pushes support past the reserve band")
                space = gf2.rref([tau(w, x) for x in space] + [w.e(self.top)])
            else:
                space = gf2.rref(tau_inv(w, x) for x in space)
        return TailSpace(self.top, space)

    def intersect(self, U, W) -> TailSpace:
        return TailSpace(self.top, gf2.intersect(U.space, W.space, self.w.dim))

    def index(self, U, W) -> IndexValue:
        return space_index(U.space, W.space, self.w)

    def equals(self, U, W) -> bool:
        return U.space == W.space

    def base(self) -> TailSpace:
        return self.tail_code(0)

    def product_equals(self, V, A, B) -> bool:
        return gf2.span_sum(A.space, B.space) == V.space

    def join_compact(self, V, K) -> TailSpace:
        return TailSpace(self.top, gf2.span_sum(V.space, K.space))

    def compose(self, a: int, b: int) -> int:
        return a + b

    def inverse(self, a: int) -> int:
        return -a

    def identity_auto(self) -> int:
        return 0

    def scale_oracle(self, k: int) -> IndexValue:
        return IndexValue(2 ** max(k, 0))
