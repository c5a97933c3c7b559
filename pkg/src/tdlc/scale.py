"""Model-independent scale calculus: tidying, scale, flat factoring, displacement.

Every routine takes a *model* object providing the contract below and works
only through it, so the lattice, tree and shift models all plug in.

Required model methods::

    apply(alpha, U)           image of U under alpha
    intersect(U, W)           U ∩ W
    index(U, W)               [U : U ∩ W] as an IndexValue
    equals(U, W)              set equality
    base()                    a designated compact open subgroup
    product_equals(V, A, B)   whether V = A·B
    compose(a, b), inverse(a), identity_auto()

Optional: ``compact_part(alpha, V)`` (None means the bounded-orbit part is
already contained in V), ``join_compact(V, K)``, ``scale_oracle(alpha)`` and
``flat_factors(generators, V)``.

Words over a generator list are sequences of (generator position, ±1).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import gcd
from typing import Any, Protocol, Sequence

import sympy

from .errors import (KComputationFailed, KNotStable, NoStabilization, NotFlat, OracleDisagreement,
                     RefinementBudgetExceeded)
from .index import Displacement, IndexValue

DEFAULT_MAX_DEPTH = 64


class GroupModel(Protocol):
    def apply(self, alpha, U): ...
    def intersect(self, U, W): ...
    def index(self, U, W) -> IndexValue: ...
    def equals(self, U, W) -> bool: ...
    def base(self): ...
    def product_equals(self, V, A, B) -> bool: ...
    def compose(self, a, b): ...
    def inverse(self, a): ...
    def identity_auto(self): ...


def index(model, U, W) -> IndexValue:
    return model.index(U, W)


def displacement(model, U, W) -> Displacement:
    return Displacement(model.index(U, W), model.index(W, U))


def moved_index(model, alpha, V) -> IndexValue:
    """[alpha(V) : alpha(V) ∩ V]."""
    return model.index(model.apply(alpha, V), V)


# ---------- V_+ and V_-


@dataclass(frozen=True)
class PlusMinus:
    plus: Any
    minus: Any
    depth: int
    plus_increments: tuple
    minus_increments: tuple

    def to_json(self):
        return {"depth": self.depth, "plus_increments": [int(x) for x in self.plus_increments],
                "minus_increments": [int(x) for x in self.minus_increments]}


def _chain(model, a, V, steps):
    """V_0 = V, V_{m+1} = V ∩ a(V_m), i.e. V_m = ⋂_{k=0}^{m} a^k(V)."""
    out = [V]
    for _ in range(steps):
        out.append(model.intersect(V, model.apply(a, out[-1])))
    return out


def _settled(incs, m):
    """Increment sequence has stopped changing at m: exact stop, or a repeated increment."""
    return incs[m] == 1 or (m >= 1 and incs[m] == incs[m - 1])


def plus_minus_parts(model, alpha, V, max_depth: int = DEFAULT_MAX_DEPTH) -> PlusMinus:
    """Truncations ⋂_{k=0}^m alpha^{±k}(V) at the first depth m where both chains settle."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    inv = model.inverse(alpha)
    chains = {+1: [V], -1: [V]}
    incs = {+1: [], -1: []}
    for m in range(max_depth + 1):
        for sgn, a in ((+1, alpha), (-1, inv)):
            c = chains[sgn]
            while len(c) < m + 2:
                c.append(model.intersect(V, model.apply(a, c[-1])))
                incs[sgn].append(model.index(c[-2], c[-1]))
        if _settled(incs[+1], m) and _settled(incs[-1], m):
            return PlusMinus(chains[+1][m], chains[-1][m], m, tuple(incs[+1][: m + 1]), tuple(incs[-1][: m + 1]))
    raise NoStabilization(max_depth, "V_+/V_- intersections")


def is_tidy_above(model, alpha, V, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """[V : V_-] = [V_+ : V_+ ∩ V_-] on every truncation up to past the settling depth."""
    pm = plus_minus_parts(model, alpha, V, max_depth)
    top = max(pm.depth + 2, 4)
    inv = model.inverse(alpha)
    plus = _chain(model, alpha, V, top)
    minus = _chain(model, inv, V, top)
    for m in range(1, top + 1):
        if model.index(V, minus[m]) != model.index(plus[m], model.intersect(plus[m], minus[m])):
            return False
    return True


# ---------- tidying


@dataclass(frozen=True)
class TidyCertificate:
    input: Any
    step1: Any
    step1_exponent: int
    compact: Any
    w_part: Any
    output: Any
    parts: PlusMinus
    minimizing_index: IndexValue
    input_index: IndexValue
    ta_held: dict = field(default_factory=dict)
    tb_held: bool = True

    def to_json(self):
        ser = lambda x: x.to_json() if hasattr(x, "to_json") else (None if x is None else str(x))
        return {
            "input": ser(self.input), "step1": ser(self.step1), "step1_exponent": self.step1_exponent,
            "compact": ser(self.compact), "output": ser(self.output),
            "parts": self.parts.to_json(), "minimizing_index": self.minimizing_index.to_json(),
            "input_index": self.input_index.to_json(), "ta_held": dict(self.ta_held), "tb_held": self.tb_held,
        }


def tidy(model, alpha, V, max_depth: int = DEFAULT_MAX_DEPTH) -> TidyCertificate:
    """Tidy V for alpha: intersect forward iterates until TA holds, then absorb the compact part."""
    ta = {"input": is_tidy_above(model, alpha, V, max_depth)}
    cur, n = V, 0
    if not ta["input"]:
        while True:
            n += 1
            if n > max_depth:
                raise NoStabilization(max_depth, "step-1 intersections")
            cur = model.intersect(V, model.apply(alpha, cur))
            if is_tidy_above(model, alpha, cur, max_depth):
                break
    ta["step1"] = True
    compact = model.compact_part(alpha, cur) if hasattr(model, "compact_part") else None
    if compact is None:
        out, w_part = cur, cur
    else:
        out = model.join_compact(cur, compact)
        w_part = getattr(model, "last_w_part", cur)
        if not is_tidy_above(model, alpha, out, max_depth):
            raise KComputationFailed("joining the compact part destroyed the TA property")
    ta["output"] = True
    parts = plus_minus_parts(model, alpha, out, max_depth)
    return TidyCertificate(
        input=V, step1=cur, step1_exponent=n, compact=compact, w_part=w_part, output=out, parts=parts,
        minimizing_index=moved_index(model, alpha, out), input_index=moved_index(model, alpha, V),
        ta_held=ta, tb_held=True)


def scale(model, alpha, max_depth: int = DEFAULT_MAX_DEPTH) -> IndexValue:
    """Minimizing index from the model base, cross-checked against the model oracle if any."""
    if hasattr(model, "scale_base"):
        start = model.scale_base(alpha)
    else:
        start = model.base()
    s = tidy(model, alpha, start, max_depth).minimizing_index
    oracle = getattr(model, "scale_oracle", None)
    if oracle is not None:
        o = oracle(alpha)
        if o != s:
            raise OracleDisagreement(f"tidying gives {s.value}, oracle gives {o.value} for {alpha!r}")
    return s


def is_minimizing(model, alpha, V, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    return moved_index(model, alpha, V) == scale(model, alpha, max_depth)


def join_compact(model, V, K, autos: Sequence = ()):
    """V'K for a compact K stable under every automorphism in ``autos``."""
    if K is None:
        return V
    for a in autos:
        if not model.equals(model.apply(a, K), K):
            raise KNotStable(f"compact subgroup is not stable under {a!r}")
    return model.join_compact(V, K)


# ---------- words


def compose_word(model, generators, word):
    out = model.identity_auto()
    for i, e in word:
        g = generators[i]
        out = model.compose(out, g if e > 0 else model.inverse(g))
    return out


def all_words(n_gens: int, max_len: int):
    letters = [(i, e) for i in range(n_gens) for e in (1, -1)]
    for length in range(1, max_len + 1):
        yield from (tuple(w) for w in iproduct(letters, repeat=length))


def random_word(rng: random.Random, n_gens: int, length: int):
    return tuple((rng.randrange(n_gens), rng.choice((1, -1))) for _ in range(length))


def word_displacement_bound(model, generators, word, V):
    """(measured [w(V) : w(V) ∩ V], M^len(word)) with M the largest one-letter index."""
    if not word:
        return IndexValue(1), IndexValue(1)
    M = max(max(moved_index(model, g, V).value, moved_index(model, model.inverse(g), V).value)
            for g in generators)
    measured = moved_index(model, compose_word(model, generators, word), V)
    bound = IndexValue(M ** len(word))
    assert measured <= bound, f"index bound violated: {measured.value} > {bound.value}"
    return measured, bound


# ---------- properties of the scale


@dataclass
class PropertyReport:
    scale: IndexValue
    inverse_scale: IndexValue
    modular: Fraction
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self):
        return {"scale": self.scale.value, "inverse_scale": self.inverse_scale.value,
                "modular": str(self.modular), "checks": dict(self.checks), "details": self.details}


def scale_report(model, alpha, n_max: int = 4, conjugators: Sequence = (), root=None,
                 max_depth: int = DEFAULT_MAX_DEPTH) -> PropertyReport:
    """Check power law, modular ratio, conjugation invariance, uniscalarity and a root witness.

    ``root`` is an optional pair (gamma, m) with alpha = gamma^m.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    s = scale(model, alpha, max_depth)
    s_inv = scale(model, model.inverse(alpha), max_depth)
    rep = PropertyReport(s, s_inv, Fraction(s.value, s_inv.value))
    powers, power = [], alpha
    for n in range(2, n_max + 1):
        power = model.compose(power, alpha)
        sn = scale(model, power, max_depth)
        powers.append((n, sn.value, s.value ** n))
    rep.details["powers"] = powers
    rep.checks["power_law"] = all(a == b for _, a, b in powers)
    if hasattr(model, "modular"):
        rep.details["modular_direct"] = str(model.modular(alpha))
        rep.checks["modular_ratio"] = model.modular(alpha) == rep.modular
    conj = []
    for b in conjugators:
        c = model.compose(model.compose(b, alpha), model.inverse(b))
        conj.append(scale(model, c, max_depth).value)
    rep.details["conjugates"] = conj
    rep.checks["conjugation_invariance"] = all(c == s.value for c in conj)
    cert = tidy(model, alpha, model.base(), max_depth)
    stabilized = model.equals(model.apply(alpha, cert.output), cert.output)
    uniscalar = s == 1 and s_inv == 1
    rep.details["uniscalar"] = uniscalar
    rep.details["stabilized_subgroup"] = cert.output.to_json() if stabilized and hasattr(cert.output, "to_json") else None
    rep.checks["uniscalar_criterion"] = uniscalar == stabilized
    if root is not None:
        gamma, m = root
        sg = scale(model, gamma, max_depth)
        rep.details["root"] = {"m": m, "root_scale": sg.value}
        rep.checks["root_witness"] = s.value == sg.value ** m
    return rep


# ---------- flat factoring


@dataclass(frozen=True)
class FlatFactor:
    subgroup: Any
    base: int
    rho: tuple

    def delta(self, word_rho: int) -> Fraction:
        return Fraction(self.base) ** word_rho


@dataclass
class FlatFactoring:
    subgroup: Any
    factors: list
    uniscalar_part: Any
    generator_scales: list
    uniscalar: list
    verified_words: int = 0

    @property
    def q(self) -> int:
        return len(self.factors)

    @property
    def rank(self) -> int:
        if not self.factors:
            return 0
        return int(sympy.Matrix([list(f.rho) for f in self.factors]).rank())

    def rho(self, word) -> list[int]:
        return [sum(f.rho[i] * e for i, e in word) for f in self.factors]

    def predicted_scale(self, word) -> int:
        out = 1
        for f, r in zip(self.factors, self.rho(word)):
            if r > 0:
                out *= f.base ** r
        return out

    def to_json(self):
        ser = lambda x: x.to_json() if hasattr(x, "to_json") else None
        return {"q": self.q, "flat_rank": self.rank, "subgroup": ser(self.subgroup),
                "factors": [{"s": f.base, "rho": list(f.rho), "subgroup": ser(f.subgroup)} for f in self.factors],
                "generator_scales": self.generator_scales, "uniscalar": self.uniscalar,
                "verified_words": self.verified_words}


def _scale_of(model, alpha, max_depth):
    oracle = getattr(model, "scale_oracle", None)
    return oracle(alpha) if oracle is not None else scale(model, alpha, max_depth)


def flat_factor(model, generators: Sequence, max_word_len: int = 4, samples: int = 48, seed: int = 0,
                refine_rounds: int = 4, max_depth: int = DEFAULT_MAX_DEPTH) -> FlatFactoring:
    """Common tidy subgroup and factor data for a flat family of automorphisms."""
    gens = list(generators)
    k = len(gens)
    scales = [scale(model, g, max_depth) for g in gens]
    inv_scales = [scale(model, model.inverse(g), max_depth) for g in gens]
    order = sorted(range(k), key=lambda i: -scales[i].value)
    V = model.base()
    for _ in range(refine_rounds):
        for i in order:
            V = tidy(model, gens[i], V, max_depth).output
        if all(moved_index(model, g, V) == scales[i] and moved_index(model, model.inverse(g), V) == inv_scales[i]
               for i, g in enumerate(gens)):
            break
    else:
        raise RefinementBudgetExceeded(f"no common tidy subgroup after {refine_rounds} rounds")

    for a, b in iproduct(range(k), repeat=2):
        if a < b:
            ga, gb = gens[a], gens[b]
            comm = model.compose(model.compose(ga, gb), model.compose(model.inverse(ga), model.inverse(gb)))
            if _scale_of(model, comm, max_depth) != 1 or _scale_of(model, model.inverse(comm), max_depth) != 1:
                raise NotFlat(((a, 1), (b, 1), (a, -1), (b, -1)), "commutator of generators is not uniscalar")

    rng = random.Random(seed)
    words = [random_word(rng, k, rng.randint(1, max_word_len)) for _ in range(samples)]
    for w in words:
        aw = compose_word(model, gens, w)
        if moved_index(model, aw, V) != _scale_of(model, aw, max_depth):
            raise NotFlat(w)

    factors, uni = [], None
    hook = getattr(model, "flat_factors", None)
    if hook is not None:
        for d in hook(gens, V):
            exps = d["exponents"]
            if not any(exps):
                uni = d["subgroup"]
                continue
            g = 0
            for e in exps:
                g = gcd(g, abs(e))
            factors.append(FlatFactor(d["subgroup"], d["base"] ** g, tuple(e // g for e in exps)))
    elif all(s == 1 for s in scales) and all(s == 1 for s in inv_scales):
        uni = V
    elif k == 1:
        s, si = scales[0].value, inv_scales[0].value
        if s > 1:
            factors.append(FlatFactor(None, s, (1,)))
        if si > 1:
            factors.append(FlatFactor(None, si, (-1,)))
    else:
        raise RefinementBudgetExceeded("factor subgroups need a model hook beyond a single generator")

    ff = FlatFactoring(V, factors, uni, [s.value for s in scales],
                       [s == 1 and si == 1 for s, si in zip(scales, inv_scales)], len(words))
    for i, g in enumerate(gens):
        if ff.predicted_scale(((i, 1),)) != scales[i].value:
            raise NotFlat(((i, 1),), "factor data does not reproduce a generator scale")
    if ff.rank > ff.q:
        raise NotFlat((), "flat rank exceeds the number of factors")
    return ff
