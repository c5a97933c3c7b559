"""Relative profinite completions at finite truncation.

A marked group supplies exact multiplication and a normal form for the
cosets of a designated subgroup Λ.  Coset tables are grown breadth first and
only ever extended.  Orbit sizes of Λ on cosets give commensuration indices,
and the permutation groups generated on finite sets of cosets give the level
data of the completion.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Hashable, Sequence

from .errors import NormalFormFailure, NotHomomorphism, NotTransversal, OrbitNotSaturated
from .fields import PAdicField
from .index import IndexValue
from .lattice import Lattice

# ---------- marked groups


class MarkedGroup:
    """Base class: subclasses define mul, inv, identity, generators, coset_key and lambda_generators."""

    name = "group"

    def generators(self) -> dict:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def coset_key(self, g) -> Hashable:
        raise NotImplementedError

    def lambda_generators(self, R: int) -> list:
        raise NotImplementedError

    def member(self, g) -> bool:
        return self.coset_key(g) == self.coset_key(self.identity())

    def all_generators(self) -> dict:
        gens = dict(self.generators())
        for name, g in list(gens.items()):
            inv = self.inv(g)
            if inv != g:
                gens[name + "^-1"] = inv
        return gens


class Lamplighter(MarkedGroup):
    """(⊕_Z C2) ⋊ Z with elements (set of lit lamps, shift).

    ``fixed`` lists the lamp positions whose values Λ pins to zero: (0,) for
    {f : f(0) = 0}, (0, 1) for {f : f(0) = f(1) = 0}, () for the whole lamp group.
    """

    def __init__(self, fixed: Sequence[int] = (0,)):
        self.fixed = tuple(fixed)
        self.name = f"lamplighter{list(self.fixed)}"

    def generators(self):
        return {"t": (frozenset(), 1), "a": (frozenset({0}), 0)}

    def mul(self, a, b):
        f, n = a
        g, m = b
        return (f ^ frozenset(k + n for k in g), n + m)

    def inv(self, a):
        f, n = a
        return (frozenset(k - n for k in f), -n)

    def identity(self):
        return (frozenset(), 0)

    def coset_key(self, g):
        f, n = g
        return (n,) + tuple(int(n + j in f) for j in self.fixed)

    def lambda_generators(self, R):
        return [(frozenset({k}), 0) for k in range(-R, R + 1) if k not in self.fixed]

    @staticmethod
    def lamp(k):
        return (frozenset({k}), 0)

    @staticmethod
    def shift(n):
        return (frozenset(), n)


class SL2Rational(MarkedGroup):
    """SL2(Z[1/p]) with Λ = SL2(Z); cosets gΛ are the lattices g·Z_p^2."""

    def __init__(self, p: int, extra: Sequence = ("diag",)):
        self.p = p
        self.field = PAdicField(p)
        self.extra = tuple(extra)
        self.name = f"SL2(Z[1/{p}])"

    def generators(self):
        p = Fraction(self.p)
        gens = {"E": self.mat(1, 1, 0, 1), "F": self.mat(1, 0, 1, 1)}
        if "diag" in self.extra:
            gens["D"] = self.mat(p, 0, 0, 1 / p)
        if "elementary" in self.extra:
            gens["U"] = self.mat(1, 1 / p, 0, 1)
        return gens

    @staticmethod
    def mat(a, b, c, d):
        return tuple(Fraction(x) for x in (a, b, c, d))

    def mul(self, x, y):
        a, b, c, d = x
        e, f, g, h = y
        return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inv(self, x):
        a, b, c, d = x
        return (d, -b, -c, a)

    def identity(self):
        return self.mat(1, 0, 0, 1)

    def coset_key(self, g):
        a, b, c, d = g
        if a * d - b * c != 1:
            raise NormalFormFailure(f"matrix {g} is not in SL2")
        L = Lattice.from_matrix(self.field, [[a, b], [c, d]])
        return L.basis

    def lambda_generators(self, R):
        return [self.mat(1, 1, 0, 1), self.mat(1, 0, 1, 1)]


class CyclicQuotient(MarkedGroup):
    """Γ = Z with Λ = mZ, a normal subgroup of finite index."""

    def __init__(self, m: int):
        self.m = m
        self.name = f"Z/{m}Z"

    def generators(self):
        return {"1": 1}

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def identity(self):
        return 0

    def coset_key(self, g):
        return g % self.m

    def lambda_generators(self, R):
        return [self.m]


# ---------- coset tables


@dataclass
class CosetTable:
    radius: int
    keys: list = field(default_factory=list)
    reps: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    actions: dict = field(default_factory=dict)
    frontier: set = field(default_factory=set)

    def position(self, key):
        return self._pos.get(key)

    def __post_init__(self):
        self._pos = {}

    def _add(self, key, rep, d):
        self._pos[key] = len(self.keys)
        self.keys.append(key)
        self.reps.append(rep)
        self.depth.append(d)

    def __len__(self):
        return len(self.keys)

    @property
    def closed(self) -> bool:
        return not self.frontier

    def to_json(self):
        return {"radius": self.radius, "size": len(self), "closed": self.closed,
                "cosets": [repr(k) for k in self.keys],
                "actions": {g: {str(i): j for i, j in sorted(m.items())} for g, m in sorted(self.actions.items())}}


def _key(M: MarkedGroup, g):
    try:
        return M.coset_key(g)
    except NormalFormFailure:
        raise
    except Exception as exc:  # pragma: no cover - model bug surfaced uniformly
        raise NormalFormFailure(f"cannot canonicalize {g!r}: {exc}") from exc


def enumerate_cosets(M: MarkedGroup, R: int) -> CosetTable:
    """All cosets gΛ with g a word of length ≤ R, with the generator actions among them."""
    if R < 1:
        raise ValueError("radius must be at least 1")
    gens = M.all_generators()
    table = CosetTable(R)
    table.actions = {name: {} for name in gens}
    table._add(_key(M, M.identity()), M.identity(), 0)
    i = 0
    while i < len(table):
        rep, d = table.reps[i], table.depth[i]
        for name, s in gens.items():
            img = M.mul(s, rep)
            k = _key(M, img)
            j = table.position(k)
            if j is None:
                if d >= R:
                    table.frontier.add(i)
                    continue
                table._add(k, img, d + 1)
                j = len(table) - 1
            table.actions[name][i] = j
        i += 1
    return table


def lambda_orbit(M: MarkedGroup, g, R: int) -> set:
    """The Λ-orbit of the coset gΛ, using the Λ generators available at radius R."""
    gens = M.lambda_generators(R)
    gens = gens + [M.inv(x) for x in gens]
    start = _key(M, g)
    seen = {start: g}
    queue = deque([g])
    steps = 0
    while queue:
        steps += 1
        if steps > 100000:
            raise OrbitNotSaturated(R)
        x = queue.popleft()
        for lam in gens:
            y = M.mul(lam, x)
            k = _key(M, y)
            if k not in seen:
                seen[k] = y
                queue.append(y)
    return set(seen)


def commensuration_index(M: MarkedGroup, gamma, R: int = 3) -> IndexValue:
    """[Λ : Λ ∩ γΛγ^{-1}] as the Λ-orbit size of γΛ, checked stable from R to R+1."""
    a = lambda_orbit(M, gamma, R)
    b = lambda_orbit(M, gamma, R + 1)
    if a != b:
        raise OrbitNotSaturated(R)
    return IndexValue(len(a))


# ---------- permutation groups on finite coset sets


def _perm_of(M, elem, points, index):
    out = []
    for rep in points:
        k = _key(M, M.mul(elem, rep))
        j = index.get(k)
        if j is None:
            return None
        out.append(j)
    return tuple(out)


def generated_group(perms) -> set:
    perms = [p for p in perms if p is not None]
    if not perms:
        return set()
    n = len(perms[0])
    ident = tuple(range(n))
    group = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in perms:
            h = tuple(s[i] for i in g)
            if h not in group:
                group.add(h)
                queue.append(h)
    return group


@dataclass
class MatchReport:
    case: str
    levels: dict
    matched: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"case": self.case, "levels": self.levels, "matched": self.matched, "details": self.details}


def lamplighter_level(m: int):
    """Generated group of Λ = {f(0) = 0} on the cosets with |n| ≤ m, and the wreath target."""
    M = Lamplighter((0,))
    points = [(frozenset({n}) if a else frozenset(), n) for n in range(-m, m + 1) for a in (0, 1)]
    reps = [(f, n) for f, n in points]
    index = {_key(M, r): i for i, r in enumerate(reps)}
    gens = [_perm_of(M, lam, reps, index) for lam in M.lambda_generators(m)]
    got = generated_group(gens)
    # target: every f on [-m, m] with f(0) = 0 flips the coset (n, a) to (n, a + f(n))
    target = set()
    free = [k for k in range(-m, m + 1) if k != 0]
    for bits in iproduct((0, 1), repeat=len(free)):
        f = dict(zip(free, bits))
        perm = []
        for (lamps, n) in reps:
            a = int(n in lamps) ^ f.get(n, 0)
            perm.append(index[(n, a)])
        target.add(tuple(perm))
    return got, target


def completion_fingerprint(case: str, R: int = 3, p: int = 3) -> MatchReport:
    """Compare finite-level permutation data of Γ//Λ with the identified target."""
    if case == "lamplighter":
        levels = {}
        for m in range(1, R + 1):
            got, target = lamplighter_level(m)
            levels[m] = {"order": len(got), "target_order": len(target), "match": got == target}
        return MatchReport(case, levels, all(v["match"] for v in levels.values()))
    if case == "sl2":
        return _sl2_fingerprint(p, R)
    if case.startswith("cyclic"):
        m = int(case.split(":")[1]) if ":" in case else 3
        M = CyclicQuotient(m)
        table = enumerate_cosets(M, max(R, m))
        perms = [tuple(table.actions[g][i] for i in range(len(table))) for g in ("1",)]
        grp = generated_group(perms)
        ok = table.closed and len(table) == m and len(grp) == m
        return MatchReport(case, {1: {"cosets": len(table), "order": len(grp), "target_order": m, "match": ok}}, ok)
    raise ValueError(f"unknown case {case!r}")


def tree_sphere_sizes(p: int, radius: int) -> list[int]:
    """Vertices at each distance from the standard vertex, counted by walking the tree."""
    from .tree import Vertex, ball

    b = ball(Vertex.standard(PAdicField(p)), radius)
    return [sum(1 for d in b.values() if d == r) for r in range(radius + 1)]


def _sl2_fingerprint(p: int, R: int) -> MatchReport:
    from .tree import Vertex, vertex_distance

    M = SL2Rational(p)
    table = enumerate_cosets(M, R)
    K = M.field
    v0 = Vertex.standard(K)
    dist_of = {}
    for key, rep in zip(table.keys, table.reps):
        a, b, c, d = rep
        dist_of[key] = vertex_distance(v0, Vertex.from_matrix(K, [[a, b], [c, d]]))
    max_d = min(2, max(dist_of.values()))
    spheres = tree_sphere_sizes(p, max_d)
    levels, ok = {}, True
    for dist in range(max_d + 1):
        keys = [k for k, dd in dist_of.items() if dd == dist]
        if not keys:
            levels[dist] = {"coset_orbit": None, "tree_sphere": spheres[dist], "match": dist % 2 == 1}
            ok &= dist % 2 == 1
            continue
        rep = table.reps[table.position(keys[0])]
        orbit = lambda_orbit(M, rep, R)
        match = len(orbit) == spheres[dist]
        levels[dist] = {"coset_orbit": len(orbit), "tree_sphere": spheres[dist], "match": match}
        ok &= match
    return MatchReport("sl2", levels, ok, {"p": p, "cosets": len(table)})


def count_cyclic_sublattices(p: int, d: int) -> int:
    """Cyclic subgroups of order p^d in (Z/p^d)^2, by listing generators."""
    mod = p ** d
    subgroups = set()
    for x, y in iproduct(range(mod), repeat=2):
        if x % p == 0 and y % p == 0:
            continue
        subgroups.add(frozenset(((k * x) % mod, (k * y) % mod) for k in range(mod)))
    return len(subgroups)


def lattice_side_index(p: int, gamma) -> IndexValue:
    """[Stab(v) : Stab(v) ∩ Stab(γv)] in the tree, for the lattice classes of 1 and γ."""
    from .tree import TreeModel, Vertex

    K = PAdicField(p)
    T = TreeModel(K)
    a, b, c, d = gamma
    v = Vertex.standard(K)
    w = Vertex.from_matrix(K, [[a, b], [c, d]])
    return T.index(T.stab([v]), T.stab([w]))


# ---------- nested subgroups


@dataclass
class RhoReport:
    small: str
    big: str
    well_defined: bool
    functorial: bool
    surjective: bool
    kernel_order: int
    fiber_group_order: int
    restriction: dict
    pullback_identity: bool

    def to_json(self):
        return dict(self.__dict__)


def rho_nested(small: MarkedGroup, big: MarkedGroup, R: int = 2) -> RhoReport:
    """The coset map Γ/Λ → Γ/Υ for Λ ≤ Υ, with kernel and fiber data at radius R."""
    tx = enumerate_cosets(small, R)
    ty = enumerate_cosets(big, R + 2)
    rho = {}
    well = True
    for k, rep in zip(tx.keys, tx.reps):
        img = _key(big, rep)
        if k in rho and rho[k] != img:
            well = False
        rho[k] = img
        # a second representative of the same Λ-coset must land on the same Υ-coset
        for lam in small.lambda_generators(R):
            if _key(big, small.mul(rep, lam)) != img:
                well = False
    gens = small.all_generators()
    functorial = all(
        _key(big, small.mul(s, rep)) == _key(big, big.mul(s, ty.reps[ty.position(rho[k])]))
        for k, rep in zip(tx.keys, tx.reps) for s in gens.values())
    surjective = {ty.keys[i] for i in range(len(ty)) if ty.depth[i] <= R} <= set(rho.values())

    # X: small cosets of the table closed under the Υ generators; Y: the wider big table
    ups = big.lambda_generators(R + 1)
    xs = list(zip(tx.keys, tx.reps))
    seen = {k for k, _ in xs}
    i = 0
    while i < len(xs):
        for lam in ups:
            y = small.mul(lam, xs[i][1])
            k = _key(small, y)
            if k not in seen:
                seen.add(k)
                xs.append((k, y))
        if len(xs) > 20000:
            raise OrbitNotSaturated(R)
        i += 1
    xreps = [r for _, r in xs]
    xindex = {k: j for j, (k, _) in enumerate(xs)}
    yindex = {k: j for j, k in enumerate(ty.keys)}
    nx = len(xs)
    combined = []
    for lam in ups:
        px = _perm_of(small, lam, xreps, xindex)
        py = _perm_of(big, lam, ty.reps, yindex)
        if px is None or py is None:
            continue
        combined.append(px + tuple(nx + j for j in py))
    grp = generated_group(combined)
    ident_y = tuple(range(nx, nx + len(ty)))
    kernel = {g[:nx] for g in grp if g[nx:] == ident_y}
    # Υ/Λ: the small cosets lying over the base coset of Γ/Υ
    base = _key(big, big.identity())
    fiber = [j for j, (k, r) in enumerate(xs) if _key(big, r) == base]
    fiber_perms = {tuple(g[j] for j in fiber) for g in grp}
    moving = sum(1 for g in kernel if tuple(g[j] for j in fiber) != tuple(fiber))
    restriction = {"kernel_elements": len(kernel), "moving_fiber": moving, "fiber_size": len(fiber)}
    # a coset lies over the base iff its representatives, shifted inside Λ, belong to Υ
    pull = all(big.member(small.mul(r, lam)) == (_key(big, r) == base)
               for _, r in xs for lam in [small.identity()] + small.lambda_generators(R))
    return RhoReport(small.name, big.name, well, functorial, surjective, len(kernel), len(fiber_perms),
                     restriction, pull)


def kernel_restriction_values(R: int = 2) -> list[tuple[frozenset, int, bool]]:
    """For Λ = {f(0)=0} ≤ A: each lamp set S acts on Υ/Λ by flipping iff f(0) = 1."""
    small = Lamplighter((0,))
    out = []
    lamps = list(range(-R, R + 1))
    base = [(frozenset(), 0), (frozenset({0}), 0)]
    index = {_key(small, r): i for i, r in enumerate(base)}
    for bits in iproduct((0, 1), repeat=len(lamps)):
        S = frozenset(k for k, b in zip(lamps, bits) if b)
        perm = _perm_of(small, (S, 0), base, index)
        out.append((S, int(0 in S), perm != (0, 1)))
    return out


# ---------- wreath transfer


@dataclass
class TransferredHom:
    transversal: list
    images: dict
    homomorphism: bool
    projection_ok: bool
    ad_ok: bool
    commensuration_indices: list

    def to_json(self):
        return {"transversal": [repr(x) for x in self.transversal],
                "images": {repr(g): {"sigma": list(s), "f": [repr(v) for v in f]} for g, (s, f) in self.images.items()},
                "homomorphism": self.homomorphism, "projection_ok": self.projection_ok, "ad_ok": self.ad_ok,
                "commensuration_indices": self.commensuration_indices}


@dataclass
class FiniteOps:
    mul: Callable
    inv: Callable
    identity: Hashable


def wreath_transfer(gamma1: FiniteOps, in_gamma2: Callable, phi: Callable, delta: FiniteOps, X: Sequence,
                    sample: Sequence, lam: Sequence | None = None) -> TransferredHom:
    """φ̃(g) = (σ_g, f_g) in Sym(X) ⋉ Δ^X with g·x = σ_g(x)·α(g, x) and f_g(x) = φ(α(g, x)).

    Verified on every pair from ``sample``; ``lam`` is a subgroup of Δ given as a list.
    """
    X = list(X)
    if X[0] != gamma1.identity:
        raise NotTransversal("the transversal must start with the identity")
    n = len(X)

    def transfer(g):
        sig, f = [], []
        for x in X:
            gx = gamma1.mul(g, x)
            hits = [j for j, y in enumerate(X) if in_gamma2(gamma1.mul(gamma1.inv(y), gx))]
            if len(hits) != 1:
                raise NotTransversal(f"{g!r}·{x!r} meets {len(hits)} transversal cosets")
            j = hits[0]
            sig.append(j)
            f.append(phi(gamma1.mul(gamma1.inv(X[j]), gx)))
        return tuple(sig), tuple(f)

    def wmul(a, b):
        s1, f1 = a
        s2, f2 = b
        return tuple(s1[s2[i]] for i in range(n)), tuple(delta.mul(f1[s2[i]], f2[i]) for i in range(n))

    def winv(a):
        s, f = a
        sinv = [0] * n
        for i, j in enumerate(s):
            sinv[j] = i
        # (s, f)^{-1} = (s^{-1}, x ↦ f(s^{-1}(x))^{-1})
        return tuple(sinv), tuple(delta.inv(f[sinv[i]]) for i in range(n))

    images = {g: transfer(g) for g in sample}
    hom = True
    for g, h in iproduct(sample, repeat=2):
        if transfer(gamma1.mul(g, h)) != wmul(images[g], images[h]):
            hom = False
    if not hom:
        raise NotHomomorphism("transferred map fails the cocycle identity")
    sub = [g for g in sample if in_gamma2(g)]
    proj = all(images[g][0][0] == 0 and images[g][1][0] == phi(g) for g in sub)
    ad = True
    for g, h in iproduct(sub, repeat=2):
        c = wmul(wmul(images[g], images[h]), winv(images[g]))
        if c[1][0] != delta.mul(delta.mul(phi(g), phi(h)), delta.inv(phi(g))):
            ad = False
    lam = list(lam) if lam is not None else [delta.identity]
    ident = tuple(range(n))
    lam_t = {(ident, f) for f in iproduct(lam, repeat=n)}
    indices = []
    for g in sample:
        a = images[g]
        conj = {wmul(wmul(a, x), winv(a)) for x in lam_t}
        indices.append(len(lam_t) // len(lam_t & conj) if lam_t & conj else 0)
    return TransferredHom(X, images, hom, proj, ad, indices)


def z_mod_two_case() -> TransferredHom:
    """Γ1 = Z, Γ2 = 2Z, φ(2k) = k mod 2, X = {0, 1}."""
    Z = FiniteOps(lambda a, b: a + b, lambda a: -a, 0)
    C2 = FiniteOps(lambda a, b: (a + b) % 2, lambda a: a % 2, 0)
    return wreath_transfer(Z, lambda g: g % 2 == 0, lambda g: (g // 2) % 2, C2, [0, 1],
                           list(range(-6, 7)), lam=[0])


def _compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def _pinv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _sign(p):
    s, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        s *= -1 if length % 2 == 0 else 1
    return s


def s3_a3_case() -> TransferredHom:
    """Γ1 = S3, Γ2 = A3, φ: A3 → C3 an isomorphism, X = {e, (0 1)}."""
    from itertools import permutations

    S3 = FiniteOps(_compose, _pinv, (0, 1, 2))
    C3 = FiniteOps(lambda a, b: (a + b) % 3, lambda a: (-a) % 3, 0)
    c = (1, 2, 0)
    log = {(0, 1, 2): 0, c: 1, _compose(c, c): 2}
    elems = sorted(permutations(range(3)))
    return wreath_transfer(S3, lambda g: _sign(g) == 1, lambda g: log[g], C3, [(0, 1, 2), (1, 0, 2)],
                           elems, lam=[0])
