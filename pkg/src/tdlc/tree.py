"""The (q+1)-regular tree as homothety classes of rank-2 lattices.

Vertices are lattice classes in K^2; GL_2(K) acts through matrices.  Compact
open subgroups are pointwise stabilizers Stab(F) of finite vertex sets in the
full automorphism group of the tree, and their indices are counted
combinatorially, so only the vertex positions ever touch field arithmetic.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import ModelMismatch, OracleDisagreement
from .fields import LaurentField, LocalField, PAdicField, newton_slopes
from .index import Displacement, IndexValue
from .lattice import Lattice, LinearAuto, transform

ELLIPTIC, HYPERBOLIC, INVERSION = "elliptic", "hyperbolic", "inversion"


@dataclass(frozen=True)
class Vertex:
    """Homothety class of a lattice; the representative has first pivot exponent 0."""

    lattice: Lattice

    @classmethod
    def of(cls, L: Lattice) -> "Vertex":
        e0 = L.pivots[0][1]
        return cls(L if e0 == 0 else L.scaled(L.field.pi_pow(-e0)))

    @classmethod
    def standard(cls, field_: LocalField) -> "Vertex":
        return cls(Lattice.standard(field_, 2))

    @classmethod
    def from_matrix(cls, field_: LocalField, rows) -> "Vertex":
        """Class of the lattice spanned by the matrix columns."""
        return cls.of(Lattice.from_matrix(field_, rows))

    @property
    def field(self):
        return self.lattice.field

    def to_json(self):
        return self.lattice.to_json()["basis"]

    def __repr__(self):
        return f"Vertex{self.to_json()}"


@lru_cache(maxsize=1 << 16)
def vertex_distance(v: Vertex, w: Vertex) -> int:
    """v(det M) − 2·min v(M_ij) for the change of basis M between representatives."""
    if v == w:
        return 0
    K = v.field
    M = linalg.mat_mul(linalg.inverse(v.lattice.matrix()), w.lattice.matrix())
    m = min(K.valuation(x) for row in M for x in row)
    return int(K.valuation(linalg.det(M)) - 2 * m)


def act(g: LinearAuto, v: Vertex) -> Vertex:
    return Vertex.of(transform(g, v.lattice))


@lru_cache(maxsize=1 << 14)
def neighbors(v: Vertex) -> tuple:
    K = v.field
    b1, b2 = v.lattice.basis
    pi = K.uniformizer
    pb1, pb2 = tuple(pi * x for x in b1), tuple(pi * x for x in b2)
    cands = [tuple(x + c * y for x, y in zip(b1, b2)) for c in K.residue_reps()] + [b2]
    return tuple(Vertex.of(Lattice.span(K, [x, pb1, pb2], 2)) for x in cands)


@lru_cache(maxsize=1 << 14)
def geodesic(v: Vertex, w: Vertex) -> tuple:
    """Vertices on the path from v to w, both ends included."""
    if v == w:
        return (v,)
    K = v.field
    B1 = v.lattice.matrix()
    M = linalg.mat_mul(linalg.inverse(B1), w.lattice.matrix())
    m = min(K.valuation(x) for row in M for x in row)
    L2 = w.lattice.scaled(K.pi_pow(-m))
    d = vertex_distance(v, w)
    out = []
    for i in range(d + 1):
        piL1 = [[K.pi_pow(i) * x for x in c] for c in v.lattice.basis]
        out.append(Vertex.of(Lattice.span(K, list(L2.basis) + piL1, 2)))
    return tuple(out)


def hull(vertices) -> frozenset:
    """Convex hull: union of the pairwise geodesics."""
    vs = list(dict.fromkeys(vertices))
    if not vs:
        return frozenset()
    out = set(vs)
    root = vs[0]
    for w in vs[1:]:
        out.update(geodesic(root, w))
    # geodesics through the root already span the subtree of a tree
    return frozenset(out)


def degree_in(v: Vertex, H) -> int:
    return sum(1 for w in H if w != v and vertex_distance(v, w) == 1)


def fixed_closure(H, q: int) -> frozenset:
    """The full fixed set of Stab(H): a hull vertex with one free branch fixes that neighbor."""
    H = set(H)
    if len(H) < 2:
        return frozenset(H)
    extra = set()
    for g in list(H):
        if degree_in(g, H) == q:
            extra.update(w for w in neighbors(g) if w not in H)
    return frozenset(H | extra)


def _gate(v: Vertex, H):
    best = min(H, key=lambda h: (vertex_distance(v, h), h.to_json()))
    return best, vertex_distance(v, best)


@dataclass(frozen=True)
class SegmentStabilizer:
    """Pointwise stabilizer of a finite vertex set, stored by its closed convex hull."""

    vertices: frozenset
    q: int

    @classmethod
    def of(cls, vertices, q: int) -> "SegmentStabilizer":
        vs = list(vertices)
        if not vs:
            raise ValueError("stabilizer of the empty set is not compact")
        return cls(fixed_closure(hull(vs), q), q)

    def __len__(self):
        return len(self.vertices)

    def sorted(self):
        return sorted(self.vertices, key=lambda v: str(v.to_json()))

    def to_json(self):
        return [v.to_json() for v in self.sorted()]


def stab_index(F1: SegmentStabilizer, F2: SegmentStabilizer) -> IndexValue:
    """[Stab(F1) : Stab(F1 ∪ F2)] by adding vertices one at a time."""
    q = F1.q
    H = set(F1.vertices)
    target = fixed_closure(hull(list(F1.vertices) + list(F2.vertices)), q)
    total = 1
    while not target <= H:
        v = min(target - H, key=lambda u: str(u.to_json()))
        gate, d = _gate(v, H)
        branching = (q + 1) - degree_in(gate, H)
        total *= branching * q ** (d - 1)
        H = set(fixed_closure(hull(list(H) + [v]), q))
    return IndexValue(total)


# ---------- element classification


@dataclass(frozen=True)
class Classification:
    kind: str
    translation_length: int
    root_valuations: tuple

    def to_json(self):
        return {"kind": self.kind, "translation_length": self.translation_length,
                "root_valuations": [str(r) for r in self.root_valuations]}


def newton_classify(g: LinearAuto) -> Classification:
    K = g.field
    r1, r2 = newton_slopes(K, g.charpoly).root_valuations
    if r1 != r2:
        return Classification(HYPERBOLIC, int(abs(r1 - r2)), (r1, r2))
    if K.valuation(g.det) % 2:
        return Classification(INVERSION, 1, (r1, r2))
    return Classification(ELLIPTIC, 0, (r1, r2))


def ball(center: Vertex, radius: int):
    seen = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if seen[v] == radius:
            continue
        for w in neighbors(v):
            if w not in seen:
                seen[w] = seen[v] + 1
                queue.append(w)
    return seen


def bfs_min_displacement(g: LinearAuto, center: Vertex, radius: int) -> int:
    return min(vertex_distance(v, act(g, v)) for v in ball(center, radius))


def classify(g: LinearAuto, check: bool = True, extra_radius: int = 2) -> Classification:
    """Kind and translation length from root valuations, confirmed by a ball search."""
    c = newton_classify(g)
    if check:
        v0 = Vertex.standard(g.field)
        d0 = vertex_distance(v0, act(g, v0))
        radius = (d0 - c.translation_length + 1) // 2 + c.translation_length + extra_radius
        found = bfs_min_displacement(g, v0, radius)
        if found != c.translation_length:
            raise OracleDisagreement(
                f"root valuations give length {c.translation_length}, ball search gives {found}")
    return c


def on_axis(g: LinearAuto, v: Vertex, length: int) -> bool:
    return vertex_distance(v, act(g, v)) == length


def axis_point(g: LinearAuto, near: Vertex, length: int) -> Vertex:
    """The axis vertex closest to ``near`` (hyperbolic g)."""
    gv = act(g, near)
    r = (vertex_distance(near, gv) - length) // 2
    return geodesic(near, gv)[r]


def axis_segment(g: LinearAuto, start: Vertex, steps: int = 1) -> frozenset:
    pts = [start]
    for _ in range(steps):
        pts.append(act(g, pts[-1]))
    return hull(pts)


# ---------- the scale-core adapter


@dataclass(frozen=True)
class AxisMarker:
    """Symbolic compact part of a hyperbolic element: the stabilizer of its axis."""

    g: LinearAuto
    length: int

    def to_json(self):
        return {"axis_of": self.g.to_json(), "translation_length": self.length}


class TreeModel:
    """Aut(T) for the Bruhat–Tits tree of K^2, acting through 2×2 matrices."""

    name = "tree"

    def __init__(self, field_: LocalField):
        self.field = field_
        self.q = field_.q

    def stab(self, vertices) -> SegmentStabilizer:
        return SegmentStabilizer.of(vertices, self.q)

    def _check(self, U):
        if U.q != self.q or next(iter(U.vertices)).field != self.field:
            raise ModelMismatch("vertex set from a different tree")

    def apply(self, g: LinearAuto, U: SegmentStabilizer) -> SegmentStabilizer:
        return SegmentStabilizer(frozenset(act(g, v) for v in U.vertices), self.q)

    def intersect(self, U, W) -> SegmentStabilizer:
        self._check(U)
        self._check(W)
        if U == W:
            return U
        return self.stab(list(U.vertices) + list(W.vertices))

    def index(self, U, W) -> IndexValue:
        self._check(U)
        self._check(W)
        return stab_index(U, W)

    def equals(self, U, W) -> bool:
        return U.vertices == W.vertices

    def contains(self, big, small) -> bool:
        """Stab(big) ⊇ Stab(small)."""
        return big.vertices <= small.vertices

    def base(self) -> SegmentStabilizer:
        return self.stab([Vertex.standard(self.field)])

    def product_equals(self, V, A, B) -> bool:
        if not (self.contains(V, A) and self.contains(V, B)):
            return False
        return self.index(V, B) == self.index(A, self.intersect(A, B))

    def compose(self, a: LinearAuto, b: LinearAuto) -> LinearAuto:
        return a @ b

    def inverse(self, a: LinearAuto) -> LinearAuto:
        return a.inverse()

    def identity_auto(self) -> LinearAuto:
        return LinearAuto.eye(self.field, 2)

    def compact_part(self, g: LinearAuto, V):
        c = newton_classify(g)
        if c.kind != HYPERBOLIC:
            return None
        return AxisMarker(g, c.translation_length)

    def join_compact(self, V, K):
        """Stab of the axis part of V's vertex set, or of an axis segment at its projection."""
        if K is None:
            return V
        if isinstance(K, SegmentStabilizer):
            return self.intersect(V, K)
        g, ell = K.g, K.length
        core = [v for v in V.vertices if on_axis(g, v, ell)]
        if len(core) < 2:
            start = core[0] if core else axis_point(g, min(V.vertices, key=lambda u: str(u.to_json())), ell)
            core = list(axis_segment(g, start))
        return self.stab(core)

    def scale_oracle(self, g: LinearAuto) -> IndexValue:
        c = newton_classify(g)
        return IndexValue(self.q ** c.translation_length if c.kind == HYPERBOLIC else 1)

    def displacement(self, U, W) -> Displacement:
        return Displacement(self.index(U, W), self.index(W, U))


def matrix(field_: LocalField, rows) -> LinearAuto:
    return LinearAuto(field_, rows)


# ---------- worked examples


@dataclass
class CounterexampleReport:
    p: int
    q: int
    scale_x: int
    scale_y: int
    scale_xy: int
    product_matrix: list
    kinds: dict

    @property
    def submultiplicativity_fails(self) -> bool:
        return self.scale_xy > self.scale_x * self.scale_y

    def to_json(self):
        return {"p": self.p, "q": self.q, "s(x)": self.scale_x, "s(y)": self.scale_y, "s(xy)": self.scale_xy,
                "xy": self.product_matrix, "kinds": self.kinds,
                "submultiplicativity_fails": self.submultiplicativity_fails}


def elliptic_product_demo(p: int) -> CounterexampleReport:
    """Two elliptic elements whose product translates along an axis by 2."""
    from .scale import scale

    K = PAdicField(p)
    model = TreeModel(K)
    x = LinearAuto(K, [[0, -1], [1, 0]])
    y = LinearAuto(K, [[0, Fraction(1, p)], [-p, 0]])
    xy = x @ y
    return CounterexampleReport(
        p, K.q, scale(model, x).value, scale(model, y).value, scale(model, xy).value, xy.to_json(),
        {"x": classify(x).kind, "y": classify(y).kind, "xy": classify(xy).kind})


@dataclass
class GrowthTable:
    rows: list
    unipotent_scales: list
    conjugator: list
    conjugator_scale: int
    conjugation_shift: int

    @property
    def strictly_increasing(self) -> bool:
        prods = [r["product"] for r in self.rows if r["k"] >= 1]
        return all(a < b for a, b in zip(prods, prods[1:]))

    def to_json(self):
        return {"rows": self.rows, "unipotent_scales": self.unipotent_scales, "conjugator": self.conjugator,
                "conjugator_scale": self.conjugator_scale, "conjugation_shift": self.conjugation_shift,
                "strictly_increasing": self.strictly_increasing}


def unipotent(field_: LocalField, k: int) -> LinearAuto:
    return LinearAuto(field_, [[field_.one, field_.pi_pow(-k)], [field_.zero, field_.one]])


def solvable_nonflat_probe(k_max: int = 6, p: int = 2) -> GrowthTable:
    """Displacements of conjugated vertex stabilizers by the unipotents [[1, t^-k], [0, 1]]."""
    from .scale import displacement, scale

    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    K = LaurentField(p)
    model = TreeModel(K)
    V = model.base()
    rows, scales = [], []
    for k in range(k_max + 1):
        u = unipotent(K, k)
        d = displacement(model, model.apply(u, V), V)
        rows.append({"k": k, "forward": d.forward.value, "backward": d.backward.value, "product": d.product})
        scales.append(scale(model, u).value)
    t = K.uniformizer
    a = LinearAuto(K, [[t, K.zero], [K.zero, 1 / t]])
    # a u_k a^{-1} = u_{k-2}: the conjugator shifts the unipotent family
    shifted = a @ unipotent(K, 3) @ a.inverse()
    shift = 2 if shifted == unipotent(K, 1) else 0
    return GrowthTable(rows, scales, a.to_json(), scale(model, a).value, shift)
