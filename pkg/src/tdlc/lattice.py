"""Lattices in K^n and linear automorphisms, with K = Q_p or F_p((t)).

A lattice is stored by a canonical basis: columns in echelon form over the
valuation ring O, column k having its pivot pi^e_k in row k and zeros above,
and every entry below a pivot reduced to the canonical representative modulo
the pivot of its row.  Two lattices are equal iff their canonical bases are.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import count

import sympy

from . import linalg
from .errors import DivisionByZero, ModelMismatch, RefinementBudgetExceeded
from .fields import INF, LocalField, PAdicField, RatFunc, scale_from_charpoly
from .index import IndexValue


def hermite_columns(field_: LocalField, columns, n: int):
    """Canonical echelon basis of the O-span of ``columns`` (vectors of length n).

    Returns (basis, pivots): basis is a tuple of column tuples, pivots the list
    of (row, exponent) pairs.  Rows without a pivot are allowed, so the span
    need not have full rank.
    """
    cols = [list(c) for c in columns if any(c)]
    done: list[list] = []
    pivots: list[tuple[int, int]] = []
    for i in range(n):
        best, best_v = None, INF
        for j, c in enumerate(cols):
            v = field_.valuation(c[i])
            if v < best_v:
                best, best_v = j, v
        if best is None:
            continue
        field_.check_valuation(best_v)
        piv = cols.pop(best)
        unit = field_.pi_pow(best_v) / piv[i]
        piv = [x * unit for x in piv]
        piv[i] = field_.pi_pow(best_v)
        rest = []
        for c in cols:
            if c[i]:
                f = c[i] / piv[i]
                c = [x - f * y for x, y in zip(c, piv)]
                c[i] = field_.zero
            if any(c):
                rest.append(c)
        cols = rest
        done.append(piv)
        pivots.append((i, best_v))
    # reduce each column below its pivot against the later pivots, top-down
    for k, col in enumerate(done):
        for l in range(k + 1, len(done)):
            row, e = pivots[l]
            x = col[row]
            if x:
                r = field_.truncate(x, e)
                if r != x:
                    f = (x - r) / done[l][row]
                    col = [a - f * b for a, b in zip(col, done[l])]
                    col[row] = r
        done[k] = col
    return tuple(tuple(c) for c in done), pivots


@dataclass(frozen=True)
class Lattice:
    """An O-submodule of K^n given by its canonical basis (columns)."""

    field: LocalField
    n: int
    basis: tuple
    pivots: tuple = field(compare=False)

    @classmethod
    def span(cls, field_: LocalField, columns, n: int | None = None) -> "Lattice":
        columns = [tuple(field_.parse(x) for x in c) for c in columns]
        if n is None:
            n = len(columns[0])
        basis, piv = hermite_columns(field_, columns, n)
        return cls(field_, n, basis, tuple(piv))

    @classmethod
    def from_matrix(cls, field_: LocalField, rows) -> "Lattice":
        """Lattice spanned by the columns of a matrix given row by row."""
        rows = [[field_.parse(x) for x in r] for r in rows]
        return cls.span(field_, list(zip(*rows)), len(rows))

    @classmethod
    def standard(cls, field_: LocalField, n: int) -> "Lattice":
        one, zero = field_.one, field_.zero
        return cls.span(field_, [[one if i == j else zero for i in range(n)] for j in range(n)], n)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n

    @property
    def vdet(self) -> int:
        """Valuation of the covolume: sum of pivot exponents."""
        return sum(e for _, e in self.pivots)

    def matrix(self):
        """Basis as an n×rank matrix (rows)."""
        return linalg.transpose(self.basis) if self.basis else ()

    def scaled(self, c) -> "Lattice":
        return Lattice.span(self.field, [[c * x for x in col] for col in self.basis], self.n)

    def contains_vector(self, v) -> bool:
        return Lattice.span(self.field, list(self.basis) + [tuple(v)], self.n) == self

    def __le__(self, other: "Lattice") -> bool:
        return meet(self, other) == self

    def dual(self) -> "Lattice":
        """{x : x·y ∈ O for all y in self}, for full-rank lattices."""
        _need_full(self)
        inv = linalg.inverse(self.matrix())
        return Lattice.span(self.field, list(inv), self.n)  # rows of B^{-1} = columns of B^{-T}

    def to_json(self):
        return {"basis": [[self.field.fmt(x) for x in c] for c in self.basis],
                "pivots": [e for _, e in self.pivots]}

    def __repr__(self):
        cols = ", ".join("(" + ", ".join(self.field.fmt(x) for x in c) + ")" for c in self.basis)
        return f"Lattice[{self.field}]<{cols}>"


def _need_full(L: Lattice):
    if not L.full_rank:
        raise ValueError("operation requires a full-rank lattice")


def _same_space(a: Lattice, b: Lattice):
    if a.field != b.field or a.n != b.n:
        raise ModelMismatch(f"lattices live in different spaces: {a.field}^{a.n} vs {b.field}^{b.n}")


def join(a: Lattice, b: Lattice) -> Lattice:
    _same_space(a, b)
    return Lattice.span(a.field, list(a.basis) + list(b.basis), a.n)


def meet(a: Lattice, b: Lattice) -> Lattice:
    _same_space(a, b)
    if a == b:
        return a
    return join(a.dual(), b.dual()).dual()


def meet_join(a: Lattice, b: Lattice) -> tuple[Lattice, Lattice]:
    return meet(a, b), join(a, b)


def rel_index(a: Lattice, b: Lattice) -> IndexValue:
    """[a : a ∩ b] for full-rank lattices."""
    _same_space(a, b)
    if a == b:
        return IndexValue(1)
    return IndexValue(a.field.q ** (meet(a, b).vdet - a.vdet))


# ---------- automorphisms


def _interp_points(field_: LocalField, k: int):
    if isinstance(field_, PAdicField):
        return [Fraction(i) for i in range(k)]
    p = field_.p
    pts = []
    for i in count():
        digits, m = [], i
        while m:
            m, d = divmod(m, p)
            digits.append(d)
        pts.append(RatFunc(p, tuple(digits)))
        if len(pts) == k:
            return pts


class LinearAuto:
    """An invertible n×n matrix over a local field, with cached inverse and char poly."""

    __slots__ = ("field", "matrix", "__dict__")

    def __init__(self, field_: LocalField, rows):
        self.field = field_
        self.matrix = tuple(tuple(field_.parse(x) for x in r) for r in rows)
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise ValueError("matrix must be square")
        if not linalg.det(self.matrix):
            raise DivisionByZero("matrix is singular")

    @classmethod
    def diag(cls, field_, entries):
        n = len(entries)
        return cls(field_, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def eye(cls, field_, n):
        return cls(field_, linalg.identity(n, field_.zero, field_.one))

    @property
    def n(self) -> int:
        return len(self.matrix)

    @cached_property
    def inverse_matrix(self):
        return linalg.inverse(self.matrix)

    @cached_property
    def det(self):
        return linalg.det(self.matrix)

    @cached_property
    def charpoly(self):
        return linalg.charpoly(self.matrix, _interp_points(self.field, self.n + 1))

    def inverse(self) -> "LinearAuto":
        return LinearAuto(self.field, self.inverse_matrix)

    def __matmul__(self, other: "LinearAuto") -> "LinearAuto":
        return LinearAuto(self.field, linalg.mat_mul(self.matrix, other.matrix))

    def __pow__(self, k: int) -> "LinearAuto":
        base = self if k >= 0 else self.inverse()
        out = LinearAuto.eye(self.field, self.n)
        for _ in range(abs(k)):
            out = out @ base
        return out

    def __eq__(self, other):
        return isinstance(other, LinearAuto) and self.field == other.field and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __call__(self, L: Lattice) -> Lattice:
        return transform(self, L)

    def to_json(self):
        return [[self.field.fmt(x) for x in r] for r in self.matrix]

    def __repr__(self):
        return f"LinearAuto({self.to_json()})"


def transform(A: LinearAuto, L: Lattice) -> Lattice:
    if A.field != L.field or A.n != L.n:
        raise ModelMismatch("automorphism and lattice live in different spaces")
    cols = [linalg.mat_vec(A.matrix, c) for c in L.basis]
    return Lattice.span(L.field, cols, L.n)


def scale_oracle(A: LinearAuto) -> IndexValue:
    return scale_from_charpoly(A.field, A.charpoly)


# ---------- commuting families: joint primary decomposition by valuation


def _qp_factor_slopes(field_: PAdicField, A: LinearAuto):
    """Q-irreducible factors of the char poly with their (single) root valuation and multiplicity."""
    x = sympy.Symbol("x")
    poly = sum(sympy.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(A.charpoly))
    _, factors = sympy.factor_list(poly, x)
    from .fields import newton_slopes

    out = []
    for f, mult in factors:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(f, x).all_coeffs()[::-1]]
        vals = set(newton_slopes(field_, coeffs).root_valuations)
        if len(vals) != 1:
            raise RefinementBudgetExceeded(
                f"factor {f} has roots of several valuations; the rational primary decomposition does not split them")
        out.append((coeffs, vals.pop(), mult))
    return out


def _poly_at_matrix(coeffs, M, field_):
    n = len(M)
    out = tuple(tuple(field_.zero for _ in range(n)) for _ in range(n))
    power = linalg.identity(n, field_.zero, field_.one)
    for c in coeffs:
        out = tuple(tuple(a + c * b for a, b in zip(r1, r2)) for r1, r2 in zip(out, power))
        power = linalg.mat_mul(power, M)
    return out


def _kernel(M, field_):
    """Basis of the right null space over the field (exact elimination)."""
    n = len(M[0])
    rows = [list(r) for r in M]
    pivcols, r = [], 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivcols.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivcols]
    basis = []
    for f in free:
        v = [field_.zero] * n
        v[f] = field_.one
        for i, c in enumerate(pivcols):
            v[c] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def joint_valuation_spaces(generators: list[LinearAuto]):
    """Split K^n into joint generalized eigenspaces indexed by the valuation vector.

    Returns a list of (weights, basis vectors) where weights[i] is the common
    root valuation of generator i on that subspace.  Only Q_p is supported.
    """
    field_ = generators[0].field
    if not isinstance(field_, PAdicField):
        raise RefinementBudgetExceeded("joint decomposition is implemented over Q_p only")
    n = generators[0].n
    spaces = [((), [tuple(field_.one if i == j else field_.zero for i in range(n)) for j in range(n)])]
    for g in generators:
        by_val: dict = {}
        for coeffs, val, mult in _qp_factor_slopes(field_, g):
            by_val.setdefault(val, []).append((coeffs, mult))
        new = []
        for weights, basis in spaces:
            for val, facs in sorted(by_val.items()):
                # kernel of prod f^mult restricted to span(basis)
                M = g.matrix
                P = linalg.identity(n, field_.zero, field_.one)
                for coeffs, mult in facs:
                    for _ in range(mult):
                        P = linalg.mat_mul(P, _poly_at_matrix(coeffs, M, field_))
                ker = _kernel(P, field_)
                sub = _intersect_spans(basis, ker, field_, n)
                if sub:
                    new.append((weights + (val,), sub))
        spaces = new
    return spaces


def _intersect_spans(a, b, field_, n):
    if not a or not b:
        return []
    # x = A u = B w  <=>  [A | -B] (u, w) = 0
    M = [list(a_row) + [-x for x in b_row] for a_row, b_row in zip(zip(*a), zip(*b))]
    ker = _kernel(M, field_)
    out = []
    for k in ker:
        u = k[: len(a)]
        v = tuple(sum((ui * ai[r] for ui, ai in zip(u, a)), field_.zero) for r in range(n))
        out.append(v)
    return _row_basis(out, field_)


def _row_basis(vectors, field_):
    rows = [list(v) for v in vectors]
    out = []
    n = len(rows[0]) if rows else 0
    for c in range(n):
        piv = next((r for r in rows if r[c]), None)
        if piv is None:
            continue
        rows.remove(piv)
        out.append(tuple(piv))
        rows = [[a - (r[c] / piv[c]) * b for a, b in zip(r, piv)] for r in rows]
    return out


# ---------- the scale-core adapter


@dataclass(frozen=True)
class LatticeModel:
    """Binds lattices and linear automorphisms of K^n to the group-model contract."""

    field: LocalField
    n: int
    name: str = "lattice"

    def _check(self, L: Lattice):
        if L.field != self.field or L.n != self.n:
            raise ModelMismatch(f"lattice from {L.field}^{L.n} used with model {self.field}^{self.n}")

    def apply(self, alpha: LinearAuto, U: Lattice) -> Lattice:
        self._check(U)
        return transform(alpha, U)

    def intersect(self, U: Lattice, W: Lattice) -> Lattice:
        self._check(U)
        self._check(W)
        return meet(U, W)

    def index(self, U: Lattice, W: Lattice) -> IndexValue:
        self._check(U)
        self._check(W)
        return rel_index(U, W)

    def equals(self, U: Lattice, W: Lattice) -> bool:
        return U == W

    def base(self) -> Lattice:
        return Lattice.standard(self.field, self.n)

    def product_equals(self, V: Lattice, A: Lattice, B: Lattice) -> bool:
        return join(A, B) == V

    def compose(self, a: LinearAuto, b: LinearAuto) -> LinearAuto:
        return a @ b

    def inverse(self, a: LinearAuto) -> LinearAuto:
        return a.inverse()

    def identity_auto(self) -> LinearAuto:
        return LinearAuto.eye(self.field, self.n)

    def compact_part(self, alpha: LinearAuto, V: Lattice):
        # bounded alpha-orbits lie in the unit-valuation part, which any
        # lattice left after the first tidying step already contains
        return None

    def join_compact(self, V: Lattice, K: Lattice) -> Lattice:
        return join(V, K)

    def scale_oracle(self, alpha: LinearAuto) -> IndexValue:
        return scale_oracle(alpha)

    def modular(self, alpha: LinearAuto) -> Fraction:
        """|det alpha|, the modular function of K^n evaluated at alpha."""
        return Fraction(self.field.q) ** (-self.field.valuation(alpha.det))

    def flat_factors(self, generators: list[LinearAuto], V: Lattice):
        """Factor data for a commuting family: list of (subgroup V_j, weights, scale base, dims)."""
        q = self.field.q
        spaces = joint_valuation_spaces(generators)
        # merge subspaces whose weight vectors are positive multiples of each other
        groups: dict = {}
        for weights, basis in spaces:
            key = _ray_key(weights)
            groups.setdefault(key, []).append((weights, basis))
        out = []
        for key, members in sorted(groups.items(), key=lambda kv: str(kv[0])):
            basis = [v for _, b in members for v in b]
            Vj = _restrict(V, basis, self.field, self.n)
            # exponent of Δ_j(g) = q^{-v(det g|W_j)}
            exps = []
            for i in range(len(generators)):
                e = -sum(w[i] * len(b) for w, b in members)
                if Fraction(e).denominator != 1:
                    raise RefinementBudgetExceeded("non-integral modular exponent on a factor")
                exps.append(int(e))
            out.append({"subgroup": Vj, "exponents": exps, "base": q, "dim": len(basis)})
        return out


def _ray_key(weights):
    if all(w == 0 for w in weights):
        return ("zero",)
    g = None
    for w in weights:
        if w:
            g = abs(w) if g is None else _frac_gcd(g, abs(w))
    return tuple(Fraction(w) / g for w in weights)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = Fraction(a), Fraction(b)
    num = sympy.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(int(num), a.denominator * b.denominator)


def _restrict(V: Lattice, basis, field_, n) -> Lattice:
    """V ∩ span(basis), an O-module of rank len(basis)."""
    if not basis:
        return Lattice.span(field_, [], n)
    B = V.matrix()
    Binv = linalg.inverse(B)
    coords = [linalg.mat_vec(Binv, v) for v in basis]
    return Lattice.span(field_, [linalg.mat_vec(B, c) for c in _saturate(coords, field_, n)], n)


def _saturate(vectors, field_, n):
    """Basis of (K-span of vectors) ∩ O^n."""
    sub = _row_basis(vectors, field_)
    d = len(sub)
    std = [tuple(field_.one if i == j else field_.zero for i in range(n)) for j in range(n)]
    if d == n:
        return std
    comp = list(sub)
    for e in std:
        if len(comp) == n:
            break
        if len(_row_basis(comp + [e], field_)) > len(comp):
            comp.append(e)
    M = linalg.transpose(comp)
    Minv = linalg.inverse(M)
    # O^n in the adapted basis; keep the part with vanishing complement coordinates
    # by running the echelon form with those coordinates first
    rev = [tuple(reversed(linalg.mat_vec(Minv, e))) for e in std]
    rev_lat = Lattice.span(field_, rev, n)
    keep = [tuple(reversed(c)) for c in rev_lat.basis if not any(c[: n - d])]
    return [linalg.mat_vec(M, c) for c in keep]
