"""Reference computations written without the package's own algorithms.

Each function uses the most direct method available (sympy, brute-force
enumeration over finite quotients, or explicit bit-vector sets) so that it
can be compared against the production code.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy


def vp(x, p: int):
    """p-adic valuation of a rational by repeated division."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v, num, den = 0, x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def charpoly_coeffs(rows):
    """Coefficients of det(xI - A), constant term first, via sympy."""
    M = sympy.Matrix([[sympy.Rational(str(Fraction(e))) for e in r] for r in rows])
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(M.charpoly(x).as_expr(), x).all_coeffs()[::-1]
    return [Fraction(int(c.p), int(c.q)) for c in coeffs]


def root_valuations(coeffs, p: int) -> list[Fraction]:
    """Root valuations from the lower convex hull of (i, v(c_i)), computed by brute force."""
    pts = [(i, vp(c, p)) for i, c in enumerate(coeffs) if c != 0]
    zero_roots = pts[0][0]
    pts = [(i - zero_roots, v) for i, v in pts]
    out = [float("inf")] * zero_roots
    i = 0
    while i < len(pts) - 1:
        best = None
        for j in range(i + 1, len(pts)):
            slope = Fraction(pts[j][1] - pts[i][1], pts[j][0] - pts[i][0])
            if best is None or slope <= best[0]:
                best = (slope, j)
        slope, j = best
        out += [-slope] * (pts[j][0] - pts[i][0])
        i = j
    return out


def lattice_scale(rows, p: int) -> int:
    """Product of |lambda|_p over eigenvalues with |lambda|_p > 1."""
    exps = [v for v in root_valuations(charpoly_coeffs(rows), p) if v < 0]
    total = -sum(exps)
    assert total.denominator == 1
    return p ** int(total)


def diagonal_scale(entries, p: int) -> int:
    return p ** sum(max(0, -vp(e, p)) for e in entries)


def tree_sphere_orbit(p: int, d: int) -> int:
    """Orbit of the line <(1,0)> in (Z/p^d)^2 under all of GL2(Z/p^d)."""
    mod = p ** d
    lines = set()
    for a, b, c, e in product(range(mod), repeat=4):
        if (a * e - b * c) % p == 0:
            continue
        v = (a % mod, c % mod)
        lines.add(frozenset(((k * v[0]) % mod, (k * v[1]) % mod) for k in range(mod)))
    return len(lines)


def cyclic_submodules(p: int, d: int) -> int:
    """Cyclic submodules of order p^d in (Z/p^d)^2, enumerated from every vector."""
    mod = p ** d
    subs = set()
    for x, y in product(range(mod), repeat=2):
        span = frozenset(((k * x) % mod, (k * y) % mod) for k in range(mod))
        if len(span) == mod:
            subs.add(span)
    return len(subs)


# ---------- bit-vector sets on the window [-N, N]; bit l + N is coordinate l


def window_vectors(N: int):
    return range(1 << (2 * N + 1))


def coord(x: int, l: int, N: int) -> int:
    return x >> (l + N) & 1


def tail_code_set(N: int) -> set[int]:
    """Every window vector vanishing at l < 0."""
    return {x for x in window_vectors(N) if all(coord(x, l, N) == 0 for l in range(-N, 0))}


def shift_down(x: int, k: int, N: int) -> int:
    """Coordinate l moves to l - k; coordinates leaving the window are dropped."""
    mask = (1 << (2 * N + 1)) - 1
    return (x >> k) & mask if k >= 0 else (x << -k) & mask


def set_index(a: set, b: set) -> int:
    return len(a) // len(a & b)


def lamplighter_target_order(m: int) -> int:
    """Lamps on [-m, m] other than 0 act independently on the 2(2m+1) cosets."""
    return 2 ** (2 * m)
