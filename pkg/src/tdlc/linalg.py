"""Dense exact linear algebra over any field whose elements support + - * /.

Matrices are tuples of row tuples.  The zero and one of the field are passed
explicitly so the same routines serve Fraction and RatFunc entries.
"""
from __future__ import annotations

from .errors import DivisionByZero


def identity(n, zero, one):
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(a):
    return tuple(zip(*a))


def mat_mul(a, b):
    bt = transpose(b)
    out = []
    for row in a:
        out.append(tuple(_dot(row, col) for col in bt))
    return tuple(out)


def mat_vec(a, v):
    return tuple(_dot(row, v) for row in a)


def _dot(u, v):
    it = iter(zip(u, v))
    x, y = next(it)
    s = x * y
    for x, y in it:
        s = s + x * y
    return s


def scalar_mul(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def det(a):
    """Determinant by Gaussian elimination."""
    m = [list(r) for r in a]
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    d = m[0][0] - m[0][0] + 1  # field one, built from an entry
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return d - d
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return d


def inverse(a):
    """Gauss–Jordan inverse; DivisionByZero on a singular matrix."""
    n = len(a)
    zero = a[0][0] - a[0][0]
    one = zero + 1
    m = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            raise DivisionByZero("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def solve(a, b):
    """x with a·x = b for square invertible a."""
    return mat_vec(inverse(a), b)


def charpoly(a, points):
    """Coefficients (lowest degree first, monic) of det(xI − a).

    ``points`` must supply n+1 pairwise distinct field elements; the
    polynomial is recovered by interpolating determinants at those points.
    """
    n = len(a)
    pts = list(points)[: n + 1]
    if len(pts) < n + 1:
        raise ValueError("need n+1 interpolation points")
    zero = a[0][0] - a[0][0]
    vals = []
    for x in pts:
        m = tuple(tuple((x if i == j else zero) - a[i][j] for j in range(n)) for i in range(n))
        vals.append(det(m))
    vander = tuple(tuple(x ** k if k else zero + 1 for k in range(n + 1)) for x in pts)
    coeffs = solve(vander, tuple(vals))
    return list(coeffs)
