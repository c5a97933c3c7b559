"""Exact arithmetic in the local fields Q_p and F_p((t)).

Elements are stored exactly as elements of the global fields Q (``Fraction``)
and F_p(t) (:class:`RatFunc`); valuations and digit expansions are read off
the exact data, so no decision ever depends on a truncated expansion.  The
``precision`` of a field is a budget on how far valuations may drift during
lattice computations (see :mod:`tdlc.lattice`), not a storage limit.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

from sympy import isprime

from .errors import DivisionByZero, NonIntegralExponent, PrecisionExhausted
from .index import IndexValue

INF = math.inf

# ---------- polynomials over F_p (coefficient tuples, lowest degree first)


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a, b, p):
    n = max(len(a), len(b))
    return _trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n))


def pneg(a, p):
    return tuple((-x) % p for x in a)


def pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def pdivmod(a, b, p):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = (a[-1] * inv) % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        a = list(_trim(a))
    return _trim(q), _trim(a)


def pgcd(a, b, p):
    while b:
        a, b = b, pdivmod(a, b, p)[1]
    if not a:
        return ()
    inv = pow(a[-1], -1, p)
    return tuple((x * inv) % p for x in a)


def pval(a):
    """t-adic valuation of a polynomial."""
    for i, x in enumerate(a):
        if x:
            return i
    return INF


@total_ordering
class RatFunc:
    """An element of F_p(t): reduced fraction num/den with monic denominator."""

    __slots__ = ("p", "num", "den")

    def __init__(self, p, num, den=(1,)):
        num, den = _trim(x % p for x in num), _trim(x % p for x in den)
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not num:
            den = (1,)
        else:
            g = pgcd(num, den, p)
            if len(g) > 1:
                num, den = pdivmod(num, g, p)[0], pdivmod(den, g, p)[0]
            inv = pow(den[-1], -1, p)
            num = tuple((x * inv) % p for x in num)
            den = tuple((x * inv) % p for x in den)
        self.p, self.num, self.den = p, num, den

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, int):
            return RatFunc(self.p, (other,))
        if isinstance(other, Fraction):
            return RatFunc(self.p, (other.numerator,), (other.denominator,))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return RatFunc(p, padd(pmul(self.num, o.den, p), pmul(o.num, self.den, p), p), pmul(self.den, o.den, p))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.p, pneg(self.num, self.p), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return RatFunc(p, pmul(self.num, o.num, p), pmul(self.den, o.den, p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise DivisionByZero("division by zero in F_p(t)")
        p = self.p
        return RatFunc(p, pmul(self.num, o.den, p), pmul(self.den, o.num, p))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return RatFunc(self.p, (1,)) / (self ** (-n))
        out = RatFunc(self.p, (1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.num == o.num and self.den == o.den

    def __lt__(self, other):
        # arbitrary but total order, used only for deterministic sorting
        o = self._coerce(other)
        return (self.num, self.den) < (o.num, o.den)

    def __hash__(self):
        if self.den == (1,) and len(self.num) <= 1:
            return hash(self.num[0] if self.num else 0)
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc[F_{self.p}]({self})"

    def __str__(self):
        if self.den == (1,):
            return _pstr(self.num)
        wrap = lambda c: _pstr(c) if sum(1 for x in c if x) == 1 else f"({_pstr(c)})"
        return f"{wrap(self.num)}/{wrap(self.den)}"


def _pstr(c):
    terms = []
    for i, x in enumerate(c):
        if not x:
            continue
        mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
        terms.append(mono if x == 1 else f"{x}*{mono}" if i else str(x))
    return " + ".join(terms) or "0"


# ---------- the two local fields


@dataclass(frozen=True)
class LocalField:
    """Common interface; concrete fields are PAdicField and LaurentField."""

    p: int
    precision: int = 64
    kind: str = field(init=False, default="")

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"residue characteristic must be prime, got {self.p}")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def q(self) -> int:
        return self.p

    def check_valuation(self, v):
        if v != INF and abs(v) > self.precision:
            raise PrecisionExhausted(
                f"valuation {v} exceeds the precision budget {self.precision} of {self}")

    def residue_reps(self):
        """Representatives of the residue field, as field elements."""
        return [self.from_int(i) for i in range(self.p)]

    def pi_pow(self, e: int):
        return self.uniformizer ** e

    def truncate(self, x, e: int):
        """Canonical representative of x modulo pi^e O: the expansion of x below degree e."""
        v = self.valuation(x)
        if v >= e:
            return self.zero
        k = max(0, -v)
        digits = self.digits(x * self.pi_pow(k), e + k)
        out = self.zero
        for i, d in enumerate(digits):
            if d:
                out = out + self.from_int(d) * self.pi_pow(i - k)
        return out

    def expand(self, x, n: int):
        """(valuation, first n digits of the unit part): the display form of an element."""
        v = self.valuation(x)
        if v == INF:
            return INF, []
        return v, self.digits(x * self.pi_pow(-v), n)

    def abs(self, x) -> Fraction:
        v = self.valuation(x)
        return Fraction(0) if v == INF else Fraction(self.q) ** (-v)

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PAdicField(LocalField):
    kind: str = field(init=False, default="Qp")

    zero = Fraction(0)
    one = Fraction(1)

    @property
    def uniformizer(self):
        return Fraction(self.p)

    def from_int(self, n: int):
        return Fraction(n)

    def valuation(self, x) -> int | float:
        x = Fraction(x)
        if x == 0:
            return INF
        return _vp(x.numerator, self.p) - _vp(x.denominator, self.p)

    def digits(self, x, n: int) -> list[int]:
        """First n p-adic digits of an element of Z_(p)."""
        x = Fraction(x)
        if n <= 0:
            return []
        mod = self.p ** n
        r = (x.numerator * pow(x.denominator, -1, mod)) % mod
        out = []
        for _ in range(n):
            r, d = divmod(r, self.p)
            out.append(d)
        return out

    def parse(self, s) -> Fraction:
        if isinstance(s, (int, Fraction)):
            return Fraction(s)
        return Fraction(str(s).strip())

    def fmt(self, x) -> str:
        return str(Fraction(x))

    def to_json(self):
        return {"field": "Qp", "p": self.p, "precision": self.precision}

    def __str__(self):
        return f"Q_{self.p}"


def _vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class LaurentField(LocalField):
    """F_p((t)) with the t-adic valuation; q = p (prime residue fields only)."""

    kind: str = field(init=False, default="Fq_t")

    @property
    def zero(self):
        return RatFunc(self.p, ())

    @property
    def one(self):
        return RatFunc(self.p, (1,))

    @property
    def uniformizer(self):
        return RatFunc(self.p, (0, 1))

    @property
    def t(self):
        return self.uniformizer

    def from_int(self, n: int):
        return RatFunc(self.p, (n,))

    def valuation(self, x) -> int | float:
        if not x:
            return INF
        return pval(x.num) - pval(x.den)

    def digits(self, x, n: int) -> list[int]:
        """First n power-series coefficients of an element of F_p[[t]]."""
        if n <= 0:
            return []
        num, den = list(x.num), x.den
        p = self.p
        inv = pow(den[0], -1, p)
        out = []
        num += [0] * (n + len(den))
        for i in range(n):
            c = (num[i] * inv) % p
            out.append(c)
            if c:
                for j, y in enumerate(den):
                    num[i + j] = (num[i + j] - c * y) % p
        return out

    def parse(self, s) -> RatFunc:
        if isinstance(s, RatFunc):
            return s
        if isinstance(s, int):
            return self.from_int(s)
        return _parse_ratfunc(str(s), self.p)

    def fmt(self, x) -> str:
        return str(x)

    def to_json(self):
        return {"field": "Fq_t", "q": self.p, "precision": self.precision}

    def __str__(self):
        return f"F_{self.p}((t))"


def _parse_ratfunc(s: str, p: int) -> RatFunc:
    from sympy import Poly, Symbol, fraction, sympify, together

    t = Symbol("t")
    expr = together(sympify(re.sub(r"\^", "**", s), locals={"t": t}))
    num, den = fraction(expr)

    def conv(e):
        poly = Poly(e, t)
        coeffs = poly.all_coeffs()[::-1]
        out = []
        for c in coeffs:
            c = Fraction(str(c))
            out.append((c.numerator * pow(c.denominator, -1, p)) % p)
        return tuple(out)

    return RatFunc(p, conv(num), conv(den))


def make_field(cfg: dict) -> LocalField:
    """Build a field from its JSON description, e.g. {"field": "Qp", "p": 3}."""
    kind = cfg.get("field")
    prec = int(cfg.get("precision", 64))
    if kind == "Qp":
        return PAdicField(int(cfg["p"]), prec)
    if kind == "Fq_t":
        return LaurentField(int(cfg.get("q", cfg.get("p", 0))), prec)
    raise ValueError(f"unknown field kind {kind!r}")


def arith(op: str, a, b=None):
    """Field arithmetic by name: add, mul, inv or neg."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        if not a:
            raise DivisionByZero("inverse of zero")
        return 1 / a
    raise ValueError(f"unknown op {op!r}")


# ---------- Newton polygons


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, v(c_i)) for a polynomial sum c_i x^i.

    ``segments`` lists (slope, horizontal length) left to right; the roots on a
    segment of slope s have valuation -s.  ``zero_roots`` counts roots equal
    to zero (vanishing low-order coefficients).
    """

    vertices: tuple
    segments: tuple
    zero_roots: int

    @property
    def slopes(self) -> list[Fraction]:
        out = []
        for s, m in self.segments:
            out.extend([s] * m)
        return out

    @property
    def root_valuations(self) -> list:
        return [INF] * self.zero_roots + sorted(-s for s in self.slopes)


def newton_slopes(field_: LocalField, coeffs) -> NewtonPolygon:
    """Newton polygon of sum coeffs[i] x^i (lowest degree first)."""
    coeffs = list(coeffs)
    if not coeffs or not coeffs[-1]:
        raise ValueError("leading coefficient must be nonzero")
    pts = [(i, field_.valuation(c)) for i, c in enumerate(coeffs) if c]
    zero_roots = pts[0][0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(hull), tuple(segs), zero_roots)


def scale_from_charpoly(field_: LocalField, coeffs) -> IndexValue:
    """q^e where e is minus the total valuation of the roots with |root| > 1."""
    poly = newton_slopes(field_, coeffs)
    if poly.zero_roots:
        raise ValueError("characteristic polynomial of a singular matrix")
    e = sum((s * m for s, m in poly.segments if s > 0), Fraction(0))
    if e.denominator != 1:
        raise NonIntegralExponent(f"aggregate exponent {e} is not an integer")
    return IndexValue(field_.q ** int(e))
