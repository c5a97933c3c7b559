"""GF(2) subspaces as canonical reduced row-echelon tuples of int bitmasks."""
from __future__ import annotations


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def rref(vectors) -> tuple[int, ...]:
    """Canonical basis: distinct leading bits, each leading bit cleared from all other rows."""
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            if v ^ r < v:
                v ^= r
        if v:
            rows = [r ^ v if r & (1 << (v.bit_length() - 1)) else r for r in rows]
            rows.append(v)
            rows.sort(reverse=True)
    return tuple(rows)


def rank(vectors) -> int:
    return len(rref(vectors))


def span_sum(a, b) -> tuple[int, ...]:
    return rref(tuple(a) + tuple(b))


def contains(space, v: int) -> bool:
    for r in space:
        if v ^ r < v:
            v ^= r
    return v == 0


def is_subspace(a, b) -> bool:
    return all(contains(b, v) for v in a)


def null(vectors, dim: int) -> tuple[int, ...]:
    """{x in GF(2)^dim : <x, v> = 0 for every v} under the standard dot product."""
    rows = rref(vectors)
    pivots = {r.bit_length() - 1: r for r in rows}
    basis = []
    for f in range(dim):
        if f in pivots:
            continue
        x = 1 << f
        for pbit, r in pivots.items():
            if r >> f & 1:
                x |= 1 << pbit
        basis.append(x)
    return rref(basis)


def intersect(a, b, dim: int) -> tuple[int, ...]:
    return null(null(a, dim) + null(b, dim), dim)


def project(space, mask: int) -> tuple[int, ...]:
    return rref(v & mask for v in space)


def solve_in(space, fixed: dict[int, int]):
    """An element of ``space`` with prescribed bits {position: value}, or None."""
    # reduce against the prescribed coordinates only
    mask = 0
    target = 0
    for pos, val in fixed.items():
        mask |= 1 << pos
        target |= val << pos
    rows = []  # (masked, full)
    for v in space:
        m = v & mask
        for rm, rf in rows:
            if m ^ rm < m:
                m ^= rm
                v ^= rf
        if m:
            rows.append((m, v))
            rows.sort(reverse=True)
    acc_m, acc_v = target, 0
    for rm, rf in rows:
        if acc_m ^ rm < acc_m:
            acc_m ^= rm
            acc_v ^= rf
    return acc_v if acc_m == 0 else None
