"""Exact index values and the displacement pair."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering

from sympy import factorint


@total_ordering
@dataclass(frozen=True)
class IndexValue:
    """A positive integer index [U : U ∩ W], kept exact."""

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or self.value < 1:
            raise ValueError(f"index must be a positive integer, got {self.value!r}")

    @classmethod
    def power(cls, base: int, exponent: int) -> "IndexValue":
        return cls(base ** exponent)

    @cached_property
    def factored(self) -> dict[int, int]:
        return {int(p): int(e) for p, e in factorint(self.value).items()}

    def exponent(self, base: int) -> int:
        """Exponent e with value == base**e; ValueError if value is not a power of base."""
        v, e = self.value, 0
        while v % base == 0:
            v //= base
            e += 1
        if v != 1:
            raise ValueError(f"{self.value} is not a power of {base}")
        return e

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, IndexValue):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other):
        return self.value < int(other)

    def __hash__(self):
        return hash(self.value)

    def __mul__(self, other):
        return IndexValue(self.value * int(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return IndexValue(self.value ** n)

    def __repr__(self):
        return f"IndexValue({self.value})"

    def to_json(self):
        return {"value": self.value, "factored": {str(p): e for p, e in sorted(self.factored.items())}}


@dataclass(frozen=True)
class Displacement:
    """The pair ([U:U∩W], [W:U∩W]); the metric is log of their product."""

    forward: IndexValue
    backward: IndexValue

    @property
    def product(self) -> int:
        return self.forward.value * self.backward.value

    def swapped(self) -> "Displacement":
        return Displacement(self.backward, self.forward)

    def to_json(self):
        return {"forward": self.forward.value, "backward": self.backward.value, "product": self.product}
