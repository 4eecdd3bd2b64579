"""Arithmetic in GF(2^s) with a polynomial basis.

Elements are stored as integers whose bit ``i`` is the coefficient of x^i.
Multiplication is shift-and-reduce against a fixed irreducible modulus, so
results are bit-exact on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

# Modulus polynomials including the x^s term, e.g. x^3 + x + 1 -> 0b1011.
IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
}


def poly_mulmod(a: int, b: int, s: int, modulus: int) -> int:
    result = 0
    top = 1 << s
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= modulus
    return result


class GF2m:
    """The field GF(2^s) for 1 <= s <= 6."""

    def __init__(self, s: int):
        if s not in IRREDUCIBLE:
            raise DomainError(f"no built-in irreducible polynomial for s={s} (supported: 1..6)")
        self.s = s
        self.order = 1 << s
        self.modulus = IRREDUCIBLE[s]
        q = self.order
        self._mul = [[poly_mulmod(a, b, s, self.modulus) for b in range(q)] for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break

    def __repr__(self) -> str:
        return f"GF2m(s={self.s})"

    def elements(self) -> range:
        return range(self.order)

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^s)")
        return self._inv[a]

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value, self)


@dataclass(frozen=True)
class FieldElement:
    """A single element bound to its field; supports +, -, *, / and ** ."""

    value: int
    field: GF2m

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise DomainError(f"{self.value} is not an element of GF(2^{self.field.s})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.modulus != self.field.modulus or other.field.s != self.field.s:
                raise DomainError("operands belong to different fields")
            return other.value
        return FieldElement(int(other), self.field).value

    def __add__(self, other) -> FieldElement:
        return FieldElement(self.value ^ self._coerce(other), self.field)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other) -> FieldElement:
        return FieldElement(self.field.mul(self.value, self._coerce(other)), self.field)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other) -> FieldElement:
        return self * FieldElement(self._coerce(other), self.field).inverse()

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        out, base = 1, self.value
        while k:
            if k & 1:
                out = self.field.mul(out, base)
            base = self.field.mul(base, base)
            k >>= 1
        return FieldElement(out, self.field)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.value == other.value and self.field.modulus == other.field.modulus
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.modulus))

    def __int__(self) -> int:
        return self.value
