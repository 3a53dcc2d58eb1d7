"""Coefficient fields: the rationals and prime fields of word size."""
from __future__ import annotations

from fractions import Fraction

from sympy import isprime

from .errors import DomainError, StructuralError

# the modular kernel multiplies two residues in int64
MAX_PRIME = 2**31


class FieldSpec:
    """Either the rationals (``p == 0``) or the prime field of order ``p``.

    Rational elements are ``int`` when integral and ``Fraction`` otherwise; residues are ``int`` in ``[0, p)``.
    """

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        p = int(p)
        if p != 0:
            if p >= MAX_PRIME or not isprime(p):
                raise StructuralError(f"field characteristic must be a prime below 2^31, got {p}")
        object.__setattr__(self, "p", p)

    def __setattr__(self, key, value):
        raise AttributeError("FieldSpec is immutable")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        t = text.strip()
        if t in ("Q", "QQ"):
            return cls(0)
        if t.startswith("Fp:") or t.startswith("GF:"):
            try:
                return cls(int(t[3:]))
            except ValueError:
                pass
        raise StructuralError(f"unknown field {text!r}; use Q or Fp:<p>")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.p == self.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __repr__(self):
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    __str__ = __repr__

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def __call__(self, x):
        """Coerce an int, Fraction or string such as ``"-3/2"``."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p == 0:
            x = Fraction(x)
            # integral rationals are kept as int: same value, much cheaper arithmetic
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DomainError(f"{x} has no image in {self}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        if self.p:
            return x % self.p
        return x.numerator if isinstance(x, Fraction) and x.denominator == 1 else x

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x) if self.p == 0 else pow(int(x), -1, self.p)

    def div(self, x, y):
        return self.norm(x * self.inv(y))

    def fmt(self, x) -> str:
        if self.p == 0:
            x = Fraction(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(int(x) % self.p)

    def to_json(self, x):
        """Integers stay integers; non-integral rationals become strings."""
        if self.p == 0:
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return int(x) % self.p

    def signed(self, x) -> int:
        """Residue in the symmetric range, for readable output."""
        v = int(x) % self.p
        return v - self.p if v > self.p // 2 else v


QQ = FieldSpec(0)
