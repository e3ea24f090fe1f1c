"""Short Weierstrass curves y^2 = x^3 + Ax + B over F_p, their points over
extensions F_{p^k}, divisors, and divisor classes via Abel-Jacobi sums.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .field import FieldDescriptor, FieldElement, extension_field, enumerate_elements, square_roots


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class Curve:
    p: int
    A: int
    B: int

    def __post_init__(self):
        object.__setattr__(self, "A", self.A % self.p)
        object.__setattr__(self, "B", self.B % self.p)
        # validates p
        FieldDescriptor(self.p)
        if (4 * self.A ** 3 + 27 * self.B ** 2) % self.p == 0:
            raise CurveError(f"singular curve: 4A^3 + 27B^2 = 0 mod {self.p}")

    @property
    def field(self) -> FieldDescriptor:
        return extension_field(self.p, 1)

    def rhs(self, x):
        return x * x * x + self.A * x + self.B

    def infinity(self, F: Optional[FieldDescriptor] = None) -> "CurvePoint":
        return CurvePoint(None, None, F or self.field)

    def point(self, x, y, F: Optional[FieldDescriptor] = None) -> "CurvePoint":
        F = F or self.field
        P = CurvePoint(F(x), F(y), F)
        if not self.contains(P):
            raise CurveError(f"{P} is not on {self}")
        return P

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinity:
            return True
        return P.y * P.y == self.rhs(P.x)

    def neg(self, P: "CurvePoint") -> "CurvePoint":
        if P.is_infinity:
            return P
        return CurvePoint(P.x, -P.y, P.field)

    def add(self, P: "CurvePoint", Q: "CurvePoint") -> "CurvePoint":
        if P.field != Q.field:
            raise CurveError(f"points over different fields: {P.field} vs {Q.field}")
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x:
            if (P.y + Q.y).is_zero():
                return self.infinity(P.field)
            lam = (P.x * P.x * 3 + self.A) / (P.y * 2)
        else:
            lam = (Q.y - P.y) / (Q.x - P.x)
        x3 = lam * lam - P.x - Q.x
        y3 = lam * (P.x - x3) - P.y
        return CurvePoint(x3, y3, P.field)

    def sub(self, P, Q):
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P: "CurvePoint") -> "CurvePoint":
        if n < 0:
            return self.mul(-n, self.neg(P))
        result = self.infinity(P.field)
        addend = P
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return result

    def __str__(self):
        return f"y^2 = x^3 + {self.A}x + {self.B} over F_{self.p}"


@dataclass(frozen=True)
class CurvePoint:
    x: Optional[FieldElement]
    y: Optional[FieldElement]
    field: FieldDescriptor

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def sort_key(self):
        if self.is_infinity:
            return (self.field.k, -1, -1)
        return (self.field.k, self.x.index(), self.y.index())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def to_json(self):
        if self.is_infinity:
            return "O"
        if self.field.k == 1:
            return [int(self.x), int(self.y)]
        return [list(self.x.c), list(self.y.c)]

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x!r}, {self.y!r})"


def add_points(E: Curve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    return E.add(P, Q)


def scalar_mul(E: Curve, n: int, P: CurvePoint) -> CurvePoint:
    return E.mul(n, P)


@functools.lru_cache(maxsize=None)
def enumerate_points(E: Curve, k: int = 1) -> tuple:
    """All points of E(F_{p^k}): O first, then by x index, then y index."""
    if k < 1:
        raise CurveError("extension degree must be positive")
    F = extension_field(E.p, k)
    roots = square_roots(F)
    pts = [E.infinity(F)]
    for x in enumerate_elements(F):
        for y in sorted(roots.get(E.rhs(x), ()), key=FieldElement.index):
            pts.append(CurvePoint(x, y, F))
    q = F.order
    # Hasse: (#E - q - 1)^2 <= 4q
    assert (len(pts) - q - 1) ** 2 <= 4 * q, "Hasse bound violated"
    return tuple(pts)


@functools.lru_cache(maxsize=None)
def points_of_degree(E: Curve, k: int) -> tuple:
    """Points of E(F_{p^k}) whose coordinates lie in no proper subfield."""
    proper = [j for j in range(1, k) if k % j == 0]
    out = []
    for P in enumerate_points(E, k):
        if P.is_infinity:
            if k == 1:
                out.append(P)
            continue
        if any(P.x.frobenius(j) == P.x and P.y.frobenius(j) == P.y for j in proper):
            continue
        out.append(P)
    return tuple(out)


# ---------------------------------------------------------------------------
# divisors

@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of points over a single field."""

    terms: tuple = ()
    field: Optional[FieldDescriptor] = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[CurvePoint, int] | Iterable) -> "Divisor":
        items = mapping.items() if hasattr(mapping, "items") else mapping
        acc: dict = {}
        for P, n in items:
            acc[P] = acc.get(P, 0) + n
        fields = {P.field for P, n in acc.items() if n}
        if len(fields) > 1:
            raise CurveError("divisor mixes points over different fields")
        terms = tuple(sorted(((P, n) for P, n in acc.items() if n), key=lambda t: t[0].sort_key()))
        return cls(terms, fields.pop() if fields else None)

    @classmethod
    def point(cls, P: CurvePoint, n: int = 1) -> "Divisor":
        return cls.from_mapping({P: n})

    @property
    def degree(self) -> int:
        return sum(n for _, n in self.terms)

    @property
    def support(self) -> tuple:
        return tuple(P for P, _ in self.terms)

    def mult(self, P: CurvePoint) -> int:
        for Q, n in self.terms:
            if Q == P:
                return n
        return 0

    def is_effective(self) -> bool:
        return all(n > 0 for _, n in self.terms)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.from_mapping(list(self.terms) + list(other.terms))

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((P, -n) for P, n in self.terms), self.field)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, m: int) -> "Divisor":
        return Divisor.from_mapping([(P, m * n) for P, n in self.terms])

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{n}*{P!r}" for P, n in self.terms)


@dataclass(frozen=True)
class DivisorClassRep:
    """Class of (degree - 1)*O + S, where S is the group-law sum."""

    degree: int
    S: CurvePoint

    def divisor(self, E: Curve) -> Divisor:
        """The canonical representative (d - 1)*O + S."""
        O = E.infinity(self.S.field)
        return Divisor.from_mapping([(O, self.degree - 1), (self.S, 1)])


def abel_jacobi_sum(E: Curve, D: Divisor) -> CurvePoint:
    F = D.field or E.field
    S = E.infinity(F)
    for P, n in D.terms:
        S = E.add(S, E.mul(n, P))
    return S


def class_canonical(E: Curve, D: Divisor) -> DivisorClassRep:
    return DivisorClassRep(D.degree, abel_jacobi_sum(E, D))


def lin_equiv(E: Curve, D1: Divisor, D2: Divisor) -> bool:
    return class_canonical(E, D1) == class_canonical(E, D2)


def torsion_test(E: Curve, P: CurvePoint, Q: CurvePoint, m: int) -> bool:
    """Whether m*P ~ m*Q, i.e. m*(P - Q) = O."""
    return E.mul(m, E.sub(P, Q)).is_infinity
