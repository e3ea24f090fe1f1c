"""Finite fields F_p and F_{p^k} for small odd primes p.

Polynomials over F_p are tuples of ints in [0, p), lowest degree first,
with no trailing zeros; () is the zero polynomial.  Extension fields are
built directly over F_p from a monic irreducible modulus, with no towers.

Elements are ordered by their index sum(c_i * p**i), which is also the
order used by :func:`enumerate_elements` and by :func:`find_irreducible`.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

Poly = tuple


class FieldError(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# ---------------------------------------------------------------------------
# polynomials over F_p

def poly_trim(c: Sequence[int], p: int) -> Poly:
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_deg(f: Poly) -> int:
    return len(f) - 1


def poly_add(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = (out[i] + c) % p
    return poly_trim(out, p)


def poly_neg(f: Poly, p: int) -> Poly:
    return tuple((-c) % p for c in f)


def poly_sub(f: Poly, g: Poly, p: int) -> Poly:
    return poly_add(f, poly_neg(g, p), p)


def poly_scale(f: Poly, c: int, p: int) -> Poly:
    c %= p
    if c == 0:
        return ()
    return tuple(x * c % p for x in f)


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(out, p)


def poly_divmod(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise FieldError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    if len(r) <= dg:
        return (), poly_trim(r, p)
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] * inv % p
        if c:
            q[i - dg] = c
            for j, b in enumerate(g):
                r[i - dg + j] = (r[i - dg + j] - c * b) % p
    return poly_trim(q, p), poly_trim(r[:dg], p)


def poly_mod(f: Poly, g: Poly, p: int) -> Poly:
    return poly_divmod(f, g, p)[1]


def poly_monic(f: Poly, p: int) -> Poly:
    if not f:
        return ()
    return poly_scale(f, pow(f[-1], -1, p), p)


def poly_gcd(f: Poly, g: Poly, p: int) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    while g:
        f, g = g, poly_mod(f, g, p)
    return poly_monic(f, p)


def poly_powmod(f: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = (1,)
    base = poly_mod(f, m, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), m, p)
        base = poly_mod(poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def poly_eval(f: Poly, x):
    """Horner evaluation; ``x`` may be an int or a :class:`FieldElement`."""
    acc = 0 * x
    for c in reversed(f):
        acc = acc * x + c
    return acc


def poly_is_irreducible(f: Poly, p: int) -> bool:
    """A degree-k polynomial is irreducible iff gcd(f, x^{p^j} - x) = 1 for j <= k/2."""
    k = poly_deg(f)
    if k < 1:
        return False
    if k == 1:
        return True
    xpow: Poly = (0, 1)
    for _ in range(k // 2):
        xpow = poly_powmod(xpow, p, f, p)
        if poly_deg(poly_gcd(f, poly_sub(xpow, (0, 1), p), p)) > 0:
            return False
    return True


@functools.lru_cache(maxsize=None)
def find_irreducible(p: int, k: int) -> Poly:
    """Smallest monic irreducible polynomial of degree ``k`` over F_p.

    Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 are scanned by the index
    sum(c_i p^i).  For k = 1 the polynomial x is returned.
    """
    if not is_prime(p) or p < 3:
        raise FieldError(f"characteristic must be an odd prime, got {p}")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if k == 1:
        return (0, 1)
    for idx in range(p ** k):
        low = [(idx // p ** i) % p for i in range(k)]
        f = tuple(low) + (1,)
        if f[0] == 0:
            continue
        if poly_is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# fields

@dataclass(frozen=True)
class FieldDescriptor:
    p: int
    k: int = 1
    modulus: Optional[Poly] = None

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 3:
            raise FieldError(f"characteristic must be an odd prime, got {self.p}")
        if self.k < 1:
            raise FieldError("extension degree must be positive")
        if self.k == 1:
            if self.modulus is not None:
                raise FieldError("prime field takes no modulus")
            return
        if self.modulus is None:
            object.__setattr__(self, "modulus", find_irreducible(self.p, self.k))
        m = poly_trim(self.modulus, self.p)
        if poly_deg(m) != self.k or m[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if not poly_is_irreducible(m, self.p):
            raise FieldError(f"modulus {m} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", m)

    @property
    def order(self) -> int:
        return self.p ** self.k

    def __call__(self, value) -> "FieldElement":
        """Coerce an int or a coefficient sequence into this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement(self, (value % self.p,) + (0,) * (self.k - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.k:
            raise FieldError("too many coefficients")
        return FieldElement(self, tuple(coeffs) + (0,) * (self.k - len(coeffs)))

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    @property
    def gen(self) -> "FieldElement":
        """The class of t in F_p[t]/(modulus); equals 1 in the prime field."""
        return self((0, 1)) if self.k > 1 else self.one

    def from_index(self, idx: int) -> "FieldElement":
        return FieldElement(self, tuple((idx // self.p ** i) % self.p for i in range(self.k)))

    def __str__(self):
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.k}"


def prime_field(p: int) -> FieldDescriptor:
    return FieldDescriptor(p)


@functools.lru_cache(maxsize=None)
def extension_field(p: int, k: int) -> FieldDescriptor:
    return FieldDescriptor(p, k) if k > 1 else FieldDescriptor(p)


class FieldElement:
    """Immutable element of F_{p^k}; ints are coerced into the field."""

    __slots__ = ("field", "c")

    def __init__(self, field: FieldDescriptor, c: tuple):
        self.field = field
        self.c = c

    def _other(self, y):
        if isinstance(y, FieldElement):
            if y.field is not self.field and y.field != self.field:
                raise FieldError(f"field mismatch: {self.field} vs {y.field}")
            return y.c
        if isinstance(y, int):
            return (y % self.field.p,) + (0,) * (self.field.k - 1)
        return NotImplemented

    def __add__(self, y):
        yc = self._other(y)
        if yc is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.c, yc)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.c))

    def __sub__(self, y):
        yc = self._other(y)
        if yc is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a - b) % p for a, b in zip(self.c, yc)))

    def __rsub__(self, y):
        return (-self) + y

    def __mul__(self, y):
        yc = self._other(y)
        if yc is NotImplemented:
            return NotImplemented
        F = self.field
        p, k = F.p, F.k
        if k == 1:
            return FieldElement(F, (self.c[0] * yc[0] % p,))
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(yc):
                    prod[i + j] += a * b
        m = F.modulus
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i] % p
            if c:
                for j in range(k):
                    prod[i - k + j] -= c * m[j]
        return FieldElement(F, tuple(x % p for x in prod[:k]))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in " + str(self.field))
        F = self.field
        if F.k == 1:
            return FieldElement(F, (pow(self.c[0], -1, F.p),))
        return self ** (F.order - 2)

    def __truediv__(self, y):
        if isinstance(y, int):
            y = self.field(y)
        if not isinstance(y, FieldElement):
            return NotImplemented
        self._other(y)
        return self * y.inverse()

    def __rtruediv__(self, y):
        return self.field(y) * self.inverse()

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return any(self.c)

    def __eq__(self, y):
        if isinstance(y, FieldElement):
            return self.field == y.field and self.c == y.c
        if isinstance(y, int):
            return self.c == self.field(y).c
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.c))

    def index(self) -> int:
        p = self.field.p
        return sum(a * p ** i for i, a in enumerate(self.c))

    def in_prime_field(self) -> bool:
        return not any(self.c[1:])

    def frobenius(self, j: int = 1) -> "FieldElement":
        return self ** (self.field.p ** j)

    def __int__(self):
        if not self.in_prime_field():
            raise FieldError("element is not in the prime field")
        return self.c[0]

    def __repr__(self):
        if self.field.k == 1:
            return str(self.c[0])
        terms = []
        for i, a in enumerate(self.c):
            if a:
                terms.append(str(a) if i == 0 else (f"{a}" if a != 1 else "") + ("t" if i == 1 else f"t^{i}"))
        return "+".join(terms) if terms else "0"


def enumerate_elements(F: FieldDescriptor) -> Iterator[FieldElement]:
    """All p^k elements in index order, starting with 0."""
    for coeffs in itertools.product(range(F.p), repeat=F.k):
        yield FieldElement(F, tuple(reversed(coeffs)))


def fe_arith(op: str, x: FieldElement, y: FieldElement) -> FieldElement:
    if x.field != y.field:
        raise FieldError(f"field mismatch: {x.field} vs {y.field}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


@functools.lru_cache(maxsize=None)
def square_roots(F: FieldDescriptor) -> dict:
    """Map each square of F to the sorted list of its square roots."""
    roots: dict = {}
    for e in enumerate_elements(F):
        roots.setdefault(e * e, []).append(e)
    return roots
