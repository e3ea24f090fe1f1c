"""Rational functions on a Weierstrass curve, local valuations, evaluation,
Riemann-Roch spaces L(D) and zero divisors of sections.

A function is stored as (u(x) + v(x) y) / w(x) with u, v, w polynomials
over the base field, w monic and gcd(u, v, w) = 1.  That form is unique, so
dataclass equality is function equality.

Local parameters: t = x - x0 at affine points with y0 != 0, t = y at the
2-torsion points, t = x/y at O.  Orders at O are read off degrees, since
x and y have pole orders 2 and 3 and the two parities never cancel.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import linalg
from .curve import Curve, CurvePoint, Divisor, abel_jacobi_sum, enumerate_points, points_of_degree
from .field import (
    enumerate_elements,
    square_roots,
    FieldDescriptor,
    Poly,
    extension_field,
    poly_add,
    poly_deg,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mod,
    poly_monic,
    poly_powmod,
    poly_mul,
    poly_neg,
    poly_scale,
    poly_sub,
    poly_trim,
)

MAX_EXTENSION_DEGREE = 8


class FunctionError(ArithmeticError):
    pass


def _cubic(E: Curve) -> Poly:
    return poly_trim((E.B, E.A, 0, 1), E.p)


@dataclass(frozen=True)
class RationalFunction:
    curve: Curve
    u: Poly
    v: Poly
    w: Poly = (1,)

    @classmethod
    def make(cls, E: Curve, u: Sequence[int], v: Sequence[int] = (), w: Sequence[int] = (1,)):
        p = E.p
        u, v, w = poly_trim(u, p), poly_trim(v, p), poly_trim(w, p)
        if not w:
            raise FunctionError("zero denominator")
        if not u and not v:
            return cls(E, (), (), (1,))
        g = poly_gcd(poly_gcd(u, v, p), w, p)
        if poly_deg(g) > 0:
            u, v, w = (poly_divmod(h, g, p)[0] for h in (u, v, w))
        lc = pow(w[-1], -1, p)
        return cls(E, poly_scale(u, lc, p), poly_scale(v, lc, p), poly_scale(w, lc, p))

    @classmethod
    def constant(cls, E: Curve, c: int) -> "RationalFunction":
        return cls.make(E, (c,))

    @classmethod
    def x(cls, E: Curve) -> "RationalFunction":
        return cls.make(E, (0, 1))

    @classmethod
    def y(cls, E: Curve) -> "RationalFunction":
        return cls.make(E, (), (1,))

    def is_zero(self) -> bool:
        return not self.u and not self.v

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.curve != self.curve:
                raise FunctionError("functions on different curves")
            return other
        if isinstance(other, int):
            return RationalFunction.constant(self.curve, other)
        return NotImplemented

    def __add__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return g
        p = self.curve.p
        u = poly_add(poly_mul(self.u, g.w, p), poly_mul(g.u, self.w, p), p)
        v = poly_add(poly_mul(self.v, g.w, p), poly_mul(g.v, self.w, p), p)
        return RationalFunction.make(self.curve, u, v, poly_mul(self.w, g.w, p))

    __radd__ = __add__

    def __neg__(self):
        p = self.curve.p
        return RationalFunction(self.curve, poly_neg(self.u, p), poly_neg(self.v, p), self.w)

    def __sub__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return g
        return self + (-g)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return g
        p = self.curve.p
        f3 = _cubic(self.curve)
        u = poly_add(poly_mul(self.u, g.u, p), poly_mul(poly_mul(self.v, g.v, p), f3, p), p)
        v = poly_add(poly_mul(self.u, g.v, p), poly_mul(self.v, g.u, p), p)
        return RationalFunction.make(self.curve, u, v, poly_mul(self.w, g.w, p))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        p = self.curve.p
        norm = poly_sub(poly_mul(self.u, self.u, p),
                        poly_mul(poly_mul(self.v, self.v, p), _cubic(self.curve), p), p)
        return RationalFunction.make(
            self.curve, poly_mul(self.w, self.u, p), poly_mul(self.w, poly_neg(self.v, p), p), norm
        )

    def __truediv__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return g
        return self * g.inverse()

    def __rtruediv__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return g
        return g * self.inverse()

    def numerator_pole_order(self) -> int:
        """Pole order at O of u + v*y; bounds the number of zeros of f."""
        orders = []
        if self.u:
            orders.append(2 * poly_deg(self.u))
        if self.v:
            orders.append(2 * poly_deg(self.v) + 3)
        return max(orders) if orders else 0

    def to_json(self):
        return {"u": list(self.u), "v": list(self.v), "w": list(self.w)}

    def __repr__(self):
        def fmt(f):
            return "+".join(f"{c}x^{i}" if i else str(c) for i, c in enumerate(f) if c) or "0"

        num = fmt(self.u)
        if self.v:
            num = f"{num} + ({fmt(self.v)})y"
        return num if self.w == (1,) else f"({num})/({fmt(self.w)})"


# ---------------------------------------------------------------------------
# local expansions

def _ser_mul(a, b, prec):
    zero = a[0] * 0
    out = [zero] * prec
    for i in range(prec):
        ai = a[i]
        if ai.is_zero():
            continue
        for j in range(prec - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + ai * b[j]
    return out


def _ser_poly(f: Poly, xs, prec):
    """Series of f(x(t)) for a base-field polynomial f."""
    zero = xs[0] * 0
    acc = [zero] * prec
    for c in reversed(f):
        acc = _ser_mul(acc, xs, prec)
        acc[0] = acc[0] + c
    return acc


@functools.lru_cache(maxsize=4096)
def local_expansion(E: Curve, P: CurvePoint, prec: int):
    """Truncated series (xs, ys, e) of x, y at an affine point P in the
    local parameter, with e = ord_P(x - x0)."""
    if P.is_infinity:
        raise FunctionError("no affine expansion at O")
    F = P.field
    x0, y0 = P.x, P.y
    zero = F.zero
    if not y0.is_zero():
        g = [E.rhs(x0), x0 * x0 * 3 + E.A, x0 * 3, F.one]
        ys = [zero] * prec
        ys[0] = y0
        inv2y = (y0 * 2).inverse()
        for n in range(1, prec):
            acc = g[n] if n < 4 else zero
            for i in range(1, n):
                acc = acc - ys[i] * ys[n - i]
            ys[n] = acc * inv2y
        xs = [zero] * prec
        xs[0] = x0
        if prec > 1:
            xs[1] = F.one
        return xs, ys, 1
    g1 = x0 * x0 * 3 + E.A
    g2 = x0 * 3
    inv_g1 = g1.inverse()  # nonzero by smoothness
    t2 = [zero] * prec
    if prec > 2:
        t2[2] = F.one
    X = [zero] * prec
    for _ in range(prec):
        X2 = _ser_mul(X, X, prec)
        X3 = _ser_mul(X2, X, prec)
        new = [(t2[i] - g2 * X2[i] - X3[i]) * inv_g1 for i in range(prec)]
        if new == X:
            break
        X = new
    xs = list(X)
    xs[0] = xs[0] + x0
    ys = [zero] * prec
    if prec > 1:
        ys[1] = F.one
    return xs, ys, 2


def _numerator_series(E, u, v, P, prec):
    xs, ys, _ = local_expansion(E, P, prec)
    us = _ser_poly(u, xs, prec)
    vs = _ser_poly(v, xs, prec)
    vy = _ser_mul(vs, ys, prec)
    return [a + b for a, b in zip(us, vy)]


def _root_multiplicity(w: Poly, x0) -> int:
    """Multiplicity of x0 as a root of the base-field polynomial w."""
    coeffs = [x0 * 0 + c for c in w]
    m = 0
    while len(coeffs) > 1:
        # synthetic division by (x - x0)
        q = [None] * (len(coeffs) - 1)
        acc = coeffs[-1]
        q[-1] = acc
        for i in range(len(coeffs) - 2, 0, -1):
            acc = coeffs[i] + acc * x0
            q[i - 1] = acc
        rem = coeffs[0] + acc * x0
        if not rem.is_zero():
            break
        m += 1
        coeffs = q
    return m


@functools.lru_cache(maxsize=1 << 16)
def _numerator_valuation(E: Curve, u: Poly, v: Poly, P: CurvePoint) -> int:
    if P.is_infinity:
        orders = []
        if u:
            orders.append(-2 * poly_deg(u))
        if v:
            orders.append(-2 * poly_deg(v) - 3)
        return min(orders)
    if not (poly_eval(u, P.x) + poly_eval(v, P.x) * P.y).is_zero():
        return 0
    bound = max(2 * poly_deg(u) if u else 0, 2 * poly_deg(v) + 3 if v else 0)
    prec = 4
    while True:
        prec = min(prec, bound + 1)
        ser = _numerator_series(E, u, v, P, prec)
        for i, c in enumerate(ser):
            if not c.is_zero():
                return i
        if prec > bound:
            raise AssertionError("nonzero function vanishing beyond its zero count")
        prec *= 2


def _w_valuation(E: Curve, w: Poly, P: CurvePoint) -> int:
    if P.is_infinity:
        return -2 * poly_deg(w)
    m = _root_multiplicity(w, P.x)
    return m * (2 if P.y.is_zero() else 1)


def valuation(E: Curve, f: RationalFunction, P: CurvePoint) -> int:
    """Order of vanishing of f at P (negative at poles)."""
    if f.is_zero():
        raise FunctionError("valuation of the zero function")
    return _numerator_valuation(E, f.u, f.v, P) - _w_valuation(E, f.w, P)


def evaluate(E: Curve, f: RationalFunction, P: CurvePoint):
    """Value of f at P, as an element of P's field."""
    F = P.field
    if f.is_zero():
        return F.zero
    if not P.is_infinity:
        wx = poly_eval(f.w, P.x)
        if not wx.is_zero():
            return (poly_eval(f.u, P.x) + poly_eval(f.v, P.x) * P.y) / wx
    val = valuation(E, f, P)
    if val < 0:
        raise FunctionError(f"{f} has a pole of order {-val} at {P}")
    if val > 0:
        return F.zero
    if P.is_infinity:
        # order 0 at O forces deg u = deg w and the u-term to dominate
        return F(f.u[-1])
    m = _w_valuation(E, f.w, P)
    xs, _, _ = local_expansion(E, P, m + 1)
    num = _numerator_series(E, f.u, f.v, P, m + 1)
    den = _ser_poly(f.w, xs, m + 1)
    return num[m] / den[m]


def embed_base_point(E: Curve, P: CurvePoint, F: FieldDescriptor) -> CurvePoint:
    """The image of a base-field point in E(F)."""
    if P.field == F:
        return P
    if P.field.k != 1:
        raise FunctionError("only base-field points can be embedded")
    if P.is_infinity:
        return E.infinity(F)
    return CurvePoint(F(int(P.x)), F(int(P.y)), F)


def admissible_points(E: Curve, count: int, avoid: Iterable[CurvePoint] = (), denominators: Iterable[Poly] = (),
                      max_k: int = MAX_EXTENSION_DEGREE):
    """First ``count`` affine points of E(F_{p^k}) off ``avoid`` and off the
    zeros of ``denominators``, for the least k providing that many."""
    avoid = tuple(avoid)
    denominators = tuple(denominators)
    for k in range(1, max_k + 1):
        F = extension_field(E.p, k)
        bad = {embed_base_point(E, Q, F) for Q in avoid}
        out = []
        for P in enumerate_points(E, k):
            if P.is_infinity or P in bad:
                continue
            if any(poly_eval(w, P.x).is_zero() for w in denominators):
                continue
            out.append(P)
            if len(out) == count:
                return F, tuple(out)
    raise FunctionError(f"fewer than {count} admissible points over F_{E.p}^k for k <= {max_k}")


def is_zero_function(E: Curve, f: RationalFunction, M: int, avoid: Iterable[CurvePoint] = (),
                     max_k: int = MAX_EXTENSION_DEGREE) -> bool:
    """Zero test for f in some L(D) with deg D <= M and supp D within ``avoid``:
    a nonzero such f has at most M zeros off supp D."""
    _, pts = admissible_points(E, M + 1, avoid, (f.w,), max_k)
    return all(evaluate(E, f, P).is_zero() for P in pts)


# ---------------------------------------------------------------------------
# Riemann-Roch spaces

def _monomials(M: int):
    """(i, j) for x^i y^j with pole order 2i + 3j <= M, sorted by pole order."""
    mons = [(i, 0) for i in range(M // 2 + 1)]
    mons += [(i, 1) for i in range((M - 3) // 2 + 1) if 2 * i + 3 <= M]
    return sorted(mons, key=lambda m: 2 * m[0] + 3 * m[1])


@dataclass(frozen=True)
class SectionSpace:
    """L(D) with an explicit basis.  Every basis element is N_j / w for the
    common denominator w; ``coords`` holds the N_j in monomial coordinates."""

    curve: Curve
    divisor: Divisor
    basis: tuple
    denominator: Poly
    monomials: tuple
    coords: tuple
    pivots: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def combine(self, coeffs: Sequence[int]) -> RationalFunction:
        E = self.curve
        if len(coeffs) != self.dimension:
            raise ValueError("coefficient vector has wrong length")
        coeffs = [int(c) for c in coeffs]
        num = [sum(c * row[j] for c, row in zip(coeffs, self.coords)) for j in range(len(self.monomials))]
        return _from_monomials(E, self.monomials, num, self.denominator)

    def coordinates(self, f: RationalFunction) -> list:
        """Coordinates of f in the basis; raises if f is not in L(D)."""
        E = self.curve
        p = E.p
        if self.dimension == 0:
            if f.is_zero():
                return []
            raise FunctionError("nonzero function in the zero space")
        g = f * RationalFunction.make(E, self.denominator)
        if g.w != (1,):
            raise FunctionError(f"{f} is not in L({self.divisor})")
        vec = [0] * len(self.monomials)
        index = {m: j for j, m in enumerate(self.monomials)}
        for part, j in ((g.u, 0), (g.v, 1)):
            for i, c in enumerate(part):
                if c:
                    if (i, j) not in index:
                        raise FunctionError(f"{f} is not in L({self.divisor})")
                    vec[index[(i, j)]] = c
        # basis rows are in echelon form with distinct pivot monomials
        x = [vec[pc] for pc in self.pivots]
        check = [sum(c * row[j] for c, row in zip(x, self.coords)) % p for j in range(len(vec))]
        if check != [c % p for c in vec]:
            raise FunctionError(f"{f} is not in L({self.divisor})")
        return x


def _from_monomials(E, monomials, coeffs, w) -> RationalFunction:
    du = max((i for (i, j) in monomials if j == 0), default=-1) + 1
    dv = max((i for (i, j) in monomials if j == 1), default=-1) + 1
    u = [0] * du
    v = [0] * dv
    for (i, j), c in zip(monomials, coeffs):
        if j == 0:
            u[i] += c
        else:
            v[i] += c
    return RationalFunction.make(E, u, v, w)


def _expected_dimension(E: Curve, D: Divisor) -> int:
    d = D.degree
    if d > 0:
        return d
    if d == 0:
        return 1 if abel_jacobi_sum(E, D).is_infinity else 0
    return 0


@functools.lru_cache(maxsize=1024)
def rr_basis(E: Curve, D: Divisor) -> SectionSpace:
    """Basis of L(D) = {f : div f + D >= 0} for D supported on base-field points.

    Poles at affine points are cleared by w = prod (x - c)^e_c; the space is
    then {N / w : N in L(M*O), v_P(N) >= v_P(w) - n_P at every affine P},
    which is a kernel computation on truncated local expansions.
    """
    p = E.p
    base = E.field
    for P in D.support:
        if P.field != base:
            raise FunctionError("rr_basis needs a divisor over base-field points")
    nO = 0
    exponents: dict = {}
    for P, n in D.terms:
        if P.is_infinity:
            nO = n
        elif n > 0:
            ram = 2 if P.y.is_zero() else 1
            c = int(P.x)
            exponents[c] = max(exponents.get(c, 0), -(-n // ram))
    w: Poly = (1,)
    for c in sorted(exponents):
        for _ in range(exponents[c]):
            w = poly_mul(w, poly_trim((-c, 1), p), p)
    M = nO + 2 * poly_deg(w)
    monomials = tuple(_monomials(M)) if M >= 0 else ()
    # affine points carrying a condition
    relevant = {P for P in D.support if not P.is_infinity}
    roots = square_roots(base)
    for c in exponents:
        for y in roots.get(E.rhs(base(c)), ()):
            relevant.add(CurvePoint(base(c), y, base))
    rows = []
    for P in sorted(relevant, key=CurvePoint.sort_key):
        need = _w_valuation(E, w, P) - D.mult(P)
        if need <= 0 or not monomials:
            continue
        xs, ys, _ = local_expansion(E, P, need)
        cols = []
        xpow = [base.one] + [base.zero] * (need - 1)
        max_i = max(i for i, _ in monomials)
        xpows = []
        for _ in range(max_i + 1):
            xpows.append(xpow)
            xpow = _ser_mul(xpow, xs, need)
        for i, j in monomials:
            s = xpows[i] if j == 0 else _ser_mul(xpows[i], ys, need)
            cols.append([int(c) for c in s])
        for r in range(need):
            rows.append([col[r] for col in cols])
    n = len(monomials)
    if n == 0:
        kernel = []
    else:
        kernel = linalg.nullspace(rows, n, p) if rows else [[int(i == j) for j in range(n)] for i in range(n)]
    if kernel:
        kernel, pivots = linalg.rref(kernel, p, col_order=reversed(range(n)))
        order = sorted(range(len(kernel)), key=lambda r: pivots[r])
        kernel = [kernel[r] for r in order]
        pivots = [pivots[r] for r in order]
    else:
        pivots = []
    basis = tuple(_from_monomials(E, monomials, row, w) for row in kernel)
    space = SectionSpace(E, D, basis, w, monomials, tuple(tuple(r) for r in kernel), tuple(pivots))
    expected = _expected_dimension(E, D)
    if space.dimension != expected:
        raise AssertionError(f"dim L({D}) = {space.dimension}, Riemann-Roch gives {expected}")
    return space


def _distinct_degree_parts(w: Poly, p: int):
    """(j, g_j): g_j is the product of the distinct degree-j irreducible factors of w."""
    rest = poly_monic(w, p)
    out = []
    j = 0
    h: Poly = (0, 1)
    while poly_deg(rest) > 0:
        j += 1
        if 2 * j > poly_deg(rest):
            # what is left is irreducible
            out.append((poly_deg(rest), rest))
            break
        h = poly_powmod(h, p, rest, p)
        g = poly_gcd(rest, poly_sub(h, (0, 1), p), p)
        if poly_deg(g) > 0:
            out.append((j, g))
            # strip every power of every factor of g
            while poly_deg(c := poly_gcd(rest, g, p)) > 0:
                rest = poly_divmod(rest, c, p)[0]
            h = poly_mod(h, rest, p) if poly_deg(rest) > 0 else h
    return out


MAX_ROOT_SEARCH = 1 << 20


def check_in_space(E: Curve, f: RationalFunction, D: Divisor) -> bool:
    """Whether div f + D >= 0, checked at supp D, at O and above every root of w.

    Above a root x0 whose y-fiber splits only in a quadratic extension, the
    two conjugate points share one order, read off the norm u^2 - v^2 f(x).
    """
    if f.is_zero():
        return True
    if not all(valuation(E, f, P) + D.mult(P) >= 0 for P in set(D.support) | {E.infinity()}):
        return False
    p = E.p
    norm = poly_sub(poly_mul(f.u, f.u, p), poly_mul(poly_mul(f.v, f.v, p), _cubic(E), p), p)
    for j, g in _distinct_degree_parts(f.w, p):
        if p ** j > MAX_ROOT_SEARCH:
            raise FunctionError(f"denominator factor of degree {j} is too large to scan")
        F = extension_field(p, j)
        roots = square_roots(F)
        for x0 in enumerate_elements(F):
            if not poly_eval(g, x0).is_zero():
                continue
            r = E.rhs(x0)
            ys = roots.get(r)
            if ys:
                for y0 in ys:
                    P = CurvePoint(x0, y0, F)
                    if valuation(E, f, P) + D.mult(P) < 0:
                        return False
            else:
                order = _root_multiplicity(norm, x0) - 2 * _root_multiplicity(f.w, x0)
                if order < 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# zero divisors

@dataclass(frozen=True)
class GeometricDivisor:
    """Effective divisor listing every geometric point in its minimal field.

    A closed point of degree k shows up as its k conjugates, each with the
    same multiplicity, so ``degree`` is the ordinary degree.
    """

    terms: tuple = ()

    @classmethod
    def from_mapping(cls, mapping) -> "GeometricDivisor":
        return cls(tuple(sorted(((P, n) for P, n in mapping.items() if n), key=lambda t: t[0].sort_key())))

    @property
    def degree(self) -> int:
        return sum(n for _, n in self.terms)

    @property
    def support(self) -> tuple:
        return tuple(P for P, _ in self.terms)

    def mult(self, P) -> int:
        return dict(self.terms).get(P, 0)

    def gcd(self, other: "GeometricDivisor") -> "GeometricDivisor":
        mine = dict(self.terms)
        theirs = dict(other.terms)
        return GeometricDivisor.from_mapping({P: min(n, theirs[P]) for P, n in mine.items() if P in theirs})

    def field_degrees(self) -> dict:
        out: dict = {}
        for P, n in self.terms:
            out[P.field.k] = out.get(P.field.k, 0) + n
        return out


def zero_divisor_oracle(E: Curve, s: RationalFunction, D: Divisor, max_k: Optional[int] = None) -> GeometricDivisor:
    """(s)_0 = div(s) + D for a nonzero s in L(D), found by scanning points
    of degree 1, 2, ... up to deg D."""
    if s.is_zero():
        raise FunctionError("zero section has no zero divisor")
    total = D.degree
    found: dict = {}
    acc = 0
    if total == 0:
        return GeometricDivisor()
    limit = total if max_k is None else min(total, max_k)
    supp = set(D.support)
    for k in range(1, limit + 1):
        for P in points_of_degree(E, k):
            n = D.mult(P) if P in supp else 0
            if not P.is_infinity and not n:
                wx = poly_eval(s.w, P.x)
                if not wx.is_zero() and not (poly_eval(s.u, P.x) + poly_eval(s.v, P.x) * P.y).is_zero():
                    continue
            m = valuation(E, s, P) + n
            if m < 0:
                raise FunctionError(f"section is not in L({D}): order {m} at {P}")
            if m:
                found[P] = m
                acc += m
        if acc >= total:
            break
    if acc != total:
        raise AssertionError(f"zero divisor of degree {acc}, expected {total}")
    return GeometricDivisor.from_mapping(found)
