"""Split rank-two bundles O(aP) + O(bQ), their sections, the second
determinant map d2 and its kernel.

The codomain H^0(det E) = L(aP + bQ) is never given a basis.  A value of
d2 is recorded by its evaluations at a+b+1 points off {P, Q}; a nonzero
element of L(aP + bQ) has at most a+b zeros there, so the evaluation map
is injective.  Values in F_{p^k} are expanded to k coordinates over F_p,
which keeps every matrix over the base field.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .curve import Curve, CurvePoint, Divisor
from .funcspace import RationalFunction, SectionSpace, admissible_points, evaluate, rr_basis


class BundleError(ValueError):
    pass


@dataclass(frozen=True)
class SplitBundle:
    curve: Curve
    a: int
    P: CurvePoint
    b: int
    Q: CurvePoint
    first: SectionSpace = field(repr=False, compare=False)
    second: SectionSpace = field(repr=False, compare=False)
    note: Optional[str] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.a + self.b

    @property
    def p(self) -> int:
        return self.curve.p

    @property
    def D1(self) -> Divisor:
        return Divisor.point(self.P, self.a)

    @property
    def D2(self) -> Divisor:
        return Divisor.point(self.Q, self.b)

    def basis_pair(self, m: int) -> tuple:
        """The m-th basis section as a pair of functions."""
        zero = RationalFunction.constant(self.curve, 0)
        if m < self.first.dimension:
            return self.first.basis[m], zero
        return zero, self.second.basis[m - self.first.dimension]

    def section(self, coords: Sequence[int]) -> "BundleSection":
        if len(coords) != self.n:
            raise BundleError(f"section needs {self.n} coordinates")
        return BundleSection(self, tuple(int(c) % self.p for c in coords))

    def section_from_pair(self, f1: RationalFunction, f2: RationalFunction) -> "BundleSection":
        return self.section(self.first.coordinates(f1) + self.second.coordinates(f2))

    def describe(self) -> dict:
        return {"a": self.a, "b": self.b, "P": self.P.to_json(), "Q": self.Q.to_json()}


@dataclass(frozen=True)
class BundleSection:
    bundle: SplitBundle = field(repr=False)
    coords: tuple

    @property
    def pair(self) -> tuple:
        B = self.bundle
        a = B.first.dimension
        return B.first.combine(self.coords[:a]), B.second.combine(self.coords[a:])

    def is_zero(self) -> bool:
        return not any(self.coords)


def build_bundle(E: Curve, a: int, P: CurvePoint, b: int, Q: CurvePoint) -> SplitBundle:
    note = None
    if a > b:
        a, P, b, Q = b, Q, a, P
        note = "summands swapped so that a <= b"
    if a < 1:
        raise BundleError("summands of degree < 1 are handled symbolically only")
    for R in (P, Q):
        if R.field != E.field or not E.contains(R):
            raise BundleError(f"{R} is not a base-field point of {E}")
    return SplitBundle(E, a, P, b, Q, rr_basis(E, Divisor.point(P, a)), rr_basis(E, Divisor.point(Q, b)), note)


def det_pairing(E: SplitBundle, s: BundleSection, t: BundleSection) -> RationalFunction:
    """d2(s ^ t) = s1*t2 - s2*t1 in L(aP + bQ)."""
    s1, s2 = s.pair
    t1, t2 = t.pair
    return s1 * t2 - s2 * t1


def wedge_pairs(n: int) -> list:
    return list(itertools.combinations(range(n), 2))


@dataclass(frozen=True)
class DeterminantData:
    bundle: SplitBundle = field(repr=False)
    points: tuple
    matrix: np.ndarray = field(repr=False)
    kernel: tuple
    rank: int
    tensor: np.ndarray = field(repr=False)

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel)

    @property
    def domain_dim(self) -> int:
        return comb(self.bundle.n, 2)

    @property
    def extension_degree(self) -> int:
        return self.points[0].field.k

    def in_kernel(self, wedge: Sequence[int]) -> bool:
        p = self.bundle.p
        return not (self.matrix @ (np.asarray(wedge, dtype=np.int64) % p) % p).any()


def evaluation_table(bundle: SplitBundle, points) -> np.ndarray:
    """vals[m, i, c]: coordinate c over F_p of basis function m of either
    summand (first-summand functions first) evaluated at points[i]."""
    E = bundle.curve
    funcs = list(bundle.first.basis) + list(bundle.second.basis)
    k = points[0].field.k
    vals = np.zeros((len(funcs), len(points), k), dtype=np.int64)
    for m, f in enumerate(funcs):
        for i, P in enumerate(points):
            vals[m, i, :] = evaluate(E, f, P).c
    return vals


def _ext_mul_table(F) -> np.ndarray:
    """M[i, j, :] = coordinates of t^i * t^j in F."""
    k = F.k
    basis = [F.gen ** i for i in range(k)]
    M = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            M[i, j, :] = (basis[i] * basis[j]).c
    return M


@functools.lru_cache(maxsize=64)
def determinant_kernel(bundle: SplitBundle, point_offset: int = 0) -> DeterminantData:
    """Matrix of d2 on the wedge basis e_i ^ e_j (i < j, lexicographic), its
    kernel in reduced row-echelon form, and the structure tensor
    T[m, c, :] = d2(e_m ^ e_c) restricted to a basis of the row space.

    ``point_offset`` skips that many admissible points, giving an
    independent evaluation set for cross-checks.
    """
    E = bundle.curve
    p = bundle.p
    n = bundle.n
    a = bundle.a
    need = n + 1 + point_offset
    F, pts = admissible_points(
        E, need, avoid=(bundle.P, bundle.Q),
        denominators=(bundle.first.denominator, bundle.second.denominator),
    )
    pts = pts[point_offset:]
    vals = evaluation_table(bundle, pts)
    mul = _ext_mul_table(F)
    k = F.k
    N = len(pts)
    # prod[m, c, i, :] = value_m * value_c at point i, over F_p
    prod = np.einsum("mix,ciy,xyz->mciz", vals[:a], vals[a:], mul) % p
    full = np.zeros((n, n, N * k), dtype=np.int64)
    full[:a, a:, :] = prod.reshape(a, n - a, N * k)
    full[a:, :a, :] = (-np.transpose(full[:a, a:, :], (1, 0, 2))) % p
    pairs = wedge_pairs(n)
    matrix = np.stack([full[i, j, :] for i, j in pairs], axis=1) % p  # rows: coordinates
    rows = [list(map(int, r)) for r in matrix]
    keep = linalg.row_basis_indices(rows, p)
    rank = len(keep)
    kernel = linalg.nullspace(rows, len(pairs), p)
    tensor = full[:, :, keep] % p
    data = DeterminantData(bundle, pts, matrix, tuple(tuple(v) for v in kernel), rank, tensor)
    bound = comb(n, 2) - n
    if data.kernel_dim < bound:
        raise AssertionError(f"kernel of d2 has dimension {data.kernel_dim} < {bound}")
    return data


def plucker(bundle: SplitBundle, s: BundleSection, t: BundleSection) -> tuple:
    """2x2 minors s_i t_j - s_j t_i over i < j; raises on dependent sections."""
    p = bundle.p
    vec = tuple((s.coords[i] * t.coords[j] - s.coords[j] * t.coords[i]) % p for i, j in wedge_pairs(bundle.n))
    if not any(vec):
        raise BundleError("sections are linearly dependent")
    return vec


def plane_in_section(det: DeterminantData, s: BundleSection, t: BundleSection) -> bool:
    """Whether the plane <s, t> lies in G(E), i.e. its Plucker vector is in ker d2."""
    return det.in_kernel(plucker(det.bundle, s, t))
