"""Resonance membership, stratum degrees and exhaustive enumeration over F_q.

For a section s, kappa(s) = dim ker(t -> d2(s ^ t)).  That kernel is H^0 of
the saturation of the subsheaf generated by s, so on an elliptic curve
kappa equals the degree of the saturation whenever s is resonant
(kappa >= 2).  The divisor-gcd route in :func:`saturation_degree_oracle`
computes the same degree from zero divisors, independently of d2.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .bundle import BundleSection, DeterminantData, SplitBundle
from .curve import Curve, CurvePoint, Divisor, DivisorClassRep, enumerate_points
from .funcspace import GeometricDivisor, RationalFunction, rr_basis, valuation, zero_divisor_oracle

DEFAULT_BUDGET = 10 ** 7
CHUNK = 1 << 14
# below this many items a process pool costs more than it saves
PARALLEL_MIN = 1 << 17


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int, what: str = "points"):
        super().__init__(f"enumeration needs {required} {what}, budget is {budget}")
        self.required = required
        self.budget = budget


class WitnessError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# kernel dimensions

def phi_matrices(tensor: np.ndarray, S: np.ndarray, p: int) -> np.ndarray:
    """M(s)[c, r] = d2(s ^ e_c)_r for every row s of S."""
    return np.einsum("bm,mcr->bcr", S, tensor) % p


def kernel_dims(det: DeterminantData, S: np.ndarray) -> np.ndarray:
    p = det.bundle.p
    S = np.atleast_2d(np.asarray(S, dtype=np.int64)) % p
    n = det.bundle.n
    if det.rank == 0:
        return np.full(len(S), n, dtype=np.int64)
    return n - linalg.batch_rank(phi_matrices(det.tensor, S, p), p)


def phi_kernel_dim(bundle: SplitBundle, det: DeterminantData, s: BundleSection) -> int:
    if s.is_zero():
        raise ValueError("kappa is undefined for the zero section")
    return int(kernel_dims(det, [s.coords])[0])


def is_resonant(bundle: SplitBundle, det: DeterminantData, s: BundleSection) -> bool:
    return phi_kernel_dim(bundle, det, s) >= 2


def stratum_degree(bundle: SplitBundle, det: DeterminantData, s: BundleSection) -> int:
    kappa = phi_kernel_dim(bundle, det, s)
    if kappa < 2:
        raise ValueError("section is not resonant")
    assert kappa <= bundle.b
    return kappa


# ---------------------------------------------------------------------------
# saturation via zero divisors

def gcd_degree(E: Curve, f1: RationalFunction, D1: Divisor, f2: RationalFunction, D2: Divisor) -> int:
    """deg gcd((f1)_0, (f2)_0), where a zero component imposes no condition."""
    if f1.is_zero() and f2.is_zero():
        raise ValueError("both components vanish")
    if f1.is_zero():
        return D2.degree
    if f2.is_zero():
        return D1.degree
    if D1.degree <= D2.degree:
        Z = zero_divisor_oracle(E, f1, D1)
        other, D = f2, D2
    else:
        Z = zero_divisor_oracle(E, f2, D2)
        other, D = f1, D1
    total = 0
    for P, m in Z.terms:
        n = D.mult(P) if P.field == E.field else 0
        total += min(m, valuation(E, other, P) + n)
    return total


def common_zero_divisor(E: Curve, f1, D1, f2, D2) -> GeometricDivisor:
    if f1.is_zero():
        return zero_divisor_oracle(E, f2, D2)
    if f2.is_zero():
        return zero_divisor_oracle(E, f1, D1)
    return zero_divisor_oracle(E, f1, D1).gcd(zero_divisor_oracle(E, f2, D2))


def saturation_degree_oracle(bundle: SplitBundle, s: BundleSection) -> int:
    """Degree of the saturation of O*s, from the gcd of the zero divisors."""
    s1, s2 = s.pair
    return gcd_degree(bundle.curve, s1, bundle.D1, s2, bundle.D2)


# ---------------------------------------------------------------------------
# projective domains

def projective_count(n: int, q: int) -> int:
    return (q ** n - 1) // (q - 1)


def gaussian_binomial_2(n: int, q: int) -> int:
    if n < 2:
        return 0
    return (q ** n - 1) * (q ** (n - 1) - 1) // ((q ** 2 - 1) * (q - 1))


def _digits(idx: np.ndarray, q: int, width: int) -> np.ndarray:
    out = np.zeros((len(idx), width), dtype=np.int64)
    rest = idx.copy()
    for c in range(width - 1, -1, -1):
        out[:, c] = rest % q
        rest //= q
    return out


def projective_points(n: int, q: int, start: int, stop: int) -> np.ndarray:
    """Normalized representatives with global indices in [start, stop).

    Points are grouped by the position i of their leading 1; within a
    group the trailing coordinates run through q^(n-1-i) values in
    base-q order.
    """
    rows = []
    offset = 0
    for i in range(n):
        size = q ** (n - 1 - i)
        lo, hi = max(start, offset), min(stop, offset + size)
        if lo < hi:
            local = np.arange(lo - offset, hi - offset, dtype=np.int64)
            block = np.zeros((hi - lo, n), dtype=np.int64)
            block[:, i] = 1
            if n - 1 - i:
                block[:, i + 1:] = _digits(local, q, n - 1 - i)
            rows.append(block)
        offset += size
    if not rows:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(rows)


def normalize(v: Sequence[int], p: int) -> tuple:
    v = [int(x) % p for x in v]
    lead = next((x for x in v if x), None)
    if lead is None:
        raise ValueError("zero vector has no projective class")
    inv = pow(lead, -1, p)
    return tuple(x * inv % p for x in v)


def _plane_blocks(n: int, q: int):
    """(i, j, size) for reduced echelon 2 x n matrices with pivots i < j."""
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j, q ** ((n - i - 2) + (n - 1 - j))


def planes(n: int, q: int, start: int, stop: int):
    """Reduced echelon bases (S, T) of 2-planes with indices in [start, stop)."""
    Ss, Ts = [], []
    offset = 0
    for i, j, size in _plane_blocks(n, q):
        lo, hi = max(start, offset), min(stop, offset + size)
        if lo < hi:
            free1 = [c for c in range(i + 1, n) if c != j]
            free2 = list(range(j + 1, n))
            digits = _digits(np.arange(lo - offset, hi - offset, dtype=np.int64), q, len(free1) + len(free2))
            S = np.zeros((hi - lo, n), dtype=np.int64)
            T = np.zeros((hi - lo, n), dtype=np.int64)
            S[:, i] = 1
            T[:, j] = 1
            if free1:
                S[:, free1] = digits[:, :len(free1)]
            if free2:
                T[:, free2] = digits[:, len(free1):]
            Ss.append(S)
            Ts.append(T)
        offset += size
    if not Ss:
        empty = np.zeros((0, n), dtype=np.int64)
        return empty, empty
    return np.concatenate(Ss), np.concatenate(Ts)


# ---------------------------------------------------------------------------
# enumeration

@dataclass
class StrataReport:
    bundle: dict
    q: int
    projective: Optional[dict] = None
    points_visited: int = 0
    planes: Optional[dict] = None
    planes_visited: int = 0
    resonant_points: Optional[np.ndarray] = field(default=None, repr=False)
    elapsed: dict = field(default_factory=dict)

    @property
    def total_resonant(self) -> int:
        return sum((self.projective or {}).values())

    @property
    def total_planes(self) -> int:
        return sum((self.planes or {}).values())

    @property
    def observed_degrees(self) -> set:
        return set(self.projective or {})

    def merged(self, other: "StrataReport") -> "StrataReport":
        out = StrataReport(self.bundle, self.q)
        out.projective = self.projective if self.projective is not None else other.projective
        out.points_visited = self.points_visited or other.points_visited
        out.planes = self.planes if self.planes is not None else other.planes
        out.planes_visited = self.planes_visited or other.planes_visited
        out.resonant_points = self.resonant_points if self.resonant_points is not None else other.resonant_points
        out.elapsed = {**self.elapsed, **other.elapsed}
        return out

    def to_json(self) -> dict:
        def counts(d):
            return None if d is None else {str(k): str(v) for k, v in sorted(d.items())}

        doc = {
            "bundle": self.bundle,
            "q": str(self.q),
            "projective": None if self.projective is None else {
                "visited": str(self.points_visited),
                "total_resonant": str(self.total_resonant),
                "by_degree": counts(self.projective),
            },
            "planes": None if self.planes is None else {
                "visited": str(self.planes_visited),
                "total_in_G": str(self.total_planes),
                "by_degree": counts(self.planes),
            },
        }
        return doc


def _count_projective(args):
    tensor, p, n, start, stop, keep = args
    counts: dict = {}
    kept = []
    inv = linalg.inverse_table(p)
    for lo in range(start, stop, CHUNK):
        S = projective_points(n, p, lo, min(stop, lo + CHUNK))
        if tensor.shape[2] == 0:
            kappa = np.full(len(S), n)
        else:
            kappa = n - linalg.batch_rank(phi_matrices(tensor, S, p), p, inv)
        for d, c in zip(*np.unique(kappa[kappa >= 2], return_counts=True)):
            counts[int(d)] = counts.get(int(d), 0) + int(c)
        if keep:
            kept.append(S[kappa >= 2])
    return counts, (np.concatenate(kept) if kept else None)


def _count_planes(args):
    tensor, p, n, start, stop = args
    counts: dict = {}
    inv = linalg.inverse_table(p)
    for lo in range(start, stop, CHUNK):
        S, T = planes(n, p, lo, min(stop, lo + CHUNK))
        if tensor.shape[2] == 0:
            member = np.ones(len(S), dtype=bool)
        else:
            W = np.einsum("bm,mcr,bc->br", S, tensor, T) % p
            member = ~W.any(axis=1)
        S, T = S[member], T[member]
        if not len(S):
            continue
        if tensor.shape[2] == 0:
            kappa = np.full(len(S), n)
        else:
            stacked = np.concatenate([phi_matrices(tensor, S, p), phi_matrices(tensor, T, p)], axis=2)
            kappa = n - linalg.batch_rank(stacked, p, inv)
        for d, c in zip(*np.unique(kappa, return_counts=True)):
            counts[int(d)] = counts.get(int(d), 0) + int(c)
    return counts


def _ranges(total: int, parts: int):
    parts = max(1, min(parts, total or 1))
    step = -(-total // parts)
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)] or [(0, 0)]


def _run(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _merge_counts(parts) -> dict:
    out: dict = {}
    for part in parts:
        for d, c in part.items():
            out[d] = out.get(d, 0) + c
    return dict(sorted(out.items()))


def enumerate_resonance(bundle: SplitBundle, det: DeterminantData, budget: int = DEFAULT_BUDGET,
                        workers: int = 1, keep_points: bool = False) -> StrataReport:
    """Classify every point of P(H^0(E))(F_p) by kappa; counts per degree."""
    n, p = bundle.n, bundle.p
    total = projective_count(n, p)
    if total > budget:
        raise BudgetExceeded(total, budget)
    t0 = time.perf_counter()
    workers = workers if total >= PARALLEL_MIN else 1
    jobs = [(det.tensor, p, n, lo, hi, keep_points) for lo, hi in _ranges(total, workers)]
    results = _run(_count_projective, jobs, workers)
    report = StrataReport(bundle.describe(), p)
    report.projective = _merge_counts(r[0] for r in results)
    report.points_visited = total
    if keep_points:
        kept = [r[1] for r in results if r[1] is not None]
        report.resonant_points = np.concatenate(kept) if kept else np.zeros((0, n), dtype=np.int64)
    report.elapsed["projective"] = time.perf_counter() - t0
    return report


def enumerate_plane_section(bundle: SplitBundle, det: DeterminantData, budget: int = DEFAULT_BUDGET,
                            workers: int = 1) -> StrataReport:
    """Visit each 2-plane once; count those in G(E) by degree."""
    n, p = bundle.n, bundle.p
    total = gaussian_binomial_2(n, p)
    if total > budget:
        raise BudgetExceeded(total, budget, "planes")
    t0 = time.perf_counter()
    workers = workers if total >= PARALLEL_MIN else 1
    jobs = [(det.tensor, p, n, lo, hi) for lo, hi in _ranges(total, workers)]
    report = StrataReport(bundle.describe(), p)
    report.planes = _merge_counts(_run(_count_planes, jobs, workers))
    report.planes_visited = total
    report.elapsed["planes"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# theta images and witnesses

@dataclass(frozen=True)
class ResonantPoint:
    coords: tuple
    kappa: int
    witness: Optional[dict] = field(default=None, compare=False, hash=False)

    @property
    def degree(self) -> int:
        return self.kappa

    def to_json(self) -> dict:
        doc = {"section": [str(c) for c in self.coords], "degree": str(self.kappa)}
        if self.witness is not None:
            doc["certificate"] = self.witness
        return doc


@dataclass
class ThetaImage:
    L: DivisorClassRep
    points: tuple
    embeddings_tried: int
    saturated: int

    @property
    def empty(self) -> bool:
        return self.saturated == 0


def _class_json(L: DivisorClassRep) -> dict:
    return {"degree": str(L.degree), "sum": L.S.to_json()}


class _ThetaData:
    """Sections of L and of E(-L), and the bilinear multiplication into H^0(E)."""

    def __init__(self, bundle: SplitBundle, L: DivisorClassRep):
        E = bundle.curve
        self.bundle = bundle
        self.L = L
        DL = L.divisor(E)
        self.HL = rr_basis(E, DL)
        self.M1 = rr_basis(E, bundle.D1 - DL)
        self.M2 = rr_basis(E, bundle.D2 - DL)
        self.DM1 = bundle.D1 - DL
        self.DM2 = bundle.D2 - DL
        d, m1, m2 = self.HL.dimension, self.M1.dimension, self.M2.dimension
        self.C1 = np.zeros((d, m1, bundle.a), dtype=np.int64)
        self.C2 = np.zeros((d, m2, bundle.b), dtype=np.int64)
        for i, t in enumerate(self.HL.basis):
            for j, e in enumerate(self.M1.basis):
                self.C1[i, j] = bundle.first.coordinates(t * e)
            for j, e in enumerate(self.M2.basis):
                self.C2[i, j] = bundle.second.coordinates(t * e)

    @property
    def embedding_dim(self) -> int:
        return self.M1.dimension + self.M2.dimension

    def is_saturated(self, e: Sequence[int]) -> bool:
        m1 = self.M1.dimension
        e1 = self.M1.combine(list(e[:m1]))
        e2 = self.M2.combine(list(e[m1:]))
        return gcd_degree(self.bundle.curve, e1, self.DM1, e2, self.DM2) == 0

    def products(self, T: np.ndarray, e: Sequence[int]) -> np.ndarray:
        p = self.bundle.p
        m1 = self.M1.dimension
        e = np.asarray(e, dtype=np.int64)
        first = np.einsum("bi,j,ijk->bk", T, e[:m1], self.C1) % p
        second = np.einsum("bi,j,ijk->bk", T, e[m1:], self.C2) % p
        return np.concatenate([first, second], axis=1)


def theta_image(bundle: SplitBundle, det: DeterminantData, L: DivisorClassRep, mode: str = "full",
                sample: int = 32, seed: int = 0, budget: int = DEFAULT_BUDGET) -> ThetaImage:
    """Image of P(H^0(L)) x U_L in P(H^0(E)) over F_p.

    U_L is found by testing each embedding (e1, e2) for coprime zero
    divisors.  ``mode="sample"`` draws up to ``sample`` embeddings and
    ``sample`` sections of L instead of enumerating them all.  Every output
    point is checked to lie in the stratum of degree deg L.
    """
    d = L.degree
    if not 2 <= d <= bundle.b:
        raise ValueError(f"degree {d} outside [2, {bundle.b}]")
    if mode not in ("full", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    p = bundle.p
    data = _ThetaData(bundle, L)
    m = data.embedding_dim
    if m == 0:
        return ThetaImage(L, (), 0, 0)
    n_emb, n_sec = projective_count(m, p), projective_count(d, p)
    rng = random.Random(seed)
    if mode == "full":
        if n_emb * n_sec > budget:
            raise BudgetExceeded(n_emb * n_sec, budget)
        emb_idx = range(n_emb)
        T = projective_points(d, p, 0, n_sec)
    else:
        emb_idx = sorted(rng.sample(range(n_emb), min(sample, n_emb)))
        T = projective_points(d, p, 0, n_sec)
        if n_sec > sample:
            T = T[sorted(rng.sample(range(n_sec), sample))]
    seen = {}
    tried = saturated = 0
    for idx in emb_idx:
        e = projective_points(m, p, idx, idx + 1)[0]
        tried += 1
        if not data.is_saturated(e):
            continue
        saturated += 1
        prods = data.products(T, e)
        kappa = kernel_dims(det, prods)
        if (kappa != d).any():
            raise AssertionError(f"theta_L produced a section outside stratum {d}")
        for row, t in zip(prods, T):
            key = normalize(row, p)
            if key not in seen:
                seen[key] = ResonantPoint(key, d, {
                    "L": _class_json(L),
                    "embedding": [str(int(c)) for c in e],
                    "section_of_L": [str(int(c)) for c in t],
                })
    return ThetaImage(L, tuple(seen[k] for k in sorted(seen)), tried, saturated)


def degree_classes(E: Curve, d: int):
    """Pic^d(F_p), one DivisorClassRep per rational point."""
    return [DivisorClassRep(d, S) for S in enumerate_points(E, 1)]


def find_witness(bundle: SplitBundle, det: DeterminantData, d: int) -> Optional[ResonantPoint]:
    """First resonant section of degree d built as t*e with e saturated,
    scanning classes L in Pic^d(F_p) and embeddings in enumeration order."""
    p = bundle.p
    for L in degree_classes(bundle.curve, d):
        data = _ThetaData(bundle, L)
        m = data.embedding_dim
        if m == 0:
            continue
        for idx in range(projective_count(m, p)):
            e = projective_points(m, p, idx, idx + 1)[0]
            if not data.is_saturated(e):
                continue
            t = np.zeros((1, d), dtype=np.int64)
            t[0, 0] = 1
            s = data.products(t, e)[0]
            kappa = int(kernel_dims(det, [s])[0])
            if kappa != d:
                raise AssertionError(f"saturated embedding of degree {d} gave kappa {kappa}")
            return ResonantPoint(normalize(s, p), kappa, {
                "L": _class_json(L),
                "embedding": [str(int(c)) for c in e],
                "section_of_L": ["1"] + ["0"] * (d - 1),
            })
    return None


def witness_nonempty_strata(bundle: SplitBundle, det: DeterminantData, degrees: Sequence[int]) -> dict:
    """One certified section per degree; a missing witness is an error."""
    out = {}
    for d in sorted(degrees):
        w = find_witness(bundle, det, d)
        if w is None:
            raise WitnessError(f"no witness for predicted stratum {d} of {bundle.describe()}")
        out[d] = w
    return out
