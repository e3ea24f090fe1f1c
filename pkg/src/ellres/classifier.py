"""Symbolic description of resonance and of the Grassmannian section G(E)
for rank-two bundles on an elliptic curve.

Bundles are either split, O(aP) + O(bQ) with a <= b, or non-split of a
given degree.  For split bundles the only relation between P and Q that
matters is whether aP ~ aQ, and only when a = b.

Every clause of an answer carries a rule tag naming the case of the
analysis it comes from; :data:`RULES` maps tags to one-line summaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .curve import Curve, CurvePoint, torsion_test

RULES = {
    "nonsplit-empty": "non-split bundles of degree < 4 have no resonance",
    "nonsplit-linear": "non-split bundles of degree >= 4: resonance is P^{d-1}, d = floor(deg/2)",
    "nonsplit-ambient": "ambient of a non-split bundle is P^{deg-1}",
    "nonsplit-grassmann": "G(E) of a non-split bundle is Gr(2, d) for its unique maximal subpencil",
    "small-summand": "a <= 1: only O(bQ) is a saturated subpencil; resonance is P^{b-1} or empty",
    "small-summand-grassmann": "a <= 1: G(E) is Gr(2, b), empty for b < 2",
    "equal-2-apart": "(2,2), 2P !~ 2Q: two disjoint lines in P^3",
    "equal-2-together": "(2,2), 2P ~ 2Q: Segre quadric P^1 x P^1 in P^3",
    "two-b": "(2,b), b >= 3: closure of R_2 = P^1 x A^{b-2} and R_b = P^{b-1}, both of dim b-1",
    "equal-3-apart": "(3,3), 3P !~ 3Q: resonance is the closure of R_2, dim 3",
    "equal-3-together": "(3,3), 3P ~ 3Q: Segre P^2 x P^1 in P^5",
    "general": "3 <= a <= b, (a,b) != (3,3): closure of R_2, dim a+b-3, unique top component",
    "strata-support": "non-empty strata are 2..a and b",
    "strata-gap": "a = b with aP ~ aQ: stratum a-1 is empty",
    "embed-top": "degree-b (or degree-a when a = b) subpencils are the summands themselves",
    "embed-a-lt-b": "degree-a subpencil O(aP) embeds saturated via sections of O(bQ - aP)",
    "embed-a-eq-b-together": "a = b, aP ~ aQ: saturated copies of O(aP) form a P^1",
    "grassmann-bound": "number of components of G(E) is at least the number of non-empty strata",
    "grassmann-irreducible": "for 2 <= a <= b, G(E) is irreducible iff a = b in {2,3} and aP ~ aQ",
    "grassmann-middle": "strata G_d, 2 <= d < a, have dimension a+b-4 and a unique top component",
    "connectivity": "dim K < 2 dim V - 4 makes the linear section connected (annotation only)",
}


@dataclass(frozen=True)
class Split:
    a: int
    b: int
    equiv: Optional[bool] = None
    curve: Optional[Curve] = field(default=None, compare=False)
    P: Optional[CurvePoint] = field(default=None, compare=False)
    Q: Optional[CurvePoint] = field(default=None, compare=False)

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError("split descriptor needs a <= b")
        if self.a == self.b >= 2 and self.equiv is None:
            raise ValueError("a = b needs the equivalence bit aP ~ aQ")
        if self.curve is not None and self.a == self.b >= 2:
            actual = torsion_test(self.curve, self.P, self.Q, self.a)
            if actual != bool(self.equiv):
                raise ValueError(f"equiv={self.equiv} but {self.a}P ~ {self.a}Q is {actual}")

    @classmethod
    def from_points(cls, E: Curve, a: int, P: CurvePoint, b: int, Q: CurvePoint) -> "Split":
        if a > b:
            a, P, b, Q = b, Q, a, P
        equiv = torsion_test(E, P, Q, a) if a == b else None
        return cls(a, b, equiv, E, P, Q)

    @property
    def label(self) -> str:
        tail = ""
        if self.a == self.b >= 2:
            tail = "~" if self.equiv else "!~"
        return f"split({self.a},{self.b}){tail}"

    def to_json(self) -> dict:
        return {"kind": "split", "a": str(self.a), "b": str(self.b),
                "equiv": None if self.equiv is None else bool(self.equiv)}


@dataclass(frozen=True)
class NonSplit:
    degree: int

    @property
    def label(self) -> str:
        return f"nonsplit({self.degree})"

    def to_json(self) -> dict:
        return {"kind": "nonsplit", "degree": str(self.degree)}


BundleDescriptor = Union[Split, NonSplit]


@dataclass(frozen=True)
class Clause:
    key: str
    value: object
    rule: str

    def to_json(self) -> dict:
        return {"key": self.key, "value": _jsonable(self.value), "rule": self.rule}


def _jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass(frozen=True)
class Stratum:
    degree: int
    nonempty: bool
    rule: str

    def to_json(self) -> dict:
        return {"degree": str(self.degree), "nonempty": self.nonempty, "rule": self.rule}


@dataclass(frozen=True)
class ResonanceDescription:
    variant: str
    params: dict
    rule: str
    strata: tuple
    connectivity: Optional[str] = None
    clauses: tuple = ()

    @property
    def dimension(self) -> Optional[int]:
        """Dimension of R(E); None when empty."""
        return self.params.get("dim")

    @property
    def nonempty_degrees(self) -> tuple:
        return tuple(s.degree for s in self.strata if s.nonempty)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "params": _jsonable(self.params),
            "rule": self.rule,
            "strata": [s.to_json() for s in self.strata],
            "connectivity": self.connectivity,
            "clauses": [c.to_json() for c in self.clauses],
        }


@dataclass(frozen=True)
class GrassmannStratum:
    degree: int
    shape: str
    dim: int
    unique_max_component: bool
    rule: str

    def to_json(self) -> dict:
        return {"degree": str(self.degree), "shape": self.shape, "dim": str(self.dim),
                "unique_max_component": self.unique_max_component, "rule": self.rule}


@dataclass(frozen=True)
class GrassmannDescription:
    strata: tuple
    component_lower_bound: int
    irreducible: bool
    rule: str
    components_known: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "strata": [s.to_json() for s in self.strata],
            "component_lower_bound": str(self.component_lower_bound),
            "components_known": None if self.components_known is None else str(self.components_known),
            "irreducible": self.irreducible,
            "rule": self.rule,
        }


# ---------------------------------------------------------------------------

def _h0(d: int) -> int:
    """h^0 of a line bundle O(dR) on an elliptic curve."""
    return d if d >= 1 else (1 if d == 0 else 0)


def _ambient(desc: BundleDescriptor) -> int:
    if isinstance(desc, NonSplit):
        return desc.degree - 1
    return _h0(desc.a) + _h0(desc.b) - 1


def _connectivity(desc: BundleDescriptor) -> Optional[str]:
    # The defining subspace has dimension at most h^0(det E) = deg E.
    if isinstance(desc, NonSplit):
        dim_v, deg = max(desc.degree, 0), desc.degree
    else:
        dim_v, deg = _h0(desc.a) + _h0(desc.b), desc.a + desc.b
    bound = max(min(deg, dim_v * (dim_v - 1) // 2), 0)
    if dim_v >= 2 and bound < 2 * dim_v - 4:
        return f"connected: dim K <= {bound} < {2 * dim_v - 4} = 2 dim V - 4"
    return None


def classify_strata(desc: BundleDescriptor) -> tuple:
    """(degree, non-empty) for every candidate degree, ascending."""
    if isinstance(desc, NonSplit):
        if desc.degree < 4:
            return ()
        return (Stratum(desc.degree // 2, True, "nonsplit-linear"),)
    a, b = desc.a, desc.b
    if b < 2:
        return ()
    if a <= 1:
        return tuple(Stratum(d, d == b, "small-summand") for d in range(2, b + 1))
    out = []
    for d in range(2, b + 1):
        if d == b or d == a:
            out.append(Stratum(d, True, "embed-top" if d == b else "embed-a-lt-b"))
        elif d < a:
            if a == b and desc.equiv and d == a - 1:
                out.append(Stratum(d, False, "strata-gap"))
            else:
                out.append(Stratum(d, True, "strata-support"))
        else:
            out.append(Stratum(d, False, "strata-support"))
    return tuple(out)


def classify_resonance(desc: BundleDescriptor) -> ResonanceDescription:
    strata = classify_strata(desc)
    conn = _connectivity(desc)
    amb = _ambient(desc)
    if isinstance(desc, NonSplit):
        if desc.degree < 4:
            return ResonanceDescription("Empty", {}, "nonsplit-empty", strata, None,
                                        (Clause("resonance", "empty", "nonsplit-empty"),))
        d = desc.degree // 2
        return ResonanceDescription(
            "ProjectiveSpace", {"dim": d - 1, "ambient_dim": amb}, "nonsplit-linear", strata, conn,
            (Clause("resonance", f"P^{d - 1}", "nonsplit-linear"),
             Clause("ambient", f"P^{amb}", "nonsplit-ambient")))
    a, b = desc.a, desc.b
    if a <= 1:
        if b < 2:
            return ResonanceDescription("Empty", {}, "small-summand", strata, None,
                                        (Clause("resonance", "empty", "small-summand"),))
        return ResonanceDescription(
            "ProjectiveSpace", {"dim": b - 1, "ambient_dim": amb}, "small-summand", strata, conn,
            (Clause("resonance", f"R_{b} = P^{b - 1}", "small-summand"),))
    if (a, b) == (2, 2):
        if desc.equiv:
            return ResonanceDescription(
                "SegreP1xP1", {"dim": 2, "ambient_dim": 3}, "equal-2-together", strata, conn,
                (Clause("resonance", "R_2 = P^1 x P^1", "equal-2-together"),))
        return ResonanceDescription(
            "TwoDisjointLines", {"dim": 1, "ambient_dim": 3}, "equal-2-apart", strata, conn,
            (Clause("resonance", "R_2 = P^1 + P^1", "equal-2-apart"),))
    if a == 2:
        return ResonanceDescription(
            "TwoMaxComponents",
            {"closure_R2": f"P^1 x A^{b - 2}", "Rb": f"P^{b - 1}", "common_dim": b - 1,
             "dim": b - 1, "ambient_dim": amb},
            "two-b", strata, conn,
            (Clause("components", ["closure(R_2)", f"R_{b}"], "two-b"),
             Clause("R_2", f"P^1 x A^{b - 2}", "two-b"),
             Clause(f"R_{b}", f"P^{b - 1}", "two-b")))
    if (a, b) == (3, 3):
        if desc.equiv:
            return ResonanceDescription(
                "SegreP2xP1", {"dim": 3, "ambient_dim": 5}, "equal-3-together", strata, conn,
                (Clause("resonance", "R_3 = P^2 x P^1", "equal-3-together"),))
        return ResonanceDescription(
            "ClosureOfR2", {"dim": 3, "unique_max_component": True, "ambient_dim": 5},
            "equal-3-apart", strata, conn,
            (Clause("resonance", "closure(R_2)", "equal-3-apart"),
             Clause("R_3", "P^2 + P^2", "equal-3-apart")))
    return ResonanceDescription(
        "ClosureOfR2", {"dim": a + b - 3, "unique_max_component": True, "ambient_dim": amb},
        "general", strata, conn,
        (Clause("resonance", "closure(R_2)", "general"),
         Clause("dimension", a + b - 3, "general"),
         Clause("unique_max_component", True, "general")))


def classify_grassmann(desc: BundleDescriptor) -> GrassmannDescription:
    if isinstance(desc, NonSplit):
        if desc.degree < 4:
            return GrassmannDescription((), 0, False, "nonsplit-empty", 0)
        d = desc.degree // 2
        st = (GrassmannStratum(d, f"Gr(2,{d})", 2 * (d - 2), True, "nonsplit-grassmann"),)
        return GrassmannDescription(st, 1, True, "nonsplit-grassmann", 1)
    a, b = desc.a, desc.b
    if a <= 1:
        if b < 2:
            return GrassmannDescription((), 0, False, "small-summand-grassmann", 0)
        st = (GrassmannStratum(b, f"Gr(2,{b})", 2 * (b - 2), True, "small-summand-grassmann"),)
        return GrassmannDescription(st, 1, True, "small-summand-grassmann", 1)
    st = []
    gap = a - 1 if (a == b and desc.equiv) else None
    for d in range(2, a):
        if d == gap:
            continue
        st.append(GrassmannStratum(d, "fibered over Pic^d", a + b - 4, True, "grassmann-middle"))
    if a < b:
        st.append(GrassmannStratum(a, f"Gr(2,{a}) x A^{b - a}", 2 * (a - 2) + (b - a), True, "embed-a-lt-b"))
        st.append(GrassmannStratum(b, f"Gr(2,{b})", 2 * (b - 2), True, "embed-top"))
    elif desc.equiv:
        st.append(GrassmannStratum(a, f"Gr(2,{a}) x P^1", 2 * (a - 2) + 1, True, "embed-a-eq-b-together"))
    else:
        st.append(GrassmannStratum(a, f"Gr(2,{a}) + Gr(2,{a})", 2 * (a - 2), False, "embed-top"))
    irreducible = a == b and a in (2, 3) and bool(desc.equiv)
    known = None
    if irreducible:
        known = 1
    elif (a, b) == (2, 2):
        known = 2
    return GrassmannDescription(tuple(st), len(st), irreducible, "grassmann-irreducible", known)


# ---------------------------------------------------------------------------
# F_q point counts of the named shapes

def q_int(n: int, q: int) -> int:
    """[n]_q = #P^{n-1}(F_q)."""
    return (q ** n - 1) // (q - 1) if n > 0 else 0


def q_binom2(n: int, q: int) -> int:
    """[n choose 2]_q = #Gr(2, n)(F_q)."""
    if n < 2:
        return 0
    return q_int(n, q) * q_int(n - 1, q) // (q + 1)


def expected_counts(desc: BundleDescriptor, q: int) -> dict:
    """Predicted point counts per stratum, or a ``dimension-only`` marker
    where only the dimension is determined.  Totals are given when every
    non-empty stratum has an exact count."""
    R: dict = {}
    G: dict = {}
    if isinstance(desc, NonSplit):
        if desc.degree >= 4:
            d = desc.degree // 2
            R[d], G[d] = q_int(d, q), q_binom2(d, q)
    else:
        a, b = desc.a, desc.b
        if a <= 1:
            if b >= 2:
                R[b], G[b] = q_int(b, q), q_binom2(b, q)
        else:
            for s in classify_strata(desc):
                d = s.degree
                if not s.nonempty:
                    R[d] = G[d] = 0
                elif d < a:
                    R[d] = f"dimension-only: {a + b - d - 1} fibered over C"
                    G[d] = f"dimension-only: {a + b - 4}"
            if a < b:
                R[a] = q_int(a, q) * q ** (b - a)
                G[a] = q_binom2(a, q) * q ** (b - a)
                R[b], G[b] = q_int(b, q), q_binom2(b, q)
            elif desc.equiv:
                R[a], G[a] = q_int(a, q) * (q + 1), q_binom2(a, q) * (q + 1)
            else:
                R[a], G[a] = 2 * q_int(a, q), 2 * q_binom2(a, q)

    def total(counts):
        if all(isinstance(v, int) for v in counts.values()):
            return sum(counts.values())
        return "dimension-only"

    return {"R": dict(sorted(R.items())), "G": dict(sorted(G.items())),
            "R_total": total(R), "G_total": total(G)}


def counts_to_json(counts: dict) -> dict:
    return _jsonable(counts)
