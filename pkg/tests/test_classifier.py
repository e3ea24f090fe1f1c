import json

import pytest
from hypothesis import given, strategies as st

from ellres.classifier import (RULES, NonSplit, Split, classify_grassmann, classify_resonance, classify_strata,
                               counts_to_json, expected_counts, q_binom2, q_int)
from ellres.curve import Curve
from ellres.resonance import gaussian_binomial_2, projective_count


@st.composite
def split_descriptors(draw, max_b=14):
    b = draw(st.integers(0, max_b))
    a = draw(st.integers(0, b))
    equiv = draw(st.booleans()) if a == b >= 2 else None
    return Split(a, b, equiv)


descriptors = st.one_of(split_descriptors(), st.integers(-2, 24).map(NonSplit))


@given(descriptors)
def test_every_descriptor_is_classified(desc):
    R, G = classify_resonance(desc), classify_grassmann(desc)
    tags = {R.rule, G.rule} | {c.rule for c in R.clauses} | {s.rule for s in R.strata} | {s.rule for s in G.strata}
    assert tags <= set(RULES)
    json.dumps(R.to_json()), json.dumps(G.to_json())
    assert R.strata == classify_strata(desc)


@given(split_descriptors())
def test_strata_support(desc):
    a, b = desc.a, desc.b
    got = set(classify_resonance(desc).nonempty_degrees)
    if b < 2:
        assert got == set()
    elif a <= 1:
        assert got == {b}
    else:
        want = set(range(2, a + 1)) | {b}
        if a == b and desc.equiv:
            want.discard(a - 1)
        assert got == want
    assert all(2 <= s.degree <= max(b, 2) for s in classify_strata(desc))


@given(split_descriptors())
def test_grassmann_invariants(desc):
    G = classify_grassmann(desc)
    assert G.component_lower_bound == len(G.strata)
    degrees = [s.degree for s in G.strata]
    assert degrees == sorted(set(degrees))
    R = classify_resonance(desc)
    assert set(degrees) == set(R.nonempty_degrees)
    if desc.a >= 2:
        assert G.irreducible == (desc.a == desc.b and desc.a in (2, 3) and bool(desc.equiv))
        for s in G.strata:
            if s.degree < desc.a:
                assert s.dim == desc.a + desc.b - 4
    if G.irreducible:
        assert G.component_lower_bound == 1


@given(split_descriptors())
def test_resonance_dimension_and_ambient(desc):
    a, b = desc.a, desc.b
    R = classify_resonance(desc)
    if b < 2:
        assert R.variant == "Empty" and R.dimension is None
        return
    h0 = (a if a >= 1 else 1) + b
    assert R.params["ambient_dim"] == h0 - 1
    assert R.dimension < h0 - 1
    if a >= 3 and (a, b) != (3, 3):
        assert R.dimension == a + b - 3 and R.params["unique_max_component"]


@given(st.integers(-2, 30))
def test_nonsplit(deg):
    R, G = classify_resonance(NonSplit(deg)), classify_grassmann(NonSplit(deg))
    if deg < 4:
        assert R.variant == "Empty" and not G.strata
    else:
        d = deg // 2
        assert R.variant == "ProjectiveSpace"
        assert R.params == {"dim": d - 1, "ambient_dim": deg - 1}
        assert [(s.degree, s.shape) for s in G.strata] == [(d, f"Gr(2,{d})")]


@pytest.mark.parametrize("desc,variant,dim", [
    (Split(2, 2, True), "SegreP1xP1", 2),
    (Split(2, 2, False), "TwoDisjointLines", 1),
    (Split(2, 5), "TwoMaxComponents", 4),
    (Split(3, 3, True), "SegreP2xP1", 3),
    (Split(3, 3, False), "ClosureOfR2", 3),
    (Split(4, 7), "ClosureOfR2", 8),
    (Split(1, 1), "Empty", None),
    (Split(0, 4), "ProjectiveSpace", 3),
    (NonSplit(9), "ProjectiveSpace", 3),
    (NonSplit(3), "Empty", None),
])
def test_named_cases(desc, variant, dim):
    R = classify_resonance(desc)
    assert (R.variant, R.dimension) == (variant, dim)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        Split(3, 2)
    with pytest.raises(ValueError):
        Split(2, 2)
    E = Curve(5, 0, 1)
    O, T = E.infinity(), E.point(4, 0)
    with pytest.raises(ValueError):
        Split(2, 2, False, E, O, T)            # 2O ~ 2T for T of order 2
    assert Split.from_points(E, 2, O, 2, T).equiv is True
    assert Split.from_points(E, 3, T, 2, O) == Split(2, 3)
    assert Split(2, 2, True).label == "split(2,2)~"


@given(st.integers(0, 9), st.sampled_from([2, 3, 4, 5, 7, 9, 11]))
def test_q_numbers(n, q):
    assert q_int(n, q) == (projective_count(n, q) if n else 0)
    assert q_binom2(n, q) == gaussian_binomial_2(n, q)
    assert q_int(n, q) == sum(q ** i for i in range(n))


@given(split_descriptors(max_b=9))
def test_exact_counts_grow_like_the_dimension(desc):
    # a count c(q) of a variety of dimension m satisfies c(q) ~ k q^m
    a, b = desc.a, desc.b
    q = 101
    counts = expected_counts(desc, q)
    for d, c in counts["R"].items():
        if isinstance(c, int) and c:
            if a == b:
                dim = a if desc.equiv else a - 1       # P^{a-1} x P^1, or two copies of P^{a-1}
            else:
                dim = b - 1                            # R_b = P^{b-1}; R_a is P^{a-1} x A^{b-a}
            assert q ** dim <= c < 3 * q ** dim
    for d, c in counts["G"].items():
        if isinstance(c, str):
            assert c.startswith("dimension-only")


def test_count_examples():
    assert expected_counts(Split(2, 2, False), 5)["R"] == {2: 12}
    assert expected_counts(Split(2, 2, True), 5)["G"] == {2: 6}
    c = expected_counts(Split(2, 3), 3)
    assert c["R"] == {2: 12, 3: 13} and c["G"] == {2: 3, 3: 13}
    assert c["R_total"] == 25
    c = expected_counts(Split(3, 3, True), 5)
    assert c["R"] == {2: 0, 3: 186} and c["G"] == {2: 0, 3: 186}
    c = expected_counts(Split(4, 4, False), 5)
    assert c["R"][4] == 312 and c["R"][2].startswith("dimension-only")
    assert c["R_total"] == "dimension-only"
    assert counts_to_json(c)["R"]["4"] == "312"
    assert expected_counts(NonSplit(8), 5)["R"] == {4: 156}
