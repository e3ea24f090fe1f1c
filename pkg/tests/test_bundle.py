import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellres.bundle import (BundleError, build_bundle, det_pairing, determinant_kernel, plane_in_section, plucker,
                           wedge_pairs)
from ellres.curve import Curve
from ellres.funcspace import is_zero_function

E5 = Curve(5, 0, 1)
O, P3, Q6, T2 = E5.infinity(), E5.point(0, 1), E5.point(2, 2), E5.point(4, 0)

BUNDLES = {
    "2,2 apart": (2, O, 2, Q6),
    "2,2 together": (2, O, 2, T2),
    "2,3": (2, O, 3, Q6),
    "1,3": (1, P3, 3, Q6),
    "3,3 apart": (3, O, 3, Q6),
}


def bundle(name):
    a, P, b, Q = BUNDLES[name]
    return build_bundle(E5, a, P, b, Q)


def sections(B):
    return st.lists(st.integers(0, B.p - 1), min_size=B.n, max_size=B.n).map(B.section)


@pytest.mark.parametrize("name", BUNDLES)
def test_kernel_bound_and_basis(name):
    B = bundle(name)
    det = determinant_kernel(B)
    assert det.domain_dim == comb(B.n, 2)
    assert det.kernel_dim + det.rank == det.domain_dim
    assert det.kernel_dim >= comb(B.n, 2) - B.n
    assert det.rank <= B.n            # image sits in L(aP + bQ)
    for v in det.kernel:
        assert det.in_kernel(v)


@pytest.mark.parametrize("name", ["2,2 apart", "2,3", "1,3"])
def test_kernel_matches_function_arithmetic(name):
    # d2 of each wedge is zero exactly when the determinant function vanishes
    B = bundle(name)
    det = determinant_kernel(B)
    basis = [B.section([int(i == m) for i in range(B.n)]) for m in range(B.n)]
    for v in itertools.chain(det.kernel, [tuple(int(k == w) for k in range(det.domain_dim))
                                           for w in range(det.domain_dim)]):
        f = None
        for coeff, (i, j) in zip(v, wedge_pairs(B.n)):
            if coeff:
                g = det_pairing(B, basis[i], basis[j]) * coeff
                f = g if f is None else f + g
        zero = f is None or is_zero_function(E5, f, B.n, avoid=(B.P, B.Q))
        assert zero == det.in_kernel(v)


@pytest.mark.parametrize("name", ["2,2 apart", "3,3 apart"])
def test_independent_evaluation_points_agree(name):
    B = bundle(name)
    d0, d1 = determinant_kernel(B), determinant_kernel(B, point_offset=B.n + 1)
    assert set(d0.points).isdisjoint(d1.points)
    assert d0.kernel == d1.kernel


@settings(max_examples=40)
@given(st.data())
def test_det_pairing_is_alternating(data):
    B = bundle(data.draw(st.sampled_from(["2,2 apart", "2,3"])))
    s, t = data.draw(sections(B)), data.draw(sections(B))
    assert det_pairing(B, s, s).is_zero()
    assert (det_pairing(B, s, t) + det_pairing(B, t, s)).is_zero()


@settings(max_examples=40)
@given(st.data())
def test_plane_membership_matches_determinant(data):
    B = bundle(data.draw(st.sampled_from(["2,2 together", "2,3"])))
    det = determinant_kernel(B)
    s, t = data.draw(sections(B)), data.draw(sections(B))
    vec = tuple((s.coords[i] * t.coords[j] - s.coords[j] * t.coords[i]) % B.p for i, j in wedge_pairs(B.n))
    if not any(vec):
        with pytest.raises(BundleError):
            plucker(B, s, t)
        return
    assert plucker(B, s, t) == vec
    zero = is_zero_function(E5, det_pairing(B, s, t), B.n, avoid=(B.P, B.Q))
    assert plane_in_section(det, s, t) == zero


def test_plucker_is_projective_invariant_of_the_plane():
    B = bundle("2,3")
    s, t = B.section([1, 2, 0, 3, 4]), B.section([0, 1, 1, 1, 0])
    u = B.section([(2 * x + 3 * y) % 5 for x, y in zip(s.coords, t.coords)])
    w1, w2 = np.array(plucker(B, s, t)), np.array(plucker(B, s, u))
    assert not ((w2 - 3 * w1) % 5).any()


def test_build_bundle_swaps_and_validates():
    B = build_bundle(E5, 3, Q6, 2, O)
    assert (B.a, B.P, B.b, B.Q) == (2, O, 3, Q6)
    assert B.note
    assert build_bundle(E5, 2, O, 3, Q6).note is None
    with pytest.raises(BundleError):
        build_bundle(E5, 0, O, 3, Q6)
    E7 = Curve(7, 3, 2)
    with pytest.raises(BundleError):
        build_bundle(E5, 2, O, 2, E7.infinity())
    with pytest.raises(BundleError):
        B.section([1, 2])


def test_section_pairs_and_basis():
    B = bundle("2,3")
    assert B.first.dimension == 2 and B.second.dimension == 3
    f1, f2 = B.section([0, 0, 1, 0, 0]).pair
    assert f1.is_zero() and not f2.is_zero()
    s = B.section([1, 4, 2, 0, 3])
    assert B.section_from_pair(*s.pair) == s
    assert B.section([5, 10, 0, 0, 0]).is_zero()
