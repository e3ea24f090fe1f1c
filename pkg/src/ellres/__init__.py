"""Resonance varieties of rank-two bundles on elliptic curves over finite fields."""

__version__ = "0.1.0"

from .field import FieldDescriptor, FieldElement, enumerate_elements, extension_field, find_irreducible, prime_field
from .curve import Curve, CurvePoint, Divisor, DivisorClassRep, enumerate_points, lin_equiv, torsion_test
from .funcspace import RationalFunction, SectionSpace, rr_basis, valuation, zero_divisor_oracle
from .bundle import SplitBundle, build_bundle, det_pairing, determinant_kernel
from .resonance import (StrataReport, enumerate_plane_section, enumerate_resonance, phi_kernel_dim,
                        saturation_degree_oracle, stratum_degree, theta_image, witness_nonempty_strata)
from .classifier import NonSplit, Split, classify_grassmann, classify_resonance, classify_strata, expected_counts
