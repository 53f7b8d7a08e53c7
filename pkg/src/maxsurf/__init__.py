"""Maximal space-like surfaces in the neutral space R^4_2.

Holomorphic generating data (a pair (g1, g2) in canonical form, or a triple
(f, g1, g2)) goes in; invariants, field-equation residuals, transformed data
and sampled surface patches come out.
"""

from .holfun import HolExpr, parse
from .invariants import (
    InvariantField,
    canonical_invariants,
    general_invariants,
    invariant_field,
    r31_invariants,
)
from .surface import SurfacePatch, build_patch, export_patch, integrate_psi, verify_patch
from .transforms import (
    MoebiusParams,
    MotionSpec,
    associated_pair,
    coordinate_change_pair,
    equivalence_test,
    homothety_pair,
    hyperplane_test,
    moebius_apply,
    motion_transform_pair,
)
from .weierstrass import GridSpec, HolPair, HolTriple, canonical_parameter, canonicalize

__all__ = [
    "GridSpec",
    "HolExpr",
    "HolPair",
    "HolTriple",
    "InvariantField",
    "MoebiusParams",
    "MotionSpec",
    "SurfacePatch",
    "associated_pair",
    "build_patch",
    "canonical_invariants",
    "canonical_parameter",
    "canonicalize",
    "coordinate_change_pair",
    "equivalence_test",
    "export_patch",
    "general_invariants",
    "homothety_pair",
    "hyperplane_test",
    "integrate_psi",
    "invariant_field",
    "moebius_apply",
    "motion_transform_pair",
    "parse",
    "r31_invariants",
    "verify_patch",
]
