"""Exact number-field arithmetic, polynomial families and torus dynamics at desk scale."""
from __future__ import annotations

from .errors import RingDynError
from .intpoly import (
    PolyOverK,
    certify_family,
    coordinate_expand,
    independence_with_constants,
    intersective_shift,
    is_ok_valued,
    jacobian_alg_independence,
    joint_intersectivity_search,
)
from .multipoly import MultiPolyQ
from .reals import QuadraticReal, SymbolicReal
from .ring import (
    AlgebraicInteger,
    AlgebraicNumber,
    NumberFieldSpec,
    conjugates_negate,
    make_field,
    min_poly_of,
    mul,
    mult_matrix,
    residues,
    subgroup_membership,
)

__all__ = [
    "AlgebraicInteger",
    "AlgebraicNumber",
    "MultiPolyQ",
    "NumberFieldSpec",
    "PolyOverK",
    "QuadraticReal",
    "RingDynError",
    "SymbolicReal",
    "certify_family",
    "conjugates_negate",
    "coordinate_expand",
    "independence_with_constants",
    "intersective_shift",
    "is_ok_valued",
    "jacobian_alg_independence",
    "joint_intersectivity_search",
    "make_field",
    "min_poly_of",
    "mul",
    "mult_matrix",
    "residues",
    "subgroup_membership",
]
