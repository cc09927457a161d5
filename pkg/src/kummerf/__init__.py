"""Exact verification of torus-action structures on Kummer-type orbifolds, plus collapse numerics."""

from .torus import (AffineMap, FiniteGroup, Slab, TorusError, TorusPoint, compose, fixed_locus,
                    group_closure)
from .regions import Region, TubeConstraint, check_cover, contains, pairwise_disjoint
from .actions import (ChartAction, PairRotation, Tagging, TranslationFlow, commute_check,
                      equivariance_check, orbit_dim_at)
from .structure import SpecError, StructureSpec, build_model, load_spec, parse_spec, serialize_spec
from .verify import VerificationReport, VerifyConfig, check_polarized, derive_claims, verify

__all__ = [
    "AffineMap", "FiniteGroup", "Slab", "TorusError", "TorusPoint", "compose", "fixed_locus",
    "group_closure", "Region", "TubeConstraint", "check_cover", "contains", "pairwise_disjoint",
    "ChartAction", "PairRotation", "Tagging", "TranslationFlow", "commute_check",
    "equivariance_check", "orbit_dim_at", "SpecError", "StructureSpec", "build_model", "load_spec",
    "parse_spec", "serialize_spec", "VerificationReport", "VerifyConfig", "check_polarized",
    "derive_claims", "verify",
]
