"""Homogeneous quadratic systems on R^3 and their commutative algebras."""
from .algebra import AdaptedConstants, StructureTensor, annihilator, change_basis, conjugate, multiply, vector_field
from .catalog import CATALOG, ParamOutOfRange, entry
from .classifier import ClassificationResult, FamilyLabel, classify, emit_canonical, is_isomorphism
from .derivations import (
    NotFound,
    constraint_solution_dimension,
    derivation_algebra,
    find_semisimple_onedim_kernel,
)
from .numeric import NotRational, SingularMatrixError

__all__ = [
    "AdaptedConstants",
    "CATALOG",
    "ClassificationResult",
    "FamilyLabel",
    "NotFound",
    "NotRational",
    "ParamOutOfRange",
    "SingularMatrixError",
    "StructureTensor",
    "annihilator",
    "change_basis",
    "classify",
    "conjugate",
    "constraint_solution_dimension",
    "derivation_algebra",
    "emit_canonical",
    "entry",
    "find_semisimple_onedim_kernel",
    "is_isomorphism",
    "multiply",
    "vector_field",
]
