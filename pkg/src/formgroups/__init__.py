"""Finite groups of exponent p and class 2 built from bilinear forms, with
abelian-subgroup invariants, tree and set-family constructions, and a small
theory of automorphisms of finite abelian p-groups."""
from .errors import (CapacityError, DimensionMismatch, FormGroupError, InfeasibleError,
                     PreconditionError, StructuralError)
from .fpspace import BilinearMap, Subspace
from .formgroup import Element, FactorSystem, FormGroup, Subgroup, classify

__version__ = "0.1.0"

__all__ = [
    "BilinearMap", "CapacityError", "DimensionMismatch", "Element", "FactorSystem",
    "FormGroup", "FormGroupError", "InfeasibleError", "PreconditionError",
    "StructuralError", "Subgroup", "Subspace", "classify",
]
