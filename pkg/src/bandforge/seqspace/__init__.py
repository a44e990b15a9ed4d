"""Sparse vectors over the standard basis of l2(N) and banded operator models."""

from .family import OrthoFamily, orthonormalize, residual
from .finvec import PRUNE, FinVec, combine, inner_product, stack_dense
from .operators import (
    Affine,
    Diagonal,
    DirectSum,
    OperatorModel,
    Perturbed,
    Shift,
    ToeplitzBanded,
    WeightedShift,
    apply,
    apply_adjoint,
    matrix_entry,
    operator_from_json,
    scaled,
)

__all__ = [
    "PRUNE",
    "FinVec",
    "OrthoFamily",
    "OperatorModel",
    "Shift",
    "WeightedShift",
    "Diagonal",
    "ToeplitzBanded",
    "Affine",
    "DirectSum",
    "Perturbed",
    "apply",
    "apply_adjoint",
    "combine",
    "inner_product",
    "matrix_entry",
    "operator_from_json",
    "orthonormalize",
    "residual",
    "scaled",
    "stack_dense",
]
