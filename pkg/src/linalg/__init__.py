"""Small dense complex linear algebra (matcore)."""

from src.linalg.matcore import (
    CMat,
    DimensionMismatchError,
    EigDecomposition,
    EigenConvergenceError,
    allclose,
    dagger,
    eigh,
    embed,
    is_hermitian,
    partial_trace,
    tensor,
    tensor_all,
)

__all__ = [
    "CMat",
    "DimensionMismatchError",
    "EigDecomposition",
    "EigenConvergenceError",
    "allclose",
    "dagger",
    "eigh",
    "embed",
    "is_hermitian",
    "partial_trace",
    "tensor",
    "tensor_all",
]
