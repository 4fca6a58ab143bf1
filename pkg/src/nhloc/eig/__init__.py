"""Dense complex eigensolver: Hessenberg reduction, shifted QR, Schur-vector back-substitution."""

from .solver import (
    RESIDUAL_TOLERANCE,
    LeftVectorMatch,
    Spectrum,
    eig,
    eig_small_batch,
    eigvals,
    left_vectors_generic,
    residual,
)

__all__ = [
    "RESIDUAL_TOLERANCE",
    "LeftVectorMatch",
    "Spectrum",
    "eig",
    "eig_small_batch",
    "eigvals",
    "left_vectors_generic",
    "residual",
]
