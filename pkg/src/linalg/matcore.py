"""Dense complex linear algebra for small multi-qubit operators (dim <= 16).

Qubit ordering is big-endian: qubit 0 is the leftmost tensor factor and
the most significant bit of a basis index, so |0011> is index 3.

Matrices are plain numpy complex arrays (``CMat``). The eigensolver is a
cyclic complex Jacobi iteration: each rotation first removes the phase of
the pivot, then applies the real symmetric rotation that zeroes it.
"""

from functools import reduce
from math import copysign, hypot, sqrt
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.utils.logging import log, get_logger

MODULE = "matcore"
logger = get_logger()

CMat = np.ndarray

MAX_DIM = 16
MAX_SWEEPS = 64
# Sweeps stop once the off-diagonal Frobenius norm falls below this × scale
OFF_DIAG_TOL = 1e-14
HERMITIAN_TOL = 1e-12


class DimensionMismatchError(ValueError):
    """Raised when matrix shapes or subsystem dimensions disagree."""


class EigenConvergenceError(ArithmeticError):
    """Raised when Jacobi sweeps hit the cap before the matrix is diagonal."""

    def __init__(self, message: str, sweeps: int, off_norm: float):
        super().__init__(message)
        self.sweeps = sweeps
        self.off_norm = off_norm


class EigDecomposition(BaseModel):
    """Ascending real spectrum and orthonormal eigenvectors (columns)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @field_validator("eigenvalues", "eigenvectors")
    @classmethod
    def read_only(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v)
        v.flags.writeable = False
        return v

    def reconstruct(self) -> CMat:
        """Sum of lambda_j v_j v_j^dagger."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmat(m) -> CMat:
    """Square complex128 copy of ``m``."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: CMat) -> CMat:
    return np.conj(m).T


def scale_of(m: CMat) -> float:
    """max(1, largest |entry|); tolerances are relative to this."""
    return max(1.0, float(np.abs(m).max())) if m.size else 1.0


def allclose(a: CMat, b: CMat, tol: float = HERMITIAN_TOL) -> bool:
    """Element-wise absolute comparison scaled by max(1, largest |entry|)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.abs(a - b).max(initial=0.0) <= tol * max(scale_of(a), scale_of(b)))


def is_hermitian(m: CMat, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - dagger(m)).max(initial=0.0) <= tol * scale_of(m))


def tensor(a: CMat, b: CMat) -> CMat:
    """Kronecker product; ``a`` is the lower qubit index."""
    return np.kron(a, b)


def tensor_all(*factors: CMat) -> CMat:
    return reduce(tensor, factors)


def embed(op: CMat, target: int, n_qubits: int) -> CMat:
    """Lift a single-qubit operator onto ``target`` of an n-qubit register."""
    if not 0 <= target < n_qubits:
        raise DimensionMismatchError(f"qubit {target} outside register of {n_qubits}")
    left = np.eye(2 ** target, dtype=np.complex128)
    right = np.eye(2 ** (n_qubits - target - 1), dtype=np.complex128)
    return tensor_all(left, np.asarray(op, dtype=np.complex128), right)


def partial_trace(m: CMat, dims: Sequence[int], keep: Sequence[int]) -> CMat:
    """Reduced matrix over the subsystems in ``keep`` (kept in ascending order).

    An empty ``keep`` traces everything out and returns the 1x1 full trace.
    """
    m = as_cmat(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise DimensionMismatchError(
            f"subsystem dims {dims} do not multiply to matrix dimension {m.shape[0]}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} outside {len(dims)} subsystems")

    n = len(dims)
    rows = [chr(ord("a") + i) for i in range(n)]
    cols = [chr(ord("a") + n + i) for i in range(n)]
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{out}", m.reshape(dims + dims))
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def _off_norm(a: CMat) -> float:
    return float(sqrt(max(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2), 0.0)))


def eigh(m: CMat, *, max_sweeps: int = MAX_SWEEPS) -> EigDecomposition:
    """Full Hermitian eigendecomposition by cyclic complex Jacobi rotations.

    The input is symmetrized as (M + M^dagger)/2 first.

    Raises:
        DimensionMismatchError: non-square input or dimension above MAX_DIM.
        EigenConvergenceError: sweep cap reached (ill-conditioned input).
    """
    a = as_cmat(m)
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatchError(f"dimension {n} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise EigenConvergenceError("matrix has non-finite entries", sweeps=0, off_norm=float("nan"))
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    threshold = OFF_DIAG_TOL * max(scale_of(a), float(np.linalg.norm(a)))

    sweeps = 0
    off = _off_norm(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            log.error(logger, MODULE, "eigh_failed", "Jacobi sweep cap reached",
                      dim=n, sweeps=sweeps, off_norm=off)
            raise EigenConvergenceError(
                f"Jacobi did not converge after {sweeps} sweeps (off-norm {off:.3e})",
                sweeps=sweeps, off_norm=off,
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = copysign(1.0, tau) / (abs(tau) + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # diag(1, conj(phase)) makes the pivot real, then a real rotation zeroes it
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
        sweeps += 1
        off = _off_norm(a)

    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return EigDecomposition(
        eigenvalues=values[order],
        eigenvectors=v[:, order],
        sweeps=sweeps,
    )
