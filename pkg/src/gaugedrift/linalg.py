"""Dense complex linear algebra kernels used throughout the simulator.

All tolerances live here so every module checks against the same numbers:
operator-level comparisons use OPERATOR_TOL, vector-level comparisons use
VECTOR_TOL.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "OPERATOR_TOL",
    "VECTOR_TOL",
    "HERMITICITY_TOL",
    "NORMALIZED_TOL",
    "max_abs",
    "hermitian_eig",
    "expm_i_hermitian",
    "apply",
    "overlap",
    "normalize",
    "check_normalized",
]

OPERATOR_TOL = 1e-10     # unitarity, reconstruction, commutator checks
VECTOR_TOL = 1e-12       # state amplitudes, idempotence on vectors
HERMITICITY_TOL = 1e-12  # max deviation ||M - M^dag||_max accepted as Hermitian
NORMALIZED_TOL = 1e-9    # |norm - 1| allowed for states labeled "normalized"


def max_abs(m: np.ndarray) -> float:
    """Largest entry magnitude (the max norm used by the tolerance checks)."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def _as_square_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition M = Q diag(w) Q^dag of a Hermitian matrix.

    Eigenvalues are returned ascending. Rejects non-square or visibly
    non-Hermitian input rather than symmetrizing silently.
    """
    m = _as_square_matrix(m, "matrix")
    dev = max_abs(m - m.conj().T)
    if dev > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian: ||M - M^dag||_max = {dev:.3e}")
    w, q = np.linalg.eigh(m)
    return w, q


def expm_i_hermitian(h: np.ndarray, sign: int) -> np.ndarray:
    """exp(sign * i * H) for Hermitian H, via eigendecomposition.

    At the dimensions used here this is the simplest path and the result is
    unitary up to roundoff.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    w, q = hermitian_eig(h)
    return (q * np.exp(sign * 1j * w)) @ q.conj().T


def apply(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product with a dimension check."""
    m = np.asarray(m, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {m.shape} applied to vector {v.shape}")
    return m @ v


def overlap(u: np.ndarray, v: np.ndarray) -> complex:
    """Inner product <u|v>, conjugate-linear in the first argument."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / nrm


def check_normalized(v: np.ndarray, tol: float = NORMALIZED_TOL) -> None:
    dev = abs(np.linalg.norm(v) - 1.0)
    if dev > tol:
        raise ValueError(f"state is not normalized: |norm - 1| = {dev:.3e}")
