"""Coherent gauge-drift unitaries and their physical/unphysical block algebra.

Two drift constructions are provided: the closed-form two-level rotation on
the Z2 two-link space, and a generic drift built by exponentiating the
unphysical projection H - PHP of a random Hermitian matrix. Any unitary can
be split into a block-diagonal part plus the off-block coupling between the
physical and unphysical subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import GaugeProjector, LatticeModel
from .linalg import expm_i_hermitian

__all__ = [
    "DriftSpec",
    "BlockDecomposition",
    "RESAMPLE_MODES",
    "z2_rotation_drift",
    "random_hermitian_generator",
    "random_drift",
    "block_decompose",
    "first_appearance_expansion",
]

RESAMPLE_MODES = ("never", "per-trajectory", "per-step")


@dataclass(frozen=True)
class DriftSpec:
    """Serializable description of the drift model used by an experiment.

    kind "z2_rotation" takes ``epsilon``; kind "random_hermitian" takes
    ``amplitude`` and ``seed`` plus a ``resample`` policy: "never" shares one
    drift across the whole experiment (a systematic coherent error, the
    default), "per-trajectory" fixes a fresh drift per trajectory, and
    "per-step" redraws it every step.
    """

    kind: str
    epsilon: float | None = None
    amplitude: float | None = None
    seed: int | None = None
    resample: str = "never"

    def __post_init__(self):
        if self.kind == "z2_rotation":
            if self.epsilon is None or not 0.0 <= self.epsilon <= 1.0:
                raise ValueError(f"z2_rotation drift needs epsilon in [0, 1], got {self.epsilon}")
        elif self.kind == "random_hermitian":
            if self.amplitude is None or self.amplitude <= 0.0:
                raise ValueError(
                    f"random_hermitian drift needs a positive amplitude, got {self.amplitude}"
                )
            if self.seed is None:
                raise ValueError("random_hermitian drift needs an explicit seed")
        else:
            raise ValueError(f"unknown drift kind {self.kind!r}")
        if self.resample not in RESAMPLE_MODES:
            raise ValueError(f"resample must be one of {RESAMPLE_MODES}, got {self.resample!r}")


def z2_rotation_drift(epsilon: float) -> np.ndarray:
    """Rotation by arcsin(epsilon) in the (|0+>, |0->) plane, identity on |1±>.

    Expressed in the computational basis |00>, |01>, |10>, |11>.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    # Signs chosen so U|0+> = sqrt(1-eps^2)|0+> + eps|0->, which reproduces
    # the (1 - 2 eps^2, 2 eps sqrt(1-eps^2)) amplitudes on double application.
    # Written out in the computational basis the rotation is exact, and
    # eps = 0 yields the identity to the bit.
    c = np.sqrt(1.0 - epsilon**2)
    return np.array(
        [
            [c, 0, 0, epsilon],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [-epsilon, 0, 0, c],
        ],
        dtype=complex,
    )


def random_hermitian_generator(
    projector: GaugeProjector, amplitude: float, rng: np.random.Generator
) -> np.ndarray:
    """Draw H' = H - PHP with H Hermitized from uniform complex entries.

    Entries of the raw matrix have real and imaginary parts uniform in
    [-amplitude, amplitude]; Hermitization is (M + M^dag)/2.
    """
    dim = projector.dim
    m = rng.uniform(-amplitude, amplitude, (dim, dim)) + 1j * rng.uniform(
        -amplitude, amplitude, (dim, dim)
    )
    h = (m + m.conj().T) / 2.0
    p = projector.matrix
    return h - p @ h @ p


def random_drift(
    model: LatticeModel,
    projector: GaugeProjector,
    amplitude: float,
    seed: int | np.random.Generator,
) -> np.ndarray:
    """Generic gauge-violating drift exp(-i (H - PHP)) for a random Hermitian H."""
    if amplitude <= 0.0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    if projector.dim != model.dim:
        raise ValueError(
            f"projector dimension {projector.dim} does not match model dimension {model.dim}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return expm_i_hermitian(random_hermitian_generator(projector, amplitude, rng), -1)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """U = block_diagonal + off_block with respect to a gauge projector.

    ``off_block`` carries exactly the physical<->unphysical matrix elements;
    ``epsilon_est`` is its spectral norm, the worst-case single-step drift
    amplitude.
    """

    block_diagonal: np.ndarray
    off_block: np.ndarray
    epsilon_est: float


def block_decompose(u: np.ndarray, projector: GaugeProjector) -> BlockDecomposition:
    """Split a unitary into block-diagonal and subspace-coupling parts."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (projector.dim, projector.dim):
        raise ValueError(
            f"matrix shape {u.shape} does not match projector dimension {projector.dim}"
        )
    p = projector.matrix
    q = np.eye(projector.dim) - p
    block = p @ u @ p + q @ u @ q
    off = u - block  # defined as the complement, so nothing of u is lost
    return BlockDecomposition(
        block_diagonal=block,
        off_block=off,
        epsilon_est=float(np.linalg.norm(off, 2)),
    )


def first_appearance_expansion(
    u: np.ndarray, projector: GaugeProjector, n: int
) -> list[np.ndarray]:
    """Expand U^n into n+1 terms ordered by the first off-block factor.

    Terms are A^k W U^(n-1-k) for k = 0..n-1 followed by A^n, where A is the
    block-diagonal part and W the off-block part; they sum to U^n exactly.
    """
    if not 1 <= n <= 12:
        raise ValueError(f"expansion order must be in 1..12, got {n}")
    dec = block_decompose(u, projector)
    a, w = dec.block_diagonal, dec.off_block
    u = np.asarray(u, dtype=complex)

    u_powers = [np.eye(projector.dim, dtype=complex)]
    a_powers = [np.eye(projector.dim, dtype=complex)]
    for _ in range(n):
        u_powers.append(u_powers[-1] @ u)
        a_powers.append(a_powers[-1] @ a)

    terms = [a_powers[k] @ w @ u_powers[n - 1 - k] for k in range(n)]
    terms.append(a_powers[n])
    return terms
