"""Lattice Hilbert space over group-valued links, gauge operators, projector.

The computational basis assigns one group element to every oriented link;
a gauge transformation assigns one group element to every site and acts as
the basis permutation u_l -> g_tail * u_l * g_head^{-1}. Averaging the
permutation operators over all site assignments yields the projector onto
the gauge-invariant (physical) subspace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup
from .linalg import HERMITICITY_TOL, check_normalized, max_abs

__all__ = [
    "LatticeModel",
    "GaugeProjector",
    "DEFAULT_DIM_CAP",
    "MAX_PROJECTOR_TRANSFORMS",
    "two_link_plaquette",
    "lattice_from_links",
    "basis_index",
    "config_of",
    "gauge_permutation",
    "gauge_operator",
    "apply_permutation",
    "all_transforms",
    "build_projector",
    "physical_basis",
    "z2_two_link_hamiltonian",
    "unphysical_weight",
]

DEFAULT_DIM_CAP = 4096          # keeps experiments interactive
MAX_PROJECTOR_TRANSFORMS = 10_000  # exhaustive sum over G^V must stay enumerable


@dataclass(frozen=True, eq=False)
class LatticeModel:
    """Sites, oriented links and the induced |G|^L computational basis."""

    group: FiniteGroup
    num_sites: int
    links: tuple[tuple[int, int], ...]
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        links = tuple((int(a), int(b)) for a, b in self.links)
        object.__setattr__(self, "links", links)
        if self.num_sites < 1:
            raise ValueError("a lattice needs at least one site")
        if not links:
            raise ValueError("a lattice needs at least one link")
        for tail, head in links:
            if not (0 <= tail < self.num_sites and 0 <= head < self.num_sites):
                raise ValueError(f"link ({tail},{head}) has an endpoint outside 0..{self.num_sites - 1}")
        dim = self.group.order ** len(links)
        if dim > self.dim_cap:
            raise ValueError(
                f"basis dimension |G|^L = {dim} exceeds the dimension cap {self.dim_cap}"
            )
        strides = self.group.order ** np.arange(len(links) - 1, -1, -1, dtype=np.int64)
        idx = np.arange(dim, dtype=np.int64)
        configs = (idx[:, None] // strides[None, :]) % self.group.order
        configs.setflags(write=False)
        strides.setflags(write=False)
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "_strides", strides)
        object.__setattr__(self, "_configs", configs)

    @property
    def num_links(self) -> int:
        return len(self.links)

    def __repr__(self):
        return (
            f"LatticeModel(group={self.group.name}, sites={self.num_sites}, "
            f"links={list(self.links)}, dim={self.dim})"
        )


def two_link_plaquette(group: FiniteGroup, dim_cap: int = DEFAULT_DIM_CAP) -> LatticeModel:
    """Single plaquette made of two sites joined by two oppositely oriented links."""
    return LatticeModel(group=group, num_sites=2, links=((0, 1), (1, 0)), dim_cap=dim_cap)


def lattice_from_links(
    group: FiniteGroup,
    links,
    num_sites: int | None = None,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> LatticeModel:
    """Model from an explicit edge list; site count inferred when omitted."""
    links = tuple((int(a), int(b)) for a, b in links)
    if num_sites is None:
        num_sites = 1 + max(max(a, b) for a, b in links)
    return LatticeModel(group=group, num_sites=num_sites, links=links, dim_cap=dim_cap)


def _check_config(model: LatticeModel, config) -> np.ndarray:
    cfg = np.asarray(config, dtype=np.int64)
    if cfg.shape != (model.num_links,):
        raise ValueError(f"config must assign one element to each of {model.num_links} links")
    if cfg.min() < 0 or cfg.max() >= model.group.order:
        raise ValueError("config contains an invalid element index")
    return cfg


def basis_index(model: LatticeModel, config) -> int:
    """Mixed-radix basis index of a link configuration (link 0 most significant)."""
    cfg = _check_config(model, config)
    return int((cfg * model._strides).sum())


def config_of(model: LatticeModel, index: int) -> tuple[int, ...]:
    """Inverse of basis_index."""
    if not 0 <= index < model.dim:
        raise ValueError(f"basis index {index} out of range for dimension {model.dim}")
    return tuple(int(x) for x in model._configs[index])


def _check_transform(model: LatticeModel, transform) -> np.ndarray:
    t = np.asarray(transform, dtype=np.int64)
    if t.shape != (model.num_sites,):
        raise ValueError(f"transform must assign one element to each of {model.num_sites} sites")
    if t.min() < 0 or t.max() >= model.group.order:
        raise ValueError("transform contains an invalid element index")
    return t


def gauge_permutation(model: LatticeModel, transform) -> np.ndarray:
    """Basis permutation of the gauge transformation: phi(t)|c> = |perm[c]>.

    This is the fast path; gauge_operator densifies it.
    """
    t = _check_transform(model, transform)
    g = model.group
    perm = np.zeros(model.dim, dtype=np.int64)
    for l, (tail, head) in enumerate(model.links):
        new_col = g.mul_table[t[tail], g.mul_table[model._configs[:, l], g.inv_table[t[head]]]]
        perm += new_col * model._strides[l]
    return perm


def gauge_operator(model: LatticeModel, transform) -> np.ndarray:
    """Dense unitary permutation matrix of the gauge transformation."""
    perm = gauge_permutation(model, transform)
    op = np.zeros((model.dim, model.dim), dtype=complex)
    op[perm, np.arange(model.dim)] = 1.0
    return op


def apply_permutation(perm: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply a basis permutation to a state vector (out[perm[c]] = v[c])."""
    out = np.empty_like(v)
    out[perm] = v
    return out


def all_transforms(model: LatticeModel):
    """Iterate over every site assignment in G^V."""
    return itertools.product(range(model.group.order), repeat=model.num_sites)


@dataclass(frozen=True, eq=False)
class GaugeProjector:
    """Projector onto the gauge-invariant subspace, with its rank."""

    matrix: np.ndarray
    physical_dim: int

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=complex)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"projector must be square, got shape {p.shape}")
        herm = max_abs(p - p.conj().T)
        if herm > HERMITICITY_TOL:
            raise ValueError(f"projector is not Hermitian: deviation {herm:.3e}")
        idem = max_abs(p @ p - p)
        if idem > 1e-12:
            raise ValueError(f"projector is not idempotent: ||P^2 - P||_max = {idem:.3e}")
        tr = p.trace().real
        if abs(tr - self.physical_dim) > 1e-9:
            raise ValueError(
                f"trace {tr!r} does not match physical dimension {self.physical_dim}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "matrix", p)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_projector(model: LatticeModel) -> GaugeProjector:
    """Average of phi(t) over all of G^V; exact at these sizes.

    Normalizing the representation average by 1/|G|^V makes the result
    idempotent regardless of any center redundancy among the transforms.
    """
    n_transforms = model.group.order ** model.num_sites
    if n_transforms > MAX_PROJECTOR_TRANSFORMS:
        raise ValueError(
            f"|G|^V = {n_transforms} transforms is too large for the exhaustive projector sum"
        )
    cols = np.arange(model.dim)
    p = np.zeros((model.dim, model.dim), dtype=complex)
    for t in all_transforms(model):
        p[gauge_permutation(model, t), cols] += 1.0
    p /= n_transforms
    return GaugeProjector(matrix=p, physical_dim=int(round(p.trace().real)))


def physical_basis(projector: GaugeProjector) -> list[np.ndarray]:
    """Canonical orthonormal basis of the physical subspace.

    The spectrum is validated first: any eigenvalue inside (0.1, 0.9) means
    the matrix is not a projector and is a hard error. The basis itself is
    built by Gram-Schmidt over the projected computational columns, which
    pins a deterministic, convention-stable basis (an eigensolver is free to
    rotate degenerate eigenvectors arbitrarily).
    """
    w = np.linalg.eigvalsh(projector.matrix)
    ambiguous = w[(w > 0.1) & (w < 0.9)]
    if ambiguous.size:
        raise ValueError(
            f"projector spectrum is ambiguous, eigenvalues {ambiguous} lie in (0.1, 0.9)"
        )
    near_one = w[w > 0.5]
    if near_one.size != projector.physical_dim:
        raise ValueError(
            f"{near_one.size} unit eigenvalues but physical_dim = {projector.physical_dim}"
        )
    if max_abs(near_one - 1.0) > 1e-9:
        raise ValueError("physical eigenvalues deviate from 1 by more than 1e-9")

    basis: list[np.ndarray] = []
    for c in range(projector.dim):
        v = projector.matrix[:, c].copy()
        for _ in range(2):  # second pass keeps orthogonality at roundoff level
            for b in basis:
                v -= b * np.vdot(b, v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            basis.append(v / nrm)
        if len(basis) == projector.physical_dim:
            break
    if len(basis) != projector.physical_dim:
        raise ValueError("projector columns span fewer directions than physical_dim")
    return basis


def z2_two_link_hamiltonian() -> np.ndarray:
    """sigma_x(a) + sigma_x(b) + sigma_z(a) sigma_z(b) on the two-link basis.

    Basis order |00>, |01>, |10>, |11> with link a the most significant.
    Commutes exactly with the both-links flip, so it preserves the physical
    subspace by construction.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return np.kron(sx, eye) + np.kron(eye, sx) + np.kron(sz, sz)


def unphysical_weight(projector: GaugeProjector, v: np.ndarray) -> float:
    """Squared amplitude outside the physical subspace, 1 - ||P v||^2."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (projector.dim,):
        raise ValueError(f"state shape {v.shape} does not match projector dimension {projector.dim}")
    check_normalized(v, tol=1e-6)
    w = 1.0 - float(np.linalg.norm(projector.matrix @ v) ** 2)
    return min(max(w, 0.0), 1.0)
