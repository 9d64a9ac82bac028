"""Spectral decomposition of unitaries and geometry of eigenspaces.

Frequencies live on the unit circle, represented as reals in [0, 1): the
eigenvalue is exp(2*pi*i*omega). All frequency comparisons are circular.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "circ_dist",
    "SpectralDecomposition",
    "decompose",
    "SparsityProfile",
    "ProfileError",
    "group_projector",
    "group_basis",
    "SubspaceDistances",
    "subspace_distances",
    "is_d_distinguishable",
    "orthonormal_basis",
    "complement_within",
    "intersection",
    "subspace_sum",
    "spectrum_to_json",
    "spectrum_from_json",
]

RECONSTRUCTION_TOL = 1e-7
CLUSTER_TOL = 1e-9


def circ_dist(a, b):
    """Distance on the unit circle between frequencies (scalars or arrays)."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def _circular_mean(omegas: np.ndarray) -> float:
    z = np.exp(2j * np.pi * omegas).mean()
    return float(np.angle(z) / (2 * np.pi) % 1.0)


def _loewdin(v: np.ndarray) -> np.ndarray:
    """Symmetric orthonormalization; minimally perturbs already-orthonormal columns."""
    w, q = np.linalg.eigh(v.conj().T @ v)
    if w.min() < 1e-12:
        raise np.linalg.LinAlgError("eigenvector matrix is numerically singular")
    return v @ (q * (w**-0.5)) @ q.conj().T


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct frequencies with orthonormal eigenspace bases, sorted by frequency."""

    frequencies: np.ndarray  # shape (r,), values in [0, 1)
    bases: tuple[np.ndarray, ...]  # bases[k] is N x dims[k], orthonormal columns

    def __post_init__(self) -> None:
        freqs = np.asarray(self.frequencies, dtype=float).copy()
        freqs.setflags(write=False)
        bases = []
        for b in self.bases:
            b = np.asarray(b, dtype=np.complex128).copy()
            b.setflags(write=False)
            bases.append(b)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "bases", tuple(bases))

    @property
    def dim(self) -> int:
        return self.bases[0].shape[0] if self.bases else 0

    @property
    def dims(self) -> np.ndarray:
        return np.array([b.shape[1] for b in self.bases], dtype=int)

    def projector(self, k: int) -> np.ndarray:
        b = self.bases[k]
        return b @ b.conj().T

    def reconstruct(self) -> np.ndarray:
        n = self.dim
        out = np.zeros((n, n), dtype=np.complex128)
        for omega, b in zip(self.frequencies, self.bases):
            out += np.exp(2j * np.pi * omega) * (b @ b.conj().T)
        return out

    def weights(self, vector: np.ndarray) -> np.ndarray:
        """Squared projection of a vector onto each eigenspace."""
        return np.array(
            [float(np.linalg.norm(b.conj().T @ vector) ** 2) for b in self.bases]
        )


def decompose(u, tol: float = CLUSTER_TOL) -> SpectralDecomposition:
    """Eigen-decompose a unitary, clustering eigenvalues closer than `tol`."""
    from .statevec import DenseUnitary

    m = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    n = m.shape[0]
    vals, vecs = np.linalg.eig(m)
    omegas = (np.angle(vals) / (2 * np.pi)) % 1.0
    order = np.argsort(omegas)
    omegas = omegas[order]
    vecs = vecs[:, order]

    # chain-cluster on the sorted circle, then merge across the wrap point
    breaks = [0]
    for i in range(1, n):
        if omegas[i] - omegas[i - 1] > tol:
            breaks.append(i)
    clusters = [list(range(breaks[j], breaks[j + 1] if j + 1 < len(breaks) else n)) for j in range(len(breaks))]
    if len(clusters) > 1 and (omegas[clusters[0][0]] + 1.0 - omegas[clusters[-1][-1]]) <= tol:
        clusters[0] = clusters.pop() + clusters[0]

    freq_list: list[float] = []
    base_list: list[np.ndarray] = []
    for idx in clusters:
        cols = vecs[:, idx]
        # orthonormalize within the cluster without changing its span
        uu, ss, _ = np.linalg.svd(cols, full_matrices=False)
        if ss.min() < 1e-10 * ss.max():
            raise np.linalg.LinAlgError("degenerate eigenvector cluster is rank-deficient")
        rep = _circular_mean(omegas[idx])
        if 1.0 - rep <= tol:
            rep = 0.0  # wrap-point cluster: canonical representative in [0, 1)
        freq_list.append(rep)
        base_list.append(uu)

    # polish global orthonormality, then re-slice per cluster
    full = _loewdin(np.hstack(base_list))
    offset = 0
    polished = []
    for b in base_list:
        polished.append(full[:, offset : offset + b.shape[1]])
        offset += b.shape[1]

    order2 = np.argsort(freq_list)
    dec = SpectralDecomposition(
        np.array([freq_list[i] for i in order2]), tuple(polished[i] for i in order2)
    )
    residual = np.linalg.norm(dec.reconstruct() - m, 2)
    if residual > RECONSTRUCTION_TOL:
        raise np.linalg.LinAlgError(f"spectral reconstruction residual {residual:.3g}")
    return dec


class ProfileError(ValueError):
    """The spectrum does not satisfy the sparse grouped layout."""


@dataclass(frozen=True)
class SparsityProfile:
    """Grouped sparse spectrum: few tight clusters anchored on the coarse grid.

    M is the coarse grid size, L = 2**p the fine grid size. Each group's
    frequencies sit within 1/L of an anchor point l/M, distinct groups are
    separated by more than 1/M.
    """

    M: int
    L: int
    anchors: tuple[int, ...]  # coarse indices, one per group, sorted
    members: tuple[tuple[int, ...], ...]  # per group: indices into dec.frequencies

    @property
    def n_groups(self) -> int:
        return len(self.anchors)

    def anchor_frequency(self, g: int) -> float:
        return self.anchors[g] / self.M

    @classmethod
    def from_decomposition(
        cls, dec: SpectralDecomposition, M: int, L: int
    ) -> "SparsityProfile":
        if L % M != 0 or L < 2 * M:
            raise ProfileError(f"fine grid L={L} must be a multiple of M={M}, at least 2M")
        freqs = dec.frequencies
        r = len(freqs)
        # chain frequencies within 1/L into candidate groups
        order = np.argsort(freqs)
        groups: list[list[int]] = [[int(order[0])]] if r else []
        for i in order[1:]:
            if circ_dist(freqs[i], freqs[groups[-1][-1]]) <= 1.0 / L:
                groups[-1].append(int(i))
            else:
                groups.append([int(i)])
        if len(groups) > 1 and circ_dist(freqs[groups[0][0]], freqs[groups[-1][-1]]) <= 1.0 / L:
            groups[0] = groups.pop() + groups[0]

        anchors = []
        for g in groups:
            center = _circular_mean(freqs[np.array(g)])
            anchor = int(np.round(center * M)) % M
            for i in g:
                if circ_dist(freqs[i], anchor / M) > 1.0 / L + 1e-12:
                    raise ProfileError(
                        f"frequency {freqs[i]:.9f} is {circ_dist(freqs[i], anchor / M):.3g} "
                        f"from its anchor {anchor}/{M}, beyond 1/L"
                    )
            anchors.append(anchor)
        for a, g in zip(anchors, groups):
            spread = max((circ_dist(freqs[i], freqs[j]) for i in g for j in g), default=0.0)
            if spread >= 1.0 / L:
                raise ProfileError(f"group at {a}/{M} has spread {spread:.3g} >= 1/L")
        for g1, a1 in zip(groups, anchors):
            for g2, a2 in zip(groups, anchors):
                if a1 >= a2:
                    continue
                gap = min(circ_dist(freqs[i], freqs[j]) for i in g1 for j in g2)
                if gap <= 1.0 / M:
                    raise ProfileError(
                        f"groups {a1}/{M} and {a2}/{M} are {gap:.3g} apart, not more than 1/M"
                    )
        order2 = np.argsort(anchors)
        return cls(
            M,
            L,
            tuple(int(anchors[i]) for i in order2),
            tuple(tuple(groups[i]) for i in order2),
        )

    def group_near(self, omega: float, window: float | None = None) -> int | None:
        """Index of the group whose anchor is nearest `omega`, or None."""
        if window is None:
            window = 0.5 / self.M
        best, best_d = None, window
        for g, a in enumerate(self.anchors):
            d = float(circ_dist(a / self.M, omega))
            if d <= best_d:
                best, best_d = g, d
        return best


def group_projector(
    dec: SpectralDecomposition,
    omega: float,
    profile: SparsityProfile | None = None,
    *,
    window: float | None = None,
) -> np.ndarray:
    """Projector onto the eigenspace of the group approximated by `omega`.

    With a profile, a group is selected when any member frequency is within
    2/L of the candidate; otherwise an explicit window is required.
    """
    n = dec.dim
    p = np.zeros((n, n), dtype=np.complex128)
    if profile is not None:
        for g, member_idx in enumerate(profile.members):
            if any(circ_dist(dec.frequencies[i], omega) <= 2.0 / profile.L for i in member_idx):
                for i in member_idx:
                    p += dec.projector(i)
                return p
        return p
    if window is None:
        raise ValueError("need a profile or an explicit window")
    for i, f in enumerate(dec.frequencies):
        if circ_dist(f, omega) <= window:
            p += dec.projector(i)
    return p


def group_basis(
    dec: SpectralDecomposition,
    omega: float,
    profile: SparsityProfile | None = None,
    *,
    window: float | None = None,
) -> np.ndarray:
    """Orthonormal basis of the same subspace as :func:`group_projector`."""
    cols = []
    if profile is not None:
        for member_idx in profile.members:
            if any(circ_dist(dec.frequencies[i], omega) <= 2.0 / profile.L for i in member_idx):
                cols.extend(dec.bases[i] for i in member_idx)
                break
    else:
        if window is None:
            raise ValueError("need a profile or an explicit window")
        for i, f in enumerate(dec.frequencies):
            if circ_dist(f, omega) <= window:
                cols.append(dec.bases[i])
    if not cols:
        return np.zeros((dec.dim, 0), dtype=np.complex128)
    return np.hstack(cols)


@dataclass(frozen=True)
class SubspaceDistances:
    """Directed max-distances between two subspaces (principal-angle geometry)."""

    mu_u: float
    mu_v: float
    dim_u: int
    dim_v: int

    @property
    def exactly_one_empty(self) -> bool:
        return (self.dim_u == 0) != (self.dim_v == 0)


def subspace_distances(basis_u: np.ndarray, basis_v: np.ndarray) -> SubspaceDistances:
    """Directed distances: mu_u is the farthest any unit vector of U sits from V."""
    du, dv = basis_u.shape[1], basis_v.shape[1]
    if du == 0 and dv == 0:
        return SubspaceDistances(0.0, 0.0, 0, 0)
    if du == 0:
        return SubspaceDistances(0.0, 1.0, 0, dv)
    if dv == 0:
        return SubspaceDistances(1.0, 0.0, du, 0)
    sigma = np.linalg.svd(basis_v.conj().T @ basis_u, compute_uv=False)
    smallest = float(sigma.min())
    worst = float(np.sqrt(max(0.0, 1.0 - smallest**2)))
    mu_u = 1.0 if du > dv else worst
    mu_v = 1.0 if dv > du else worst
    return SubspaceDistances(mu_u, mu_v, du, dv)


def is_d_distinguishable(dist: SubspaceDistances, d: float) -> bool:
    """Either exactly one side is empty, or some unit vector sits at distance >= d."""
    if dist.exactly_one_empty:
        return True
    return max(dist.mu_u, dist.mu_v) >= d - 1e-12


def orthonormal_basis(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span; keeps a (n, 0) shape for empty input."""
    v = np.asarray(vectors, dtype=np.complex128)
    if v.ndim != 2 or v.shape[1] == 0:
        return np.zeros((v.shape[0], 0), dtype=np.complex128)
    uu, ss, _ = np.linalg.svd(v, full_matrices=False)
    rank = int(np.sum(ss > tol * max(1.0, ss.max())))
    return uu[:, :rank]


def complement_within(basis: np.ndarray, basis_other: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Basis of {u in span(basis) : u orthogonal to span(basis_other)}."""
    if basis.shape[1] == 0:
        return basis
    if basis_other.shape[1] == 0:
        return basis
    cross = basis_other.conj().T @ basis
    _, ss, vh = np.linalg.svd(cross, full_matrices=True)
    null_cols = [i for i in range(basis.shape[1]) if i >= len(ss) or ss[i] <= tol]
    if not null_cols:
        return np.zeros((basis.shape[0], 0), dtype=np.complex128)
    return orthonormal_basis(basis @ vh.conj().T[:, null_cols])


def intersection(basis_a: np.ndarray, basis_b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Basis of the intersection of two subspaces."""
    if basis_a.shape[1] == 0 or basis_b.shape[1] == 0:
        return np.zeros((basis_a.shape[0], 0), dtype=np.complex128)
    p_b = basis_b @ basis_b.conj().T
    residual = basis_a - p_b @ basis_a
    _, ss, vh = np.linalg.svd(residual, full_matrices=True)
    null_cols = [i for i in range(basis_a.shape[1]) if i >= len(ss) or ss[i] <= tol]
    if not null_cols:
        return np.zeros((basis_a.shape[0], 0), dtype=np.complex128)
    return orthonormal_basis(basis_a @ vh.conj().T[:, null_cols])


def subspace_sum(*bases: np.ndarray) -> np.ndarray:
    stacked = [b for b in bases if b.shape[1] > 0]
    if not stacked:
        return bases[0]
    return orthonormal_basis(np.hstack(stacked))


def spectrum_to_json(dec: SpectralDecomposition) -> str:
    doc = {
        "frequencies": [float(f) for f in dec.frequencies],
        "dims": [int(d) for d in dec.dims],
    }
    return json.dumps(doc, indent=2)


def spectrum_from_json(text: str) -> tuple[np.ndarray, np.ndarray]:
    doc = json.loads(text)
    return np.asarray(doc["frequencies"], dtype=float), np.asarray(doc["dims"], dtype=int)
