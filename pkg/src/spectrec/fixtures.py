"""Seeded synthetic instances with planted ground truth.

Everything here is deterministic given a generator, and returns enough
metadata to validate pipeline output against the planted structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitCode, GateSet, build_unitary, code_space_size, decode
from .spectral import circ_dist, decompose, group_basis, subspace_distances
from .statevec import DenseUnitary

__all__ = [
    "haar_unitary",
    "haar_state",
    "unitary_with_frequencies",
    "PlantedSpectrum",
    "planted_profile",
    "DevicePair",
    "device_pair",
    "involutive_family",
    "thermo_levels",
]


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def unitary_with_frequencies(frequencies: np.ndarray, rng: np.random.Generator) -> tuple[DenseUnitary, np.ndarray]:
    """Haar-random eigenbasis with the given per-eigenvalue frequencies.

    Returns (unitary, eigenbasis); eigenvector j has frequency frequencies[j].
    """
    freqs = np.asarray(frequencies, dtype=float)
    dim = len(freqs)
    q = haar_unitary(dim, rng)
    m = (q * np.exp(2j * np.pi * freqs)) @ q.conj().T
    return DenseUnitary(m), q


@dataclass(frozen=True)
class PlantedSpectrum:
    """A unitary with a known sparse grouped spectrum."""

    unitary: DenseUnitary
    eigenbasis: np.ndarray  # column j has frequency frequencies[j]
    frequencies: np.ndarray  # per eigenvalue, length N
    anchors: tuple[int, ...]
    group_dims: tuple[int, ...]
    M: int
    L: int

    def group_frequency(self, g: int) -> float:
        """Representative planted frequency of group g."""
        start = sum(self.group_dims[:g])
        return float(self.frequencies[start])

    def group_columns(self, g: int) -> np.ndarray:
        start = sum(self.group_dims[:g])
        return self.eigenbasis[:, start : start + self.group_dims[g]]


def _pick_anchors(m_coarse: int, n_groups: int, rng: np.random.Generator) -> list[int]:
    """Coarse anchors at pairwise circular gap >= 2 cells, so group separation
    strictly exceeds 1/M even after fine placement."""
    if 2 * n_groups > m_coarse:
        raise ValueError(f"cannot fit {n_groups} groups on a {m_coarse}-point coarse grid")
    while True:
        anchors = sorted(rng.choice(m_coarse, size=n_groups, replace=False).tolist())
        gaps = [anchors[i + 1] - anchors[i] for i in range(len(anchors) - 1)]
        gaps.append(m_coarse - anchors[-1] + anchors[0])
        if all(g >= 2 for g in gaps):
            return anchors


def planted_profile(
    dim: int,
    m_coarse: int,
    fine: int,
    group_dims: tuple[int, ...],
    rng: np.random.Generator,
    *,
    jitter_fine: float = 0.0,
    split_groups: bool = False,
    anchors: tuple[int, ...] | None = None,
) -> PlantedSpectrum:
    """Plant a sparse grouped spectrum: group g sits on the fine grid point of
    its anchor, optionally jittered by at most jitter_fine fine-grid units.
    """
    if sum(group_dims) != dim:
        raise ValueError("group dims must sum to the space dimension")
    if fine % m_coarse != 0:
        raise ValueError("fine grid must refine the coarse grid")
    step = fine // m_coarse
    if anchors is None:
        anchors = tuple(_pick_anchors(m_coarse, len(group_dims), rng))
    freqs = []
    for g, d in enumerate(group_dims):
        h = anchors[g] * step
        base = h / fine
        if jitter_fine > 0.0:
            base += float(rng.uniform(-jitter_fine, jitter_fine)) / fine
        if split_groups and d >= 2 and jitter_fine > 0.0:
            sub = jitter_fine / (3.0 * fine)
            for i in range(d):
                freqs.append((base + (sub if i % 2 else -sub)) % 1.0)
        else:
            freqs.extend([base % 1.0] * d)
    u, q = unitary_with_frequencies(np.asarray(freqs), rng)
    return PlantedSpectrum(u, q, np.asarray(freqs), tuple(anchors), tuple(group_dims), m_coarse, fine)


@dataclass(frozen=True)
class DevicePair:
    """Two devices and the planted relation between their target eigenspaces."""

    u: DenseUnitary
    v: DenseUnitary
    omega: float
    relation: str
    planted_distance: float
    profile_m: int
    profile_l: int
    base: PlantedSpectrum


def _rotation_between(x: np.ndarray, y: np.ndarray, angle: float, dim: int) -> np.ndarray:
    """Unitary rotating the plane span(x, y) by angle, identity elsewhere."""
    w = np.eye(dim, dtype=np.complex128)
    c, s = math.cos(angle), math.sin(angle)
    plane = np.array([[c, -s], [s, c]])
    basis = np.stack([x, y], axis=1)
    w += basis @ (plane - np.eye(2)) @ basis.conj().T
    return w


def device_pair(
    dim: int,
    m_coarse: int,
    fine: int,
    relation: str,
    rng: np.random.Generator,
    *,
    distance: float = 0.5,
    target_dim: int = 2,
) -> DevicePair:
    """Build (U, V) whose eigenspaces at the target frequency relate as asked.

    relation: equal | rotated | dim_up | dim_down | empty. `rotated` keeps
    dimensions equal and makes the largest principal-angle sine exactly
    `distance`; dim_up gives V one extra dimension, dim_down one fewer,
    empty removes V's group at the target frequency entirely.
    """
    other = dim - target_dim
    if other < 2:
        raise ValueError("need at least two background dimensions")
    base = planted_profile(dim, m_coarse, fine, (target_dim, other), rng)
    omega = base.group_frequency(0)
    u = base.unitary

    if relation == "equal":
        v = DenseUnitary(u.matrix.copy())
    elif relation == "rotated":
        x = base.group_columns(0)[:, 0]
        y = base.group_columns(1)[:, 0]
        w = _rotation_between(x, y, math.asin(distance), dim)
        v = DenseUnitary(w @ u.matrix @ w.conj().T)
    elif relation == "dim_up":
        # one background eigenvector joins the target group in V
        freqs = base.frequencies.copy()
        freqs[target_dim] = omega
        v = DenseUnitary(
            (base.eigenbasis * np.exp(2j * np.pi * freqs)) @ base.eigenbasis.conj().T
        )
    elif relation == "dim_down":
        freqs = base.frequencies.copy()
        freqs[target_dim - 1] = base.group_frequency(1)
        v = DenseUnitary(
            (base.eigenbasis * np.exp(2j * np.pi * freqs)) @ base.eigenbasis.conj().T
        )
    elif relation == "empty":
        freqs = base.frequencies.copy()
        freqs[:target_dim] = base.group_frequency(1)
        v = DenseUnitary(
            (base.eigenbasis * np.exp(2j * np.pi * freqs)) @ base.eigenbasis.conj().T
        )
    else:
        raise ValueError(f"unknown relation {relation!r}")

    planted = {"equal": 0.0, "rotated": distance, "dim_up": 1.0, "dim_down": 1.0, "empty": 1.0}[
        relation
    ]
    return DevicePair(u, v, omega, relation, planted, m_coarse, fine, base)


def involutive_family(
    rng: np.random.Generator,
    *,
    count: int = 8,
    n_qubits: int = 3,
    length_cap: int = 2,
    min_distance: float = 0.5,
) -> list[tuple[CircuitCode, DenseUnitary]]:
    """Involutive circuits sharing spectrum {+1, -1}, pairwise far apart.

    Scans the coded circuit space over the involutive gate set, keeps the
    self-inverse ones with both eigenvalues present, and greedily selects a
    family whose -1 eigenspaces are pairwise distinguishable at min_distance.
    """
    gs = GateSet.involutive()
    total = code_space_size(gs, n_qubits, length_cap)
    dim = 1 << n_qubits
    order = rng.permutation(total)
    kept: list[tuple[CircuitCode, DenseUnitary, np.ndarray]] = []
    for code in order:
        circ = decode(int(code), gs, n_qubits, length_cap)
        u = build_unitary(circ, gs)
        if np.linalg.norm(u.matrix @ u.matrix - np.eye(dim)) > 1e-9:
            continue
        dec = decompose(u.matrix)
        if len(dec.frequencies) != 2:
            continue
        minus = None
        for f, b in zip(dec.frequencies, dec.bases):
            if circ_dist(f, 0.5) < 1e-9:
                minus = b
        if minus is None:
            continue
        ok = True
        for _, _, other in kept:
            dist = subspace_distances(minus, other)
            if not dist.exactly_one_empty and max(dist.mu_u, dist.mu_v) < min_distance:
                ok = False
                break
        if ok:
            kept.append((circ, u, minus))
            if len(kept) == count:
                return [(c, u) for c, u, _ in kept]
    raise RuntimeError(f"found only {len(kept)} of {count} involutive devices")


def thermo_levels(preset: int, *, m_coarse: int = 8, fine: int = 128) -> dict:
    """Planted energy-level fixtures: frequencies on the fine grid, integer
    degeneracies, energies strictly inside the representable band."""
    step = fine // m_coarse
    presets = {
        0: {"anchors": (1, 3, 5), "dims": (1, 2, 1), "scale": 1.0},
        1: {"anchors": (1, 4, 6), "dims": (2, 4, 2), "scale": 2.0},
        2: {"anchors": (2, 4, 6), "dims": (2, 2, 4), "scale": 1.5},
    }
    if preset not in presets:
        raise ValueError(f"preset must be one of {sorted(presets)}")
    cfg = presets[preset]
    e_scale = cfg["scale"]
    levels = []
    for anchor, d in zip(cfg["anchors"], cfg["dims"]):
        omega = (anchor * step) / fine
        energy = e_scale * (1.0 - 2.0 * math.pi * omega)
        levels.append((energy, d))
    return {
        "e_scale": e_scale,
        "levels": levels,
        "anchors": cfg["anchors"],
        "M": m_coarse,
        "L": fine,
    }
