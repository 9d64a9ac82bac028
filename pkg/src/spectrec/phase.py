"""Frequency reveal and restore: the transform pair at the heart of the library.

`rev` entangles a zero ancilla with the eigenvalue phase of a unitary: on an
eigenvector with frequency omega, the ancilla ends up concentrated on fine
grid points l with l/L near omega. `rest` undoes the reveal so the machinery
can be used inside reflections: either exactly (inverse strategy, white box
only) or via a learned table of frequency approximations (turning strategy),
which restores each populated branch up to a phase error set by how far the
spectrum sits from the fine grid.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDecomposition, SparsityProfile, circ_dist, decompose
from .statevec import (
    RegisterLayout,
    StateVector,
    apply,
    apply_diagonal,
    apply_if_ge,
    distribution,
)

__all__ = [
    "qft_matrix",
    "reveal_amplitudes",
    "reveal_distribution",
    "window_mass",
    "rev",
    "rev_inverse",
    "FrequencyTable",
    "build_frequency_table",
    "turning",
    "rest",
    "verify_w_type",
    "WTypeReport",
]


def qft_matrix(length: int) -> np.ndarray:
    """Fourier kernel F[l, s] = exp(-2*pi*i*l*s/length) / sqrt(length)."""
    idx = np.arange(length)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / length) / np.sqrt(length)


def reveal_amplitudes(omega: float, length: int) -> np.ndarray:
    """Exact ancilla amplitudes after rev on an eigenvector of frequency omega.

    Entry l is (1/L) * sum_a exp(2*pi*i*a*(omega - l/L)).
    """
    delta = omega - np.arange(length) / length
    amps = np.empty(length, dtype=np.complex128)
    near_zero = np.isclose(np.sin(np.pi * delta), 0.0, atol=1e-15)
    safe = ~near_zero
    d = delta[safe]
    amps[safe] = (
        np.exp(1j * np.pi * (length - 1) * d)
        * np.sin(np.pi * length * d)
        / (length * np.sin(np.pi * d))
    )
    # delta at an integer: every term of the sum is 1
    amps[near_zero] = 1.0
    return amps


def reveal_distribution(omega: float, length: int) -> np.ndarray:
    """Probability of each fine reading l for an eigenvector of frequency omega."""
    p = np.abs(reveal_amplitudes(omega, length)) ** 2
    return p / p.sum()


def window_mass(dist: np.ndarray, omega: float, half_width: float) -> float:
    """Probability mass of readings l with circular |l/L - omega| <= half_width."""
    length = len(dist)
    grid = np.arange(length) / length
    return float(dist[circ_dist(grid, omega) <= half_width + 1e-12].sum())


def _resolve_applier(u):
    """Return (matrix, charge_fn) for plain matrices and opaque handles alike."""
    if hasattr(u, "simulation_matrix") and hasattr(u, "charge_queries"):
        return np.asarray(u.simulation_matrix(), dtype=np.complex128), u.charge_queries
    from .statevec import DenseUnitary

    if isinstance(u, DenseUnitary):
        return u.matrix, None
    return np.asarray(u, dtype=np.complex128), None


def _sequential_powers(
    state: StateVector, matrix: np.ndarray, counter: str, target: str, *, adjoint: bool, fast: bool
) -> StateVector:
    """Branch with counter value a receives matrix**a (or its adjoint)."""
    length = state.layout.dim_of(counter)
    m = matrix.conj().T if adjoint else matrix
    if not fast:
        for j in range(1, length):
            state = apply_if_ge(state, m, counter, j, target)
        return state
    # apply matrix**a per counter slice; equals the threshold loop exactly
    layout = state.layout
    c_ax = layout.axis_of(counter)
    t_ax = layout.axis_of(target)
    tensor = state.tensor().copy()
    moved = np.moveaxis(tensor, c_ax, 0)
    t_moved = t_ax + 1 if t_ax < c_ax else t_ax
    t_flat = np.moveaxis(moved, t_moved, 1)
    power = np.eye(m.shape[0], dtype=np.complex128)
    for a in range(1, length):
        power = m @ power
        shape = t_flat[a].shape
        t_flat[a] = (power @ t_flat[a].reshape(shape[0], -1)).reshape(shape)
    restored = np.moveaxis(np.moveaxis(t_flat, 1, t_moved), 0, c_ax)
    return StateVector(layout, restored.reshape(-1), _checked=True)


def rev(state: StateVector, u, ancilla: str, target: str, *, fast: bool = True) -> StateVector:
    """Reveal the phase of u on `target` into the zero-initialized `ancilla`.

    Fourier transform the ancilla, run the sequential-power ladder, Fourier
    transform again. Costs L-1 controlled applications of u.
    """
    matrix, charge = _resolve_applier(u)
    length = state.layout.dim_of(ancilla)
    f = qft_matrix(length)
    state = apply(state, f, ancilla)
    state = _sequential_powers(state, matrix, ancilla, target, adjoint=False, fast=fast)
    state = apply(state, f, ancilla)
    if charge is not None:
        charge(length - 1)
    return state


def rev_inverse(state: StateVector, u, ancilla: str, target: str, *, fast: bool = True) -> StateVector:
    """Exact inverse of :func:`rev`; requires explicit (white box) access to u."""
    matrix, charge = _resolve_applier(u)
    length = state.layout.dim_of(ancilla)
    f_inv = qft_matrix(length).conj().T
    state = apply(state, f_inv, ancilla)
    state = _sequential_powers(state, matrix, ancilla, target, adjoint=True, fast=fast)
    state = apply(state, f_inv, ancilla)
    if charge is not None:
        charge(length - 1)
    return state


@dataclass(frozen=True)
class FrequencyTable:
    """Fine-grid frequency approximations h(l)/L keyed by coarse anchor l/M."""

    L: int
    M: int
    entries: tuple[tuple[int, int], ...]  # (coarse anchor, fine index), sorted

    def __post_init__(self) -> None:
        ent = tuple(sorted((int(a), int(h)) for a, h in self.entries))
        anchors = [a for a, _ in ent]
        if len(set(anchors)) != len(anchors):
            raise ValueError("duplicate anchors in frequency table")
        object.__setattr__(self, "entries", ent)

    def fine_targets(self) -> np.ndarray:
        """For each fine index l: the table value h for the nearest anchor.

        Fine points with no anchor within half a coarse cell map to themselves,
        so the turning phase is the identity on unexplained branches.
        """
        grid = np.arange(self.L) / self.L
        targets = np.arange(self.L)
        if not self.entries:
            return targets
        anchors = np.array([a for a, _ in self.entries], dtype=float) / self.M
        values = np.array([h for _, h in self.entries], dtype=int)
        dists = circ_dist(grid[:, None], anchors[None, :])
        nearest = dists.argmin(axis=1)
        within = dists[np.arange(self.L), nearest] <= 0.5 / self.M + 1e-12
        targets[within] = values[nearest[within]]
        return targets

    def to_json(self) -> str:
        return json.dumps(
            {"L": self.L, "M": self.M, "entries": [[a, h] for a, h in self.entries]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "FrequencyTable":
        doc = json.loads(text)
        return cls(int(doc["L"]), int(doc["M"]), tuple((a, h) for a, h in doc["entries"]))


def build_frequency_table(dec: SpectralDecomposition, profile: SparsityProfile) -> FrequencyTable:
    """Tabulate each group's best fine-grid index h = round(L * omega)."""
    entries = []
    for anchor, members in zip(profile.anchors, profile.members):
        omegas = dec.frequencies[np.array(members)]
        z = np.exp(2j * np.pi * omegas).mean()
        center = float(np.angle(z) / (2 * np.pi) % 1.0)
        entries.append((anchor, int(np.round(center * profile.L)) % profile.L))
    return FrequencyTable(profile.L, profile.M, tuple(entries))


def turning(
    state: StateVector, table: FrequencyTable, ancilla: str, *, multiplier: int | None = None
) -> StateVector:
    """Branch phase correction exp(-2*pi*i*(L-1)*(h(l) - l)/L) on the ancilla.

    The scratch register that computes h(l) is modeled as computed and
    uncomputed around the phase, so only the diagonal survives.
    """
    length = state.layout.dim_of(ancilla)
    if length != table.L:
        raise ValueError(f"ancilla dim {length} does not match table L={table.L}")
    mult = (length - 1) if multiplier is None else int(multiplier)
    targets = table.fine_targets()
    diff = (targets - np.arange(length)) % length
    diff = np.where(diff > length // 2, diff - length, diff)
    phases = np.exp(-2j * np.pi * mult * diff / length)
    return apply_diagonal(state, phases, [ancilla])


def rest(
    state: StateVector,
    u,
    ancilla: str,
    target: str,
    *,
    table: FrequencyTable | None = None,
    strategy: str = "turning",
    multiplier: int | None = None,
    fast: bool = True,
) -> StateVector:
    """Return the revealed ancilla to zero.

    turning: phase-correct using the table, then run the reveal again; exact
    when the spectrum sits on the fine grid, with a bounded residual nearby.
    inverse: run the reveal adjoint; exact but needs white-box access.
    """
    if strategy == "turning":
        if table is None:
            raise ValueError("turning strategy needs a frequency table")
        state = turning(state, table, ancilla, multiplier=multiplier)
        return rev(state, u, ancilla, target, fast=fast)
    if strategy == "inverse":
        return rev_inverse(state, u, ancilla, target, fast=fast)
    raise ValueError(f"unknown rest strategy {strategy!r}")


@dataclass(frozen=True)
class WTypeReport:
    """Window concentration audit of the reveal over every eigenvector."""

    passed: bool
    min_mass: float
    threshold: float
    window: int
    length: int
    rows: tuple[tuple[float, int, float], ...]  # (omega, eigenspace dim, window mass)


def verify_w_type(u, length: int, window: int = 16) -> WTypeReport:
    """Check that rev concentrates: mass within window/L of omega >= 1 - 2/window.

    Runs the coherent transform on one basis vector per eigenspace (the
    ancilla statistics are identical across an eigenspace) and measures the
    exact ancilla distribution.
    """
    from .statevec import DenseUnitary

    matrix = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    n_dim = matrix.shape[0]
    n_bits = n_dim.bit_length() - 1
    p_bits = length.bit_length() - 1
    if 1 << n_bits != n_dim or 1 << p_bits != length:
        raise ValueError("dimensions must be powers of two")
    dec = decompose(matrix)
    layout = RegisterLayout((("main", n_bits), ("anc", p_bits)))
    threshold = 1.0 - 2.0 / window
    rows = []
    min_mass = 1.0
    for omega, basis in zip(dec.frequencies, dec.bases):
        amps = np.kron(basis[:, 0], StateVector.zero(RegisterLayout((("anc", p_bits),))).amplitudes)
        state = StateVector(layout, amps)
        state = rev(state, matrix, "anc", "main")
        mass = window_mass(distribution(state, "anc"), float(omega), window / length)
        rows.append((float(omega), basis.shape[1], mass))
        min_mass = min(min_mass, mass)
    return WTypeReport(min_mass >= threshold, min_mass, threshold, window, length, tuple(rows))
