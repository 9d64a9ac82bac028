"""Dense statevector simulation over named registers.

A state lives on an ordered collection of registers, each a block of qubits
addressed by name. The first register in the layout occupies the most
significant bits of the basis index. States are immutable: every operation
returns a new :class:`StateVector`, and amplitudes are exposed read-only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "MAX_WIDTH",
    "NORM_TOL",
    "UNITARY_TOL",
    "RegisterLayout",
    "StateVector",
    "DenseUnitary",
    "apply",
    "apply_on_qubits",
    "apply_controlled",
    "apply_if_ge",
    "apply_diagonal",
    "measure",
    "distribution",
    "format_state",
    "parse_state",
]

MAX_WIDTH = 24  # total qubits; 2**24 complex amplitudes is the desk-scale cap
NORM_TOL = 1e-9
UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; register i spans a contiguous qubit block."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        regs = tuple((str(n), int(w)) for n, w in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [n for n, _ in regs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")
        if any(w < 1 for _, w in regs):
            raise ValueError("register widths must be positive")
        if self.width > MAX_WIDTH:
            raise ValueError(f"total width {self.width} exceeds cap {MAX_WIDTH}")

    @property
    def width(self) -> int:
        return sum(w for _, w in self.registers)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.registers)

    @property
    def shape(self) -> tuple[int, ...]:
        """One axis per register: (2**w_1, ..., 2**w_r)."""
        return tuple(1 << w for _, w in self.registers)

    @property
    def dim(self) -> int:
        return 1 << self.width

    def axis_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.registers):
            if n == name:
                return i
        raise KeyError(f"no register named {name!r}")

    def width_of(self, name: str) -> int:
        return self.registers[self.axis_of(name)][1]

    def dim_of(self, name: str) -> int:
        return 1 << self.width_of(name)

    def pack(self, values: Mapping[str, int]) -> int:
        """Basis index of the product basis state with the given register values."""
        if set(values) != set(self.names):
            raise ValueError(f"need values for exactly {self.names}")
        index = 0
        for name, w in self.registers:
            v = int(values[name])
            if not 0 <= v < (1 << w):
                raise ValueError(f"value {v} out of range for register {name!r}")
            index = (index << w) | v
        return index

    def unpack(self, index: int) -> dict[str, int]:
        out: dict[str, int] = {}
        for name, w in reversed(self.registers):
            out[name] = index & ((1 << w) - 1)
            index >>= w
        return out


class StateVector:
    """Immutable normalized amplitude vector over a register layout."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes: np.ndarray, *, _checked: bool = False):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (layout.dim,):
            raise ValueError(f"expected {layout.dim} amplitudes, got {amps.shape}")
        if not _checked:
            nrm = float(np.linalg.norm(amps))
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
            amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, *_):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=np.complex128)
        amps[0] = 1.0
        return cls(layout, amps, _checked=True)

    @classmethod
    def basis(cls, layout: RegisterLayout, values: Mapping[str, int] | int) -> "StateVector":
        index = values if isinstance(values, int) else layout.pack(values)
        if not 0 <= index < layout.dim:
            raise ValueError(f"basis index {index} out of range")
        amps = np.zeros(layout.dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(layout, amps, _checked=True)

    @classmethod
    def from_amplitudes(cls, layout: RegisterLayout, amplitudes: np.ndarray) -> "StateVector":
        return cls(layout, amplitudes)

    def tensor(self) -> np.ndarray:
        """Read-only view shaped with one axis per register."""
        return self.amplitudes.reshape(self.layout.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def isclose(self, other: "StateVector", tol: float = 1e-9) -> bool:
        return (
            self.layout == other.layout
            and float(np.linalg.norm(self.amplitudes - other.amplitudes)) <= tol
        )


@dataclass(frozen=True)
class DenseUnitary:
    """Explicit unitary matrix, checked at construction."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        d = m.shape[0]
        if d < 1 or (d & (d - 1)) != 0:
            raise ValueError(f"dimension {d} is not a power of two")
        defect = np.linalg.norm(m.conj().T @ m - np.eye(d), 2)
        if defect > UNITARY_TOL:
            raise ValueError(f"unitarity defect {defect:.3g} exceeds {UNITARY_TOL}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def qubits(self) -> int:
        return self.dim.bit_length() - 1

    def adjoint(self) -> "DenseUnitary":
        return DenseUnitary(self.matrix.conj().T)


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, DenseUnitary):
        return u.matrix
    return np.asarray(u, dtype=np.complex128)


def _wrap(layout: RegisterLayout, amps: np.ndarray) -> StateVector:
    nrm = float(np.linalg.norm(amps))
    assert abs(nrm - 1.0) <= NORM_TOL, f"operation broke normalization: {nrm}"
    return StateVector(layout, amps, _checked=True)


def _apply_on_axis(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = (matrix @ flat).reshape(moved.shape)
    return np.moveaxis(out, 0, axis)


def apply(state: StateVector, u, target: str) -> StateVector:
    """Apply a unitary to one register."""
    m = _as_matrix(u)
    d = state.layout.dim_of(target)
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} does not match register {target!r} (dim {d})")
    tensor = _apply_on_axis(state.tensor(), m, state.layout.axis_of(target))
    return _wrap(state.layout, tensor.reshape(-1))


def apply_on_qubits(state: StateVector, u, target: str, qubits: Sequence[int]) -> StateVector:
    """Apply a gate to selected qubits inside one register.

    Qubit 0 is the most significant bit of the register value.
    """
    m = _as_matrix(u)
    w = state.layout.width_of(target)
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubits in {qubits}")
    if any(not 0 <= q < w for q in qubits):
        raise ValueError(f"qubits {qubits} out of range for width {w}")
    k = len(qubits)
    if m.shape != (1 << k, 1 << k):
        raise ValueError(f"matrix shape {m.shape} does not match {k} qubits")

    ax = state.layout.axis_of(target)
    tensor = state.tensor()
    pre = tensor.shape[:ax]
    post = tensor.shape[ax + 1 :]
    bits = tensor.reshape(pre + (2,) * w + post)
    offset = len(pre)
    axes = [offset + q for q in qubits]
    moved = np.moveaxis(bits, axes, range(k))
    flat = moved.reshape(1 << k, -1)
    out = (m @ flat).reshape(moved.shape)
    restored = np.moveaxis(out, range(k), axes)
    return _wrap(state.layout, restored.reshape(-1))


def apply_controlled(state: StateVector, u, control: str, target: str) -> StateVector:
    """Apply a unitary to `target` on the branch where 1-qubit `control` is 1."""
    if state.layout.width_of(control) != 1:
        raise ValueError(f"control register {control!r} must have width 1")
    return apply_if_ge(state, u, control, 1, target)


def apply_if_ge(state: StateVector, u, counter: str, threshold: int, target: str) -> StateVector:
    """Apply a unitary to `target` on branches where `counter` >= threshold.

    This is the comparator-controlled application used by the sequential
    power construction: one call counts as a single controlled query.
    """
    m = _as_matrix(u)
    layout = state.layout
    d = layout.dim_of(target)
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} does not match register {target!r}")
    c_ax = layout.axis_of(counter)
    t_ax = layout.axis_of(target)
    if c_ax == t_ax:
        raise ValueError("counter and target must be distinct registers")
    tensor = state.tensor().copy()
    moved = np.moveaxis(tensor, c_ax, 0)
    t_ax_moved = t_ax + 1 if t_ax < c_ax else t_ax
    if threshold < moved.shape[0]:
        moved[threshold:] = _apply_on_axis(moved[threshold:], m, t_ax_moved)
    back = np.moveaxis(moved, 0, c_ax)
    return _wrap(layout, back.reshape(-1))


def apply_diagonal(state: StateVector, values: np.ndarray, registers: Sequence[str]) -> StateVector:
    """Multiply amplitudes by a phase table indexed by the given registers.

    `values` must have one axis per named register (in the given order) and
    unit-modulus entries.
    """
    layout = state.layout
    names = tuple(registers)
    values = np.asarray(values, dtype=np.complex128)
    dims = tuple(layout.dim_of(n) for n in names)
    if values.shape != dims:
        raise ValueError(f"phase table shape {values.shape} does not match registers {dims}")
    axes = [layout.axis_of(n) for n in names]
    tensor = state.tensor().copy()
    moved = np.moveaxis(tensor, axes, range(len(axes)))
    moved *= values.reshape(dims + (1,) * (moved.ndim - len(dims)))
    back = np.moveaxis(moved, range(len(axes)), axes)
    return _wrap(layout, back.reshape(-1))


def distribution(state: StateVector, register: str) -> np.ndarray:
    """Exact measurement distribution of one register (marginal over the rest)."""
    ax = state.layout.axis_of(register)
    probs = np.abs(state.tensor()) ** 2
    axes = tuple(i for i in range(probs.ndim) if i != ax)
    p = probs.sum(axis=axes)
    total = p.sum()
    assert abs(total - 1.0) <= 1e-9, f"distribution mass {total} deviates from 1"
    return p / total


def measure(
    state: StateVector, register: str, rng: np.random.Generator
) -> tuple[int, StateVector]:
    """Sample a register value and return (outcome, collapsed state)."""
    p = distribution(state, register)
    outcome = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
    outcome = min(outcome, len(p) - 1)
    ax = state.layout.axis_of(register)
    tensor = state.tensor().copy()
    moved = np.moveaxis(tensor, ax, 0)
    mask = np.zeros(moved.shape[0], dtype=bool)
    mask[outcome] = True
    moved[~mask] = 0.0
    amps = np.moveaxis(moved, 0, ax).reshape(-1)
    amps /= np.linalg.norm(amps)
    return outcome, StateVector(state.layout, amps, _checked=True)


def format_state(state: StateVector, min_magnitude: float = 1e-12) -> str:
    """Serialize as lines of `index re im`, keeping |amplitude| >= min_magnitude."""
    lines = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) >= min_magnitude:
            lines.append(f"{i} {a.real:+.15e} {a.imag:+.15e}")
    return "\n".join(lines) + "\n"


def parse_state(text: str, layout: RegisterLayout) -> StateVector:
    """Inverse of :func:`format_state`."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for line in text.strip().splitlines():
        idx, re_s, im_s = line.split()
        amps[int(idx)] = float(re_s) + 1j * float(im_s)
    return StateVector(layout, amps)
