"""Gate-array circuits over small fixed gate sets, with dense integer coding.

A circuit on n qubits is a sequence of placements, each a gate from the set
applied to an ordered tuple of distinct qubits. Circuits of length at most c
are in bijection with the integers 0 .. T-1 where T = sum_{k<=c} G**k and G
is the number of placements; the empty circuit is code 0. The coding lets
search routines treat "all short programs" as one flat index space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .statevec import DenseUnitary, StateVector, apply_if_ge, apply_on_qubits

__all__ = [
    "Gate",
    "GateSet",
    "CircuitCode",
    "code_space_size",
    "encode",
    "decode",
    "app",
    "build_unitary",
    "u_seq",
    "circuit_to_json",
    "circuit_from_json",
]

_SQ2 = 1.0 / np.sqrt(2.0)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
_T = np.diag([1.0, np.exp(1j * np.pi / 4)]).astype(np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.diag([1.0, -1.0]).astype(np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


@dataclass(frozen=True)
class Gate:
    """Named elementary gate; for 2-qubit gates the first target is the control."""

    name: str
    arity: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128).copy()
        if m.shape != (1 << self.arity, 1 << self.arity):
            raise ValueError(f"gate {self.name!r}: matrix shape {m.shape} vs arity {self.arity}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class GateSet:
    """Ordered collection of gates defining one placement alphabet."""

    name: str
    gates: tuple[Gate, ...]

    @classmethod
    def standard(cls) -> "GateSet":
        return cls(
            "standard",
            (
                Gate("H", 1, _H),
                Gate("T", 1, _T),
                Gate("X", 1, _X),
                Gate("CNOT", 2, _CNOT),
            ),
        )

    @classmethod
    def involutive(cls) -> "GateSet":
        return cls(
            "involutive",
            (
                Gate("X", 1, _X),
                Gate("Z", 1, _Z),
                Gate("CZ", 2, _CZ),
                Gate("SWAP", 2, _SWAP),
            ),
        )

    @classmethod
    def by_name(cls, name: str) -> "GateSet":
        try:
            return {"standard": cls.standard, "involutive": cls.involutive}[name]()
        except KeyError:
            raise ValueError(f"unknown gate set {name!r}") from None

    def gate_index(self, name: str) -> int:
        for i, g in enumerate(self.gates):
            if g.name == name:
                return i
        raise ValueError(f"gate {name!r} not in set {self.name!r}")

    def placements(self, n: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """All (gate index, target tuple) pairs on n qubits, in a fixed order."""
        out: list[tuple[int, tuple[int, ...]]] = []
        for gi, gate in enumerate(self.gates):
            if gate.arity > n:
                continue
            for targets in permutations(range(n), gate.arity):
                out.append((gi, targets))
        return tuple(out)


@dataclass(frozen=True)
class CircuitCode:
    """A concrete gate sequence on n qubits."""

    n: int
    gates: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        norm = tuple((int(g), tuple(int(q) for q in ts)) for g, ts in self.gates)
        object.__setattr__(self, "gates", norm)

    def __len__(self) -> int:
        return len(self.gates)


def code_space_size(gate_set: GateSet, n: int, c: int) -> int:
    g = len(gate_set.placements(n))
    return sum(g**k for k in range(c + 1))


def encode(circ: CircuitCode, gate_set: GateSet, c: int) -> int:
    """Dense code of a circuit: empty circuit is 0, codes are contiguous."""
    placements = gate_set.placements(circ.n)
    g = len(placements)
    k = len(circ.gates)
    if k > c:
        raise ValueError(f"circuit length {k} exceeds cap {c}")
    lookup = {p: i for i, p in enumerate(placements)}
    value = 0
    for gi, targets in circ.gates:
        try:
            value = value * g + lookup[(gi, targets)]
        except KeyError:
            raise ValueError(f"placement {(gi, targets)} invalid on {circ.n} qubits") from None
    return sum(g**j for j in range(k)) + value


def decode(code: int, gate_set: GateSet, n: int, c: int) -> CircuitCode:
    """Inverse of :func:`encode` on the range 0 .. code_space_size-1."""
    placements = gate_set.placements(n)
    g = len(placements)
    total = code_space_size(gate_set, n, c)
    if not 0 <= code < total:
        raise ValueError(f"code {code} out of range [0, {total})")
    k = 0
    base = 0
    while code - base >= g**k:
        base += g**k
        k += 1
    value = code - base
    digits = []
    for _ in range(k):
        digits.append(value % g)
        value //= g
    digits.reverse()
    return CircuitCode(n, tuple(placements[d] for d in digits))


def _coerce(circ: CircuitCode | int, gate_set: GateSet, n: int | None, c: int | None) -> CircuitCode:
    if isinstance(circ, CircuitCode):
        return circ
    if n is None or c is None:
        raise ValueError("decoding an integer code requires n and c")
    return decode(int(circ), gate_set, n, c)


def app(
    state: StateVector,
    circ: CircuitCode | int,
    target: str,
    gate_set: GateSet,
    *,
    n: int | None = None,
    c: int | None = None,
) -> StateVector:
    """Apply a (possibly integer-coded) circuit to the named register."""
    circuit = _coerce(circ, gate_set, n, c)
    if state.layout.width_of(target) != circuit.n:
        raise ValueError(
            f"register {target!r} has width {state.layout.width_of(target)}, circuit needs {circuit.n}"
        )
    for gi, targets in circuit.gates:
        state = apply_on_qubits(state, gate_set.gates[gi].matrix, target, targets)
    return state


def build_unitary(
    circ: CircuitCode | int,
    gate_set: GateSet,
    *,
    n: int | None = None,
    c: int | None = None,
) -> DenseUnitary:
    """Dense matrix of the circuit, columns built by applying it to basis states."""
    circuit = _coerce(circ, gate_set, n, c)
    dim = 1 << circuit.n
    from .statevec import RegisterLayout

    layout = RegisterLayout((("q", circuit.n),))
    cols = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(dim):
        out = app(StateVector.basis(layout, j), circuit, "q", gate_set)
        cols[:, j] = out.amplitudes
    return DenseUnitary(cols)


def u_seq(
    state: StateVector,
    u,
    counter: str,
    target: str,
    *,
    gate_set: GateSet | None = None,
    c: int | None = None,
) -> StateVector:
    """Sequential powers: branch with counter value a receives U**a.

    Implemented as L-1 comparator-controlled applications (thresholds
    1 .. L-1), which is also the query count charged when U is opaque.
    """
    layout = state.layout
    length = layout.dim_of(counter)
    if isinstance(u, (CircuitCode, int)):
        if gate_set is None:
            raise ValueError("circuit-coded u requires gate_set")
        u = build_unitary(u, gate_set, n=layout.width_of(target), c=c)
    for j in range(1, length):
        state = apply_if_ge(state, u, counter, j, target)
    return state


def circuit_to_json(circ: CircuitCode, gate_set: GateSet) -> str:
    doc = {
        "n": circ.n,
        "gate_set": gate_set.name,
        "gates": [
            {"name": gate_set.gates[gi].name, "targets": list(ts)} for gi, ts in circ.gates
        ],
    }
    return json.dumps(doc, indent=2)


def circuit_from_json(text: str) -> tuple[CircuitCode, GateSet]:
    doc = json.loads(text)
    gate_set = GateSet.by_name(doc["gate_set"])
    gates = tuple(
        (gate_set.gate_index(item["name"]), tuple(item["targets"])) for item in doc["gates"]
    )
    return CircuitCode(int(doc["n"]), gates), gate_set
