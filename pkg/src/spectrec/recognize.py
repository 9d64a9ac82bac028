"""Statistical recognition of a candidate eigenvalue of a unitary device.

The candidate frequency is tested by preparing random argument registers,
amplifying their eigenspace component with random-stopping-time rotations,
and reading the frequency back through the reveal transform. The verdict is
a vote: accept when at least a 5/32 fraction of the registers read back a
frequency inside the match window of the candidate.

Two interchangeable backends compute the same statistics. The projector
backend uses the spectral decomposition (simulation privilege) and closed
rotation laws, charging the query counts the coherent protocol would spend.
The circuit backend actually runs the registers and ancillas as one dense
statevector; both consume the random stream identically, so on fixtures with
grid-aligned spectra they produce identical draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import rng as rng_mod
from .phase import (
    FrequencyTable,
    build_frequency_table,
    rest,
    rev,
    reveal_distribution,
)
from .report import QueryCounter, RunReport, Timer
from .spectral import (
    ProfileError,
    SparsityProfile,
    SpectralDecomposition,
    circ_dist,
    decompose,
)
from .statevec import (
    MAX_WIDTH,
    RegisterLayout,
    StateVector,
    apply,
    apply_diagonal,
    distribution,
)

__all__ = ["RecognitionQuery", "recognize_eigenvalue", "register_reading_distribution"]

ACCEPT_FRACTION = 5.0 / 32.0
MATCH_WINDOW_COARSE = 0.75  # fraction of a coarse cell
GROUP_WINDOW_FINE = 2.0  # fine cells: clusters this close to the candidate count as its group


@dataclass(frozen=True)
class RecognitionQuery:
    """Parameters of one recognition run."""

    omega: float
    m_coarse: int
    fine: int | None = None  # defaults to 16 * m_coarse
    registers: int = 32
    copies: int = 2  # reveal ancillas inside the eigenspace reflection
    beta: float = 2.0
    accept_fraction: float = ACCEPT_FRACTION
    match_window: float | None = None  # frequency units; default 0.75 / m_coarse
    sign_window: float | None = None  # frequency units; default 1 / fine
    backend: str = "projector"
    rest_strategy: str = "auto"

    def resolved(self) -> "RecognitionQuery":
        fine = self.fine if self.fine is not None else 16 * self.m_coarse
        match_window = (
            self.match_window
            if self.match_window is not None
            else MATCH_WINDOW_COARSE / self.m_coarse
        )
        sign_window = self.sign_window if self.sign_window is not None else 1.0 / fine
        return replace(
            self, fine=fine, match_window=match_window, sign_window=sign_window
        )

    def config_dict(self) -> dict[str, Any]:
        q = self.resolved()
        return {
            "omega": q.omega,
            "m_coarse": q.m_coarse,
            "fine": q.fine,
            "registers": q.registers,
            "copies": q.copies,
            "beta": q.beta,
            "accept_fraction": q.accept_fraction,
            "match_window": q.match_window,
            "sign_window": q.sign_window,
            "backend": q.backend,
            "rest_strategy": q.rest_strategy,
        }


def _register_draws(
    rs: np.random.Generator, dim: int, bound: int
) -> tuple[np.ndarray, int, float]:
    """Draws shared verbatim by both backends: start vector, time, read point."""
    v = rs.standard_normal(dim) + 1j * rs.standard_normal(dim)
    v /= np.linalg.norm(v)
    t = int(rs.integers(0, bound + 1))
    return v, t, float(rs.random())


def _kernel_cache(dec: SpectralDecomposition, fine: int) -> list[np.ndarray]:
    return [reveal_distribution(float(f), fine) for f in dec.frequencies]


def register_reading_distribution(
    dec: SpectralDecomposition,
    omega: float,
    start: np.ndarray,
    t: int,
    fine: int,
    kernels: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Exact reveal distribution after t amplification steps from `start`.

    The rotated register is a combination of its eigenspace component at the
    candidate and the orthogonal rest; the final reveal reads a mixture of
    each cluster's kernel weighted by the rotated squared projections.
    """
    if kernels is None:
        kernels = _kernel_cache(dec, fine)
    in_cluster = circ_dist(dec.frequencies, omega) <= GROUP_WINDOW_FINE / fine
    weights = dec.weights(start)
    s2 = float(weights[in_cluster].sum())
    s2 = min(max(s2, 0.0), 1.0)
    p_in = float(np.sin((2 * t + 1) * math.asin(math.sqrt(s2))) ** 2)
    out = np.zeros(fine)
    for q, (w, kern) in enumerate(zip(weights, kernels)):
        if w <= 0.0:
            continue
        if in_cluster[q]:
            out += (p_in * w / s2 if s2 > 0 else 0.0) * kern
        else:
            out += ((1.0 - p_in) * w / (1.0 - s2) if s2 < 1.0 else 0.0) * kern
    total = out.sum()
    if total <= 0.0:  # candidate group is the whole space and p_in == 0
        return np.full(fine, 1.0 / fine)
    return out / total


def _sample(dist: np.ndarray, u: float) -> int:
    c = np.cumsum(dist)
    return int(min(np.searchsorted(c, u * c[-1], side="right"), len(dist) - 1))


def _charge(counter: QueryCounter | None, query: RecognitionQuery, t: int) -> None:
    if counter is None:
        return
    per_reflection = 2 * query.copies * (query.fine - 1)
    counter.charge("u_applications", t * per_reflection + (query.fine - 1))


def _projector_run(
    u_matrix: np.ndarray,
    query: RecognitionQuery,
    seed: int,
    counter: QueryCounter | None,
    dec: SpectralDecomposition | None,
) -> tuple[str, dict[str, Any]]:
    if dec is None:
        dec = decompose(u_matrix)
    dim = dec.dim
    bound = int(math.ceil(query.beta * math.sqrt(dim)))
    kernels = _kernel_cache(dec, query.fine)
    grid = np.arange(query.fine) / query.fine
    matches = 0
    records = []
    for k in range(query.registers):
        rs = rng_mod.stream(seed, "register", k)
        start, t, u_read = _register_draws(rs, dim, bound)
        dist = register_reading_distribution(dec, query.omega, start, t, query.fine, kernels)
        reading = _sample(dist, u_read)
        matched = bool(circ_dist(grid[reading], query.omega) <= query.match_window + 1e-12)
        matches += matched
        records.append({"t": t, "reading": reading, "matched": matched})
        _charge(counter, query, t)
    fraction = matches / query.registers
    verdict = "accept" if fraction >= query.accept_fraction else "reject"
    return verdict, {
        "fraction": fraction,
        "matches": matches,
        "bound": bound,
        "registers": records,
    }


def _sign_table(fine: int, copies: int, omega: float, window: float) -> np.ndarray:
    """Diagonal that flips sign when at least half the reveal ancillas match."""
    grid = np.arange(fine) / fine
    hit = (circ_dist(grid, omega) <= window + 1e-12).astype(int)
    counts = np.zeros((fine,) * copies, dtype=int)
    for axis in range(copies):
        shape = [1] * copies
        shape[axis] = fine
        counts = counts + hit.reshape(shape)
    return np.where(counts * 2 >= copies, -1.0, 1.0).astype(np.complex128)


def _pick_rest(
    query: RecognitionQuery, dec: SpectralDecomposition
) -> tuple[str, FrequencyTable | None]:
    if query.rest_strategy == "inverse":
        return "inverse", None
    try:
        profile = SparsityProfile.from_decomposition(dec, query.m_coarse, query.fine)
        return "turning", build_frequency_table(dec, profile)
    except ProfileError:
        if query.rest_strategy == "turning":
            raise
        return "inverse", None


def _circuit_run(
    u_matrix: np.ndarray,
    query: RecognitionQuery,
    seed: int,
    counter: QueryCounter | None,
    dec: SpectralDecomposition | None,
) -> tuple[str, dict[str, Any]]:
    if dec is None:
        dec = decompose(u_matrix)
    dim = u_matrix.shape[0]
    n_bits = dim.bit_length() - 1
    p_bits = query.fine.bit_length() - 1
    if (1 << n_bits) != dim or (1 << p_bits) != query.fine:
        raise ValueError("circuit backend needs power-of-two dimensions")
    total_bits = n_bits + (query.copies + 1) * p_bits
    if total_bits > MAX_WIDTH:
        raise ValueError(f"layout needs {total_bits} qubits, cap is {MAX_WIDTH}")
    sign_regs = [f"sign{j}" for j in range(query.copies)]
    layout = RegisterLayout(
        (("main", n_bits),)
        + tuple((r, p_bits) for r in sign_regs)
        + (("out", p_bits),)
    )
    strategy, table = _pick_rest(query, dec)
    sign = _sign_table(query.fine, query.copies, query.omega, query.sign_window)
    bound = int(math.ceil(query.beta * math.sqrt(dim)))
    grid = np.arange(query.fine) / query.fine

    anc_zero = np.zeros(query.fine ** (query.copies + 1), dtype=np.complex128)
    anc_zero[0] = 1.0
    matches = 0
    records = []
    junk_max = 0.0
    for k in range(query.registers):
        rs = rng_mod.stream(seed, "register", k)
        start, t, u_read = _register_draws(rs, dim, bound)
        state = StateVector(layout, np.kron(start, anc_zero))
        reflect_start = np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(start, start.conj())
        for _ in range(t):
            for reg in sign_regs:
                state = rev(state, u_matrix, reg, "main")
            state = apply_diagonal(state, sign, sign_regs)
            for reg in reversed(sign_regs):
                state = rest(state, u_matrix, reg, "main", table=table, strategy=strategy)
            state = apply(state, reflect_start, "main")
        state = rev(state, u_matrix, "out", "main")
        out_dist = distribution(state, "out")
        reading = _sample(out_dist, u_read)
        matched = bool(circ_dist(grid[reading], query.omega) <= query.match_window + 1e-12)
        matches += matched
        probs = np.abs(state.tensor()) ** 2
        sign_joint = probs.sum(axis=(0, probs.ndim - 1)).reshape(-1)
        junk_max = max(junk_max, float(1.0 - sign_joint[0]))
        records.append({"t": t, "reading": reading, "matched": matched})
        _charge(counter, query, t)
    fraction = matches / query.registers
    verdict = "accept" if fraction >= query.accept_fraction else "reject"
    return verdict, {
        "fraction": fraction,
        "matches": matches,
        "bound": bound,
        "registers": records,
        "ancilla_junk_max": junk_max,
        "rest_strategy": strategy,
    }


def recognize_eigenvalue(
    u,
    query: RecognitionQuery,
    seed: int,
    *,
    counter: QueryCounter | None = None,
    dec: SpectralDecomposition | None = None,
) -> RunReport:
    """Decide whether `query.omega` approximates an eigenvalue frequency of u."""
    from .statevec import DenseUnitary

    matrix = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    q = query.resolved()
    counter = counter if counter is not None else QueryCounter()
    with Timer() as timer:
        if q.backend == "projector":
            verdict, stats = _projector_run(matrix, q, seed, counter, dec)
        elif q.backend == "circuit":
            verdict, stats = _circuit_run(matrix, q, seed, counter, dec)
        else:
            raise ValueError(f"unknown backend {q.backend!r}")
    return RunReport(
        pipeline="recognize-eigenvalue",
        verdict=verdict,
        seed=seed,
        config=q.config_dict(),
        stats=stats,
        queries=counter.snapshot(),
        wall_time_s=timer.elapsed,
    )
