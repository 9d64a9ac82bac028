"""Finding circuits whose spectrum matches a listed structure.

A spectrum specification lists candidate frequencies on a coarse/fine grid
pair plus a matching mode: the device spectrum must equal the listing
(determined), include it (contains), or avoid it (excludes). Reality of a
single frequency is decided by plain reveal statistics on random registers;
the search over coded circuits then runs random-stopping-time amplification
with per-proposal verification and a cross-run plurality.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import rng as rng_mod
from .amplify import BasisReflection, random_time_search
from .circuit import GateSet, build_unitary, code_space_size, decode
from .phase import reveal_distribution
from .recognize import MATCH_WINDOW_COARSE
from .report import QueryCounter, RunReport, Timer
from .spectral import SpectralDecomposition, circ_dist, decompose

__all__ = [
    "SpectrumSpec",
    "is_real_frequency",
    "spectrum_matches",
    "find_structure",
]


@dataclass(frozen=True)
class SpectrumSpec:
    """Listed frequencies plus the matching mode."""

    m_coarse: int
    fine: int
    frequencies: tuple[float, ...]
    mode: str = "determined"

    def __post_init__(self) -> None:
        if self.mode not in ("determined", "contains", "excludes"):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "frequencies", tuple(float(f) % 1.0 for f in self.frequencies))

    def cells(self) -> set[int]:
        return {int(round(f * self.m_coarse)) % self.m_coarse for f in self.frequencies}

    def to_json(self) -> str:
        return json.dumps(
            {
                "M": self.m_coarse,
                "L": self.fine,
                "mode": self.mode,
                "frequencies": list(self.frequencies),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "SpectrumSpec":
        doc = json.loads(text)
        return cls(
            int(doc["M"]), int(doc["L"]), tuple(doc["frequencies"]), str(doc.get("mode", "determined"))
        )


def is_real_frequency(
    dec: SpectralDecomposition,
    omega: float,
    fine: int,
    rs: np.random.Generator,
    *,
    m_coarse: int,
    j_registers: int = 10,
    k_copies: int = 20,
    register_fraction: float = 0.1,
    vote_fraction: float = 0.2,
    counter: QueryCounter | None = None,
) -> tuple[bool, dict[str, Any]]:
    """Reveal statistics on random registers: is omega present in the spectrum?

    Each register collapses onto one eigenvalue cluster with probability equal
    to its squared projection, then its k reveal copies read that cluster's
    kernel. A register votes when at least `register_fraction` of its copies
    land inside the match window; the frequency is real when at least
    `vote_fraction` of registers vote.
    """
    dim = dec.dim
    window = MATCH_WINDOW_COARSE / m_coarse
    grid = np.arange(fine) / fine
    in_window = circ_dist(grid, omega) <= window + 1e-12
    match_prob = [
        float(reveal_distribution(float(f), fine)[in_window].sum()) for f in dec.frequencies
    ]
    votes = 0
    for _ in range(j_registers):
        v = rs.standard_normal(dim) + 1j * rs.standard_normal(dim)
        v /= np.linalg.norm(v)
        weights = dec.weights(v)
        weights = np.clip(weights, 0.0, None)
        weights /= weights.sum()
        cluster = int(rs.choice(len(weights), p=weights))
        hits = int(rs.binomial(k_copies, match_prob[cluster]))
        if hits >= register_fraction * k_copies:
            votes += 1
        if counter is not None:
            counter.charge("u_applications", k_copies * (fine - 1))
    real = votes >= vote_fraction * j_registers
    return real, {"votes": votes, "registers": j_registers}


def _oracle_real(dec: SpectralDecomposition, omega: float, fine: int) -> bool:
    return bool(np.any(circ_dist(dec.frequencies, omega) <= 2.0 / fine))


def spectrum_matches(
    u,
    spec: SpectrumSpec,
    seed: int,
    *,
    method: str = "statistical",
    j_registers: int = 10,
    k_copies: int = 20,
    counter: QueryCounter | None = None,
    dec: SpectralDecomposition | None = None,
) -> tuple[bool, dict[str, Any]]:
    """Does the device spectrum match the listing under the spec's mode?

    determined: the populated coarse cells are exactly the listed ones.
    contains: every listed frequency is present. excludes: none is.
    """
    from .statevec import DenseUnitary

    matrix = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    if dec is None:
        dec = decompose(matrix)
    listed = spec.cells()
    if spec.mode == "determined":
        probe_cells = sorted(range(spec.m_coarse))
    else:
        probe_cells = sorted(listed)
    listed_omega = {int(round(f * spec.m_coarse)) % spec.m_coarse: f for f in spec.frequencies}
    per_cell = {}
    for cell in probe_cells:
        omega = listed_omega.get(cell, cell / spec.m_coarse)
        if method == "oracle":
            real = _oracle_real(dec, omega, spec.fine)
        else:
            real, _ = is_real_frequency(
                dec,
                omega,
                spec.fine,
                rng_mod.stream(seed, "cell", cell),
                m_coarse=spec.m_coarse,
                j_registers=j_registers,
                k_copies=k_copies,
                counter=counter,
            )
        per_cell[cell] = bool(real)
    if spec.mode == "determined":
        ok = all(per_cell[c] == (c in listed) for c in probe_cells)
    elif spec.mode == "contains":
        ok = all(per_cell[c] for c in probe_cells)
    else:
        ok = not any(per_cell[c] for c in probe_cells)
    return ok, {"cells": per_cell, "mode": spec.mode, "method": method}


def find_structure(
    spec: SpectrumSpec,
    gate_set: GateSet,
    n_qubits: int,
    length_cap: int,
    seed: int,
    *,
    search_space: int | None = None,
    runs: int = 9,
    retries: int = 4,
    j_registers: int = 10,
    k_copies: int = 20,
) -> RunReport:
    """Search the coded circuit space for a spectrum match.

    Each run makes up to `retries` amplified proposals, verifying each with
    the statistical matcher; runs that verify nothing report not-found, and
    the final answer is the plurality of verified codes across runs. The
    search itself is routed by the exact matcher, while every proposal and
    charge goes through the statistical one, mirroring a bounded-error oracle
    amplified inside the search.
    """
    total = code_space_size(gate_set, n_qubits, length_cap)
    size = total if search_space is None else min(search_space, total)
    counter = QueryCounter()
    with Timer() as timer:
        unitaries = [build_unitary(decode(c, gate_set, n_qubits, length_cap), gate_set) for c in range(size)]
        decs = [decompose(u.matrix) for u in unitaries]
        oracle_marked = [
            c
            for c in range(size)
            if spectrum_matches(
                unitaries[c], spec, 0, method="oracle", dec=decs[c]
            )[0]
        ]
        reflection = BasisReflection(size, marked=oracle_marked)
        bound = int(math.ceil(math.sqrt(size)))
        match_cost = _match_query_cost(spec, j_registers, k_copies)

        found_per_run: list[int | None] = []
        for run in range(runs):
            rs = rng_mod.stream(seed, "run", run)
            verdict_code: int | None = None
            for attempt in range(retries):
                draw = random_time_search(reflection, rs, bound=bound)
                counter.charge("u_applications", draw.t * match_cost)
                ok, _ = spectrum_matches(
                    unitaries[draw.outcome],
                    spec,
                    rng_mod.child_seed(seed, "verify", run, attempt),
                    j_registers=j_registers,
                    k_copies=k_copies,
                    counter=counter,
                    dec=decs[draw.outcome],
                )
                if ok:
                    verdict_code = draw.outcome
                    break
            found_per_run.append(verdict_code)

        found = [c for c in found_per_run if c is not None]
        if found:
            winner, _ = Counter(found).most_common(1)[0]
            verdict = "found"
        else:
            winner = None
            verdict = "not-found"
    return RunReport(
        pipeline="find-structure",
        verdict=verdict,
        seed=seed,
        config={
            "spec": json.loads(spec.to_json()),
            "gate_set": gate_set.name,
            "n": n_qubits,
            "c": length_cap,
            "search_space": size,
            "runs": runs,
            "retries": retries,
            "j_registers": j_registers,
            "k_copies": k_copies,
        },
        stats={
            "code": winner,
            "per_run": found_per_run,
            "oracle_marked_count": len(oracle_marked),
        },
        queries=counter.snapshot(),
        wall_time_s=timer.elapsed,
    )


def _match_query_cost(spec: SpectrumSpec, j_registers: int, k_copies: int) -> int:
    cells = spec.m_coarse if spec.mode == "determined" else len(spec.cells())
    return cells * j_registers * k_copies * (spec.fine - 1)
