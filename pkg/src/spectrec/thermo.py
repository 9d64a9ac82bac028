"""Thermodynamics of a Hamiltonian read out through its evolution device.

The Hamiltonian enters only through the unitary exp(i(E_s - H)/E_s), whose
eigenvalue frequencies encode energies affinely: omega = (E_s - E)/(2*pi*E_s).
The pipeline scans the coarse grid for populated frequencies, counts each
level's degeneracy from rotation speed, converts fine readings back to
energies, and evaluates the partition sum, mean energy, and entropy.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import rng as rng_mod
from .amplify import CountResult, count_rotation_time
from .phase import window_mass, reveal_distribution
from .recognize import RecognitionQuery, recognize_eigenvalue
from .report import QueryCounter, RunReport, Timer
from .spectral import SpectralDecomposition, circ_dist, decompose
from .statevec import DenseUnitary

__all__ = [
    "rescale",
    "frequency_to_energy",
    "energy_to_frequency",
    "find_anchor_frequencies",
    "count_level_degeneracy",
    "ThermoPoint",
    "thermo_functions",
    "run_thermo",
    "load_hamiltonian",
]


def energy_to_frequency(energy: float, e_scale: float) -> float:
    return (e_scale - energy) / (2.0 * math.pi * e_scale)


def frequency_to_energy(omega: float, e_scale: float) -> float:
    return e_scale * (1.0 - 2.0 * math.pi * omega)


def rescale(hamiltonian: np.ndarray, e_scale: float) -> DenseUnitary:
    """exp(i (E_s - H)/E_s); frequencies land in [0, 1) iff the spectrum fits
    the band (E_s(1 - 2*pi), E_s]."""
    if e_scale <= 0:
        raise ValueError("energy scale must be positive")
    h = np.asarray(hamiltonian, dtype=np.complex128)
    if np.linalg.norm(h - h.conj().T) > 1e-10:
        raise ValueError("hamiltonian must be hermitian")
    evals, evecs = np.linalg.eigh(h)
    if evals.max() > e_scale + 1e-12:
        raise ValueError(f"spectrum exceeds the scale: max {evals.max()} > {e_scale}")
    if evals.min() <= e_scale * (1.0 - 2.0 * math.pi) - 1e-12:
        raise ValueError("spectrum falls below the representable band")
    phases = np.exp(1j * (e_scale - evals) / e_scale)
    return DenseUnitary((evecs * phases) @ evecs.conj().T)


def find_anchor_frequencies(
    u,
    m_coarse: int,
    fine: int,
    seed: int,
    *,
    registers: int = 32,
    counter: QueryCounter | None = None,
    dec: SpectralDecomposition | None = None,
) -> list[dict[str, Any]]:
    """Probe every coarse cell; return the accepted ones with fine readings.

    The fine frequency estimate is the most common matched reading, which is
    exact whenever the spectrum sits on the fine grid.
    """
    matrix = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    if dec is None:
        dec = decompose(matrix)
    found = []
    for cell in range(m_coarse):
        omega = cell / m_coarse
        query = RecognitionQuery(
            omega=omega, m_coarse=m_coarse, fine=fine, registers=registers
        )
        report = recognize_eigenvalue(
            matrix, query, rng_mod.child_seed(seed, "anchor", cell), counter=counter, dec=dec
        )
        if report.verdict != "accept":
            continue
        readings = [r["reading"] for r in report.stats["registers"] if r["matched"]]
        mode_reading = Counter(readings).most_common(1)[0][0]
        found.append(
            {
                "cell": cell,
                "fraction": report.stats["fraction"],
                "reading": int(mode_reading),
                "omega_hat": mode_reading / fine,
            }
        )
    return found


def count_level_degeneracy(
    u,
    omega: float,
    seed: int,
    *,
    m_coarse: int,
    fine: int,
    epsilon: float = 0.05,
    copies: int = 20,
    probe_registers: int = 2048,
    counter: QueryCounter | None = None,
    dec: SpectralDecomposition | None = None,
) -> CountResult:
    """Dimension of the eigenspace at `omega` from the rotation-speed sweep."""
    matrix = u.matrix if isinstance(u, DenseUnitary) else np.asarray(u, dtype=np.complex128)
    if dec is None:
        dec = decompose(matrix)
    dim = dec.dim
    in_cluster = circ_dist(dec.frequencies, omega) <= 2.0 / fine
    window = 0.75 / m_coarse
    masses = [
        window_mass(reveal_distribution(float(f), fine), omega, window)
        for f in dec.frequencies
    ]
    q_in = min((m for m, flag in zip(masses, in_cluster) if flag), default=0.0)
    q_out = max((m for m, flag in zip(masses, in_cluster) if not flag), default=0.0)

    def overlap_sampler(gen: np.random.Generator, n: int) -> np.ndarray:
        v = gen.standard_normal((dim, n)) + 1j * gen.standard_normal((dim, n))
        v /= np.linalg.norm(v, axis=0)
        s2 = np.zeros(n)
        for k, flag in enumerate(in_cluster):
            if flag:
                s2 += np.linalg.norm(dec.bases[k].conj().T @ v, axis=0) ** 2
        return np.sqrt(np.clip(s2, 0.0, 1.0))

    return count_rotation_time(
        dim,
        overlap_sampler,
        rng_mod.stream(seed, "degeneracy"),
        match_probs=(q_in, q_out),
        copies=copies,
        n_registers=probe_registers,
        epsilon=epsilon,
        counter=counter,
    )


@dataclass(frozen=True)
class ThermoPoint:
    """Equilibrium values at one temperature (entropy in Boltzmann units)."""

    k_t: float
    partition: float
    log_partition: float
    mean_energy: float
    entropy: float
    free_energy: float


def thermo_functions(
    levels: list[tuple[float, int]], k_ts: list[float], *, truncation: float = 1e-6
) -> list[ThermoPoint]:
    """Partition sum, mean energy, and entropy over the given level table.

    Weights are shifted by the ground energy for stability; levels whose
    Boltzmann weight falls below `truncation` of the leading one are dropped.
    The entropy is computed both as ln Q + <E>/kT and through the free
    energy; the two must agree to numerical precision.
    """
    if not levels:
        raise ValueError("empty level table")
    out = []
    e0 = min(e for e, _ in levels)
    for k_t in k_ts:
        if k_t <= 0:
            raise ValueError("temperatures must be positive")
        z = [(e, d * math.exp(-(e - e0) / k_t)) for e, d in levels]
        z_max = max(w for _, w in z)
        z = [(e, w) for e, w in z if w >= truncation * z_max]
        q_shift = sum(w for _, w in z)
        log_q = math.log(q_shift) - e0 / k_t
        mean_e = sum(e * w for e, w in z) / q_shift
        entropy = log_q + mean_e / k_t
        free = -k_t * log_q
        entropy_gibbs = (mean_e - free) / k_t
        assert abs(entropy - entropy_gibbs) <= 1e-9 * max(1.0, abs(entropy))
        out.append(ThermoPoint(k_t, math.exp(log_q), log_q, mean_e, entropy, free))
    return out


def run_thermo(
    hamiltonian: np.ndarray,
    e_scale: float,
    k_ts: list[float],
    seed: int,
    *,
    m_coarse: int = 8,
    fine: int | None = None,
    registers: int = 32,
    epsilon: float = 0.05,
    probe_registers: int = 32768,
) -> RunReport:
    """Full pipeline: rescale, locate levels, count degeneracies, evaluate.

    Degeneracy probes default to a high register count: the fixtures live at
    small dimension, where adjacent dimensions predict probe curves only a
    few millis apart and the counting needs the extra averaging.
    """
    fine = fine if fine is not None else 16 * m_coarse
    counter = QueryCounter()
    with Timer() as timer:
        u = rescale(hamiltonian, e_scale)
        dec = decompose(u.matrix)
        anchors = find_anchor_frequencies(
            u, m_coarse, fine, seed, registers=registers, counter=counter, dec=dec
        )
        levels = []
        for row in anchors:
            result = count_level_degeneracy(
                u,
                row["omega_hat"],
                rng_mod.child_seed(seed, "count", row["cell"]),
                m_coarse=m_coarse,
                fine=fine,
                epsilon=epsilon,
                probe_registers=probe_registers,
                counter=counter,
                dec=dec,
            )
            energy = frequency_to_energy(row["omega_hat"], e_scale)
            levels.append(
                {
                    "cell": row["cell"],
                    "omega_hat": row["omega_hat"],
                    "energy": energy,
                    "degeneracy": result.d_refined,
                    "bracket": list(result.bracket),
                }
            )
        table = thermo_functions(
            [(lv["energy"], int(round(lv["degeneracy"]))) for lv in levels], k_ts
        )
        verdict = "ok" if levels else "no-levels-found"
    return RunReport(
        pipeline="thermo",
        verdict=verdict,
        seed=seed,
        config={
            "e_scale": e_scale,
            "k_ts": list(k_ts),
            "m_coarse": m_coarse,
            "fine": fine,
            "registers": registers,
            "epsilon": epsilon,
        },
        stats={
            "levels": levels,
            "thermo": [
                {
                    "k_t": p.k_t,
                    "partition": p.partition,
                    "log_partition": p.log_partition,
                    "mean_energy": p.mean_energy,
                    "entropy": p.entropy,
                    "free_energy": p.free_energy,
                }
                for p in table
            ],
        },
        queries=counter.snapshot(),
        wall_time_s=timer.elapsed,
    )


def load_hamiltonian(text: str) -> tuple[np.ndarray, float]:
    """Parse {"e_scale": s, "matrix": [[[re, im], ...], ...]} or a level table
    {"e_scale": s, "levels": [[energy, degeneracy], ...]} (diagonal form)."""
    doc = json.loads(text)
    e_scale = float(doc["e_scale"])
    if "matrix" in doc:
        rows = doc["matrix"]
        h = np.array([[complex(re, im) for re, im in row] for row in rows])
        return h, e_scale
    if "levels" in doc:
        diag = []
        for energy, deg in doc["levels"]:
            diag.extend([float(energy)] * int(deg))
        return np.diag(diag).astype(np.complex128), e_scale
    raise ValueError("hamiltonian document needs 'matrix' or 'levels'")
