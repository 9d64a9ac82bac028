"""Query-count scaling runs for the three search pipelines.

Each sweep repeats a pipeline over a parameter ladder, averages the total
query charge, and reports rows suitable for a log-log slope fit. The
expected exponents are one half: search time grows with the square root of
the state dimension, of the code-space size, and of the inverse planted
distance.
"""
from __future__ import annotations

import math

import numpy as np

from . import rng as rng_mod
from .circuit import GateSet
from .distinguish import BlackBoxUnitary, DistinguishParams, difference
from .fixtures import device_pair, planted_profile
from .recognize import RecognitionQuery, recognize_eigenvalue
from .report import QueryCounter, RunReport
from .structure import SpectrumSpec, find_structure

__all__ = [
    "total_queries",
    "recognition_scaling",
    "structure_scaling",
    "difference_scaling",
    "fit_loglog_slope",
]


def total_queries(report: RunReport) -> int:
    return int(sum(report.queries.values()))


def recognition_scaling(
    sizes: list[int],
    trials: int,
    seed: int,
    *,
    m_coarse: int = 4,
    registers: int = 8,
) -> list[dict]:
    """Eigenvalue recognition cost against state dimension."""
    rows = []
    for size in sizes:
        counts = []
        for trial in range(trials):
            rng = rng_mod.stream(seed, "recognition", size, trial)
            planted = planted_profile(size, m_coarse, 16 * m_coarse, (2, size - 2), rng)
            query = RecognitionQuery(
                omega=planted.group_frequency(0),
                m_coarse=m_coarse,
                registers=registers,
            )
            rep = recognize_eigenvalue(
                planted.unitary,
                query,
                rng_mod.child_seed(seed, "recognition-run", size, trial),
            )
            counts.append(total_queries(rep))
        rows.append({"x": size, "queries": float(np.mean(counts))})
    return rows


def structure_scaling(
    spaces: list[int],
    trials: int,
    seed: int,
    *,
    m_coarse: int = 16,
    gate_set: GateSet | None = None,
    n_qubits: int = 2,
    length_cap: int = 3,
) -> list[dict]:
    """Structure search cost against the searched code-space size.

    The target spectrum is taken from the last circuit of each prefix so the
    marked set is never empty, and the spec lists a single cell so the
    per-probe cost stays flat while the space grows.
    """
    from .circuit import build_unitary, decode
    from .spectral import decompose

    gs = gate_set if gate_set is not None else GateSet.standard()
    fine = 16 * m_coarse
    rows = []
    for space in spaces:
        counts = []
        for trial in range(trials):
            target = decompose(build_unitary(decode(space - 1, gs, n_qubits, length_cap), gs).matrix)
            spec = SpectrumSpec(
                m_coarse,
                fine,
                (float(target.frequencies[0]),),
                mode="contains",
            )
            rep = find_structure(
                spec,
                gs,
                n_qubits,
                length_cap,
                rng_mod.child_seed(seed, "structure", space, trial),
                search_space=space,
                runs=3,
                retries=4,
            )
            counts.append(total_queries(rep))
        rows.append({"x": space, "queries": float(np.mean(counts))})
    return rows


def difference_scaling(
    distances: list[float],
    trials: int,
    seed: int,
    *,
    dim: int = 16,
    m_coarse: int = 4,
    registers: int = 24,
) -> list[dict]:
    """Difference-decision cost against the inverse planted distance."""
    rows = []
    for d in distances:
        counts = []
        for trial in range(trials):
            rng = rng_mod.stream(seed, "difference", trial, int(round(1e6 * d)))
            pair = device_pair(dim, m_coarse, 16 * m_coarse, "rotated", rng, distance=d)
            counter = QueryCounter()
            u = BlackBoxUnitary(pair.u, "u", counter)
            v = BlackBoxUnitary(pair.v, "v", counter)
            rep = difference(
                u,
                v,
                pair.omega,
                d,
                rng_mod.child_seed(seed, "difference-run", trial, int(round(1e6 * d))),
                DistinguishParams(m_coarse=m_coarse, registers=registers),
            )
            counts.append(total_queries(rep))
        rows.append({"x": 1.0 / d, "queries": float(np.mean(counts))})
    return rows


def fit_loglog_slope(rows: list[dict]) -> float:
    xs = np.log([r["x"] for r in rows])
    ys = np.log([r["queries"] for r in rows])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)
