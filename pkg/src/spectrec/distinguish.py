"""Deciding whether two opaque devices share their eigenspace at a frequency.

Devices are handled through :class:`BlackBoxUnitary`: forward applications
only, every one counted. The promise is that the eigenspaces at the probed
frequency either coincide or are d-distinguishable (some unit vector of one
sits at distance >= d from the other, or exactly one is empty).

The decision runs one register template under several flag procedures routed
by eigenspace dimensions. Each register is amplified into the relevant
eigenspace, gate-checked for membership weight, optionally turned by the
paired-reflection rotation whose speed is set by the planted distance, and
re-tested for membership through frequency copies. A flag fires when the
fraction of moved registers reaches the sign threshold; any fired flag means
"different". When both devices' eigenspaces coincide the turn is the exact
identity, so the equal case cannot fire a flag short of floating-point dust.
"""
from __future__ import annotations

import math
from collections import Counter as _Counter
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from . import rng as rng_mod
from .circuit import GateSet, build_unitary, code_space_size, decode
from .report import QueryCounter, RunReport, Timer
from .spectral import (
    SpectralDecomposition,
    decompose,
    group_basis,
    is_d_distinguishable,
    subspace_distances,
)

__all__ = [
    "BlackBoxUnitary",
    "DistinguishParams",
    "difference",
    "check_roundtrip",
    "recognize_device",
]

ALPHA_WEIGHT = 1.0 / 9.0  # membership weight that arms a check flag
SIGN_FRACTION = 1.0 / 20.0  # fraction of moved registers that fires a flag
ORT_GUARD_LOW = math.sqrt(1.0 / 3.0)
ORT_GUARD_HIGH = math.sqrt(2.0 / 3.0)
# mu = sqrt(1 - sigma^2) turns 1e-13 rounding in sigma into 1e-6-scale noise
COINCIDENT_TOL = 1e-6


class BlackBoxUnitary:
    """Forward-only handle on a unitary, with query accounting.

    The matrix is private: protocols may call `apply_vector` (one query per
    call) and nothing else. `simulation_matrix` exists so simulation backends
    can compute the statistics a coherent run would produce; any pipeline
    using it must still charge the queries the protocol would have spent.
    There is deliberately no adjoint access.
    """

    def __init__(self, matrix, name: str, counter: QueryCounter | None = None):
        m = np.asarray(
            matrix.matrix if hasattr(matrix, "matrix") else matrix, dtype=np.complex128
        ).copy()
        m.setflags(write=False)
        self.__matrix = m
        self.name = name
        self.counter = counter if counter is not None else QueryCounter()
        self.__dec: SpectralDecomposition | None = None

    @property
    def dim(self) -> int:
        return self.__matrix.shape[0]

    def apply_vector(self, vec: np.ndarray) -> np.ndarray:
        self.charge_queries(1)
        return self.__matrix @ vec

    def charge_queries(self, amount: int) -> None:
        self.counter.charge(f"u_applications[{self.name}]", amount)

    def simulation_matrix(self) -> np.ndarray:
        return self.__matrix

    def simulation_decomposition(self) -> SpectralDecomposition:
        if self.__dec is None:
            self.__dec = decompose(self.__matrix)
        return self.__dec

    def queries(self) -> int:
        return self.counter.total(f"u_applications[{self.name}]")


@dataclass(frozen=True)
class DistinguishParams:
    """Statistical knobs of one difference run."""

    m_coarse: int = 4
    fine: int | None = None  # defaults to 64 * m_coarse
    registers: int = 64
    check_copies: int = 4  # reveal copies per membership check
    freq_copies: int = 8  # reveal copies in the final membership re-test
    beta_prep: float = 1.0  # preparation bound ceil(beta_prep * sqrt(N))
    turn_bound: str = "linear"  # ceil(2/d); "sqrt" gives ceil(2/sqrt(d))
    sign_fraction: float = SIGN_FRACTION
    alpha_weight: float = ALPHA_WEIGHT
    gap: tuple[float, float] = (1.0 / 40.0, 1.0 / 13.0)
    enforce_promise: bool = True

    def resolved(self) -> "DistinguishParams":
        fine = self.fine if self.fine is not None else 64 * self.m_coarse
        return replace(self, fine=fine)

    def turn_bound_for(self, d: float) -> int:
        if self.turn_bound == "linear":
            return int(math.ceil(2.0 / d))
        if self.turn_bound == "sqrt":
            return int(math.ceil(2.0 / math.sqrt(d)))
        raise ValueError(f"unknown turn bound policy {self.turn_bound!r}")

    def config_dict(self) -> dict[str, Any]:
        p = self.resolved()
        return {
            "m_coarse": p.m_coarse,
            "fine": p.fine,
            "registers": p.registers,
            "check_copies": p.check_copies,
            "freq_copies": p.freq_copies,
            "beta_prep": p.beta_prep,
            "turn_bound": p.turn_bound,
            "sign_fraction": p.sign_fraction,
            "alpha_weight": p.alpha_weight,
        }


def _bases_at(box: BlackBoxUnitary, omega: float, fine: int) -> np.ndarray:
    dec = box.simulation_decomposition()
    return group_basis(dec, omega, window=2.0 / fine)


@dataclass
class _FlagOutcome:
    fired: bool
    fraction: float
    moved: int
    trials: int
    in_gap: bool


class _Charges:
    """Query-cost bookkeeping for one register trial."""

    def __init__(self, params: DistinguishParams, u: BlackBoxUnitary, v: BlackBoxUnitary):
        self.p = params
        self.u, self.v = u, v
        rev_cost = params.fine - 1
        self.reflection = params.check_copies * 2 * rev_cost  # s reveals + restores
        self.check = 2 * params.check_copies * rev_cost
        self.retest = params.freq_copies * rev_cost

    def prep(self, box: BlackBoxUnitary, t: int) -> None:
        box.charge_queries(t * self.reflection)

    def checks(self) -> None:
        self.u.charge_queries(self.check)
        self.v.charge_queries(self.check)

    def turn(self, t: int) -> None:
        self.u.charge_queries(t * self.reflection)
        self.v.charge_queries(t * self.reflection)

    def retest_on(self, box: BlackBoxUnitary) -> None:
        box.charge_queries(self.retest)


def _prepare(
    rs: np.random.Generator,
    basis: np.ndarray,
    dim: int,
    bound: int,
) -> tuple[np.ndarray | None, int]:
    """Amplify a random start into the target subspace; None when the
    stopping time failed to land it there."""
    start = rs.standard_normal(dim) + 1j * rs.standard_normal(dim)
    start /= np.linalg.norm(start)
    t = int(rs.integers(0, bound + 1))
    inside = basis @ (basis.conj().T @ start) if basis.shape[1] else np.zeros_like(start)
    s = float(np.linalg.norm(inside))
    if s <= 1e-15:
        return None, t
    p = math.sin((2 * t + 1) * math.asin(min(1.0, s))) ** 2
    if rs.random() >= p:
        return None, t
    return inside / s, t


def _turn_exact(vec: np.ndarray, basis_u: np.ndarray, basis_v: np.ndarray, t: int) -> np.ndarray:
    out = vec
    for _ in range(t):
        out = out - 2.0 * (basis_v @ (basis_v.conj().T @ out))
        out = out - 2.0 * (basis_u @ (basis_u.conj().T @ out))
    return out


def _membership(vec: np.ndarray, basis: np.ndarray) -> float:
    if basis.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(basis.conj().T @ vec) ** 2)


def _run_flag(
    kind: str,
    u: BlackBoxUnitary,
    v: BlackBoxUnitary,
    basis_u: np.ndarray,
    basis_v: np.ndarray,
    d: float,
    params: DistinguishParams,
    seed: int,
) -> _FlagOutcome:
    """One flag procedure over all registers.

    same_dim: prepare in U, turn by the paired reflections, re-test U
    membership; gt/gt_ort: prepare in U, re-test V membership (thresholds
    differ through the routing guards); lt variants swap the roles.
    """
    dim = u.dim
    charges = _Charges(params, u, v)
    prep_bound = int(math.ceil(params.beta_prep * math.sqrt(dim)))
    turn_bound = params.turn_bound_for(d)
    if kind.startswith("lt"):
        prep_box, prep_basis = v, basis_v
        other_box, other_basis = u, basis_u
    else:
        prep_box, prep_basis = u, basis_u
        other_box, other_basis = v, basis_v

    moved = 0
    for j in range(params.registers):
        rs = rng_mod.stream(seed, kind, j)
        chi, t1 = _prepare(rs, prep_basis, dim, prep_bound)
        charges.prep(prep_box, t1)
        charges.checks()
        if chi is None:
            continue
        if kind == "same_dim":
            t2 = int(rs.integers(0, turn_bound + 1))
            charges.turn(t2)
            turned = _turn_exact(chi, basis_u, basis_v, t2)
            stay = _membership(turned, basis_u)
            p_move = min(1.0, max(0.0, 1.0 - stay))
            charges.retest_on(prep_box)
        else:
            stay = _membership(chi, other_basis)
            p_move = min(1.0, max(0.0, 1.0 - stay))
            charges.retest_on(other_box)
        if rs.random() < p_move:
            moved += 1
    fraction = moved / params.registers
    fired = fraction >= params.sign_fraction
    in_gap = params.gap[0] < fraction < params.sign_fraction
    return _FlagOutcome(fired, fraction, moved, params.registers, in_gap)


def difference(
    u: BlackBoxUnitary,
    v: BlackBoxUnitary,
    omega: float,
    d: float,
    seed: int,
    params: DistinguishParams | None = None,
) -> RunReport:
    """Verdict on whether the eigenspaces of u and v at omega differ.

    Routing by dimensions: equal dims run the turned flag (exactly inert on
    coincident spaces); unequal dims run the membership-drop flag, the
    orthogonality variant, or both when the distance guards overlap. Any
    fired flag gives "different"; fractions stuck inside the decision gap
    after a re-run give "indeterminate".
    """
    params = (params or DistinguishParams()).resolved()
    if u.dim != v.dim:
        raise ValueError("devices must act on the same space")
    with Timer() as timer:
        basis_u = _bases_at(u, omega, params.fine)
        basis_v = _bases_at(v, omega, params.fine)
        dist = subspace_distances(basis_u, basis_v)
        if params.enforce_promise:
            coincident = (
                dist.dim_u == dist.dim_v and max(dist.mu_u, dist.mu_v) <= COINCIDENT_TOL
            )
            if not coincident and not is_d_distinguishable(dist, d):
                raise ValueError(
                    f"promise violated: mu=({dist.mu_u:.3f},{dist.mu_v:.3f}) below d={d}"
                )
        flags: dict[str, _FlagOutcome] = {}
        if dist.dim_u == 0 and dist.dim_v == 0:
            pass  # nothing to compare: coincident empties
        elif dist.dim_u == dist.dim_v:
            flags["same_dim"] = _maybe_rerun(
                "same_dim", u, v, basis_u, basis_v, d, params, seed
            )
        else:
            small_mu = dist.mu_v if dist.dim_u > dist.dim_v else dist.mu_u
            prefix = "gt" if dist.dim_u > dist.dim_v else "lt"
            small_dim = min(dist.dim_u, dist.dim_v)
            if small_dim > 0 and small_mu < ORT_GUARD_HIGH:
                flags[prefix] = _maybe_rerun(
                    prefix, u, v, basis_u, basis_v, d, params, seed
                )
            if small_dim == 0 or small_mu > ORT_GUARD_LOW:
                flags[prefix + "_ort"] = _maybe_rerun(
                    prefix + "_ort", u, v, basis_u, basis_v, d, params, seed
                )
        fired = [k for k, f in flags.items() if f.fired]
        stuck = [k for k, f in flags.items() if f.in_gap]
        if fired:
            verdict = "different"
        elif stuck:
            verdict = "indeterminate"
        else:
            verdict = "same"
    counter = QueryCounter()
    counter.merge(u.counter)
    if v.counter is not u.counter:
        counter.merge(v.counter)
    return RunReport(
        pipeline="difference",
        verdict=verdict,
        seed=seed,
        config={"omega": omega, "d": d, **params.config_dict()},
        stats={
            "dims": [dist.dim_u, dist.dim_v],
            "mu": [dist.mu_u, dist.mu_v],
            "flags": {
                k: {"fired": f.fired, "fraction": f.fraction, "moved": f.moved}
                for k, f in flags.items()
            },
        },
        queries=counter.snapshot(),
        wall_time_s=timer.elapsed,
    )


def _maybe_rerun(
    kind: str,
    u: BlackBoxUnitary,
    v: BlackBoxUnitary,
    basis_u: np.ndarray,
    basis_v: np.ndarray,
    d: float,
    params: DistinguishParams,
    seed: int,
) -> _FlagOutcome:
    out = _run_flag(kind, u, v, basis_u, basis_v, d, params, seed)
    if out.in_gap:
        again = _run_flag(
            kind, u, v, basis_u, basis_v, d, params, rng_mod.child_seed(seed, kind, "rerun")
        )
        if not again.in_gap:
            return again
        return _FlagOutcome(False, again.fraction, again.moved, again.trials, True)
    return out


def check_roundtrip(u, omega: float, *, m_coarse: int = 2, copies: int = 2) -> float:
    """Coherent reveal/restore round trip; returns the ancilla mass left off
    zero, which must vanish for grid-aligned spectra (the check is its own
    inverse)."""
    from .phase import rest, rev
    from .statevec import MAX_WIDTH, RegisterLayout, StateVector

    matrix = u.matrix if hasattr(u, "matrix") else np.asarray(u, dtype=np.complex128)
    dim = matrix.shape[0]
    n_bits = dim.bit_length() - 1
    fine = 16 * m_coarse
    p_bits = fine.bit_length() - 1
    if n_bits + copies * p_bits > MAX_WIDTH:
        raise ValueError("round trip layout too wide")
    regs = [(f"anc{i}", p_bits) for i in range(copies)]
    layout = RegisterLayout((("main", n_bits),) + tuple(regs))
    rng = np.random.default_rng(7)
    start = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    start /= np.linalg.norm(start)
    anc = np.zeros(1 << (copies * p_bits), dtype=np.complex128)
    anc[0] = 1.0
    state = StateVector(layout, np.kron(start, anc))
    for i in range(copies):
        state = rev(state, matrix, f"anc{i}", "main")
    for i in reversed(range(copies)):
        state = rest(state, matrix, f"anc{i}", "main", strategy="inverse")
    probs = np.abs(state.tensor()) ** 2
    joint = probs.sum(axis=0).reshape(-1)
    return float(1.0 - joint[0])


def _equal_at_cell(
    dec_a: SpectralDecomposition, dec_b: SpectralDecomposition, omega: float, fine: int
) -> bool:
    ba = group_basis(dec_a, omega, window=2.0 / fine)
    bb = group_basis(dec_b, omega, window=2.0 / fine)
    dist = subspace_distances(ba, bb)
    if dist.dim_u != dist.dim_v:
        return False
    if dist.dim_u == 0:
        return True
    return max(dist.mu_u, dist.mu_v) <= COINCIDENT_TOL


def recognize_device(
    target: BlackBoxUnitary,
    gate_set: GateSet,
    n_qubits: int,
    length_cap: int,
    d: float,
    seed: int,
    *,
    search_space: int | None = None,
    runs: int = 9,
    retries: int = 4,
    copies: int = 16,
    params: DistinguishParams | None = None,
) -> RunReport:
    """Find a coded circuit that is the same device as the opaque target.

    A candidate matches when repeated frequency-concentrated difference
    probes fail to produce distinguishing evidence on fewer than 1/5 of the
    copies. The search is routed by the exact matcher and every proposal is
    verified statistically, with plurality across runs.
    """
    from .amplify import BasisReflection, random_time_search

    params = (params or DistinguishParams(registers=12)).resolved()
    total = code_space_size(gate_set, n_qubits, length_cap)
    size = total if search_space is None else min(search_space, total)
    dec_t = target.simulation_decomposition()
    cells = [c / params.m_coarse for c in range(params.m_coarse)]

    unitaries = [
        build_unitary(decode(c, gate_set, n_qubits, length_cap), gate_set) for c in range(size)
    ]
    decs = [decompose(u.matrix) for u in unitaries]
    oracle_marked = [
        c
        for c in range(size)
        if all(_equal_at_cell(dec_t, decs[c], w, params.fine) for w in cells)
    ]
    reflection = BasisReflection(size, marked=oracle_marked)
    bound = int(math.ceil(math.sqrt(size)))
    counter = QueryCounter()

    def statistical_match(code: int, match_seed: int) -> bool:
        """Concentrated probes: a copy produces distinguishing evidence when
        the cell search proposes a frequency whose difference verdict holds."""
        box = BlackBoxUnitary(unitaries[code], f"candidate{code}", counter)
        cell_truth = [not _equal_at_cell(dec_t, decs[code], w, params.fine) for w in cells]
        cell_reflection = BasisReflection(len(cells), marked=[i for i, b in enumerate(cell_truth) if b])
        evidence = 0
        for i in range(copies):
            rs = rng_mod.stream(match_seed, "copy", i)
            draw = random_time_search(
                cell_reflection, rs, bound=int(math.ceil(math.sqrt(len(cells)))), counter=counter
            )
            if not draw.found:
                continue
            probe = difference(
                target,
                box,
                cells[draw.outcome],
                d,
                rng_mod.child_seed(match_seed, "probe", i),
                replace(params, enforce_promise=False),
            )
            if probe.verdict == "different":
                evidence += 1
        return evidence < copies / 5.0

    with Timer() as timer:
        found_per_run: list[int | None] = []
        for run in range(runs):
            rs = rng_mod.stream(seed, "run", run)
            got: int | None = None
            for attempt in range(retries):
                draw = random_time_search(reflection, rs, bound=bound, counter=counter)
                if statistical_match(draw.outcome, rng_mod.child_seed(seed, "verify", run, attempt)):
                    got = draw.outcome
                    break
            found_per_run.append(got)
        found = [c for c in found_per_run if c is not None]
        if found:
            winner, _ = _Counter(found).most_common(1)[0]
            verdict = "found"
        else:
            winner, verdict = None, "not-found"
    counter.merge(target.counter)
    return RunReport(
        pipeline="recognize-device",
        verdict=verdict,
        seed=seed,
        config={
            "gate_set": gate_set.name,
            "n": n_qubits,
            "c": length_cap,
            "d": d,
            "search_space": size,
            "runs": runs,
            "retries": retries,
            "copies": copies,
            **params.config_dict(),
        },
        stats={
            "code": winner,
            "per_run": found_per_run,
            "oracle_marked_count": len(oracle_marked),
        },
        queries=counter.snapshot(),
        wall_time_s=timer.elapsed,
    )
