"""Reflection-pair amplification with random stopping times.

The iterate (I_start . I_marked)^t rotates the start vector toward the marked
subspace inside a two-dimensional invariant plane, so success statistics have
exact closed forms: after t steps, with the marked reflection applied first,
the marked overlap is |sin((2t+1) theta)| where sin(theta) is the initial
overlap. Random stopping times sidestep not knowing theta: averaged over
t uniform on {0..B} with B proportional to 1/theta, the success probability
is at least 1/4. Searches below run on plain index spaces of any size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .report import QueryCounter

__all__ = [
    "Reflection",
    "BasisReflection",
    "SubspaceReflection",
    "VectorReflection",
    "grover_rotate",
    "success_after",
    "uniform_mean_success",
    "default_bound",
    "SearchDraw",
    "random_time_search",
    "MajorityOutcome",
    "majority_search",
    "CountResult",
    "count_rotation_time",
]


class Reflection:
    """Sign flip about the orthogonal complement of a subspace: v -> v - 2Pv."""

    def project(self, vec: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return vec - 2.0 * self.project(vec)

    @property
    def rank(self) -> int:
        raise NotImplementedError


class BasisReflection(Reflection):
    """Reflection about a set of marked basis indices, possibly predicate-defined.

    A predicate is evaluated over the whole index space on first use; query
    accounting is separate (one charge per reflection application, as the
    coherent implementation would incur).
    """

    def __init__(self, size: int, marked=None, predicate=None):
        if (marked is None) == (predicate is None):
            raise ValueError("give exactly one of marked / predicate")
        self.size = int(size)
        self._predicate = predicate
        self._marked = None if marked is None else np.asarray(sorted(set(marked)), dtype=int)
        if self._marked is not None and len(self._marked) and (
            self._marked.min() < 0 or self._marked.max() >= size
        ):
            raise ValueError("marked indices out of range")

    @property
    def marked(self) -> np.ndarray:
        if self._marked is None:
            self._marked = np.asarray(
                [i for i in range(self.size) if self._predicate(i)], dtype=int
            )
        return self._marked

    def contains(self, index: int) -> bool:
        if self._predicate is not None and self._marked is None:
            return bool(self._predicate(index))
        return bool(np.isin(index, self.marked))

    def project(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec)
        out[self.marked] = vec[self.marked]
        return out

    @property
    def rank(self) -> int:
        return len(self.marked)


class SubspaceReflection(Reflection):
    """Reflection about the column span of an orthonormal basis."""

    def __init__(self, basis: np.ndarray):
        self.basis = np.asarray(basis, dtype=np.complex128)

    def project(self, vec: np.ndarray) -> np.ndarray:
        if self.basis.shape[1] == 0:
            return np.zeros_like(vec)
        return self.basis @ (self.basis.conj().T @ vec)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


class VectorReflection(Reflection):
    """Reflection about the line of a single unit vector."""

    def __init__(self, vector: np.ndarray):
        v = np.asarray(vector, dtype=np.complex128)
        self.vector = v / np.linalg.norm(v)

    def project(self, vec: np.ndarray) -> np.ndarray:
        return self.vector * np.vdot(self.vector, vec)

    @property
    def rank(self) -> int:
        return 1


def grover_rotate(
    vec: np.ndarray,
    marked: Reflection,
    start: Reflection,
    t: int,
    counter: QueryCounter | None = None,
    charge_as: str = "marked_reflections",
) -> np.ndarray:
    """(I_start I_marked)^t with the marked reflection applied first."""
    out = np.asarray(vec, dtype=np.complex128).copy()
    for _ in range(int(t)):
        out = start.apply(marked.apply(out))
    if counter is not None:
        counter.charge(charge_as, int(t))
    return out


def success_after(t: int, theta: float) -> float:
    """Exact marked-subspace probability after t iterations from overlap sin(theta)."""
    return float(np.sin((2 * t + 1) * theta) ** 2)


def default_bound(size: int, beta: float = 2.0) -> int:
    return int(math.ceil(beta * math.sqrt(size)))


def uniform_mean_success(size: int, marked_count: int, bound: int) -> float:
    """Mean success over t uniform on {0..bound}, from the uniform start vector."""
    theta = math.asin(math.sqrt(marked_count / size))
    return float(np.mean([success_after(t, theta) for t in range(bound + 1)]))


@dataclass
class SearchDraw:
    """One random-stopping-time search trial."""

    outcome: int
    found: bool
    t: int
    overlap: float  # sin(theta) of the start vector against the marked space


def _haar_vector(size: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v / np.linalg.norm(v)


def random_time_search(
    marked: BasisReflection,
    rng: np.random.Generator,
    *,
    bound: int | None = None,
    beta: float = 2.0,
    counter: QueryCounter | None = None,
) -> SearchDraw:
    """Rotate a fresh random start vector for a random time and measure.

    Statistics are sampled from the exact two-dimensional rotation law, which
    agrees with iterating the reflections explicitly. Charges t oracle queries.
    """
    size = marked.size
    if bound is None:
        bound = default_bound(size, beta)
    start = _haar_vector(size, rng)
    t = int(rng.integers(0, bound + 1))
    if counter is not None:
        counter.charge("marked_reflections", t)
    marked_part = marked.project(start)
    s = float(np.linalg.norm(marked_part))
    if marked.rank == 0 or s == 0.0:
        weights = np.abs(start) ** 2
        outcome = int(rng.choice(size, p=weights / weights.sum()))
        return SearchDraw(outcome, False, t, 0.0)
    p_succ = success_after(t, math.asin(min(1.0, s)))
    if rng.random() < p_succ:
        weights = np.abs(marked_part[marked.marked]) ** 2
        outcome = int(marked.marked[rng.choice(len(weights), p=weights / weights.sum())])
        return SearchDraw(outcome, True, t, s)
    rest = start - marked_part
    weights = np.abs(rest) ** 2
    total = weights.sum()
    if total <= 0.0:  # start inside the marked space and an unlucky draw
        outcome = int(marked.marked[0])
        return SearchDraw(outcome, True, t, s)
    outcome = int(rng.choice(size, p=weights / total))
    return SearchDraw(outcome, False, t, s)


@dataclass
class MajorityOutcome:
    """Verdict of a repeated search with plurality vote."""

    verdict: int | None
    votes: dict[int, int]
    draws: list[SearchDraw] = field(default_factory=list)
    verified: bool = False


def majority_search(
    marked: BasisReflection,
    k: int,
    rng: np.random.Generator,
    *,
    beta: float = 2.0,
    rho: float = 0.2,
    verify: bool = True,
    counter: QueryCounter | None = None,
) -> MajorityOutcome:
    """Run k random-time searches and accept the plurality outcome.

    The winner must collect at least rho*k votes; an exact tie for the top
    count yields not-found. With verify=True the winner is checked against
    the marked predicate (one extra query), which suppresses the collision
    false-find floor of the raw vote.
    """
    draws = [
        random_time_search(marked, rng, beta=beta, counter=counter) for _ in range(int(k))
    ]
    votes: dict[int, int] = {}
    for d in draws:
        votes[d.outcome] = votes.get(d.outcome, 0) + 1
    ranked = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))
    if not ranked:
        return MajorityOutcome(None, votes, draws)
    top_index, top_votes = ranked[0]
    if len(ranked) > 1 and ranked[1][1] == top_votes:
        return MajorityOutcome(None, votes, draws)
    if top_votes < rho * k:
        return MajorityOutcome(None, votes, draws)
    if verify:
        if counter is not None:
            counter.charge("marked_reflections", 1)
        if not marked.contains(top_index):
            return MajorityOutcome(None, votes, draws, verified=False)
        return MajorityOutcome(top_index, votes, draws, verified=True)
    return MajorityOutcome(top_index, votes, draws)


@dataclass
class CountResult:
    """Degeneracy estimate from the rotation-speed sweep."""

    a: float  # sweep estimate: the bracket is (3a/4, a]
    bracket: tuple[float, float]
    d_refined: float
    trace: list[dict]


def _probe_fidelity(
    tau: int,
    n_registers: int,
    overlap_sampler,
    match_probs,
    copies: int,
    accept_fraction: float,
    rng: np.random.Generator,
    counter: QueryCounter | None,
) -> float:
    """Fraction of registers whose reveal copies agree with the target frequency.

    overlap_sampler(rng, n) -> sin(theta) per fresh random start vector;
    match_probs = (P(copy matches | collapsed onto target), P(match | not)).
    """
    q_in, q_out = match_probs
    s = np.clip(np.asarray(overlap_sampler(rng, n_registers), dtype=float), 0.0, 1.0)
    t = rng.integers(0, tau + 1, size=n_registers)
    if counter is not None:
        counter.charge("marked_reflections", int(t.sum()))
        counter.charge("reveal_copies", copies * n_registers)
    p_collapse = np.sin((2 * t + 1) * np.arcsin(s)) ** 2
    q = np.where(rng.random(n_registers) < p_collapse, q_in, q_out)
    matches = rng.binomial(copies, q)
    return float(np.mean(matches >= accept_fraction * copies))


def count_rotation_time(
    size: int,
    overlap_sampler,
    rng: np.random.Generator,
    *,
    match_probs: tuple[float, float] = (1.0, 0.0),
    copies: int = 20,
    accept_fraction: float = 0.8,
    n_registers: int = 2048,
    epsilon: float = 0.05,
    time_scale: float = math.pi / 4,
    saturation: float = 0.46,
    integer_valued: bool = True,
    counter: QueryCounter | None = None,
) -> CountResult:
    """Estimate the dimension of the target subspace from rotation speed.

    Probe times climb a 4/3 ladder from 1. The probe fidelity grows while the
    window is shorter than the quarter-turn of the planted rotation and
    saturates near one half once it overshoots, so the ladder stops after two
    saturated rungs (or at the time matching dimension one). The measured
    curve is then matched against the exact prediction for every integer
    dimension; the winner sets the 4/3-wide bracket, and fractional estimates
    are refined on a grid of 1/epsilon candidates inside it.
    """

    def probe(tau: int) -> float:
        return _probe_fidelity(
            tau, n_registers, overlap_sampler, match_probs, copies, accept_fraction, rng, counter
        )

    q_in, q_out = match_probs
    tau_cap = int(math.ceil(time_scale * math.sqrt(size))) + 2
    taus: list[int] = []
    fids: list[float] = []
    tau, saturated = 1, 0
    while True:
        fid = probe(tau)
        taus.append(tau)
        fids.append(fid)
        saturated = saturated + 1 if fid >= saturation else 0
        if saturated >= 2 or tau >= tau_cap:
            break
        tau = max(tau + 1, int(math.ceil(tau * 4.0 / 3.0)))
    measured = np.asarray(fids)

    def score(dim: float) -> float:
        predicted = np.array(
            [
                _predicted_fidelity(size, dim, t, q_in, q_out, copies, accept_fraction)
                for t in taus
            ]
        )
        return float(np.sum((measured - predicted) ** 2))

    best_d = min(range(1, size + 1), key=score)
    a = float(best_d)
    bracket = (0.75 * a, a)
    if integer_valued:
        refined = a
    else:
        grid = np.linspace(bracket[0], bracket[1], max(2, int(math.ceil(1.0 / epsilon))))
        refined = float(min(grid, key=score))
    trace = [{"tau": t, "fidelity": f} for t, f in zip(taus, fids)]
    return CountResult(a, bracket, refined, trace)


@lru_cache(maxsize=4096)
def _quadrature(points: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(points)
    return 0.5 * (nodes + 1.0), 0.5 * weights


@lru_cache(maxsize=65536)
def _predicted_fidelity(
    size: int,
    dim: float,
    tau: int,
    q_in: float,
    q_out: float,
    copies: int,
    accept_fraction: float,
) -> float:
    """E[probe fidelity] when the target has the given (possibly fractional) dim.

    The squared overlap of a random start with a rank-d subspace is
    Beta(d, size-d); integrate the rotation law against it with fixed
    quadrature, then push through the per-register vote.
    """
    from scipy.stats import beta as beta_dist
    from scipy.stats import binom

    if dim >= size:  # overlap is a point mass at 1, outside quadrature reach
        x = np.ones(1)
        w = np.ones(1)
        pdf = np.ones(1)
    else:
        x, w = _quadrature(48)
        pdf = beta_dist.pdf(x, dim, size - dim)
    theta = np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0)))
    p_collapse = np.zeros_like(x)
    for t in range(tau + 1):
        p_collapse += np.sin((2 * t + 1) * theta) ** 2
    p_collapse /= tau + 1
    thresh = int(math.ceil(accept_fraction * copies))
    vote_in = float(binom.sf(thresh - 1, copies, q_in)) if q_in < 1.0 else 1.0
    vote_out = float(binom.sf(thresh - 1, copies, q_out)) if q_out > 0.0 else 0.0
    p_vote = p_collapse * vote_in + (1.0 - p_collapse) * vote_out
    return float(np.sum(w * pdf * p_vote))
