"""Glauber dynamics: exact transition matrices, mixing times, bottleneck cuts
and seeded simulation.

Transition matrices are exact: every entry is an integer numerator over one
common denominator, so row sums and symmetry are checked without rounding.
Only the powering in :func:`exact_mixing_time` drops to float64.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from torpid.colouring import (
    Colouring,
    Phase,
    as_fraction,
    classify,
    colour_tuples,
    require_proper,
    side_counts,
)
from torpid.errors import GuardExceeded, InvalidInput
from torpid.graph import EVEN, BipartiteGraph, Verdict

PLAIN = "plain"
RESTRICTED = "restricted"
DEFAULT_MAX_STATES = 20000
DEFAULT_DENSE_CAP = 3000
TV_TOLERANCE = 1e-12
MIX_THRESHOLD = math.exp(-1)


@dataclass(frozen=True)
class ChainSpec:
    """Which single-site chain to run.

    ``plain`` proposes any of the q colours and rejects improper results;
    ``restricted`` draws only from colours absent on the vertex's neighbours.
    """

    q: int = 3
    variant: str = PLAIN
    rho: Fraction | None = None  # declared locality; a single-site chain is 1/N-local

    def __post_init__(self):
        if self.variant not in (PLAIN, RESTRICTED):
            raise InvalidInput(f"unknown chain variant {self.variant!r}")
        if self.q < 1:
            raise InvalidInput("q must be positive")

    def check_locality(self, G: BipartiteGraph) -> None:
        if self.rho is not None and as_fraction(self.rho) * G.n < 1:
            raise InvalidInput(f"a single-site chain is not {self.rho}-local on {G.n} vertices")


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for trajectory ``stream``; streams use seed XOR index."""
    return np.random.Generator(np.random.PCG64((seed ^ stream) & (2**64 - 1)))


# -- exact matrix -----------------------------------------------------------


@dataclass
class TransitionMatrix:
    states: list[tuple[int, ...]]
    numer: sp.csr_matrix  # int64 numerators
    denom: int
    q: int
    variant: str
    index: dict[tuple[int, ...], int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def n(self) -> int:
        return len(self.states)

    def prob(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.numer[i, j]), self.denom)

    def row(self, i: int) -> dict[int, Fraction]:
        lo, hi = self.numer.indptr[i], self.numer.indptr[i + 1]
        return {
            int(j): Fraction(int(x), self.denom)
            for j, x in zip(self.numer.indices[lo:hi], self.numer.data[lo:hi])
        }

    def row_sums_exact(self) -> bool:
        return bool(np.all(np.asarray(self.numer.sum(axis=1)).ravel() == self.denom))

    def as_float(self) -> sp.csr_matrix:
        return (self.numer.astype(np.float64) / self.denom).tocsr()


def _allowed(cs: Sequence[int], nbrs: tuple[int, ...], q: int) -> list[int]:
    used = {cs[w] for w in nbrs}
    return [c for c in range(q) if c not in used]


def build_transition_matrix(G: BipartiteGraph, spec: ChainSpec, max_states: int = DEFAULT_MAX_STATES) -> TransitionMatrix:
    """Exact single-site transition matrix over all proper q-colourings."""
    spec.check_locality(G)
    states = []
    for cs in colour_tuples(G, spec.q, max_vertices=max(G.n, 1)):
        states.append(cs)
        if len(states) > max_states:
            raise GuardExceeded("transition matrix state count", len(states), max_states)
    index = {s: i for i, s in enumerate(states)}
    n, q = G.n, spec.q
    if spec.variant == PLAIN:
        denom = n * q
    else:
        denom = n * math.lcm(*range(1, q + 1))
    rows, cols, data = [], [], []
    for i, cs in enumerate(states):
        moved = 0
        for v in range(n):
            allowed = _allowed(cs, G.adjacency[v], q)
            weight = denom // (n * q) if spec.variant == PLAIN else denom // (n * len(allowed))
            for c in allowed:
                if c == cs[v]:
                    continue
                nxt = cs[:v] + (c,) + cs[v + 1:]
                rows.append(i)
                cols.append(index[nxt])
                data.append(weight)
                moved += weight
        rows.append(i)
        cols.append(i)
        data.append(denom - moved)
    numer = sp.csr_matrix(
        (np.array(data, dtype=np.int64), (np.array(rows), np.array(cols))), shape=(len(states),) * 2
    )
    numer.eliminate_zeros()
    return TransitionMatrix(states, numer, denom, q, spec.variant, index)


def check_detailed_balance(T: TransitionMatrix) -> bool:
    """Detailed balance for the uniform distribution, i.e. exact symmetry."""
    return (T.numer != T.numer.T).nnz == 0


def period(T: TransitionMatrix) -> int:
    """Period of the (assumed strongly connected) transition graph."""
    A = T.numer
    level = [-1] * T.n
    level[0] = 0
    frontier = [0]
    g = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in A.indices[A.indptr[u]:A.indptr[u + 1]]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
                else:
                    g = math.gcd(g, level[u] + 1 - level[v])
        frontier = nxt
    return g


def check_ergodic(T: TransitionMatrix) -> bool:
    """Irreducible (strongly connected support) and aperiodic."""
    if T.n == 0:
        return False
    k, _ = connected_components(T.numer, directed=True, connection="strong")
    if k != 1:
        return False
    if (T.numer.diagonal() > 0).any():
        return True
    return period(T) == 1


def stationary_distribution(T: TransitionMatrix) -> np.ndarray:
    if check_detailed_balance(T):
        return np.full(T.n, 1.0 / T.n)
    P = T.as_float().toarray()
    A = np.vstack([P.T - np.eye(T.n), np.ones((1, T.n))])
    b = np.zeros(T.n + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(A, b, rcond=None)[0]


@dataclass
class MixingResult:
    tau: int
    tv_curve: list[float]  # worst-start distance for t = 0..tau
    near_threshold: bool  # some d(t) lies within TV_TOLERANCE of 1/e
    per_start: np.ndarray | None = None  # shape (tau + 1, n_states) when requested


def exact_mixing_time(
    T: TransitionMatrix,
    max_t: int = 10**6,
    dense_cap: int = DEFAULT_DENSE_CAP,
    per_start: bool = False,
) -> MixingResult:
    """Least t with ``max_x ½‖P^t(x,·) − π‖₁ ≤ 1/e``, by powering from every start."""
    if not check_ergodic(T):
        raise InvalidInput("mixing time requires an ergodic chain")
    if T.n > dense_cap:
        raise GuardExceeded("mixing-time powering state count", T.n, dense_cap)
    pi = stationary_distribution(T)
    PT = T.as_float().T.tocsr()
    D = np.eye(T.n)
    curve, starts = [], []
    near = False
    for t in range(max_t + 1):
        if t:
            D = np.asarray(PT @ D.T).T
        per = 0.5 * np.abs(D - pi).sum(axis=1)
        worst = float(per.max())
        curve.append(worst)
        if per_start:
            starts.append(per.copy())
        near = near or abs(worst - MIX_THRESHOLD) <= TV_TOLERANCE
        if worst <= MIX_THRESHOLD:
            return MixingResult(t, curve, near, np.array(starts) if per_start else None)
    raise GuardExceeded("mixing-time steps", max_t + 1, max_t)


# -- bottleneck cuts --------------------------------------------------------


@dataclass(frozen=True)
class BottleneckCut:
    A: frozenset[int]  # state indices
    Mset: frozenset[int]
    n_states: int

    def __post_init__(self):
        if self.A & self.Mset:
            raise InvalidInput("bottleneck set must be disjoint from A")

    @property
    def pi_A(self) -> Fraction:
        return Fraction(len(self.A), self.n_states)

    @property
    def pi_M(self) -> Fraction:
        return Fraction(len(self.Mset), self.n_states)


def heavy_cut(G: BipartiteGraph, T: TransitionMatrix, rho, colour: int = 0) -> BottleneckCut:
    """A = colour-heavy colourings on one class, Mset = colour-balanced ones.

    The E-heavy class is used unless its measure exceeds 1/2, in which case
    the O-heavy class is taken instead.
    """
    threshold = as_fraction(rho) * G.M
    groups: dict[Phase, set[int]] = {p: set() for p in Phase}
    for i, cs in enumerate(T.states):
        e, o = side_counts(G, cs, T.q)[colour]
        groups[classify(e - o, threshold)].add(i)
    A = groups[Phase.E_HEAVY]
    if 2 * len(A) > T.n:
        A = groups[Phase.O_HEAVY]
    return BottleneckCut(frozenset(A), frozenset(groups[Phase.BALANCED]), T.n)


def verify_bottleneck_condition(T: TransitionMatrix, cut: BottleneckCut) -> Verdict:
    """No positive transition leads from A straight into the complement of A ∪ Mset."""
    inside = cut.A | cut.Mset
    A = T.numer
    for i in sorted(cut.A):
        for j in A.indices[A.indptr[i]:A.indptr[i + 1]]:
            if int(j) not in inside:
                return Verdict(False, (i, int(j)))
    return Verdict(True)


def dfj_lower_bound(T: TransitionMatrix, cut: BottleneckCut) -> Fraction:
    """``π(A) / (8 π(Mset))`` after checking the cut's hypotheses."""
    if cut.pi_A > Fraction(1, 2):
        raise InvalidInput(f"π(A) = {cut.pi_A} exceeds 1/2")
    verdict = verify_bottleneck_condition(T, cut)
    if not verdict:
        raise InvalidInput(f"transition {verdict.witness} escapes A outside the bottleneck")
    if not cut.Mset:
        raise InvalidInput("empty bottleneck set: the chain is not ergodic")
    return cut.pi_A / (8 * cut.pi_M)


# -- simulation -------------------------------------------------------------


def _apply(G: BipartiteGraph, cs: list[int], spec: ChainSpec, v: int, u: float) -> int:
    """One update at vertex v driven by the uniform variate u; returns the new colour."""
    if spec.variant == PLAIN:
        c = int(u * spec.q)
        if c != cs[v]:
            for w in G.adjacency[v]:
                if cs[w] == c:
                    return cs[v]
        return c
    allowed = _allowed(cs, G.adjacency[v], spec.q)
    if not allowed:
        return cs[v]
    return allowed[int(u * len(allowed))]


def glauber_step(G: BipartiteGraph, chi: Colouring, spec: ChainSpec, rng: np.random.Generator) -> Colouring:
    cs = list(require_proper(G, chi))
    v = int(rng.integers(G.n))
    c = _apply(G, cs, spec, v, float(rng.random()))
    if c == cs[v]:
        return chi
    return chi.recolour(v, c)


@dataclass
class TrajectoryStats:
    steps: int
    seed: int
    rows: list[tuple[int, str, str, str, int]]  # (t, phase_0, phase_1, phase_2, e0 - o0)
    occupancy: dict[str, int]
    first_balanced: int | None  # first t at which some colour is balanced
    final: Colouring

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "phase_0", "phase_1", "phase_2", "zero_imbalance"])
        w.writerows(self.rows)
        return buf.getvalue()


def simulate_trajectory(
    G: BipartiteGraph,
    start: Colouring,
    spec: ChainSpec,
    steps: int,
    seed: int,
    rho=Fraction(1, 5),
    record_every: int = 1,
    stop_when_balanced: bool = False,
    stream: int = 0,
    chunk: int = 65536,
) -> TrajectoryStats:
    """Run the chain for ``steps`` updates, tracking the phase label every step.

    ``zero_imbalance`` in the recorded rows is the signed count difference
    ``|χ⁻¹(0)∩E| − |χ⁻¹(0)∩O|``.  Rows are kept every ``record_every`` steps
    (0 disables recording).
    """
    if start.q != spec.q:
        raise InvalidInput("start colouring uses a different q than the chain")
    cs = list(require_proper(G, start))
    q = spec.q
    # diff > ρM  <=>  diff > floor(ρM) for integer diff
    thr = math.floor(as_fraction(rho) * G.M)
    diff = [e - o for e, o in side_counts(G, tuple(cs), q)]
    sign = [1 if G.side[v] == EVEN else -1 for v in range(G.n)]
    rng = rng_for(seed, stream)
    occupancy: dict[str, int] = {}
    rows = []
    first = None

    def label() -> str:
        return "".join("E" if x > thr else "O" if -x > thr else "b" for x in diff[:3])

    lab = label()
    t = 0
    while True:
        occupancy[lab] = occupancy.get(lab, 0) + 1
        if record_every and t % record_every == 0:
            rows.append((t, lab[0], lab[1], lab[2], diff[0]))
        if first is None and "b" in lab:
            first = t
            if stop_when_balanced:
                break
        if t == steps:
            break
        if t % chunk == 0:
            vs = rng.integers(G.n, size=chunk)
            us = rng.random(size=chunk)
        k = t % chunk
        v = int(vs[k])
        c = _apply(G, cs, spec, v, float(us[k]))
        t += 1
        old = cs[v]
        if c != old:
            cs[v] = c
            diff[old] -= sign[v]
            diff[c] += sign[v]
            lab = label()
    return TrajectoryStats(t, seed, rows, occupancy, first, Colouring(q, tuple(cs)))


def phase_escape_time(
    G: BipartiteGraph,
    spec: ChainSpec,
    rho,
    start: Colouring,
    seed: int,
    max_steps: int,
    stream: int = 0,
) -> int | None:
    """Steps until some colour becomes balanced, or ``None`` on timeout."""
    stats = simulate_trajectory(
        G, start, spec, max_steps, seed, rho=rho, record_every=0, stop_when_balanced=True, stream=stream
    )
    return stats.first_balanced


def escape_statistics(
    G: BipartiteGraph, spec: ChainSpec, rho, start: Colouring, seed: int, runs: int, max_steps: int
) -> dict:
    """Escape times over ``runs`` independent streams (seed XOR run index)."""
    times = [phase_escape_time(G, spec, rho, start, seed, max_steps, stream=r) for r in range(runs)]
    done = sorted(t for t in times if t is not None)
    return {
        "runs": runs,
        "max_steps": max_steps,
        "timeouts": sum(t is None for t in times),
        "times": times,
        "mean": float(np.mean(done)) if done else None,
        "median": float(np.median(done)) if done else None,
        "max": done[-1] if done else None,
    }
