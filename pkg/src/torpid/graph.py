"""Regular bipartite graphs and their structural invariants.

Vertices carry global integer ids ``0..N-1``.  Every vertex also has a
canonical ``(side, index)`` name, where ``side`` is :data:`EVEN` (the
E-class) or :data:`ODD` (the O-class) and ``index`` is its position in the
sorted list of that class.  For hypercubes the global id of a vertex is the
integer value of its bit-string, e.g. ``"110" -> 6``.

Most set algebra is done on Python ints used as bitsets over global ids; the
``*_bits`` helpers are shared with the other modules.  The public functions
take and return :class:`VertexSet` values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from torpid.errors import GuardExceeded, InvalidInput, TorpidError

EVEN = 0
ODD = 1
SIDE_NAMES = ("E", "O")

DEFAULT_EXPANSION_CAP = 20
DEFAULT_LOCALITY_CAP = 40
RANDOM_RETRIES = 1000


class ConstructionFailed(TorpidError):
    """A randomized constructor ran out of retries."""


def bits_of(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """An immutable d-regular bipartite graph with an explicit partition.

    ``adjacency[v]`` is the sorted neighbour tuple of vertex ``v`` and
    ``side[v]`` its class.  All invariants are checked on construction.
    """

    adjacency: tuple[tuple[int, ...], ...]
    side: tuple[int, ...]
    name: str = "graph"
    bits: int | None = None  # hypercube dimension; enables bit-string labels
    d: int = field(init=False)
    nbr: tuple[int, ...] = field(init=False, repr=False)
    even: tuple[int, ...] = field(init=False, repr=False)
    odd: tuple[int, ...] = field(init=False, repr=False)
    class_index: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.adjacency)
        if n == 0 or len(self.side) != n:
            raise InvalidInput("graph needs at least one vertex and a side for each")
        degrees = {len(a) for a in self.adjacency}
        if len(degrees) != 1:
            raise InvalidInput(f"graph is not regular: degrees {sorted(degrees)}")
        d = degrees.pop()
        if d < 1:
            raise InvalidInput("degree must be positive")
        for v, nbrs in enumerate(self.adjacency):
            if self.side[v] not in (EVEN, ODD):
                raise InvalidInput(f"vertex {v} has invalid side {self.side[v]!r}")
            if len(set(nbrs)) != len(nbrs):
                raise InvalidInput(f"parallel edges at vertex {v}")
            for w in nbrs:
                if not 0 <= w < n:
                    raise InvalidInput(f"edge {v}-{w} leaves the vertex range")
                if w == v:
                    raise InvalidInput(f"self-loop at vertex {v}")
                if self.side[w] == self.side[v]:
                    raise InvalidInput(f"edge {v}-{w} does not cross the partition")
                if v not in self.adjacency[w]:
                    raise InvalidInput(f"adjacency is not symmetric at {v}-{w}")
        even = tuple(v for v in range(n) if self.side[v] == EVEN)
        odd = tuple(v for v in range(n) if self.side[v] == ODD)
        if len(even) != len(odd):
            raise InvalidInput("partition classes differ in size")
        index = [0] * n
        for cls in (even, odd):
            for i, v in enumerate(cls):
                index[v] = i
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "nbr", tuple(to_mask(a) for a in self.adjacency))
        object.__setattr__(self, "even", even)
        object.__setattr__(self, "odd", odd)
        object.__setattr__(self, "class_index", tuple(index))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    N = n

    @property
    def M(self) -> int:
        return self.n // 2

    @property
    def n_even(self) -> int:
        return len(self.even)

    @property
    def n_odd(self) -> int:
        return len(self.odd)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def class_of(self, side: int) -> tuple[int, ...]:
        return self.even if side == EVEN else self.odd

    def class_mask(self, side: int) -> int:
        return to_mask(self.class_of(side))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each edge once, as ``(even_vertex, odd_vertex)``."""
        for u in self.even:
            for w in self.adjacency[u]:
                yield u, w

    @property
    def n_edges(self) -> int:
        return self.n * self.d // 2

    def label(self, v: int) -> str:
        if self.bits is not None:
            return format(v, f"0{self.bits}b")
        return f"{SIDE_NAMES[self.side[v]]}{self.class_index[v]}"

    def vertex(self, label: str | int) -> int:
        """Resolve a vertex label (bit-string, ``E3``/``O2``, or global id)."""
        if isinstance(label, (int, np.integer)):
            v = int(label)
        elif self.bits is not None and len(label) == self.bits and set(label) <= {"0", "1"}:
            v = int(label, 2)
        elif label[:1] in ("E", "O") and label[1:].isdigit():
            v = self.class_of(SIDE_NAMES.index(label[0]))[int(label[1:])]
        else:
            v = int(label)
        if not 0 <= v < self.n:
            raise InvalidInput(f"no vertex {label!r}")
        return v

    def vertex_set(self, side: int, members: Iterable[int | str]) -> "VertexSet":
        vs = VertexSet(side, frozenset(self.vertex(m) for m in members))
        vs.validate(self)
        return vs

    def distances(self, root: int) -> list[int]:
        """BFS distances from ``root``; unreachable vertices get -1."""
        dist = [-1] * self.n
        dist[root] = 0
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.adjacency[v]:
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        return dist


@dataclass(frozen=True)
class VertexSet:
    """A subset of one partition class."""

    side: int
    members: frozenset[int] = frozenset()

    def validate(self, G: BipartiteGraph) -> None:
        for v in self.members:
            if not 0 <= v < G.n or G.side[v] != self.side:
                raise InvalidInput(f"vertex {v} is not on side {SIDE_NAMES[self.side]}")

    @property
    def mask(self) -> int:
        return to_mask(self.members)

    @classmethod
    def from_mask(cls, side: int, mask: int) -> "VertexSet":
        return cls(side, frozenset(bits_of(mask)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __contains__(self, v: object) -> bool:
        return v in self.members

    def labels(self, G: BipartiteGraph) -> list[str]:
        return [G.label(v) for v in self]


@dataclass(frozen=True)
class Verdict:
    """A boolean check result that carries a witness when it fails."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


# -- bitset kernels ---------------------------------------------------------


def nbhd_bits(G: BipartiteGraph, mask: int) -> int:
    out = 0
    nbr = G.nbr
    for v in bits_of(mask):
        out |= nbr[v]
    return out


def closure_bits(G: BipartiteGraph, mask: int) -> int:
    """``[A] = {x : N(x) ⊆ N(A)}`` as a bitset."""
    target = nbhd_bits(G, mask)
    out = 0
    for x, nx in enumerate(G.nbr):
        if nx & ~target == 0:
            out |= 1 << x
    return out


def internal_bits(G: BipartiteGraph, mask: int) -> int:
    """``I(T) = {x : N(x) ⊆ T}`` as a bitset (d >= 1 keeps x inside N(T))."""
    out = 0
    for x, nx in enumerate(G.nbr):
        if nx & ~mask == 0:
            out |= 1 << x
    return out


def components_bits(G: BipartiteGraph, mask: int) -> int:
    """Number of connected components of the subgraph induced by ``mask``."""
    nbr = G.nbr
    remaining = mask
    count = 0
    while remaining:
        frontier = remaining & -remaining
        seen = frontier
        while frontier:
            grow = 0
            for v in bits_of(frontier):
                grow |= nbr[v]
            frontier = grow & remaining & ~seen
            seen |= frontier
        remaining &= ~seen
        count += 1
    return count


# -- constructors -----------------------------------------------------------


def _from_neighbour_fn(n: int, side, nbrs, **kw) -> BipartiteGraph:
    adjacency = tuple(tuple(sorted(nbrs(v))) for v in range(n))
    return BipartiteGraph(adjacency, tuple(side(v) for v in range(n)), **kw)


def hypercube(d: int) -> BipartiteGraph:
    """The d-dimensional hypercube, classes split by coordinate-sum parity."""
    if d < 1:
        raise InvalidInput("hypercube dimension must be >= 1")
    return _from_neighbour_fn(
        1 << d,
        lambda v: popcount(v) & 1,
        lambda v: (v ^ (1 << k) for k in range(d)),
        name=f"hypercube({d})",
        bits=d,
    )


def even_cycle(n: int) -> BipartiteGraph:
    if n < 4 or n % 2:
        raise InvalidInput(f"cycle length must be even and >= 4, got {n}")
    return _from_neighbour_fn(
        n, lambda v: v & 1, lambda v: ((v - 1) % n, (v + 1) % n), name=f"even_cycle({n})"
    )


def complete_bipartite(d: int) -> BipartiteGraph:
    """K_{d,d}: E-class is ``0..d-1``, O-class ``d..2d-1``."""
    if d < 1:
        raise InvalidInput("degree must be >= 1")
    return _from_neighbour_fn(
        2 * d,
        lambda v: int(v >= d),
        lambda v: range(d, 2 * d) if v < d else range(d),
        name=f"complete_bipartite({d})",
    )


def torus(L: int, d: int) -> BipartiteGraph:
    """The discrete torus on ``{0..L-1}^d``; vertex id is the base-L integer."""
    if L < 4 or L % 2:
        raise InvalidInput(f"torus side must be even and >= 4, got {L}")
    if d < 1:
        raise InvalidInput("torus dimension must be >= 1")
    n = L**d

    def coords(v):
        return [(v // L**k) % L for k in range(d)]

    def nbrs(v):
        c = coords(v)
        for k in range(d):
            for step in (-1, 1):
                w = v + (((c[k] + step) % L) - c[k]) * L**k
                yield w

    return _from_neighbour_fn(
        n, lambda v: sum(coords(v)) & 1, nbrs, name=f"torus({L},{d})"
    )


def random_regular(n_even: int, d: int, seed: int, retries: int = RANDOM_RETRIES) -> BipartiteGraph:
    """Union of ``d`` random perfect matchings between two classes of size ``n_even``.

    Each new matching is redrawn (up to ``retries`` times) until it avoids
    every edge already present.
    """
    if n_even < 1 or d < 1:
        raise InvalidInput("need n_even >= 1 and d >= 1")
    if d > n_even:
        raise InvalidInput(f"degree {d} exceeds class size {n_even}")
    rng = np.random.Generator(np.random.PCG64(seed))
    nbrs: list[set[int]] = [set() for _ in range(n_even)]
    for _ in range(d):
        for _attempt in range(retries):
            perm = rng.permutation(n_even)
            if all(int(perm[i]) not in nbrs[i] for i in range(n_even)):
                break
        else:
            raise ConstructionFailed(
                f"could not add a matching without parallel edges in {retries} tries"
            )
        for i in range(n_even):
            nbrs[i].add(int(perm[i]))
    adjacency: list[list[int]] = [[] for _ in range(2 * n_even)]
    for i in range(n_even):
        for j in nbrs[i]:
            adjacency[i].append(n_even + j)
            adjacency[n_even + j].append(i)
    return BipartiteGraph(
        tuple(tuple(sorted(a)) for a in adjacency),
        tuple([EVEN] * n_even + [ODD] * n_even),
        name=f"random_regular({n_even},{d},{seed})",
    )


FAMILIES = {
    "hypercube": hypercube,
    "even_cycle": even_cycle,
    "cycle": even_cycle,
    "complete_bipartite": complete_bipartite,
    "torus": torus,
    "random_regular": random_regular,
}


def build_graph(family: str, *params: int) -> BipartiteGraph:
    """Construct a graph by family name, e.g. ``build_graph("torus", 4, 2)``."""
    try:
        ctor = FAMILIES[family]
    except KeyError:
        raise InvalidInput(f"unknown graph family {family!r}") from None
    try:
        return ctor(*params)
    except TypeError as exc:
        raise InvalidInput(f"bad parameters for {family}: {exc}") from None


# -- text format ------------------------------------------------------------


def format_graph(G: BipartiteGraph) -> str:
    lines = [f"bipartite {G.n_even} {G.n_odd} {G.d}"]
    for u, w in sorted((G.class_index[u], G.class_index[w]) for u, w in G.edges()):
        lines.append(f"{u} {w}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str, name: str = "file") -> BipartiteGraph:
    """Parse the ``bipartite <n_even> <n_odd> <d>`` edge-list format.

    Global ids put the E-class first: E-vertex ``u`` is ``u`` and O-vertex
    ``v`` is ``n_even + v``.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or rows[0][0] != "bipartite" or len(rows[0]) != 4:
        raise InvalidInput("first line must be 'bipartite <n_even> <n_odd> <d>'")
    try:
        n_even, n_odd, d = (int(x) for x in rows[0][1:])
        edges = [(int(u), int(v)) for u, v in rows[1:]]
    except ValueError:
        raise InvalidInput("malformed graph file") from None
    adjacency: list[list[int]] = [[] for _ in range(n_even + n_odd)]
    for u, v in edges:
        if not (0 <= u < n_even and 0 <= v < n_odd):
            raise InvalidInput(f"edge {u} {v} out of range")
        adjacency[u].append(n_even + v)
        adjacency[n_even + v].append(u)
    G = BipartiteGraph(
        tuple(tuple(sorted(a)) for a in adjacency),
        tuple([EVEN] * n_even + [ODD] * n_odd),
        name=name,
    )
    if G.d != d:
        raise InvalidInput(f"header declares degree {d}, edges give {G.d}")
    return G


def load_graph(path) -> BipartiteGraph:
    with open(path) as fh:
        return parse_graph(fh.read(), name=str(path))


# -- operations -------------------------------------------------------------


def neighbourhood(G: BipartiteGraph, A: VertexSet) -> VertexSet:
    return VertexSet.from_mask(1 - A.side, nbhd_bits(G, A.mask))


def external_closure(G: BipartiteGraph, A: VertexSet) -> VertexSet:
    return VertexSet.from_mask(A.side, closure_bits(G, A.mask))


def internal_closure(G: BipartiteGraph, T: VertexSet) -> VertexSet:
    return VertexSet.from_mask(1 - T.side, internal_bits(G, T.mask))


def is_small(G: BipartiteGraph, A: VertexSet) -> bool:
    # |[A]| <= N/4, kept in integers
    return 4 * popcount(closure_bits(G, A.mask)) <= G.n


def component_count(G: BipartiteGraph, S: Iterable[int]) -> int:
    return components_bits(G, to_mask(S))


@dataclass(frozen=True)
class Expansion:
    delta: Fraction
    vacuous: bool
    witness: VertexSet | None  # a small set attaining the minimum


def bipartite_expansion(G: BipartiteGraph, cap: int = DEFAULT_EXPANSION_CAP) -> Expansion:
    """Exact bipartite expansion by enumerating every subset of each class.

    When no nonempty small set exists the result is ``1`` with ``vacuous``
    set.
    """
    if G.n_even > cap:
        raise GuardExceeded("bipartite_expansion class size", G.n_even, cap)
    best: Fraction | None = None
    witness = None
    for side in (EVEN, ODD):
        cls = G.class_of(side)
        k = len(cls)
        # N(A) for every subset via lowest-bit recurrence
        nb = [0] * (1 << k)
        vbit = [1 << v for v in cls]
        vnb = [G.nbr[v] for v in cls]
        for sub in range(1, 1 << k):
            low = (sub & -sub).bit_length() - 1
            nb[sub] = nb[sub & (sub - 1)] | vnb[low]
            target = nb[sub]
            closure = sum(1 for nx in vnb if nx & ~target == 0)
            if 4 * closure > G.n:
                continue
            size = popcount(target)
            ratio = Fraction(size - closure, size)
            if best is None or ratio < best:
                best = ratio
                witness = VertexSet(side, frozenset(cls[i] for i in bits_of(sub)))
    if best is None:
        return Expansion(Fraction(1), True, None)
    return Expansion(best, False, witness)


def _max_independent(nbr: list[int], mask: int) -> int:
    """Bitmask of a maximum independent set inside ``mask`` (local ids)."""

    @lru_cache(maxsize=None)
    def solve(m: int) -> int:
        if m == 0:
            return 0
        # branch on a vertex of maximum degree inside m
        v, deg = -1, -1
        for u in bits_of(m):
            du = popcount(nbr[u] & m)
            if du > deg:
                v, deg = u, du
        if deg == 0:
            return m
        take = solve(m & ~(1 << v) & ~nbr[v]) | (1 << v)
        skip = solve(m & ~(1 << v))
        return take if popcount(take) >= popcount(skip) else skip

    return solve(mask)


def locality_witness(
    G: BipartiteGraph, cap: int = DEFAULT_LOCALITY_CAP
) -> tuple[int, tuple[int, int], frozenset[int]]:
    """Locality with the edge and independent set that attain it."""
    if 2 * G.d > cap:
        raise GuardExceeded("locality neighbourhood union", 2 * G.d, cap)
    best = -1
    best_edge = None
    best_set: frozenset[int] = frozenset()
    for x, y in G.edges():
        verts = sorted(set(G.adjacency[x]) | set(G.adjacency[y]))
        local = {v: i for i, v in enumerate(verts)}
        nbr = [to_mask(local[w] for w in G.adjacency[v] if w in local) for v in verts]
        ind = _max_independent(nbr, (1 << len(verts)) - 1)
        size = popcount(ind)
        if size > best:
            best = size
            best_edge = (x, y)
            best_set = frozenset(verts[i] for i in bits_of(ind))
    return 2 * G.d - best, best_edge, best_set


def locality(G: BipartiteGraph, cap: int = DEFAULT_LOCALITY_CAP) -> int:
    """``2d`` minus the largest independent set in any ``G[N(x) ∪ N(y)]``, x ~ y."""
    return locality_witness(G, cap)[0]


def maximum_matching(G: BipartiteGraph) -> dict[int, int]:
    """Maximum matching E -> O by augmenting paths."""
    match_odd: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in G.adjacency[u]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_odd or augment(match_odd[w], seen):
                match_odd[w] = u
                return True
        return False

    for u in G.even:
        augment(u, set())
    return {u: w for w, u in match_odd.items()}


def has_perfect_matching(G: BipartiteGraph) -> bool:
    return len(maximum_matching(G)) == G.n_even == G.n_odd


def subsets(items: tuple[int, ...]) -> Iterator[frozenset[int]]:
    """Every subset of ``items``, smallest first."""
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)
