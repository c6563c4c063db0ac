"""Height functions (graph homomorphisms to ℤ) and their link to 3-colourings.

Reducing a height function mod 3 gives a proper 3-colouring.  On the
hypercube every 3-colouring arises this way, and lowering the highest level
of the height function two units at a time gives an explicit walk of legal
single-site moves down to a 2-colouring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from torpid.colouring import Colouring, require_proper
from torpid.errors import InvalidInput, StructuralPropertyError
from torpid.graph import EVEN, SIDE_NAMES, BipartiteGraph, hypercube


@dataclass(frozen=True)
class HeightFunction:
    root: int
    values: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    @property
    def range(self) -> frozenset[int]:
        return frozenset(self.values)

    def validate(self, G: BipartiteGraph) -> None:
        if len(self.values) != G.n:
            raise InvalidInput("height function has the wrong length")
        if self.values[self.root] != 0:
            raise InvalidInput("height function is not 0 at its root")
        for u, w in G.edges():
            if abs(self.values[u] - self.values[w]) != 1:
                raise InvalidInput(f"heights differ by more than 1 across {G.label(u)}-{G.label(w)}")


def phi(G: BipartiteGraph, f: HeightFunction) -> Colouring:
    f.validate(G)
    return Colouring(3, tuple(x % 3 for x in f.values))


def levels(G: BipartiteGraph, root: int) -> list[list[int]]:
    dist = G.distances(root)
    if min(dist) < 0:
        raise InvalidInput("graph is disconnected")
    out: list[list[int]] = [[] for _ in range(max(dist) + 1)]
    for v, k in enumerate(dist):
        out[k].append(v)
    return out


def level_structure_witness(G: BipartiteGraph, root: int) -> tuple[int, int, int] | None:
    """A triple ``(v, y1, y2)`` where y1, y2 share the upper neighbour v but
    no lower neighbour, or ``None`` if every such pair has one.

    When this returns ``None``, :func:`phi_inverse` succeeds for every
    3-colouring that is 0 at the root.
    """
    dist = G.distances(root)
    for v in range(G.n):
        lower = [y for y in G.adjacency[v] if dist[y] < dist[v]]
        for y1, y2 in itertools.combinations(lower, 2):
            below1 = {w for w in G.adjacency[y1] if dist[w] < dist[y1]}
            below2 = {w for w in G.adjacency[y2] if dist[w] < dist[y2]}
            if not below1 & below2:
                return v, y1, y2
    return None


def phi_inverse(G: BipartiteGraph, chi: Colouring, root: int) -> HeightFunction:
    """The height function reducing to ``chi``, built one BFS level at a time.

    Raises :class:`StructuralPropertyError` with a witness ``(v, y1, y2)`` if
    two lower neighbours of some vertex already differ by 4 or more, which
    means no preimage exists.
    """
    cs = require_proper(G, chi)
    if chi.q != 3 and max(cs) > 2:
        raise InvalidInput("phi_inverse needs a 3-colouring")
    if cs[root] != 0:
        raise InvalidInput("colouring must be 0 at the root")
    f: list[int | None] = [None] * G.n
    f[root] = 0
    for layer in levels(G, root)[1:]:
        for v in layer:
            below = [y for y in G.adjacency[v] if f[y] is not None]
            vals = sorted({f[y] for y in below})
            if len(vals) == 1:
                y = vals[0]
                f[v] = y + 1 if (y + 1) % 3 == cs[v] else y - 1
            elif len(vals) == 2 and vals[1] - vals[0] == 2:
                f[v] = vals[0] + 1
            else:
                lo = next(y for y in below if f[y] == vals[0])
                hi = next(y for y in below if f[y] == vals[-1])
                raise StructuralPropertyError(
                    f"lower neighbours {G.label(lo)} and {G.label(hi)} of {G.label(v)} "
                    f"have heights {vals[0]} and {vals[-1]}",
                    witness=(v, lo, hi),
                )
    out = HeightFunction(root, tuple(f))  # type: ignore[arg-type]
    out.validate(G)
    if any(x % 3 != c for x, c in zip(out.values, cs)):
        raise StructuralPropertyError("constructed heights do not reduce to the colouring")
    return out


def enumerate_height_functions(G: BipartiteGraph, root: int) -> Iterator[HeightFunction]:
    """Every height function pinned to 0 at ``root``, by backtracking over
    values in ``[-dist(v), dist(v)]``."""
    dist = G.distances(root)
    order = sorted(range(G.n), key=lambda v: (dist[v], v))
    placed = {v: i for i, v in enumerate(order)}
    earlier = [[w for w in G.adjacency[v] if placed[w] < placed[v]] for v in order]
    vals = [0] * G.n

    def rec(i: int) -> Iterator[HeightFunction]:
        if i == len(order):
            yield HeightFunction(root, tuple(vals))
            return
        v = order[i]
        span = range(-dist[v], dist[v] + 1) if v != root else (0,)
        for x in span:
            if all(abs(x - vals[w]) == 1 for w in earlier[i]):
                vals[v] = x
                yield from rec(i + 1)

    yield from rec(0)


def extreme_statistic(f: HeightFunction) -> tuple[int, int]:
    """``(|extreme level|, vertices on it)`` for the level the next reduction acts on."""
    top = max(f.values)
    if top > 0:
        return top, f.values.count(top)
    bottom = min(f.values)
    return -bottom, f.values.count(bottom)


def is_terminal(f: HeightFunction) -> bool:
    return len(f.range) <= 2


def reduction_step(G: BipartiteGraph, f: HeightFunction) -> tuple[HeightFunction, int]:
    """Move one extreme vertex two units toward the root value.

    The lowest-index vertex at the maximum is lowered by 2 when f has
    positive values; otherwise the lowest-index vertex at the minimum is
    raised by 2.  Returns the new function and the vertex that moved.
    """
    if is_terminal(f):
        raise InvalidInput("height function already takes at most two values")
    top = max(f.values)
    if top > 0:
        v = f.values.index(top)
        new = top - 2
    else:
        bottom = min(f.values)
        v = f.values.index(bottom)
        new = bottom + 2
    vals = list(f.values)
    vals[v] = new
    out = HeightFunction(f.root, tuple(vals))
    out.validate(G)
    return out, v


def ergodicity_path(G: BipartiteGraph, chi: Colouring, root: int) -> list[Colouring]:
    """Single-site moves from ``chi`` down to a 2-colouring, start included."""
    f = phi_inverse(G, chi, root)
    path = [chi if chi.q == 3 else Colouring(3, chi.colours)]
    while not is_terminal(f):
        f, v = reduction_step(G, f)
        path.append(path[-1].recolour(v, f[v] % 3))
    return path


def path_moves(path: list[Colouring]) -> list[tuple[int, int, int]]:
    """``(vertex, old_colour, new_colour)`` for each consecutive pair."""
    moves = []
    for a, b in zip(path, path[1:]):
        diff = [v for v in range(len(a)) if a[v] != b[v]]
        if len(diff) != 1:
            raise InvalidInput(f"consecutive colourings differ at {len(diff)} vertices")
        v = diff[0]
        moves.append((v, a[v], b[v]))
    return moves


def format_path(G: BipartiteGraph, path: list[Colouring]) -> str:
    return "".join(f"{G.label(v)} {a} {b}\n" for v, a, b in path_moves(path))


def format_heights(G: BipartiteGraph, f: HeightFunction) -> str:
    """One ``side index value`` line per vertex, E-class first."""
    lines = []
    for side in (EVEN, 1 - EVEN):
        for i, v in enumerate(G.class_of(side)):
            lines.append(f"{SIDE_NAMES[side]} {i} {f[v]}")
    return "\n".join(lines) + "\n"


# -- frozen colourings ------------------------------------------------------


def _faces(G: BipartiteGraph) -> list[tuple[int, int, int, int]]:
    """4-cycles of a hypercube, as vertex quadruples."""
    d = G.bits or 0
    out = []
    for v in range(G.n):
        for i, j in itertools.combinations(range(d), 2):
            if not v >> i & 1 and not v >> j & 1:
                out.append((v, v | 1 << i, v | 1 << j, v | 1 << i | 1 << j))
    return out


def frozen_four_colouring() -> Colouring:
    """The frozen 4-colouring of Q_3.

    Seeds 000, 100, 010, 001 with colours 0..3 and repeatedly fills the one
    missing colour on any face that has three coloured vertices.
    """
    G = hypercube(3)
    seed = {"000": 0, "100": 1, "010": 2, "001": 3}
    cs: dict[int, int] = {G.vertex(k): c for k, c in seed.items()}
    faces = _faces(G)
    progress = True
    while progress and len(cs) < G.n:
        progress = False
        for face in faces:
            known = [v for v in face if v in cs]
            if len(known) == 3:
                (v,) = set(face) - set(known)
                (c,) = set(range(4)) - {cs[u] for u in known}
                cs[v] = c
                progress = True
    if len(cs) < G.n:
        raise RuntimeError("face rule did not determine every vertex")
    for face in faces:
        if {cs[v] for v in face} != set(range(4)):
            raise RuntimeError("face rule produced an inconsistent colouring")
    return Colouring(4, tuple(cs[v] for v in range(G.n)))


def is_frozen(G: BipartiteGraph, chi: Colouring, q: int | None = None) -> bool:
    """True iff no single vertex can take a different colour properly."""
    q = chi.q if q is None else q
    cs = require_proper(G, chi)
    for v in range(G.n):
        used = {cs[w] for w in G.adjacency[v]} | {cs[v]}
        if len(used) < q:
            return False
    return True
