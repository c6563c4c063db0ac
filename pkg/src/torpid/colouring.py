"""Proper colourings: enumeration, the zero-set count, and phase classes.

Colourings are stored as tuples indexed by global vertex id.  Enumeration is
lexicographic in that tuple, which keeps fixture files stable.
"""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from torpid.errors import GuardExceeded, InvalidInput
from torpid.graph import (
    EVEN,
    ODD,
    SIDE_NAMES,
    BipartiteGraph,
    VertexSet,
    bits_of,
    components_bits,
    internal_bits,
    locality,
    nbhd_bits,
    popcount,
)

DEFAULT_MAX_VERTICES = 32
DEFAULT_PAIR_CLASS_CAP = 8


@dataclass(frozen=True)
class Colouring:
    """A total map from vertices to ``{0..q-1}``; properness is not assumed."""

    q: int
    colours: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= c < self.q for c in self.colours):
            raise InvalidInput(f"colour out of range for q={self.q}")

    def __getitem__(self, v: int) -> int:
        return self.colours[v]

    def __len__(self) -> int:
        return len(self.colours)

    def recolour(self, v: int, c: int) -> "Colouring":
        cs = list(self.colours)
        cs[v] = c
        return Colouring(self.q, tuple(cs))


def as_colours(G: BipartiteGraph, chi: Colouring | Iterable[int]) -> tuple[int, ...]:
    cs = chi.colours if isinstance(chi, Colouring) else tuple(chi)
    if len(cs) != G.n:
        raise InvalidInput(f"colouring has {len(cs)} entries for {G.n} vertices")
    return cs


def is_proper(G: BipartiteGraph, chi: Colouring | Iterable[int]) -> bool:
    cs = as_colours(G, chi)
    return all(cs[u] != cs[w] for u, w in G.edges())


def require_proper(G: BipartiteGraph, chi) -> tuple[int, ...]:
    cs = as_colours(G, chi)
    for u, w in G.edges():
        if cs[u] == cs[w]:
            raise InvalidInput(
                f"colouring is not proper: edge {G.label(u)}-{G.label(w)} has colour {cs[u]}"
            )
    return cs


# -- enumeration ------------------------------------------------------------


def colour_tuples(G: BipartiteGraph, q: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> Iterator[tuple[int, ...]]:
    """Every proper q-colouring as a tuple, in lexicographic order."""
    n = G.n
    if n > max_vertices:
        raise GuardExceeded("colouring enumeration vertex count", n, max_vertices)
    if q < 1:
        return
    lower = [tuple(w for w in G.adjacency[v] if w < v) for v in range(n)]
    cs = [-1] * n
    v = 0
    while v >= 0:
        c = cs[v] + 1
        while c < q and any(cs[w] == c for w in lower[v]):
            c += 1
        if c == q:
            cs[v] = -1
            v -= 1
            continue
        cs[v] = c
        if v == n - 1:
            yield tuple(cs)
        else:
            v += 1


def enumerate_colourings(G: BipartiteGraph, q: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> Iterator[Colouring]:
    for cs in colour_tuples(G, q, max_vertices):
        yield Colouring(q, cs)


def count_colourings(G: BipartiteGraph, q: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> int:
    return sum(1 for _ in colour_tuples(G, q, max_vertices))


# -- zero-set decomposition -------------------------------------------------


@dataclass(frozen=True)
class ZeroSetPair:
    """The vertices coloured 0 on each class."""

    E_zero: VertexSet
    O_zero: VertexSet

    def __post_init__(self):
        if self.E_zero.side != EVEN or self.O_zero.side != ODD:
            raise InvalidInput("E_zero must lie in the E-class and O_zero in the O-class")

    @classmethod
    def of(cls, G: BipartiteGraph, chi) -> "ZeroSetPair":
        cs = as_colours(G, chi)
        return cls(
            VertexSet(EVEN, frozenset(v for v in G.even if cs[v] == 0)),
            VertexSet(ODD, frozenset(v for v in G.odd if cs[v] == 0)),
        )

    def compatible(self, G: BipartiteGraph) -> bool:
        """True iff no edge joins ``E_zero`` and ``O_zero``."""
        return nbhd_bits(G, self.E_zero.mask) & self.O_zero.mask == 0

    def parts(self, G: BipartiteGraph) -> tuple[VertexSet, VertexSet, frozenset[int]]:
        """``(I, J, R)`` with ``I = I(E_zero)``, ``J = I(O_zero)`` and R the rest."""
        e, o = self.E_zero.mask, self.O_zero.mask
        i, j = internal_bits(G, e), internal_bits(G, o)
        r = G.all_mask & ~(e | o | i | j)
        return VertexSet.from_mask(ODD, i), VertexSet.from_mask(EVEN, j), frozenset(bits_of(r))


def zero_set_exponent(G: BipartiteGraph, e_mask: int, o_mask: int) -> int:
    """``|I| + |J| + comp(R)`` for a compatible pair given as bitsets."""
    i, j = internal_bits(G, e_mask), internal_bits(G, o_mask)
    r = G.all_mask & ~(e_mask | o_mask | i | j)
    return popcount(i) + popcount(j) + components_bits(G, r)


def count_zero_set(G: BipartiteGraph, pair: ZeroSetPair) -> int:
    """Number of proper 3-colourings whose colour-0 class is exactly the pair."""
    if not pair.compatible(G):
        return 0
    return 1 << zero_set_exponent(G, pair.E_zero.mask, pair.O_zero.mask)


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, starting from 0."""
    sub = 0
    while True:
        yield sub
        sub = (sub - mask) & mask
        if sub == 0:
            return


def compatible_pairs(G: BipartiteGraph, cap: int = DEFAULT_PAIR_CLASS_CAP) -> Iterator[tuple[int, int]]:
    """Every ``(E_zero, O_zero)`` bitset pair with no edge between them."""
    if G.n_even > cap:
        raise GuardExceeded("zero-set pair enumeration class size", G.n_even, cap)
    odd_mask = G.class_mask(ODD)
    for e in submasks(G.class_mask(EVEN)):
        for o in submasks(odd_mask & ~nbhd_bits(G, e)):
            yield e, o


def count_via_decomposition(G: BipartiteGraph, cap: int = DEFAULT_PAIR_CLASS_CAP) -> int:
    """Sum of ``2^{|I|+|J|+comp(R)}`` over all compatible zero-set pairs."""
    total = 0
    for e, o in compatible_pairs(G, cap):
        total += 1 << zero_set_exponent(G, e, o)
    return total


def zero_set_histogram(G: BipartiteGraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> Counter:
    """Enumerated 3-colourings counted by their exact zero-set bitset pair."""
    even_mask = G.class_mask(EVEN)
    hist: Counter = Counter()
    for cs in colour_tuples(G, 3, max_vertices):
        zero = 0
        for v, c in enumerate(cs):
            if c == 0:
                zero |= 1 << v
        hist[(zero & even_mask, zero & ~even_mask)] += 1
    return hist


@dataclass(frozen=True)
class ComponentBound:
    max_comp: int
    bound: Fraction
    holds: bool
    witness: tuple[int, int] | None  # bitset pair attaining max_comp
    pairs_checked: int


def verify_component_bound(G: BipartiteGraph, cap: int = DEFAULT_PAIR_CLASS_CAP, ell: int | None = None) -> ComponentBound:
    """Check ``comp(R) <= 2M/ℓ`` over every compatible pair."""
    if ell is None:
        ell = locality(G)
    if ell <= 0:
        raise InvalidInput("locality is 0; the component bound is undefined")
    bound = Fraction(2 * G.M, ell)
    best, witness, checked = -1, None, 0
    for e, o in compatible_pairs(G, cap):
        i, j = internal_bits(G, e), internal_bits(G, o)
        comp = components_bits(G, G.all_mask & ~(e | o | i | j))
        checked += 1
        if comp > best:
            best, witness = comp, (e, o)
    return ComponentBound(best, bound, best <= bound, witness, checked)


# -- phases -----------------------------------------------------------------


class Phase(str, enum.Enum):
    E_HEAVY = "E"
    O_HEAVY = "O"
    BALANCED = "b"


@dataclass(frozen=True)
class PhaseLabel:
    phases: tuple[Phase, ...]

    def __getitem__(self, i: int) -> Phase:
        return self.phases[i]

    @property
    def in_dominant_region(self) -> bool:
        """No colour is balanced, i.e. the colouring lies in one of the six heavy regions."""
        return Phase.BALANCED not in self.phases

    def __str__(self) -> str:
        return "".join(p.value for p in self.phases)


def as_fraction(x) -> Fraction:
    """Exact value of a threshold; floats are read through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def side_counts(G: BipartiteGraph, cs: tuple[int, ...], q: int = 3) -> list[tuple[int, int]]:
    """``(|χ⁻¹(i) ∩ E|, |χ⁻¹(i) ∩ O|)`` for each colour i."""
    e = [0] * q
    o = [0] * q
    side = G.side
    for v, c in enumerate(cs):
        if side[v] == EVEN:
            e[c] += 1
        else:
            o[c] += 1
    return list(zip(e, o))


def classify(diff: int, threshold: Fraction) -> Phase:
    """Phase of one colour from its E-minus-O count difference and ``ρM``."""
    if diff > threshold:
        return Phase.E_HEAVY
    if -diff > threshold:
        return Phase.O_HEAVY
    return Phase.BALANCED


def phase_label(G: BipartiteGraph, chi, rho) -> PhaseLabel:
    cs = require_proper(G, chi)
    q = chi.q if isinstance(chi, Colouring) else max(3, max(cs) + 1)
    threshold = as_fraction(rho) * G.M
    return PhaseLabel(tuple(classify(e - o, threshold) for e, o in side_counts(G, cs, q)))


def imbalance(G: BipartiteGraph, chi, i: int) -> Fraction:
    """``| |χ⁻¹(i)∩E|/|E| - |χ⁻¹(i)∩O|/|O| |`` as an exact rational."""
    cs = require_proper(G, chi)
    e = sum(1 for v in G.even if cs[v] == i)
    o = sum(1 for v in G.odd if cs[v] == i)
    return abs(Fraction(e, G.n_even) - Fraction(o, G.n_odd))


@dataclass(frozen=True)
class ClassSizes:
    rho: Fraction
    total: int
    rows: tuple[tuple[int, int, int], ...]  # (balanced, e_heavy, o_heavy) per colour

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["colour", "balanced", "e_heavy", "o_heavy"])
        for i, row in enumerate(self.rows):
            w.writerow([i, *row])
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "rho": str(self.rho),
            "total": self.total,
            "colours": [
                {"colour": i, "balanced": b, "e_heavy": e, "o_heavy": o}
                for i, (b, e, o) in enumerate(self.rows)
            ],
        }


def class_sizes(G: BipartiteGraph, rho, max_vertices: int = DEFAULT_MAX_VERTICES) -> ClassSizes:
    """Exact sizes of the balanced and E-/O-heavy classes for each colour."""
    threshold = as_fraction(rho) * G.M
    counts = [[0, 0, 0] for _ in range(3)]
    slot = {Phase.BALANCED: 0, Phase.E_HEAVY: 1, Phase.O_HEAVY: 2}
    total = 0
    for cs in colour_tuples(G, 3, max_vertices):
        total += 1
        for i, (e, o) in enumerate(side_counts(G, cs)):
            counts[i][slot[classify(e - o, threshold)]] += 1
    return ClassSizes(as_fraction(rho), total, tuple(tuple(r) for r in counts))


def extreme_colouring(G: BipartiteGraph, colour: int = 0, side: int = EVEN, q: int = 3) -> Colouring:
    """``colour`` on all of ``side``; the other class alternates the next two colours."""
    others = [c for c in range(q) if c != colour][:2]
    cs = [0] * G.n
    for v in G.class_of(side):
        cs[v] = colour
    for i, v in enumerate(G.class_of(1 - side)):
        cs[v] = others[i % 2]
    return Colouring(q, tuple(cs))


# -- file format ------------------------------------------------------------


def format_colouring(G: BipartiteGraph, chi: Colouring) -> str:
    """One ``side index colour`` line per vertex, E-class first."""
    lines = []
    for side in (EVEN, ODD):
        for i, v in enumerate(G.class_of(side)):
            lines.append(f"{SIDE_NAMES[side]} {i} {chi[v]}")
    return "\n".join(lines) + "\n"


def parse_vertex_values(G: BipartiteGraph, text: str) -> list[int]:
    """Read ``side index value`` lines into a per-vertex list."""
    values: list[int | None] = [None] * G.n
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            side_name, idx, val = line.split()
            v = G.class_of(SIDE_NAMES.index(side_name))[int(idx)]
            values[v] = int(val)
        except (ValueError, IndexError):
            raise InvalidInput(f"bad vertex line {raw!r}") from None
    missing = [G.label(v) for v, x in enumerate(values) if x is None]
    if missing:
        raise InvalidInput(f"no value for vertices {missing}")
    return values  # type: ignore[return-value]


def parse_colouring(G: BipartiteGraph, text: str, q: int) -> Colouring:
    return Colouring(q, tuple(parse_vertex_values(G, text)))
