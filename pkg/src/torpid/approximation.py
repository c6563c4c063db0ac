"""Approximation pairs for vertex sets and the six-statistic pair classes.

An approximation for ``A`` is a pair ``(F, S)`` with ``F`` a subset of
``N(A)`` and ``S`` a superset of ``[A]``, such that every vertex of ``S`` has
almost all its neighbours in ``F`` and every vertex outside ``F`` has almost
all its neighbours outside ``S``.  "Almost all" means a deficit of at most
``psi``, which defaults to ``sqrt(d)``.

Pairs ``(E_zero, O_zero)`` of zero sets are grouped by the statistics
``(a, g, b, h, b', h') = (|[E]|, |N(E)|, |I|, |N(I)|, |J|, |N(J)|)``.
:func:`reconstruct_candidates` enumerates every pair compatible with a
sextuple of approximations, following the branching on whether the
approximating sets are tight or slack.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterator

from torpid.colouring import DEFAULT_PAIR_CLASS_CAP, compatible_pairs, submasks
from torpid.errors import GuardExceeded, InvalidInput
from torpid.graph import (
    EVEN,
    ODD,
    SIDE_NAMES,
    BipartiteGraph,
    Verdict,
    VertexSet,
    bits_of,
    closure_bits,
    internal_bits,
    nbhd_bits,
    popcount,
    to_mask,
)

DEFAULT_RECONSTRUCTION_CAP = 1 << 20


def _within_slack(deficit: int, d: int, psi) -> bool:
    """``d - degree <= psi``; with ``psi=None`` compares against sqrt(d) exactly."""
    if deficit <= 0:
        return True
    if psi is None:
        return deficit * deficit <= d
    return deficit <= psi


@dataclass(frozen=True)
class ApproximationPair:
    F: VertexSet  # opposite class from the approximated set
    S: VertexSet  # same class as the approximated set
    psi: float | Fraction | None = None  # None: sqrt(d)


def is_approximation(G: BipartiteGraph, A: VertexSet, pair: ApproximationPair) -> Verdict:
    """Check the four approximation conditions; the witness names the first failure."""
    side = A.side
    F, S = pair.F, pair.S
    if F.side != 1 - side or S.side != side:
        raise InvalidInput("F must lie opposite A and S on A's side")
    fm, sm = F.mask, S.mask
    extra = fm & ~nbhd_bits(G, A.mask)
    if extra:
        return Verdict(False, ("F not inside N(A)", frozenset(bits_of(extra))))
    missing = closure_bits(G, A.mask) & ~sm
    if missing:
        return Verdict(False, ("S does not contain [A]", frozenset(bits_of(missing))))
    for u in bits_of(sm):
        if not _within_slack(G.d - popcount(G.nbr[u] & fm), G.d, pair.psi):
            return Verdict(False, ("low degree into F", u))
    outside_s = G.class_mask(side) & ~sm
    for v in bits_of(G.class_mask(1 - side) & ~fm):
        if not _within_slack(G.d - popcount(G.nbr[v] & outside_s), G.d, pair.psi):
            return Verdict(False, ("low degree outside S", v))
    return Verdict(True)


def trivial_approximation(G: BipartiteGraph, A: VertexSet) -> ApproximationPair:
    """``(N(A), [A])``, which is an approximation for any slack."""
    return ApproximationPair(
        VertexSet.from_mask(1 - A.side, nbhd_bits(G, A.mask)),
        VertexSet.from_mask(A.side, closure_bits(G, A.mask)),
    )


@dataclass(frozen=True)
class Sextuple:
    """Approximations for ``E``, ``I = I(E)`` and ``J = I(O)`` side by side."""

    F: VertexSet
    S: VertexSet
    P: VertexSet
    Q: VertexSet
    P2: VertexSet  # P'
    Q2: VertexSet  # Q'

    SIDES = (ODD, EVEN, EVEN, ODD, ODD, EVEN)
    NAMES = ("F", "S", "P", "Q", "P'", "Q'")

    def __post_init__(self):
        for name, part, side in zip(self.NAMES, self.parts(), self.SIDES):
            if part.side != side:
                raise InvalidInput(f"sextuple component {name} must lie in class {SIDE_NAMES[side]}")

    def parts(self) -> tuple[VertexSet, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def trivial(cls, G: BipartiteGraph, e_mask: int, o_mask: int) -> "Sextuple":
        i, j = internal_bits(G, e_mask), internal_bits(G, o_mask)
        return cls(
            VertexSet.from_mask(ODD, nbhd_bits(G, e_mask)),
            VertexSet.from_mask(EVEN, closure_bits(G, e_mask)),
            VertexSet.from_mask(EVEN, nbhd_bits(G, i)),
            VertexSet.from_mask(ODD, closure_bits(G, i)),
            VertexSet.from_mask(ODD, nbhd_bits(G, j)),
            VertexSet.from_mask(EVEN, closure_bits(G, j)),
        )


def is_sextuple_approximation(G: BipartiteGraph, e_mask: int, o_mask: int, sx: Sextuple, psi=None) -> Verdict:
    I, J = internal_bits(G, e_mask), internal_bits(G, o_mask)
    for name, target, (F, S) in (
        ("E", VertexSet.from_mask(EVEN, e_mask), (sx.F, sx.S)),
        ("I", VertexSet.from_mask(ODD, I), (sx.P, sx.Q)),
        ("J", VertexSet.from_mask(EVEN, J), (sx.P2, sx.Q2)),
    ):
        v = is_approximation(G, target, ApproximationPair(F, S, psi))
        if not v:
            return Verdict(False, (name, v.witness))
    return Verdict(True)


def format_sextuple(G: BipartiteGraph, sx: Sextuple) -> str:
    """Six lines ``NAME side index...`` with class indices."""
    lines = []
    for name, part in zip(Sextuple.NAMES, sx.parts()):
        idx = " ".join(str(G.class_index[v]) for v in part)
        lines.append(f"{name} {SIDE_NAMES[part.side]} {idx}".rstrip())
    return "\n".join(lines) + "\n"


def parse_sextuple(G: BipartiteGraph, text: str) -> Sextuple:
    parts = {}
    for raw in text.splitlines():
        tok = raw.split("#", 1)[0].split()
        if not tok:
            continue
        if len(tok) < 2 or tok[0] not in Sextuple.NAMES or tok[1] not in SIDE_NAMES:
            raise InvalidInput(f"bad sextuple line {raw!r}")
        side = SIDE_NAMES.index(tok[1])
        try:
            members = frozenset(G.class_of(side)[int(i)] for i in tok[2:])
        except (ValueError, IndexError):
            raise InvalidInput(f"bad vertex index in {raw!r}") from None
        parts[tok[0]] = VertexSet(side, members)
    if set(parts) != set(Sextuple.NAMES):
        raise InvalidInput(f"sextuple needs lines {Sextuple.NAMES}")
    return Sextuple(*(parts[n] for n in Sextuple.NAMES))


# -- pair classes -----------------------------------------------------------


@dataclass(frozen=True, order=True)
class HParams:
    a: int
    g: int
    b: int
    h: int
    b2: int  # b'
    h2: int  # h'

    @property
    def t(self) -> int:
        return self.g - self.a

    @property
    def s(self) -> int:
        return self.h - self.b

    @property
    def s2(self) -> int:
        return self.h2 - self.b2

    def as_tuple(self) -> tuple[int, ...]:
        return (self.a, self.g, self.b, self.h, self.b2, self.h2)


def h_params_bits(G: BipartiteGraph, e_mask: int, o_mask: int) -> HParams:
    i, j = internal_bits(G, e_mask), internal_bits(G, o_mask)
    return HParams(
        popcount(closure_bits(G, e_mask)),
        popcount(nbhd_bits(G, e_mask)),
        popcount(i),
        popcount(nbhd_bits(G, i)),
        popcount(j),
        popcount(nbhd_bits(G, j)),
    )


def h_params(G: BipartiteGraph, E_zero: VertexSet, O_zero: VertexSet) -> HParams:
    return h_params_bits(G, E_zero.mask, O_zero.mask)


def _pair(e: int, o: int) -> tuple[VertexSet, VertexSet]:
    return VertexSet.from_mask(EVEN, e), VertexSet.from_mask(ODD, o)


def enumerate_h_class(G: BipartiteGraph, params: HParams, cap: int = DEFAULT_PAIR_CLASS_CAP) -> set[tuple[VertexSet, VertexSet]]:
    """All compatible pairs whose six statistics equal ``params``."""
    return {_pair(e, o) for e, o in compatible_pairs(G, cap) if h_params_bits(G, e, o) == params}


def h_class_census(G: BipartiteGraph, cap: int = DEFAULT_PAIR_CLASS_CAP) -> dict[HParams, int]:
    counts = Counter(h_params_bits(G, e, o) for e, o in compatible_pairs(G, cap))
    return dict(sorted(counts.items()))


# -- size inequalities ------------------------------------------------------


def _le_plus_ratio(lhs: int, rhs: int, excess: int, d: int) -> bool:
    """``lhs <= rhs + 3*excess/sqrt(d)`` in exact integer arithmetic."""
    x = lhs - rhs
    if x <= 0:
        return True
    if excess <= 0:
        return False
    return x * x * d <= 9 * excess * excess


@dataclass(frozen=True)
class SizeCheck:
    S_ok: bool
    Q_ok: bool
    Q2_ok: bool

    def __bool__(self) -> bool:
        return self.S_ok and self.Q_ok and self.Q2_ok

    @property
    def failures(self) -> list[str]:
        return [n for n, ok in (("S", self.S_ok), ("Q", self.Q_ok), ("Q'", self.Q2_ok)) if not ok]


def check_size_inequalities(sx: Sextuple, params: HParams, d: int) -> SizeCheck:
    """``|S| <= |F| + 3t/√d`` and the analogues for ``Q`` and ``Q'``.

    These only hold for large d; a failure at small d is an observation.
    """
    return SizeCheck(
        _le_plus_ratio(len(sx.S), len(sx.F), params.t, d),
        _le_plus_ratio(len(sx.Q), len(sx.P), params.s, d),
        _le_plus_ratio(len(sx.Q2), len(sx.P2), params.s2, d),
    )


# -- reconstruction ---------------------------------------------------------


@dataclass(frozen=True)
class BranchFlags:
    S_tight: bool
    Q_tight: bool
    Q2_tight: bool

    @classmethod
    def all(cls) -> list["BranchFlags"]:
        return [cls(*bits) for bits in itertools.product((False, True), repeat=3)]


def classify_branches(sx: Sextuple, params: HParams, d: int, c1: float, c2: float) -> BranchFlags:
    """Tight/slack status of ``S``, ``Q`` and ``Q'`` for user-chosen constants."""
    if d < 2:
        raise InvalidInput("tightness thresholds need d >= 2")
    ld = math.log2(d)
    return BranchFlags(
        len(sx.S) < params.g - c1 * params.t / ld,
        len(sx.Q) < params.b + c1 * params.s / ld,
        len(sx.Q2) < params.b2 + c2 * params.s2 / ld,
    )


def containments_hold(G: BipartiteGraph, e: int, o: int, sx: Sextuple) -> bool:
    """``F ⊆ N(E), S ⊇ [E], P ⊆ N(I), Q ⊇ I, P' ⊆ N(J), Q' ⊇ J``."""
    i, j = internal_bits(G, e), internal_bits(G, o)
    return (
        sx.F.mask & ~nbhd_bits(G, e) == 0
        and closure_bits(G, e) & ~sx.S.mask == 0
        and sx.P.mask & ~nbhd_bits(G, i) == 0
        and i & ~sx.Q.mask == 0
        and sx.P2.mask & ~nbhd_bits(G, j) == 0
        and j & ~sx.Q2.mask == 0
    )


def containment_targets(G: BipartiteGraph, sx: Sextuple, params: HParams, cap: int = DEFAULT_PAIR_CLASS_CAP) -> set[tuple[VertexSet, VertexSet]]:
    """Brute force: pairs in the class of ``params`` satisfying the containments."""
    return {
        _pair(e, o)
        for e, o in compatible_pairs(G, cap)
        if h_params_bits(G, e, o) == params and containments_hold(G, e, o, sx)
    }


def _cores(G: BipartiteGraph, Q: int, P: int, size: int, tight: bool) -> Iterator[int]:
    """Candidate sets known to lie inside the zero set: ``N(I')`` for every
    ``size``-subset ``I'`` of ``Q`` when tight, otherwise just ``P``."""
    if not tight:
        yield P
        return
    for combo in itertools.combinations(list(bits_of(Q)), size):
        yield nbhd_bits(G, to_mask(combo))


def _even_choices(G: BipartiteGraph, sx: Sextuple, params: HParams, flags: BranchFlags) -> Iterator[int]:
    S, F = sx.S.mask, sx.F.mask
    for D in _cores(G, sx.Q.mask, sx.P.mask, params.b, flags.Q_tight):
        if flags.S_tight:
            for X in submasks(S & ~D):
                yield D | X
        else:
            for Y in submasks(nbhd_bits(G, S) & ~F):
                closure = internal_bits(G, F | Y)  # [E] once N(E) = F ∪ Y is fixed
                for X in submasks(closure & ~D):
                    yield D | X


def reconstruct_candidates(
    G: BipartiteGraph,
    sx: Sextuple,
    params: HParams,
    flags: BranchFlags,
    strict: bool = True,
    cap: int = DEFAULT_RECONSTRUCTION_CAP,
) -> set[tuple[VertexSet, VertexSet]]:
    """Every ``(E, O)`` the reconstruction procedure can output.

    The zero set ``E`` is rebuilt from a cheap core ``D`` (from ``Q`` or
    ``P``) plus a subset of ``S`` (tight) or of the closure of a completed
    ``N(E)`` (slack); ``O`` likewise from ``Q'`` or ``P'`` plus a subset of
    the O-class avoiding ``N(E)``.  With ``strict`` the output keeps only
    compatible pairs with statistics ``params``.
    """
    odd_mask = G.class_mask(ODD)
    seen: set[tuple[int, int]] = set()
    produced = 0
    for e in _even_choices(G, sx, params, flags):
        ne = nbhd_bits(G, e)
        for D2 in _cores(G, sx.Q2.mask, sx.P2.mask, params.b2, flags.Q2_tight):
            for Z in submasks(odd_mask & ~(ne | D2)):
                produced += 1
                if produced > cap:
                    raise GuardExceeded("reconstruction candidates", produced, cap)
                seen.add((e, D2 | Z))
    if strict:
        seen = {
            (e, o)
            for e, o in seen
            if nbhd_bits(G, e) & o == 0 and h_params_bits(G, e, o) == params
        }
    return {_pair(e, o) for e, o in seen}
