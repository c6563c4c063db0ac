"""Numeric evaluators for the entropy estimates and bound formulas.

All logarithms are base 2.  Bounds whose values are astronomically large are
returned as base-2 exponents.  The theorem constants are never given
numerically, so every evaluator takes them as arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import brentq

from torpid.errors import InvalidInput

ALPHA_TOL = 1e-12


def binary_entropy(x: float) -> float:
    """``-x log x - (1-x) log(1-x)`` with ``H(0) = H(1) = 0``."""
    if not 0 <= x <= 1:
        raise InvalidInput(f"entropy argument {x} outside [0, 1]")
    if x == 0 or x == 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def entropy_margin(rho: float) -> float:
    """``1 - H(rho) - rho``; positive exactly on the admissible range of rho."""
    return 1.0 - binary_entropy(rho) - rho


def rho_star() -> float:
    """The root of ``H(rho) + rho = 1`` in ``(0, 1/2)``."""
    return brentq(entropy_margin, 1e-9, 0.5, xtol=1e-15)


def alpha_constraint(alpha: float, rho: float) -> float:
    """LHS minus RHS of the condition defining alpha; feasible iff <= 0."""
    lhs = 2 * alpha + rho + binary_entropy(alpha) + binary_entropy(rho + alpha)
    return lhs - 0.5 * (1 + rho + binary_entropy(rho))


def alpha_of(rho: float, tol: float = ALPHA_TOL) -> float:
    """Largest ``α' ∈ [0, 1/2 - rho]`` satisfying the alpha condition.

    The constraint is increasing in ``α'`` on that interval, so bisection
    finds the supremum.
    """
    if not 0 < rho < 0.5 or entropy_margin(rho) <= 0:
        raise InvalidInput(f"rho={rho} does not satisfy H(rho) + rho < 1")
    hi = 0.5 - rho
    if alpha_constraint(hi, rho) <= 0:
        return hi
    lo = 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if alpha_constraint(mid, rho) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def binomial_tail(M: int, k: int) -> int:
    """``sum_{i <= k} C(M, i)`` exactly."""
    return sum(math.comb(M, i) for i in range(0, min(k, M) + 1))


def _floor_mul(beta, M: int) -> int:
    b = Fraction(repr(beta)) if isinstance(beta, float) else Fraction(beta)
    return math.floor(b * M)


def _log2_int(n: int) -> float:
    return math.log2(n) if n > 0 else float("-inf")


def chernoff_exponents(M: int, beta) -> tuple[float, float]:
    """``(log2 LHS, exponent)`` for the entropy form of the tail bound."""
    lhs = binomial_tail(M, _floor_mul(beta, M))
    return _log2_int(lhs), binary_entropy(float(beta)) * M


def chernoff_check(M: int, beta, variant: int = 1) -> bool:
    """Exact check of a binomial tail bound.

    ``variant=1``: ``sum_{i<=βM} C(M,i) <= 2^{H(β)M}`` for ``β <= 1/2``.
    ``variant=2``: ``<= 2^{2βM log(1/β)}`` for ``β <= 1/e``.
    The comparison is made in log space with a 1e-12 relative allowance for
    float rounding of the exponent.
    """
    b = float(beta)
    if M > 1000:
        raise InvalidInput("chernoff_check limited to M <= 1000")
    if variant == 1:
        if not 0 <= b <= 0.5:
            raise InvalidInput("variant 1 needs beta <= 1/2")
        exponent = binary_entropy(b) * M
    elif variant == 2:
        if not 0 <= b <= math.exp(-1):
            raise InvalidInput("variant 2 needs beta <= 1/e")
        exponent = 0.0 if b == 0 else 2 * b * M * math.log2(1 / b)
    else:
        raise InvalidInput(f"unknown variant {variant}")
    lhs = binomial_tail(M, _floor_mul(beta, M))
    return _log2_int(lhs) <= exponent + 1e-12 * max(1.0, exponent)


def beta_grid(step: str = "0.05", top: str = "0.5") -> list[Fraction]:
    s, t = Fraction(step), Fraction(top)
    return [s * k for k in range(1, int(t / s) + 1)]


def chernoff_sweep(max_M: int = 200, grid: list[Fraction] | None = None) -> dict:
    """Both tail bounds over ``M = 1..max_M`` and a beta grid; returns failures."""
    grid = beta_grid() if grid is None else grid
    failures = []
    checked = 0
    for M in range(1, max_M + 1):
        for beta in grid:
            for variant in (1, 2):
                if variant == 2 and beta > Fraction(math.exp(-1)):
                    continue
                checked += 1
                if not chernoff_check(M, beta, variant):
                    failures.append({"M": M, "beta": str(beta), "variant": variant})
    return {"checked": checked, "failures": failures, "ok": not failures}


@dataclass(frozen=True)
class BoundParameters:
    """Graph measurements plus user-supplied constants (``None`` = not given)."""

    rho: float
    delta: float
    ell: int
    d: int
    N: int
    C1: float | None = None
    C1p: float | None = None
    C2: float | None = None
    C: float | None = None  # constant of the hypercube corollaries
    c: float | None = None
    cp: float | None = None  # c'
    d0: int | None = None

    def __post_init__(self):
        if not 0 < self.rho < 0.5:
            raise InvalidInput("rho must lie in (0, 1/2)")
        if not 0 <= self.delta <= 1:
            raise InvalidInput("delta must lie in [0, 1]")
        if self.d < 2:
            raise InvalidInput("bounds need d >= 2 so that log d > 0")


def hypothesis_gate(p: BoundParameters) -> bool | None:
    """``δ >= max{C1 log³d / d, C1' log d / ℓ}``, ``ℓ > 0`` and ``d >= d0``.

    ``None`` when a needed constant is missing.
    """
    if p.C1 is None or p.C1p is None:
        return None
    ld = math.log2(p.d)
    if p.ell <= 0:
        return False
    ok = p.delta >= max(p.C1 * ld**3 / p.d, p.C1p * ld / p.ell)
    if p.d0 is not None:
        ok = ok and p.d >= p.d0
    return ok


def theorem_bounds(p: BoundParameters) -> dict:
    """Base-2 exponents of the four headline bounds (``None`` without constants).

    * ``thm_main_rhs``: mixing time is at least ``2^x`` with ``x = C2 N δ / log d``.
    * ``thm_main2_rhs``: balanced class size is at most ``2^x``, ``x = (N/2)(1 - C2 δ/log d)``.
    * ``cor_cube_rhs``: ``x = C 2^d / (√d log d)`` for the hypercube.
    * ``cor_imbalance_rhs``: ``-C 2^d / (√d log d)``, the log-probability of a balanced colour.
    """
    ld = math.log2(p.d)
    out: dict = {"thm_main_rhs": None, "thm_main2_rhs": None, "cor_cube_rhs": None, "cor_imbalance_rhs": None}
    if p.C2 is not None:
        out["thm_main_rhs"] = p.C2 * p.N * p.delta / ld
        out["thm_main2_rhs"] = (p.N / 2) * (1 - p.C2 * p.delta / ld)
    if p.C is not None:
        x = p.C * 2.0**p.d / (math.sqrt(p.d) * ld)
        out["cor_cube_rhs"] = x
        out["cor_imbalance_rhs"] = -x
    out["hypothesis_gate"] = hypothesis_gate(p)
    return out


# -- lemma right-hand sides (log2) ------------------------------------------


def log2_binom_le(t: float, k: float) -> float:
    """log2 of ``C(t, <= k)`` with the ground-set size rounded up and k down."""
    top = math.ceil(t)
    kk = math.floor(k)
    if kk < 0:
        return float("-inf")
    return math.log2(binomial_tail(top, kk))


def trivial_class_exponent(M: int, rho: float, alpha: float, ell: int) -> float:
    """``M(2α + ρ + H(α) + H(ρ+α) + 2/ℓ)``: bound on the small-zero-set classes."""
    return M * (2 * alpha + rho + binary_entropy(alpha) + binary_entropy(rho + alpha) + 2 / ell)


def main_lemma_exponent(M: int, d: int, b: int, b2: int, g: int, delta: float, c: float) -> float:
    """``M(1 + 15 log²d / d) - b - b' - cδg / log d``."""
    ld = math.log2(d)
    return M * (1 + 15 * ld**2 / d) - b - b2 - c * delta * g / ld


def basic_family_log2(M: int, d: int, a: int, g: int) -> float:
    """log2 of the product of four partial binomial sums bounding the covering family."""
    ld = math.log2(d)
    sd = math.sqrt(d)
    return (
        log2_binom_le(M, 2 * g * ld / d)
        + log2_binom_le(2 * g * ld, 2 * g / d)
        + log2_binom_le(2 * d**3 * g * ld, 2 * (g - a) / sd)
        + log2_binom_le(2 * g * ld, (g - a) * sd / (d - sd))
    )


def specific_family_exponent(M: int, d: int, a: int, g: int, beta: float) -> float:
    """``5M log²d / d + (6β + 17)(g - a) log d / √d``."""
    ld = math.log2(d)
    return 5 * M * ld**2 / d + (6 * beta + 17) * (g - a) * ld / math.sqrt(d)


def sextuple_family_exponent(M: int, d: int, t: int, s: int, s2: int, c1: float, c2: float) -> float:
    """``15M log²d / d + c1 t log d/√d + c1 s log d/√d + c2 s' log d/√d``."""
    ld = math.log2(d)
    sd = math.sqrt(d)
    return 15 * M * ld**2 / d + (c1 * t + c1 * s + c2 * s2) * ld / sd


def reconstruction_exponent(M: int, d: int, b: int, b2: int, t: int, s: int, s2: int, c1: float, c2: float) -> float:
    """``M - b - b' - c1 t/log d - c1 s/log d - c2 s'/log d``."""
    ld = math.log2(d)
    return M - b - b2 - (c1 * t + c1 * s + c2 * s2) / ld
