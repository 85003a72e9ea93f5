"""Singularity budgets: how many canonical singularities a surface can carry.

All values are :class:`fractions.Fraction`; nothing here touches floats.
The caller is responsible for the geometric hypotheses (canonical
singularities only, non-negative Kodaira dimension); ``chi`` and ``k2``
are accepted as arbitrary integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dynkin import DynkinType

__all__ = [
    "SingularityBudget",
    "BudgetVerdict",
    "euler_number",
    "group_order",
    "nu",
    "bound_miyaoka",
    "bound_theorem",
    "bound_megyesi_langer",
    "check_budget",
    "fraction_str",
]


def euler_number(t: DynkinType) -> int:
    """Topological Euler number of a tree of ``n`` rational curves."""
    return t.n + 1


def group_order(t: DynkinType) -> int:
    """Order of the local fundamental group of the singularity of type ``t``."""
    if t.family == "A":
        return t.n + 1
    if t.family == "D":
        return 4 * (t.n - 2)
    return {6: 24, 7: 48, 8: 120}[t.n]


def nu(t: DynkinType) -> Fraction:
    return Fraction(euler_number(t)) - Fraction(1, group_order(t))


def bound_miyaoka(chi: int, k2: int) -> Fraction:
    return 12 * Fraction(chi) - Fraction(4, 3) * k2


def _check_s(s):
    if s < 0:
        raise ValueError(f"number of blow-ups must be non-negative, got {s}")


def bound_theorem(chi: int, k2: int, s: int) -> Fraction:
    _check_s(s)
    return bound_miyaoka(chi, k2) - Fraction(s, 3)


def bound_megyesi_langer(chi: int, k2: int, s: int) -> Fraction:
    _check_s(s)
    return bound_miyaoka(chi, k2) - Fraction(s, 12)


@dataclass(frozen=True)
class SingularityBudget:
    chi: int
    k2: int
    s: int
    sings: tuple[DynkinType, ...] = ()

    def __post_init__(self):
        _check_s(self.s)
        object.__setattr__(self, "sings", tuple(self.sings))


@dataclass(frozen=True)
class BudgetVerdict:
    sum_nu: Fraction
    bound: Fraction
    holds: bool
    slack: Fraction
    # equality against the minimal-model bound; K_X is then nef
    equality_implies_nef: bool
    bounds: dict[str, Fraction] = field(default_factory=dict)

    def as_record(self) -> dict:
        return {
            "sum_nu": fraction_str(self.sum_nu),
            "bound_miyaoka": fraction_str(self.bounds["miyaoka"]),
            "bound_theorem": fraction_str(self.bounds["theorem"]),
            "bound_megyesi_langer": fraction_str(self.bounds["megyesi_langer"]),
            "holds": self.holds,
            "slack": fraction_str(self.slack),
            "equality_implies_nef": self.equality_implies_nef,
        }


def fraction_str(q: Fraction) -> str:
    """Always ``p/q``, even for integers."""
    return f"{q.numerator}/{q.denominator}"


def check_budget(b: SingularityBudget | Sequence) -> BudgetVerdict:
    if not isinstance(b, SingularityBudget):
        b = SingularityBudget(*b)
    total = sum((nu(t) for t in b.sings), Fraction(0))
    miyaoka = bound_miyaoka(b.chi, b.k2)
    bound = bound_theorem(b.chi, b.k2, b.s)
    holds = total <= bound
    return BudgetVerdict(
        sum_nu=total,
        bound=bound,
        holds=holds,
        slack=bound - total,
        equality_implies_nef=holds and total == miyaoka,
        bounds={
            "miyaoka": miyaoka,
            "theorem": bound,
            "megyesi_langer": bound_megyesi_langer(b.chi, b.k2, b.s),
        },
    )
