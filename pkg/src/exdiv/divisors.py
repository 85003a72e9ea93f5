"""Arithmetic genus, numerical connectedness and contracted classes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .lattice import Divisor, ExceptionalLattice, canonical_degree, intersect

__all__ = [
    "IRREDUCIBLE",
    "DecompositionReport",
    "arithmetic_genus",
    "decompositions",
    "is_m_connected",
    "enumerate_contracted",
    "norm_vectors",
    "support",
    "is_reduced",
    "connected_components",
    "default_cap",
]

# connectedness order of a divisor with no proper decomposition
IRREDUCIBLE = "irreducible"


def _require_effective(D: Divisor):
    if not D.is_effective:
        raise ValueError(f"{D} is not a non-zero effective divisor")


def arithmetic_genus(L: ExceptionalLattice, D: Divisor) -> int:
    """``p_a(D)`` from adjunction, ``2 p_a - 2 = K.D + D^2``."""
    _require_effective(D)
    twice = canonical_degree(L, D) + intersect(L, D, D)
    if twice % 2:
        raise AssertionError(f"K.D + D^2 = {twice} is odd for {D}; lattice is corrupt")
    return 1 + twice // 2


def decompositions(D: Divisor) -> Iterator[tuple[Divisor, Divisor]]:
    """All ordered ``(A, B)`` with ``A + B = D`` and both non-zero effective."""
    _require_effective(D)
    for a in itertools.product(*(range(c + 1) for c in D.coords)):
        A = Divisor(a)
        if A.is_zero or A == D:
            continue
        yield A, D - A


@dataclass(frozen=True)
class DecompositionReport:
    is_m_connected: bool
    witness: tuple[Divisor, Divisor] | None
    # largest m with D m-connected, or IRREDUCIBLE
    connectedness_order: int | str

    def __post_init__(self):
        if self.is_m_connected != (self.witness is None):
            raise ValueError("witness must be present exactly when the check fails")


def is_m_connected(L: ExceptionalLattice, D: Divisor, m: int) -> DecompositionReport:
    """Exhaustive check of ``A.B >= m`` over every decomposition of ``D``."""
    _require_effective(D)
    d = D.as_array()
    order, a = kernels.min_split(L.gram_e, d)
    if order == kernels.NO_SPLIT:
        return DecompositionReport(True, None, IRREDUCIBLE)
    if order >= m:
        return DecompositionReport(True, None, order)
    A = Divisor(a)
    return DecompositionReport(False, (A, D - A), order)


def norm_vectors(s: int, norm: int, total: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length ``s`` with squared length ``norm``.

    Optionally also with coordinate sum ``total``.  Lexicographic order.
    """

    def rec(prefix, left_norm, left_sum, slots):
        if slots == 0:
            if left_norm == 0 and (total is None or left_sum == 0):
                yield tuple(prefix)
            return
        r = math.isqrt(left_norm)
        for x in range(-r, r + 1):
            rest = left_norm - x * x
            if total is not None:
                # |sum of remaining| <= sqrt(slots * rest) by Cauchy-Schwarz
                need = left_sum - x
                if need * need > (slots - 1) * rest:
                    continue
            prefix.append(x)
            yield from rec(prefix, rest, None if total is None else left_sum - x, slots - 1)
            prefix.pop()

    yield from rec([], norm, total, s)


def enumerate_contracted(L: ExceptionalLattice, k_deg: int, self_int: int) -> list[Divisor]:
    """Every effective ``D`` with ``K.D = k_deg`` and ``D^2 = self_int``.

    In E-coordinates the form is minus the identity and ``K`` is minus the
    coordinate sum, so the candidates are the integer vectors of squared
    length ``-self_int`` summing to ``-k_deg``; keep the effective ones.
    """
    if self_int >= 0:
        raise ValueError("self-intersection must be negative on the exceptional lattice")
    out = []
    for v in norm_vectors(L.s, -self_int, -k_deg):
        D = Divisor(L.basis_change @ np.asarray(v, dtype=np.int64))
        if D.is_effective:
            out.append(D)
    return out


def support(D: Divisor) -> frozenset[int]:
    return D.support()


def is_reduced(D: Divisor) -> bool:
    return D.is_reduced


def connected_components(L: ExceptionalLattice, D: Divisor) -> list[Divisor]:
    """Split ``D`` along the connected pieces of its support.

    Two components are adjacent when they meet (positive intersection).
    Pieces are ordered by their smallest index.
    """
    _require_effective(D)
    left = sorted(D.support())
    pieces = []
    while left:
        seen = {left[0]}
        stack = [left[0]]
        while stack:
            i = stack.pop()
            for j in left:
                if j not in seen and L.gram_e[i - 1, j - 1] > 0:
                    seen.add(j)
                    stack.append(j)
        pieces.append(Divisor(c if i in seen else 0 for i, c in enumerate(D.coords, start=1)))
        left = [i for i in left if i not in seen]
    return pieces


def default_cap(L: ExceptionalLattice) -> int:
    """Coordinate cap for brute-force quantifiers: largest coefficient in any ``E_i``, plus one."""
    return int(L.basis_change.max()) + 1
