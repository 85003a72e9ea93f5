"""Proximity forests and the exceptional lattice of a chain of blow-ups.

A blow-up sequence at points ``q_1, ..., q_s`` is described combinatorially
by which earlier exceptional curves each ``q_i`` lies on (its *proximity
set*).  From that alone we get the lattice spanned by the exceptional
curves, in two bases:

* total transforms ``E_i``, orthonormal up to sign (``E_i.E_j = -delta_ij``);
* strict transforms ``e_i``, the irreducible components, with
  ``e_i = E_i - sum(E_m for m proximate to i)``.

Divisors are stored in strict-transform coordinates.  Everything here is
exact integer arithmetic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ForestError",
    "ForestSyntaxError",
    "ProximityRuleError",
    "ProximityForest",
    "ExceptionalLattice",
    "Divisor",
    "parse_forest",
    "serialize_forest",
    "build_lattice",
    "leading_minors",
    "intersect",
    "canonical_degree",
    "total_transform",
    "to_E_basis",
    "to_e_basis",
    "parse_divisor",
    "FIXTURES",
    "fixture",
]


class ForestError(ValueError):
    """Base class for rejected proximity input."""


class ForestSyntaxError(ForestError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ProximityRuleError(ForestError):
    """A proximity assignment breaks one of the validity rules.

    ``rule`` is ``"P1"`` (earlier indices only, at most two), ``"P2"``
    (satellite rule) or ``"P4"`` (two curves separate once their meeting
    point is blown up).
    """

    def __init__(self, rule, index, message):
        super().__init__(f"{rule} violated at i={index}: {message}")
        self.rule = rule
        self.index = index


@dataclass(frozen=True)
class ProximityForest:
    s: int
    prox: tuple[frozenset[int], ...]  # prox[i - 1] is the proximity set of q_i

    def __post_init__(self):
        if self.s < 1:
            raise ForestError("a forest needs at least one point")
        if len(self.prox) != self.s:
            raise ForestError(f"expected {self.s} proximity sets, got {len(self.prox)}")
        _check_rules(self.prox)

    @classmethod
    def from_mapping(cls, s: int, prox: Mapping[int, Iterable[int]]) -> "ProximityForest":
        """Build from ``{i: (j, ...)}`` with 1-based indices; missing keys are empty."""
        for i in prox:
            if not 1 <= i <= s:
                raise ProximityRuleError("P1", i, f"point index outside 1..{s}")
        sets = tuple(frozenset(prox.get(i, ())) for i in range(1, s + 1))
        return cls(s, sets)

    def proximate(self, i: int) -> frozenset[int]:
        return self.prox[i - 1]

    def successors(self, j: int) -> list[int]:
        """Indices ``m`` with ``j`` in ``prox(m)``."""
        return [m for m in range(j + 1, self.s + 1) if j in self.prox[m - 1]]

    def __str__(self):
        return serialize_forest(self)


def _check_rules(prox):
    used_pairs = {}
    for i, p in enumerate(prox, start=1):
        if len(p) > 2:
            raise ProximityRuleError("P1", i, "a point lies on at most two exceptional curves")
        for j in p:
            if not 1 <= j < i:
                raise ProximityRuleError("P1", i, f"proximate index {j} is not an earlier point")
        if len(p) == 2:
            j, k = sorted(p)
            if j not in prox[k - 1]:
                raise ProximityRuleError(
                    "P2", i, f"q_{i} is on e_{j} and e_{k} but q_{k} is not proximate to q_{j}"
                )
            if (j, k) in used_pairs:
                raise ProximityRuleError(
                    "P4", i, f"e_{j} and e_{k} were already separated by q_{used_pairs[(j, k)]}"
                )
            used_pairs[(j, k)] = i


_TOKEN = re.compile(r"\S+")


def parse_forest(text: str) -> ProximityForest:
    """Parse ``.prox`` text.

    >>> parse_forest("points 3\\nprox 2: 1\\nprox 3: 1 2").prox[2] == {1, 2}
    True
    """
    s = None
    prox: dict[int, tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(raw)]
        head, col = toks[0]
        if s is None:
            if head != "points":
                raise ForestSyntaxError("expected 'points <s>'", lineno, col)
            if len(toks) != 2:
                raise ForestSyntaxError("'points' takes exactly one integer", lineno, col)
            s = _int(toks[1], lineno)
            if s < 1:
                raise ForestSyntaxError("number of points must be positive", lineno, toks[1][1])
            continue
        if head != "prox":
            raise ForestSyntaxError(f"unexpected token {head!r}", lineno, col)
        if len(toks) < 2 or not toks[1][0].endswith(":"):
            raise ForestSyntaxError("expected 'prox <i>: <j> [<k>]'", lineno, col)
        i = _int((toks[1][0][:-1], toks[1][1]), lineno)
        targets = [_int(t, lineno) for t in toks[2:]]
        if not 1 <= len(targets) <= 2:
            raise ForestSyntaxError("a proximity line lists one or two indices", lineno, col)
        if len(targets) == 2 and not targets[0] < targets[1]:
            raise ForestSyntaxError("indices must be increasing", lineno, toks[3][1])
        if not 1 <= i <= s:
            raise ForestSyntaxError(f"point index {i} outside 1..{s}", lineno, toks[1][1])
        if i in prox:
            raise ForestSyntaxError(f"duplicate proximity line for point {i}", lineno, col)
        prox[i] = tuple(targets)
    if s is None:
        raise ForestSyntaxError("missing 'points <s>' line", max(1, len(text.splitlines())), 1)
    return ProximityForest.from_mapping(s, prox)


def _int(tok, lineno):
    word, col = tok
    if not re.fullmatch(r"[+-]?\d+", word):
        raise ForestSyntaxError(f"expected an integer, got {word!r}", lineno, col)
    return int(word)


def serialize_forest(f: ProximityForest) -> str:
    lines = [f"points {f.s}"]
    for i, p in enumerate(f.prox, start=1):
        if p:
            lines.append(f"prox {i}: " + " ".join(str(j) for j in sorted(p)))
    return "\n".join(lines) + "\n"


FIXTURES = {
    "CHAIN1": "points 1\n",
    "CHAIN3": "points 3\nprox 2: 1\nprox 3: 2\n",
    "SAT3": "points 3\nprox 2: 1\nprox 3: 1 2\n",
    "PAIR4": "points 4\nprox 2: 1\nprox 4: 3\n",
}


def fixture(name: str) -> "ExceptionalLattice":
    return build_lattice(parse_forest(FIXTURES[name]))


# ------------------------------------------------------------------ divisors


@dataclass(frozen=True, order=True)
class Divisor:
    """Integer combination of the strict transforms ``e_1..e_s``."""

    coords: tuple[int, ...]

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    @classmethod
    def component(cls, s: int, i: int) -> "Divisor":
        v = [0] * s
        v[i - 1] = 1
        return cls(v)

    @classmethod
    def zero(cls, s: int) -> "Divisor":
        return cls((0,) * s)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other):
        _same_rank(self, other)
        return Divisor(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        _same_rank(self, other)
        return Divisor(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return Divisor(-a for a in self.coords)

    def __rmul__(self, k):
        return Divisor(k * a for a in self.coords)

    @property
    def is_effective(self) -> bool:
        """Non-zero with every coefficient ``>= 0``."""
        return all(c >= 0 for c in self.coords) and any(self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def support(self) -> frozenset[int]:
        """1-based indices of components with non-zero coefficient."""
        return frozenset(i for i, c in enumerate(self.coords, start=1) if c)

    @property
    def is_reduced(self) -> bool:
        return all(c in (0, 1) for c in self.coords) and any(self.coords)

    def leq(self, other: "Divisor") -> bool:
        """Componentwise ``self <= other``."""
        _same_rank(self, other)
        return all(a <= b for a, b in zip(self.coords, other.coords))

    def lt(self, other: "Divisor") -> bool:
        return self != other and self.leq(other)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.int64)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coords, start=1):
            if c == 0:
                continue
            coef = "" if c == 1 else "-" if c == -1 else str(c)
            terms.append(f"{coef}e{i}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _same_rank(a, b):
    if len(a.coords) != len(b.coords):
        raise ValueError(f"dimension mismatch: {len(a.coords)} vs {len(b.coords)}")


def parse_divisor(literal: str, s: int | None = None) -> Divisor:
    """Parse a comma-separated coordinate literal such as ``"1,1,0"``."""
    parts = [p.strip() for p in literal.split(",")]
    if not parts or any(not re.fullmatch(r"[+-]?\d+", p) for p in parts):
        raise ValueError(f"malformed divisor literal {literal!r}")
    d = Divisor(int(p) for p in parts)
    if s is not None and len(d) != s:
        raise ValueError(f"divisor has {len(d)} coordinates, lattice rank is {s}")
    return d


# ------------------------------------------------------------------- lattice


@dataclass(frozen=True)
class ExceptionalLattice:
    forest: ProximityForest
    gram_e: np.ndarray  # e_i . e_j
    basis_change: np.ndarray  # column i = E_i in e-coordinates
    k_degrees: np.ndarray  # K_T . e_i
    e_in_E: np.ndarray = field(repr=False)  # column i = e_i in E-coordinates
    minors: tuple[int, ...] = field(repr=False)  # leading principal minors of gram_e

    @property
    def s(self) -> int:
        return self.forest.s

    def e(self, i: int) -> Divisor:
        return Divisor.component(self.s, i)

    def E(self, i: int) -> Divisor:
        return total_transform(self, i)

    def total_transforms(self) -> list[Divisor]:
        return [total_transform(self, i) for i in range(1, self.s + 1)]

    def self_intersection(self, i: int) -> int:
        return int(self.gram_e[i - 1, i - 1])


def _frozen(a):
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def leading_minors(gram) -> list[int]:
    """Leading principal minors of an integer matrix, by Bareiss elimination.

    Stops early (returning the minors found so far, the last being 0) if a
    zero pivot appears.
    """
    m = [[int(x) for x in row] for row in np.asarray(gram)]
    n = len(m)
    minors = []
    prev = 1
    for k in range(n):
        pivot = m[k][k]
        minors.append(pivot)
        if pivot == 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return minors


def is_negative_definite(minors: list[int], n: int) -> bool:
    """Sylvester's criterion: sign of the k-th minor is ``(-1)^k``."""
    return len(minors) == n and all(
        (m < 0) if k % 2 == 1 else (m > 0) for k, m in enumerate(minors, start=1)
    )


def build_lattice(f: ProximityForest) -> ExceptionalLattice:
    s = f.s
    # e_i = E_i - sum_{m : i in prox(m)} E_m
    e_in_E = np.eye(s, dtype=np.int64)
    for m in range(1, s + 1):
        for i in f.proximate(m):
            e_in_E[m - 1, i - 1] -= 1
    # E_i = e_i + sum_{m : i in prox(m)} E_m, solved from the last point down
    E_in_e = np.zeros((s, s), dtype=np.int64)
    for i in range(s, 0, -1):
        col = np.zeros(s, dtype=np.int64)
        col[i - 1] = 1
        for m in f.successors(i):
            col += E_in_e[:, m - 1]
        E_in_e[:, i - 1] = col
    if not np.array_equal(e_in_E @ E_in_e, np.eye(s, dtype=np.int64)):
        raise AssertionError("basis change is not inverse to the strict-transform expansion")
    gram = -(e_in_E.T @ e_in_E)
    kdeg = -e_in_E.sum(axis=0)
    minors = leading_minors(gram)
    if not is_negative_definite(minors, s):
        raise AssertionError(f"Gram matrix is not negative definite: minors {minors}")
    return ExceptionalLattice(
        forest=f,
        gram_e=_frozen(gram),
        basis_change=_frozen(E_in_e),
        k_degrees=_frozen(kdeg),
        e_in_E=_frozen(e_in_E),
        minors=tuple(minors),
    )


def _vec(L, D):
    coords = D.coords if isinstance(D, Divisor) else tuple(D)
    if len(coords) != L.s:
        raise ValueError(f"dimension mismatch: vector of length {len(coords)}, rank {L.s}")
    return np.asarray(coords, dtype=np.int64)


def intersect(L: ExceptionalLattice, D1, D2) -> int:
    return int(_vec(L, D1) @ L.gram_e @ _vec(L, D2))


def canonical_degree(L: ExceptionalLattice, D) -> int:
    return int(_vec(L, D) @ L.k_degrees)


def total_transform(L: ExceptionalLattice, i: int) -> Divisor:
    if not 1 <= i <= L.s:
        raise IndexError(f"total transform index {i} outside 1..{L.s}")
    return Divisor(L.basis_change[:, i - 1])


def to_E_basis(L: ExceptionalLattice, D) -> tuple[int, ...]:
    return tuple(int(x) for x in L.e_in_E @ _vec(L, D))


def to_e_basis(L: ExceptionalLattice, v) -> Divisor:
    return Divisor(L.basis_change @ _vec(L, v))
