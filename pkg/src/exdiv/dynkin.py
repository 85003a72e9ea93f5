"""Dual graphs and A-D-E configurations in the exceptional lattice."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from .divisors import enumerate_contracted
from .lattice import (
    Divisor,
    ExceptionalLattice,
    intersect,
    is_negative_definite,
    leading_minors,
    to_E_basis,
    total_transform,
)

__all__ = [
    "InvariantViolation",
    "DynkinType",
    "DualGraph",
    "dual_graph",
    "classify_graph",
    "classify_ADE",
    "abstract_lattice",
    "fundamental_cycle",
    "Theta",
    "theta",
    "a_configurations",
    "are_disjoint",
    "disjoint_A_budget",
]


class InvariantViolation(AssertionError):
    """A structural property that must hold for every blow-up sequence failed.

    Raised only on a bug or an unrealizable forest; the proposition suite
    records these instead of propagating them.
    """


_RANKS = {"A": range(1, 10**9), "D": range(4, 10**9), "E": (6, 7, 8)}


@dataclass(frozen=True, order=True)
class DynkinType:
    family: str
    n: int

    def __post_init__(self):
        if self.family not in _RANKS:
            raise ValueError(f"unknown Dynkin family {self.family!r}")
        if self.n not in _RANKS[self.family]:
            raise ValueError(f"invalid rank {self.n} for family {self.family}")

    @classmethod
    def parse(cls, spec: str) -> "DynkinType":
        m = re.fullmatch(r"\s*([ADE])_?(\d+)\s*", spec)
        if not m:
            raise ValueError(f"malformed singularity spec {spec!r}")
        return cls(m.group(1), int(m.group(2)))

    def __str__(self):
        return f"{self.family}{self.n}"


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[int, ...]
    self_ints: dict[int, int]
    edges: dict[tuple[int, int], int]  # (i, j) with i < j -> intersection number

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def neighbours(self, v: int) -> list[int]:
        return sorted(j if i == v else i for (i, j) in self.edges if v in (i, j))

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return nx.is_connected(g)

    def to_dot(self, name: str = "dual") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  e{v} [label="e{v} (self={self.self_ints[v]})"];')
        for (i, j), mult in sorted(self.edges.items()):
            attr = "" if mult == 1 else f' [label="{mult}"]'
            lines.append(f"  e{i} -- e{j}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _graph_from_gram(gram, labels) -> DualGraph:
    gram = np.asarray(gram)
    self_ints = {v: int(gram[k, k]) for k, v in enumerate(labels)}
    edges = {}
    for a, b in combinations(range(len(labels)), 2):
        if gram[a, b]:
            edges[(labels[a], labels[b])] = int(gram[a, b])
    return DualGraph(tuple(labels), self_ints, edges)


def dual_graph(L: ExceptionalLattice, D: Divisor) -> DualGraph:
    if not D.is_reduced:
        raise ValueError(f"dual graph needs a reduced divisor, got {D}")
    idx = sorted(D.support())
    sub = L.gram_e[np.ix_([i - 1 for i in idx], [i - 1 for i in idx])]
    return _graph_from_gram(sub, idx)


def _arm_length(g: DualGraph, centre: int, start: int) -> int:
    length, prev, cur = 1, centre, start
    while True:
        nxt = [v for v in g.neighbours(cur) if v != prev]
        if not nxt:
            return length
        prev, cur = cur, nxt[0]
        length += 1


_BRANCHED = {(1, 2, 2): 6, (1, 2, 3): 7, (1, 2, 4): 8}


def classify_graph(g: DualGraph) -> DynkinType | None:
    n = len(g.vertices)
    if n == 0 or any(v != -2 for v in g.self_ints.values()):
        return None
    if any(m != 1 for m in g.edges.values()):
        return None
    if len(g.edges) != n - 1 or not g.is_connected():
        return None
    degrees = {v: g.degree(v) for v in g.vertices}
    if max(degrees.values()) >= 4:
        return None
    branch = [v for v, k in degrees.items() if k == 3]
    if not branch:
        return DynkinType("A", n)
    if len(branch) > 1:
        return None
    c = branch[0]
    arms = tuple(sorted(_arm_length(g, c, v) for v in g.neighbours(c)))
    if arms[:2] == (1, 1):
        return DynkinType("D", n)
    if arms in _BRANCHED:
        return DynkinType("E", _BRANCHED[arms])
    return None


def classify_ADE(L: ExceptionalLattice, D: Divisor) -> DynkinType | None:
    """Dynkin type of ``D`` if it is an A-D-E configuration, else ``None``."""
    if not D.is_reduced:
        return None
    return classify_graph(dual_graph(L, D))


def abstract_lattice(t: DynkinType) -> np.ndarray:
    """Intersection matrix of a configuration of -2 curves of type ``t``.

    A_n is a path.  D_n and E_n list the branch vertex first, then each arm
    from the branch point outwards, shortest arm first.
    """
    n = t.n
    g = -2 * np.eye(n, dtype=np.int64)

    def join(a, b):
        g[a, b] = g[b, a] = 1

    if t.family == "A":
        for k in range(n - 1):
            join(k, k + 1)
        return g
    arms = (1, 1, n - 3) if t.family == "D" else (1, 2, n - 4)
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            join(prev, nxt)
            prev, nxt = nxt, nxt + 1
    return g


def fundamental_cycle(gram) -> np.ndarray:
    """Artin's minimal cycle of a connected negative-definite -2 configuration.

    Starting from the reduced cycle, bump the lowest-index component with
    ``Z.e_i > 0`` until none is left.
    """
    gram = np.asarray(gram, dtype=np.int64)
    n = gram.shape[0]
    if n == 0 or np.any(np.diag(gram) != -2):
        raise ValueError("fundamental cycle needs a configuration of -2 curves")
    if not is_negative_definite(leading_minors(gram), n):
        raise ValueError("configuration is not negative definite")
    if not _graph_from_gram(gram, list(range(n))).is_connected():
        raise ValueError("configuration is disconnected")
    z = np.ones(n, dtype=np.int64)
    dots = gram @ z
    while True:
        pos = np.flatnonzero(dots > 0)
        if pos.size == 0:
            break
        i = int(pos[0])
        z[i] += 1
        dots += gram[:, i]
    if int(z @ gram @ z) != -2:
        raise InvariantViolation(f"fundamental cycle {z.tolist()} has Z^2 != -2")
    return z


@dataclass(frozen=True)
class Theta:
    j: int  # Delta . E_j = 1
    theta: int  # component of E_j meeting Delta


def _E_dots(L, D):
    # D . E_j is minus the j-th E-coordinate of D
    return [-x for x in to_E_basis(L, D)]


def theta(L: ExceptionalLattice, delta: Divisor) -> Theta:
    """The total transform met once by an A-configuration, and where it meets it."""
    t = classify_ADE(L, delta)
    if t is None or t.family != "A":
        raise ValueError(f"{delta} is not an A-type configuration")
    dots = _E_dots(L, delta)
    ones = [j for j, x in enumerate(dots, start=1) if x == 1]
    if len(ones) != 1:
        raise InvariantViolation(f"{delta} meets {len(ones)} total transforms with degree 1")
    j = ones[0]
    Ej = total_transform(L, j)
    if Ej.support() & delta.support():
        raise InvariantViolation(f"{delta} shares components with E_{j}")
    meets = [i for i in sorted(Ej.support()) if intersect(L, L.e(i), delta) != 0]
    if len(meets) != 1 or intersect(L, L.e(meets[0]), delta) != 1:
        raise InvariantViolation(f"{delta} does not meet a unique component of E_{j} once")
    th = meets[0]
    if intersect(L, L.e(th), Ej) != -1:
        raise InvariantViolation(f"e_{th} . E_{j} != -1")
    return Theta(j, th)


def are_disjoint(L: ExceptionalLattice, D1: Divisor, D2: Divisor) -> bool:
    """No common component and no intersection point."""
    return not (D1.support() & D2.support()) and intersect(L, D1, D2) == 0


def a_configurations(L: ExceptionalLattice) -> list[tuple[Divisor, DynkinType]]:
    out = []
    for D in enumerate_contracted(L, 0, -2):
        t = classify_ADE(L, D)
        if t is not None and t.family == "A":
            out.append((D, t))
    return out


def disjoint_A_budget(L: ExceptionalLattice, check: bool = True):
    """Maximal families of pairwise disjoint A-configurations with ``sum(m_i + 1)``.

    Returns ``[(family, budget), ...]``, each family a tuple of divisors,
    sorted by family.
    """
    configs = a_configurations(L)
    g = nx.Graph()
    g.add_nodes_from(range(len(configs)))
    for a, b in combinations(range(len(configs)), 2):
        if are_disjoint(L, configs[a][0], configs[b][0]):
            g.add_edge(a, b)
    out = []
    for clique in nx.find_cliques(g):
        fam = tuple(sorted((configs[k][0] for k in clique), key=lambda D: sorted(D.support())))
        budget = sum(configs[k][1].n + 1 for k in clique)
        out.append((fam, budget))
    out.sort(key=lambda item: [sorted(D.support()) for D in item[0]])
    if check:
        for fam, budget in out:
            if budget > L.s:
                raise InvariantViolation(f"family {fam} has budget {budget} > s = {L.s}")
    return out
