import numpy as np
import pytest
import sympy

from exdiv.dynkin import (
    DualGraph,
    DynkinType,
    InvariantViolation,
    _graph_from_gram,
    abstract_lattice,
    are_disjoint,
    classify_ADE,
    classify_graph,
    disjoint_A_budget,
    dual_graph,
    fundamental_cycle,
    theta,
)
from exdiv.lattice import Divisor, build_lattice, intersect, parse_forest


def all_types(max_n=10):
    out = [DynkinType("A", n) for n in range(1, max_n + 1)]
    out += [DynkinType("D", n) for n in range(4, max_n + 1)]
    out += [DynkinType("E", n) for n in (6, 7, 8)]
    return out


def highest_root(gram):
    """Positive roots by closure under adding simple roots; return the highest.

    Simply-laced: with the positive form C = -gram, beta + a_i is a root when
    (beta, a_i) = -1.  Independent of the Artin loop.
    """
    c = -np.asarray(gram)
    n = len(c)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for b in frontier:
            for i in range(n):
                if int(np.dot(b, c[:, i])) == -1:
                    r = tuple(x + (j == i) for j, x in enumerate(b))
                    if r not in roots:
                        roots.add(r)
                        nxt.append(r)
        frontier = nxt
    return max(roots, key=sum)


def graph(gram):
    return _graph_from_gram(np.asarray(gram), list(range(1, len(gram) + 1)))


# ---------------------------------------------------------------- graphs


def test_dual_graphs(chain3, pair4):
    g = dual_graph(chain3, Divisor((1, 1, 0)))
    assert g.vertices == (1, 2) and g.edges == {(1, 2): 1}
    g = dual_graph(pair4, Divisor((1, 0, 1, 0)))
    assert g.vertices == (1, 3) and g.edges == {}
    g = dual_graph(chain3, chain3.e(1))
    assert g.vertices == (1,) and g.self_ints == {1: -2}
    with pytest.raises(ValueError):
        dual_graph(chain3, Divisor((2, 0, 0)))


def test_dot_output(chain3):
    dot = dual_graph(chain3, Divisor((1, 1, 1))).to_dot()
    assert dot == (
        "graph dual {\n"
        '  e1 [label="e1 (self=-2)"];\n'
        '  e2 [label="e2 (self=-2)"];\n'
        '  e3 [label="e3 (self=-1)"];\n'
        "  e1 -- e2;\n"
        "  e2 -- e3;\n"
        "}\n"
    )


# ---------------------------------------------------------------- classify


def test_classify_examples(chain3):
    assert classify_ADE(chain3, Divisor((1, 1, 0))) == DynkinType("A", 2)
    assert classify_ADE(chain3, chain3.E(1)) is None
    assert classify_graph(graph(abstract_lattice(DynkinType("D", 4)))) == DynkinType("D", 4)


@pytest.mark.parametrize("t", all_types(), ids=str)
def test_classify_round_trip(t):
    g = abstract_lattice(t)
    assert classify_graph(graph(g)) == t
    assert np.array_equal(g, g.T) and np.all(np.diag(g) == -2)


@pytest.mark.parametrize("t", all_types(), ids=str)
def test_abstract_lattice_negative_definite(t):
    g = sympy.Matrix(abstract_lattice(t).tolist())
    for k in range(1, t.n + 1):
        minor = g[:k, :k].det()
        assert (minor < 0) if k % 2 else (minor > 0)


def test_abstract_lattice_examples():
    assert abstract_lattice(DynkinType("A", 2)).tolist() == [[-2, 1], [1, -2]]
    assert abstract_lattice(DynkinType("D", 4))[0].tolist() == [-2, 1, 1, 1]
    assert sympy.Matrix(abstract_lattice(DynkinType("E", 8)).tolist()).det() == 1


def _tree(edges, n, diag=-2):
    g = diag * np.eye(n, dtype=np.int64)
    for a, b in edges:
        g[a, b] = g[b, a] = 1
    return g


@pytest.mark.parametrize(
    "gram",
    [
        _tree([(0, 1), (1, 2), (2, 0)], 3),  # cycle
        _tree([(0, 1), (0, 2), (0, 3), (0, 4)], 5),  # degree 4
        _tree([(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (4, 6)], 7),  # two branch points
        _tree([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 9)], 10),  # arms 1,2,6
        _tree([(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)], 7),  # arms 2,2,2
        _tree([(0, 1)], 2, diag=-3),
        np.array([[-2, 2], [2, -2]]),
        _tree([], 2),  # disconnected
    ],
)
def test_classify_rejects(gram):
    assert classify_graph(graph(gram)) is None


def test_dynkin_type_validation():
    assert DynkinType.parse("E8") == DynkinType("E", 8)
    assert DynkinType.parse("A_3") == DynkinType("A", 3)
    for bad in ("D3", "E9", "A0", "F4", "B2", "x"):
        with pytest.raises(ValueError):
            DynkinType.parse(bad)


# ---------------------------------------------------------------- fundamental cycles


@pytest.mark.parametrize("t", all_types(), ids=str)
def test_fundamental_cycle_is_highest_root(t):
    g = abstract_lattice(t)
    z = fundamental_cycle(g)
    assert tuple(z) == highest_root(g)
    assert int(z @ g @ z) == -2
    assert np.all(g @ z <= 0)


def test_fundamental_cycle_examples():
    assert fundamental_cycle(abstract_lattice(DynkinType("A", 5))).tolist() == [1] * 5
    assert fundamental_cycle(abstract_lattice(DynkinType("D", 4))).tolist() == [2, 1, 1, 1]
    z = fundamental_cycle(abstract_lattice(DynkinType("E", 8)))
    assert sorted(z.tolist()) == [2, 2, 3, 3, 4, 4, 5, 6]


def test_fundamental_cycle_rejects():
    with pytest.raises(ValueError):
        fundamental_cycle(_tree([], 2))
    with pytest.raises(ValueError):
        fundamental_cycle(_tree([(0, 1)], 2, diag=-3))
    with pytest.raises(ValueError):
        fundamental_cycle(_tree([(0, 1), (1, 2), (2, 0)], 3))  # affine, not definite


# ---------------------------------------------------------------- theta and budgets


def test_theta_examples(chain3, pair4):
    t = theta(chain3, Divisor((1, 1, 0)))
    assert (t.j, t.theta) == (3, 3)
    t = theta(chain3, chain3.e(1))
    assert (t.j, t.theta) == (2, 2)
    t1, t2 = theta(pair4, pair4.e(1)), theta(pair4, pair4.e(3))
    assert (t1.j, t1.theta, t2.j, t2.theta) == (2, 2, 4, 4)
    assert t1.theta != t2.theta


def test_theta_meets_once(chain3):
    t = theta(chain3, Divisor((1, 1, 0)))
    Ej = chain3.E(t.j)
    assert intersect(chain3, Divisor((1, 1, 0)), Ej) == 1
    assert intersect(chain3, chain3.e(t.theta), Ej) == -1


def test_theta_rejects_non_a(chain3):
    with pytest.raises(ValueError):
        theta(chain3, chain3.E(1))


def test_disjointness(chain3, pair4):
    assert are_disjoint(pair4, pair4.e(1), pair4.e(3))
    # no common components, but the curves meet
    assert not are_disjoint(chain3, chain3.e(1), chain3.e(2))


def test_budget_families(pair4, chain3, chain1):
    fams = disjoint_A_budget(pair4)
    assert ((pair4.e(1), pair4.e(3)), 4) in fams
    assert ((Divisor((1, 1, 0)),), 3) in disjoint_A_budget(chain3)
    assert all(b <= 3 for _, b in disjoint_A_budget(chain3))
    assert disjoint_A_budget(chain1) == []


def test_budget_violation_raises(chain3, monkeypatch):
    from exdiv import dynkin

    # e_3 is a -1 curve; pretending it is an A_1 gives two disjoint configurations of budget 4 > 3
    fake = [(chain3.e(1), DynkinType("A", 1)), (chain3.e(3), DynkinType("A", 1))]
    monkeypatch.setattr(dynkin, "a_configurations", lambda L: fake)
    with pytest.raises(InvariantViolation):
        disjoint_A_budget(chain3)
    assert disjoint_A_budget(chain3, check=False) == [((chain3.e(1), chain3.e(3)), 4)]
