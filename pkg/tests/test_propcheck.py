import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exdiv.lattice import build_lattice, parse_forest, serialize_forest, FIXTURES
from exdiv.propcheck import (
    CHECKS,
    enumerate_forests,
    fuzz,
    random_forest,
    run_many,
    run_suite,
)

from forest_oracle import all_valid

# golden: number of valid forests on exactly s points
GOLDEN_COUNTS = {1: 1, 2: 2, 3: 7, 4: 37, 5: 266, 6: 2431}


def test_small_counts():
    assert len(list(enumerate_forests(1))) == 1
    two = [f.prox for f in enumerate_forests(2)]
    assert two == [(frozenset(), frozenset()), (frozenset(), frozenset({1}))]


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_generator_matches_oracle(s):
    ours = [f.prox for f in enumerate_forests(s)]
    assert len(ours) == len(set(ours)) == GOLDEN_COUNTS[s]
    assert set(ours) == set(all_valid(s))


def test_cap_enforced():
    with pytest.raises(ValueError):
        list(enumerate_forests(8))
    with pytest.raises(ValueError):
        list(enumerate_forests(0))


def test_random_forest_deterministic():
    a = serialize_forest(random_forest(9, 1234))
    b = serialize_forest(random_forest(9, 1234))
    assert a == b
    assert random_forest(1, 99).prox == (frozenset(),)


@given(st.integers(1, 12), st.integers(0, 10**9))
def test_random_forest_round_trips(s, seed):
    f = random_forest(s, seed)
    assert parse_forest(serialize_forest(f)) == f


def test_random_forest_reaches_every_small_forest():
    seen = {random_forest(3, k).prox for k in range(400)}
    assert seen == {f.prox for f in enumerate_forests(3)}


def _suite(name):
    return run_suite(parse_forest(FIXTURES[name]))


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_pass(name):
    r = _suite(name)
    assert r.ok, r.to_json()
    assert set(r.entries) == {k for k, _ in CHECKS}


def test_chain3_minus_two_classes():
    assert _suite("CHAIN3").entries["minus_two.difference_of_total_transforms"].instances_checked == 3


def test_sat3_steep_component():
    e = _suite("SAT3").entries["steep_component.completes_to_total_transform"]
    assert e.instances_checked == 1 and not e.violations


def test_pair4_budget_equality():
    e = _suite("PAIR4").entries["ade.disjoint_family_budget"]
    assert e.equalities == 1 and not e.violations


def test_report_records_cap():
    r = run_suite(parse_forest(FIXTURES["SAT3"]), cap=2)
    assert r.meta["cap"] == 2
    assert r.entries["contracted.genus_nonpositive"].instances_checked == 3**3 - 1


def test_box_limit_lowers_cap():
    f = random_forest(8, 5)
    r = run_suite(f, cap=4, max_box=3**8)
    assert r.meta["cap_requested"] == 4 and r.meta["cap"] == 2


def test_report_is_deterministic():
    a = fuzz(6, 15, seed=7).to_json()
    b = fuzz(6, 15, seed=7).to_json()
    assert a == b
    meta = json.loads(a)["meta"]
    assert meta["seed"] == 7 and meta["mode"] == "random"


def test_checks_detect_a_corrupted_lattice():
    L = build_lattice(parse_forest(FIXTURES["CHAIN3"]))
    bad = np.array(L.k_degrees)
    bad[2] = 1
    bad.setflags(write=False)
    object.__setattr__(L, "k_degrees", bad)
    r = run_suite(L)
    assert not r.ok
    assert r.entries["lattice.adjunction_rational_components"].violations
    v = r.entries["lattice.total_transforms_orthonormal"].violations[0]
    # a violation is replayable from its serialized forest
    assert parse_forest(v["forest"]) == L.forest


def test_checks_detect_wrong_intersections():
    L = build_lattice(parse_forest(FIXTURES["PAIR4"]))
    g = np.array(L.gram_e)
    g[0, 1] = g[1, 0] = 0  # e_1 no longer meets e_2
    g.setflags(write=False)
    object.__setattr__(L, "gram_e", g)
    r = run_suite(L)
    assert r.entries["total_transform.one_connected"].violations


def test_run_many_parallel_matches_serial():
    forests = [random_forest(5, k) for k in range(12)]
    meta = {"mode": "test"}
    serial = run_many(forests, meta).to_json()
    parallel = run_many(forests, meta, jobs=2).to_json()
    assert serial == parallel
