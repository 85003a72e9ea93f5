"""Exhaustive and seeded-random proposition checking over proximity forests.

Every check is run against the lattice of a single forest and produces an
:class:`Entry` (instances examined, violations with witnesses).  Reports
from many forests are merged in input order, so a run is reproducible from
its generator parameters alone, and every violation carries the serialized
forest it came from.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Iterable, Iterator

import numpy as np

from . import kernels
from .divisors import default_cap, enumerate_contracted
from .dynkin import (
    InvariantViolation,
    a_configurations,
    are_disjoint,
    classify_ADE,
    disjoint_A_budget,
    theta,
)
from .lattice import (
    Divisor,
    ExceptionalLattice,
    ProximityForest,
    build_lattice,
    canonical_degree,
    intersect,
    is_negative_definite,
    serialize_forest,
)

__all__ = [
    "MAX_POINTS",
    "DEFAULT_MAX_BOX",
    "CHECKS",
    "Entry",
    "SuiteReport",
    "forest_options",
    "enumerate_forests",
    "random_forest",
    "run_suite",
    "run_many",
    "exhaust",
    "fuzz",
]

MAX_POINTS = 7
# largest coordinate box scanned per forest by the brute-force quantifiers
DEFAULT_MAX_BOX = 200_000


# ---------------------------------------------------------------- generators


def forest_options(prox: list[frozenset[int]]) -> list[frozenset[int]]:
    """Valid proximity sets for the next point given the earlier ones.

    Order: empty, singletons ascending, then satellite pairs ascending.
    """
    i = len(prox) + 1
    used = {tuple(sorted(p)) for p in prox if len(p) == 2}
    opts = [frozenset()]
    opts += [frozenset({j}) for j in range(1, i)]
    for j, k in combinations(range(1, i), 2):
        if j in prox[k - 1] and (j, k) not in used:
            opts.append(frozenset({j, k}))
    return opts


def enumerate_forests(s: int, max_points: int = MAX_POINTS) -> Iterator[ProximityForest]:
    """Every valid forest on exactly ``s`` points, once each, in a fixed order."""
    if not 1 <= s <= max_points:
        raise ValueError(f"s must lie in 1..{max_points}, got {s}")

    def rec(prox):
        if len(prox) == s:
            yield ProximityForest(s, tuple(prox))
            return
        for opt in forest_options(prox):
            prox.append(opt)
            yield from rec(prox)
            prox.pop()

    yield from rec([])


def random_forest(s: int, seed) -> ProximityForest:
    """Pick each proximity set uniformly among the locally valid options."""
    if s < 1:
        raise ValueError("s must be positive")
    rng = random.Random(seed)
    prox: list[frozenset[int]] = []
    for _ in range(s):
        prox.append(rng.choice(forest_options(prox)))
    return ProximityForest(s, tuple(prox))


# -------------------------------------------------------------------- report


@dataclass
class Entry:
    instances_checked: int = 0
    violations: list[dict] = field(default_factory=list)
    equalities: int = 0

    def to_json(self):
        return {
            "instances_checked": self.instances_checked,
            "violations": self.violations,
            "equalities": self.equalities,
        }


@dataclass
class SuiteReport:
    entries: dict[str, Entry]
    meta: dict

    @property
    def violation_count(self) -> int:
        return sum(len(e.violations) for e in self.entries.values())

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def merge(self, other: "SuiteReport") -> None:
        for key, e in other.entries.items():
            mine = self.entries.setdefault(key, Entry())
            mine.instances_checked += e.instances_checked
            mine.violations.extend(e.violations)
            mine.equalities += e.equalities

    def to_json(self) -> str:
        body = {
            "meta": self.meta,
            "propositions": {k: self.entries[k].to_json() for k in sorted(self.entries)},
            "violation_count": self.violation_count,
        }
        return json.dumps(body, indent=2, sort_keys=True)

    def summary_lines(self) -> list[str]:
        out = []
        for key in sorted(self.entries):
            e = self.entries[key]
            status = "ok" if not e.violations else f"{len(e.violations)} VIOLATIONS"
            out.append(f"{key:62s} {e.instances_checked:>10d}  {status}")
        return out


# -------------------------------------------------------------------- checks


class _Context:
    """Per-forest data shared by the checks."""

    def __init__(self, L: ExceptionalLattice, cap: int | None, max_box: int):
        self.L = L
        self.s = L.s
        self.forest_text = serialize_forest(L.forest)
        self.Es = L.total_transforms()
        self.gram = np.asarray(L.gram_e, dtype=np.int64)
        self.kdeg = np.asarray(L.k_degrees, dtype=np.int64)
        self.minus_two = enumerate_contracted(L, 0, -2)
        self.a_configs = a_configurations(L)
        requested = default_cap(L) if cap is None else cap
        used = requested
        while max_box is not None and used > 1 and (used + 1) ** self.s > max_box:
            used -= 1
        self.cap_requested = requested
        self.cap = used
        self._box = None

    @property
    def box(self):
        if self._box is None:
            rows, selfs, kdots = kernels.box_forms(self.gram, self.kdeg, np.full(self.s, self.cap))
            self._box = (rows[1:], selfs[1:], kdots[1:])
        return self._box

    def E_dots(self, D: Divisor) -> list[int]:
        # D.E_j is minus the j-th E-coordinate of D
        return [-int(x) for x in self.L.e_in_E @ D.as_array()]

    def violation(self, detail: str, *witness) -> dict:
        return {
            "forest": self.forest_text,
            "witness": [list(w.coords) if isinstance(w, Divisor) else w for w in witness],
            "detail": detail,
        }


def _min_split(ctx, D: Divisor) -> int:
    return kernels.min_split(ctx.gram, D.as_array())[0]


def _is_one_connected(ctx, D: Divisor) -> bool:
    return _min_split(ctx, D) >= 1  # NO_SPLIT counts as connected


def check_negative_definite(ctx, e):
    e.instances_checked += 1
    if not is_negative_definite(list(ctx.L.minors), ctx.s):
        e.violations.append(ctx.violation(f"leading minors {list(ctx.L.minors)}"))


def check_total_transform_products(ctx, e):
    for i, Ei in enumerate(ctx.Es, start=1):
        e.instances_checked += 1
        if canonical_degree(ctx.L, Ei) != -1:
            e.violations.append(ctx.violation(f"K.E_{i} != -1", Ei))
        for j, Ej in enumerate(ctx.Es, start=1):
            e.instances_checked += 1
            want = -1 if i == j else 0
            if intersect(ctx.L, Ei, Ej) != want:
                e.violations.append(ctx.violation(f"E_{i}.E_{j} != {want}", Ei, Ej))


def check_adjunction(ctx, e):
    for i in range(ctx.s):
        e.instances_checked += 1
        if ctx.kdeg[i] != -2 - ctx.gram[i, i]:
            e.violations.append(ctx.violation(f"K.e_{i + 1} != -2 - e_{i + 1}^2"))


def check_basis_round_trip(ctx, e):
    e.instances_checked += 1
    eye = np.eye(ctx.s, dtype=np.int64)
    L = ctx.L
    if not (np.array_equal(L.e_in_E @ L.basis_change, eye) and np.array_equal(L.basis_change @ L.e_in_E, eye)):
        e.violations.append(ctx.violation("basis change matrices are not mutually inverse"))


def check_components_nonpositive(ctx, e):
    for i, Ei in enumerate(ctx.Es, start=1):
        for g in sorted(Ei.support()):
            e.instances_checked += 1
            if intersect(ctx.L, ctx.L.e(g), Ei) > 0:
                e.violations.append(ctx.violation(f"e_{g}.E_{i} > 0", Ei))


def check_unique_negative_component(ctx, e):
    for i, Ei in enumerate(ctx.Es, start=1):
        e.instances_checked += 1
        dots = {g: intersect(ctx.L, ctx.L.e(g), Ei) for g in sorted(Ei.support())}
        negative = [g for g, v in dots.items() if v < 0]
        if not Ei.is_effective or Ei[i - 1] != 1:
            e.violations.append(ctx.violation(f"E_{i} is not effective with e_{i}-coefficient 1", Ei))
        elif negative != [i] or dots[i] != -1:
            e.violations.append(ctx.violation(f"negative components of E_{i}: {negative}", Ei))
        elif any(v != 0 for g, v in dots.items() if g != i):
            e.violations.append(ctx.violation(f"a component of E_{i} other than e_{i} meets it", Ei))


def check_total_transform_connected(ctx, e):
    for i, Ei in enumerate(ctx.Es, start=1):
        e.instances_checked += 1
        if not _is_one_connected(ctx, Ei):
            e.violations.append(ctx.violation(f"E_{i} is not 1-connected", Ei))


def check_genus_nonpositive(ctx, e):
    rows, selfs, kdots = ctx.box
    e.instances_checked += len(rows)
    bad = np.flatnonzero(kdots + selfs > -2)
    for r in bad[:10]:
        e.violations.append(ctx.violation("p_a > 0", Divisor(rows[r])))


def check_overlap_nested(ctx, e):
    for (i, Ei), (j, Ej) in combinations(enumerate(ctx.Es, start=1), 2):
        e.instances_checked += 1
        if Ei.support() & Ej.support() and not (Ei.lt(Ej) or Ej.lt(Ei)):
            e.violations.append(ctx.violation(f"E_{i}, E_{j} overlap but are not nested", Ei, Ej))


def check_nested_orthogonal(ctx, e):
    for (i, Ei), (j, Ej) in permutations(enumerate(ctx.Es, start=1), 2):
        if not Ei.lt(Ej):
            continue
        for g in sorted(Ei.support()):
            e.instances_checked += 1
            if intersect(ctx.L, ctx.L.e(g), Ej) != 0:
                e.violations.append(ctx.violation(f"E_{i} < E_{j} but e_{g}.E_{j} != 0", Ei, Ej))


def check_minus_one_classes(ctx, e):
    e.instances_checked += 1
    found = enumerate_contracted(ctx.L, -1, -1)
    if sorted(found) != sorted(ctx.Es):
        e.violations.append(ctx.violation("(-1,-1) classes differ from the total transforms", *found))


def check_connected_meets_once(ctx, e):
    rows, _, _ = ctx.box
    e.instances_checked += len(rows)
    dots = -(rows @ ctx.L.e_in_E.T)
    cand = rows[dots.max(axis=1) >= 2]
    start = 0
    while start < len(cand) and len(e.violations) < 10:
        hit = kernels.first_m_connected(ctx.gram, cand[start:], 1)
        if hit < 0:
            break
        D = Divisor(cand[start + hit])
        e.violations.append(ctx.violation("1-connected divisor meets some E_i twice", D))
        start += hit + 1


def check_minus_two_connected(ctx, e):
    for D in ctx.minus_two:
        e.instances_checked += 1
        if not _is_one_connected(ctx, D):
            e.violations.append(ctx.violation("(0,-2) class is not 1-connected", D))


def check_minus_two_pairs(ctx, e):
    for D1, D2 in combinations(ctx.minus_two, 2):
        e.instances_checked += 1
        if not -1 <= intersect(ctx.L, D1, D2) <= 1:
            e.violations.append(ctx.violation("(0,-2) classes meet outside [-1, 1]", D1, D2))


def _one_minus_one(dots):
    ones = [j for j, x in enumerate(dots, start=1) if x == 1]
    minus = [j for j, x in enumerate(dots, start=1) if x == -1]
    rest_zero = all(x == 0 for x in dots if x not in (1, -1))
    if len(ones) == 1 and len(minus) == 1 and rest_zero:
        return ones[0], minus[0]
    return None


def check_minus_two_difference(ctx, e):
    for D in ctx.minus_two:
        e.instances_checked += 1
        jk = _one_minus_one(ctx.E_dots(D))
        if jk is None:
            e.violations.append(ctx.violation(f"E-degrees {ctx.E_dots(D)} not of shape (1,-1,0..)", D))
        elif ctx.Es[jk[1] - 1] != ctx.Es[jk[0] - 1] + D:
            e.violations.append(ctx.violation(f"E_{jk[1]} != E_{jk[0]} + D", D))


def check_minus_two_transfer(ctx, e):
    for D in ctx.minus_two:
        jk = _one_minus_one(ctx.E_dots(D))
        if jk is None:
            continue  # reported by the difference check
        Ej = ctx.Es[jk[0] - 1]
        for D2 in ctx.minus_two:
            if D2 == D or intersect(ctx.L, D2, D) != 0:
                continue
            e.instances_checked += 1
            if intersect(ctx.L, D2, Ej) != 0:
                e.violations.append(ctx.violation(f"D'.D = 0 but D'.E_{jk[0]} != 0", D, D2))


def check_steep_components(ctx, e):
    for i in range(1, ctx.s + 1):
        m = -ctx.L.self_intersection(i)
        if m < 3:
            continue
        e.instances_checked += 1
        N = ctx.L.e(i)
        J = [j for j, x in enumerate(ctx.E_dots(N), start=1) if x == 1]
        total = N
        for j in J:
            total = total + ctx.Es[j - 1]
        if len(J) != m - 1:
            e.violations.append(ctx.violation(f"|J| = {len(J)} for e_{i}^2 = -{m}", N))
        elif total not in ctx.Es or total[i - 1] != 1:
            e.violations.append(ctx.violation(f"e_{i} + sum E_J is not a total transform containing e_{i} once", total))


def _reduced_minus_two(ctx) -> Iterator[Divisor]:
    idx = [i for i in range(1, ctx.s + 1) if ctx.L.self_intersection(i) == -2]
    for r in range(1, len(idx) + 1):
        for sub in combinations(idx, r):
            D = Divisor(1 if i in sub else 0 for i in range(1, ctx.s + 1))
            yield D


def check_only_type_a(ctx, e):
    seen = set()
    for D in list(_reduced_minus_two(ctx)) + ctx.minus_two:
        if D in seen:
            continue
        seen.add(D)
        t = classify_ADE(ctx.L, D)
        if t is None:
            continue
        e.instances_checked += 1
        if t.family != "A":
            e.violations.append(ctx.violation(f"contracted configuration of type {t}", D))


def check_ade_self_intersection(ctx, e):
    for D in _reduced_minus_two(ctx):
        t = classify_ADE(ctx.L, D)
        if t is None:
            continue
        e.instances_checked += 1
        comps_ok = all(canonical_degree(ctx.L, ctx.L.e(i)) == 0 for i in D.support())
        if not comps_ok or intersect(ctx.L, D, D) != -2:
            e.violations.append(ctx.violation(f"{t} configuration with D^2 != -2 or K-degree != 0", D))


def _theta_or_none(ctx, D):
    try:
        return theta(ctx.L, D)
    except InvariantViolation:
        return None


def check_theta_disjoint(ctx, e):
    for D, _ in ctx.a_configs:
        e.instances_checked += 1
        dots = ctx.E_dots(D)
        ones = [j for j, x in enumerate(dots, start=1) if x == 1]
        if len(ones) != 1:
            e.violations.append(ctx.violation(f"meets {len(ones)} total transforms once", D))
            continue
        if D.support() & ctx.Es[ones[0] - 1].support():
            e.violations.append(ctx.violation(f"shares a component with E_{ones[0]}", D))


def check_theta_unique(ctx, e):
    for D, _ in ctx.a_configs:
        e.instances_checked += 1
        dots = ctx.E_dots(D)
        ones = [j for j, x in enumerate(dots, start=1) if x == 1]
        if len(ones) != 1:
            continue  # reported by the disjointness check
        j = ones[0]
        Ej = ctx.Es[j - 1]
        meeting = [g for g in sorted(Ej.support()) if intersect(ctx.L, ctx.L.e(g), D) == 1]
        negative = [g for g in sorted(Ej.support()) if intersect(ctx.L, ctx.L.e(g), Ej) == -1]
        if len(meeting) != 1 or meeting != negative:
            e.violations.append(ctx.violation(f"components meeting D once {meeting}, with e.E_{j} = -1 {negative}", D))


def _disjoint_pairs(ctx):
    for (D1, _), (D2, _) in combinations(ctx.a_configs, 2):
        if are_disjoint(ctx.L, D1, D2):
            yield D1, D2


def check_theta_disjoint_or_contained(ctx, e):
    for D1, D2 in _disjoint_pairs(ctx):
        for D, Dp in ((D1, D2), (D2, D1)):
            th = _theta_or_none(ctx, D)
            if th is None:
                continue
            e.instances_checked += 1
            Ej = ctx.Es[th.j - 1]
            apart = not (Dp.support() & Ej.support()) and intersect(ctx.L, Dp, Ej) == 0
            if not (apart or Dp.lt(Ej)):
                e.violations.append(ctx.violation(f"neither disjoint from nor inside E_{th.j}", D, Dp))


def check_theta_distinct(ctx, e):
    for D1, D2 in _disjoint_pairs(ctx):
        t1, t2 = _theta_or_none(ctx, D1), _theta_or_none(ctx, D2)
        if t1 is None or t2 is None:
            continue
        e.instances_checked += 1
        if t1.theta == t2.theta:
            e.violations.append(ctx.violation(f"both meet e_{t1.theta}", D1, D2))


def check_disjoint_budget(ctx, e):
    for fam, budget in disjoint_A_budget(ctx.L, check=False):
        e.instances_checked += 1
        if budget > ctx.s:
            e.violations.append(ctx.violation(f"budget {budget} > s = {ctx.s}", *fam))
        elif budget == ctx.s:
            e.equalities += 1


def check_genus_additivity(ctx, e):
    for D in ctx.Es + ctx.minus_two:
        rows, selfs, kdots = kernels.box_forms(ctx.gram, ctx.kdeg, D.as_array())
        rows, selfs, kdots = rows[1:-1], selfs[1:-1], kdots[1:-1]
        if not len(rows):
            continue
        d = D.as_array()
        dd = int(d @ ctx.gram @ d)
        kd = int(d @ ctx.kdeg)
        ad = rows @ (ctx.gram @ d)
        ab = ad - selfs
        b_self = dd - 2 * ad + selfs
        b_k = kd - kdots
        # twice the genus identity: 2p(D) = 2p(A) + 2p(B) - 2 + 2 A.B
        lhs = 2 + kd + dd
        rhs = (2 + kdots + selfs) + (2 + b_k + b_self) - 2 + 2 * ab
        e.instances_checked += len(rows)
        for r in np.flatnonzero(lhs != rhs)[:10]:
            e.violations.append(ctx.violation("genus additivity fails", D, Divisor(rows[r])))


# (id, check) pairs; ids name what is checked
CHECKS: list[tuple[str, Callable]] = [
    ("lattice.negative_definite", check_negative_definite),
    ("lattice.total_transforms_orthonormal", check_total_transform_products),
    ("lattice.adjunction_rational_components", check_adjunction),
    ("lattice.basis_round_trip", check_basis_round_trip),
    ("genus.additivity", check_genus_additivity),
    ("total_transform.components_nonpositive", check_components_nonpositive),
    ("total_transform.unique_negative_component", check_unique_negative_component),
    ("total_transform.one_connected", check_total_transform_connected),
    ("contracted.genus_nonpositive", check_genus_nonpositive),
    ("total_transform.overlap_implies_nested", check_overlap_nested),
    ("total_transform.nested_components_orthogonal", check_nested_orthogonal),
    ("minus_one.classes_are_total_transforms", check_minus_one_classes),
    ("contracted.one_connected_meets_total_transforms_at_most_once", check_connected_meets_once),
    ("minus_two.one_connected", check_minus_two_connected),
    ("minus_two.pairwise_product_bounded", check_minus_two_pairs),
    ("minus_two.difference_of_total_transforms", check_minus_two_difference),
    ("minus_two.orthogonal_transfer", check_minus_two_transfer),
    ("steep_component.completes_to_total_transform", check_steep_components),
    ("ade.only_type_a", check_only_type_a),
    ("ade.self_intersection_minus_two", check_ade_self_intersection),
    ("theta.disjoint_from_total_transform", check_theta_disjoint),
    ("theta.unique_component", check_theta_unique),
    ("theta.disjoint_or_contained", check_theta_disjoint_or_contained),
    ("theta.distinct_for_disjoint", check_theta_distinct),
    ("ade.disjoint_family_budget", check_disjoint_budget),
]


def run_suite(f: ProximityForest | ExceptionalLattice, cap: int | None = None,
              max_box: int = DEFAULT_MAX_BOX) -> SuiteReport:
    """Run every check on one forest."""
    L = f if isinstance(f, ExceptionalLattice) else build_lattice(f)
    ctx = _Context(L, cap, max_box)
    entries = {}
    for key, check in CHECKS:
        e = Entry()
        try:
            check(ctx, e)
        except InvariantViolation as exc:
            e.violations.append(ctx.violation(f"invariant error: {exc}"))
        entries[key] = e
    meta = {
        "mode": "single",
        "forest": ctx.forest_text,
        "cap": ctx.cap,
        "cap_requested": ctx.cap_requested,
    }
    return SuiteReport(entries, meta)


def run_many(forests: Iterable[ProximityForest], meta: dict, cap: int | None = None,
             max_box: int = DEFAULT_MAX_BOX, jobs: int = 1) -> SuiteReport:
    """Run the suite over many forests; results merge in input order."""
    forests = list(forests)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            reports = list(pool.map(_run_one, forests, [cap] * len(forests), [max_box] * len(forests),
                                    chunksize=8))
    else:
        reports = [run_suite(f, cap, max_box) for f in forests]
    total = SuiteReport({key: Entry() for key, _ in CHECKS}, dict(meta))
    caps = []
    for r in reports:
        total.merge(r)
        caps.append(r.meta["cap"])
    total.meta.update(
        forests=len(forests),
        cap_min=min(caps, default=None),
        cap_max=max(caps, default=None),
        cap_reduced=sum(1 for r in reports if r.meta["cap"] < r.meta["cap_requested"]),
        max_box=max_box,
    )
    return total


def _run_one(f, cap, max_box):
    return run_suite(f, cap, max_box)


def exhaust(max_points: int, cap: int | None = None, max_box: int | None = None,
            jobs: int = 1) -> SuiteReport:
    """Every valid forest with ``1 <= s <= max_points``.

    The coordinate box is unbounded by default: at ``s <= 6`` the full
    default cap costs well under a minute.
    """
    forests = [f for s in range(1, max_points + 1) for f in enumerate_forests(s)]
    meta = {"mode": "exhaustive", "s_min": 1, "s_max": max_points, "seed": None}
    return run_many(forests, meta, cap, max_box, jobs)


def fuzz(max_points: int, count: int, seed: int, cap: int | None = None,
         max_box: int = DEFAULT_MAX_BOX, jobs: int = 1, min_points: int | None = None) -> SuiteReport:
    """``count`` random forests with ``s`` drawn from ``min_points..max_points``.

    Forest ``k`` is ``random_forest(s_k, f"{seed}:{k}")``, so any single forest
    can be regenerated without replaying the others.
    """
    lo = max_points if min_points is None else min_points
    rng = random.Random(seed)
    sizes = [rng.randint(lo, max_points) for _ in range(count)]
    forests = [random_forest(s, f"{seed}:{k}") for k, s in enumerate(sizes)]
    meta = {"mode": "random", "s_min": lo, "s_max": max_points, "seed": seed, "count": count}
    return run_many(forests, meta, cap, max_box, jobs)
