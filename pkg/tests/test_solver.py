import pytest

from torsion_units.help_engine import (
    AugmentationTuple,
    ConstraintSystem,
    PowerAssignment,
    berman_constraint,
    build_system,
)
from torsion_units.solver import (
    EXCLUDED,
    REALIZED,
    SURVIVES,
    Box,
    branch_assignments,
    candidate_order,
    derive_bounds,
    enumerate_solutions,
    is_consistent,
    solve_all,
    solve_order,
)


def named(table, t):
    return {table.classes[c].name: v for c, v in t.entries}


def vecs(table, tuples, names):
    idx = [table.class_index(n) for n in names]
    return {tuple(t.get(i) for i in idx) for t in tuples}


def box_names(table, box):
    return {table.classes[v].name: (box.lower[v], box.upper[v]) for v in box.lower}


def subsystem(system, keep):
    forms = [f for f in system.forms if keep(f)]
    return ConstraintSystem(system.order, system.variables, forms, system.equalities, system.congruences, system.degrees)


# --- derive_bounds ---------------------------------------------------------------


def test_bounds_order4(table, powers):
    s = build_system([table], 4, powers())
    # the two chi_3 forms alone already give the printed range
    b = derive_bounds(subsystem(s, lambda f: f.character == 3))
    assert box_names(table, b)["2a"] == (-2, 2)
    assert box_names(table, derive_bounds(s))["2a"] == (-2, 2)


def test_bounds_order8_bct3(table, brauer, powers, tup):
    pa = powers(_4=tup(4, {"4a": 1}))
    keep = {(5, 0), (5, 4), (4, 0), (4, 4), (2, 1), (7, 4), (2, 5), (7, 0)}
    s = subsystem(build_system([brauer[3]], 8, pa), lambda f: (f.character, f.l) in keep)
    b = box_names(table, derive_bounds(s))
    assert b["2a"] == (-1, 1)
    assert b["4a"] == (-3, 3)
    # propagation also uses the augmentation sum, so these may be tighter than printed
    for n in ("8a", "8b"):
        assert -2 <= b[n][0] and b[n][1] <= 2
    sols, _ = enumerate_solutions(s, derive_bounds(s))
    for t in sols:
        for n, (lo, hi) in b.items():
            assert lo <= t.get(table.class_index(n)) <= hi


def test_bounds_single_variable():
    s = ConstraintSystem(2, [1], [], [berman_constraint([1])], [], {})
    b = derive_bounds(s)
    assert (b.lower, b.upper, b.empty, b.flagged) == ({1: 1}, {1: 1}, False, False)


def test_bounds_need_a_variable():
    with pytest.raises(ValueError):
        derive_bounds(ConstraintSystem(2, [], [], [], [], {}))


def test_bounds_cap_is_flagged():
    # nothing but the augmentation sum: both variables stay unbounded
    s = ConstraintSystem(6, [1, 2], [], [berman_constraint([1, 2])], [], {})
    b = derive_bounds(s, cap=5)
    assert b.flagged and sorted(b.capped) == [1, 2]
    assert (b.lower, b.upper) == ({1: -5, 2: -5}, {1: 5, 2: 5})


def test_bounds_detect_constant_violation(table, catalogue, powers, tup):
    pa = powers(_4=tup(4, {"4a": 1}), _6=tup(6, {"6a": 1}), _8=tup(8, {"8a": 1}),
                _12=catalogue.solutions(12).tuples[0])
    b = derive_bounds(build_system([table], 24, pa))
    assert b.empty and b.conflict == "mu_1(u, chi_2) [ordinary]"


# --- enumerate ---------------------------------------------------------------------


def test_enumerate_order4(table, all_tables, powers):
    s = build_system(all_tables, 4, powers())
    found, killer = enumerate_solutions(s, derive_bounds(s))
    assert killer is None
    assert vecs(table, found, ["2a", "4a"]) == {(0, 1), (2, -1)}


def test_enumerate_order6(table, all_tables, powers):
    s = build_system(all_tables, 6, powers())
    found, _ = enumerate_solutions(s, derive_bounds(s))
    assert vecs(table, found, ["2a", "3a", "6a"]) == {(-2, 3, 0), (0, 0, 1), (0, 3, -2), (2, -3, 2), (2, 0, -1)}
    # sorted lexicographically by the system's variables
    assert [t.vector(s.variables) for t in found] == sorted(t.vector(s.variables) for t in found)


def test_enumerate_order11(table, all_tables):
    s = build_system(all_tables, 11, PowerAssignment())
    found, _ = enumerate_solutions(s, derive_bounds(s))
    assert vecs(table, found, ["11a", "11b"]) == {(1, 0), (0, 1)}


def test_enumerate_empty_box_reports_conflict():
    s = ConstraintSystem(2, [1], [], [berman_constraint([1])], [], {})
    assert enumerate_solutions(s, Box({1: 0}, {1: -1}, empty=True, conflict="x")) == ([], "x")


def test_enumerate_order1():
    s = ConstraintSystem(1, [], [], [], [], {})
    assert enumerate_solutions(s, Box({}, {})) == ([AugmentationTuple.identity()], None)


def test_enumeration_independent_of_variable_order(table, all_tables, powers, tup):
    s = build_system(all_tables, 8, powers(_4=tup(4, {"4a": 1})))
    rev = list(reversed(s.variables))
    s2 = ConstraintSystem(8, rev, s.forms, [berman_constraint(rev)], s.congruences, s.degrees)
    a, _ = enumerate_solutions(s, derive_bounds(s))
    b, _ = enumerate_solutions(s2, derive_bounds(s2))
    assert sorted(a) == sorted(b)


def test_enumeration_independent_of_chunking(table, all_tables, powers, tup, monkeypatch):
    import torsion_units.solver as solver

    s = build_system(all_tables, 8, powers(_4=tup(4, {"2a": 2, "4a": -1})))
    box = derive_bounds(s)
    whole, _ = enumerate_solutions(s, box)
    monkeypatch.setattr(solver, "CHUNK", 3)
    assert enumerate_solutions(s, box)[0] == whole


def test_enumerate_tags_killing_constraint(table, all_tables, powers):
    s = build_system(all_tables, 10, powers())
    found, killer = enumerate_solutions(s, derive_bounds(s))
    assert found == [] and killer.startswith("mu_")


# --- branching ------------------------------------------------------------------------


def test_branches_order8(catalogue, table):
    plan = branch_assignments(8, {e: catalogue.solutions(e) for e in (2, 4)}, table)
    assert len(plan.cases) == 2
    assert plan.axis_orders == [2, 4] and plan.sub_orders == []


def test_branches_order12(catalogue, table):
    plan = branch_assignments(12, {e: catalogue.solutions(e) for e in (2, 3, 4, 6)}, table)
    assert len(plan.cases) == 10


def test_branches_order24(catalogue, table):
    sols = {e: catalogue.solutions(e) for e in (2, 3, 4, 6, 8, 12)}
    plan = branch_assignments(24, sols, table)
    assert len(plan.cases) == 40
    assert plan.sub_orders == [12]
    assert all(len(x) == len(catalogue.solutions(12).tuples) for x in plan.expansions)
    consistent = [pa for x in plan.expansions for pa in x if is_consistent(pa, sols)]
    # only the order-6 power (0,3,-2) feeds the surviving order-12 branches
    for pa in consistent:
        assert named(table, pa[6]) == {"3a": 3, "6a": -2}


def test_branches_need_all_proper_orders(catalogue, table):
    with pytest.raises(ValueError):
        branch_assignments(8, {2: catalogue.solutions(2)}, table)


def test_candidate_order_rule(catalogue):
    verdicts = {k: v for k, (_, v) in catalogue.results.items()}
    assert candidate_order(24, verdicts)
    assert not candidate_order(20, verdicts)
    assert not candidate_order(120, verdicts)


# --- per-order results ------------------------------------------------------------------


def test_catalogue(catalogue):
    assert sorted(catalogue.surviving_orders()) == [1, 2, 3, 4, 5, 6, 8, 11, 12]
    assert sorted(catalogue.excluded_orders()) == [10, 15, 22, 24, 33, 55]
    assert {20, 30, 40, 44, 60, 66, 88, 110, 120, 132, 165, 220, 264, 330, 440, 660, 1320} == set(catalogue.pruned)
    assert catalogue.verdict(12).status == SURVIVES
    assert catalogue.verdict(8).status == REALIZED
    assert catalogue.verdict(10).status == EXCLUDED


def test_rational_conjugacy(catalogue):
    rc = {k for k, (_, v) in catalogue.results.items() if v.rationally_conjugate}
    assert rc == {1, 2, 3, 5, 11}


def test_order8_merged(table, catalogue):
    got = vecs(table, catalogue.solutions(8).tuples, ["2a", "4a", "8a", "8b"])
    assert got == {(0, 0, 0, 1), (0, 0, 1, 0), (0, 2, -1, 0), (0, 2, 0, -1)}


DISPLAY_5 = {(0, 2, 0, -1), (0, 2, -1, 0), (0, -2, 1, 2), (0, -2, 2, 1), (0, 0, 1, 0), (0, 0, 0, 1)}
DISPLAY_7 = {(0, 2, 1, -2), (0, 2, -2, 1), (0, 2, 0, -1), (0, 2, -1, 0),
             (0, 0, 1, 0), (0, 0, 2, -1), (0, 0, 0, 1), (0, 0, -1, 2)}


@pytest.mark.parametrize("p,branch,expected", [
    (3, (0, 1), DISPLAY_5),
    (3, (2, -1), DISPLAY_5),  # display (6) lists the same six tuples
    (11, (0, 1), DISPLAY_7),
    (11, (2, -1), DISPLAY_7),  # display (8) lists the same eight tuples
])
def test_order8_per_branch_displays(table, brauer, catalogue, p, branch, expected):
    sols = {e: catalogue.solutions(e) for e in (2, 4)}
    sol, _ = solve_order(8, [brauer[p]], sols)
    b = [br for br in sol.branches if vecs(table, [br.assignment[4]], ["2a", "4a"]) == {branch}]
    assert len(b) == 1
    assert vecs(table, b[0].tuples, ["2a", "4a", "8a", "8b"]) == expected


def test_order12_provenance(table, catalogue):
    sol = catalogue.solutions(12)
    for t in sol.tuples:
        assert sol.admitting(t)
    kills = [c.eliminated_by for c in sol.cases if c.eliminated_by]
    assert len(kills) == 8


def test_prime_orders_use_no_powers(table, all_tables, catalogue):
    for k in (2, 3, 5, 11):
        s = build_system(all_tables, k, PowerAssignment())
        found, _ = enumerate_solutions(s, derive_bounds(s))
        assert found == catalogue.solutions(k).tuples


def test_more_tables_never_enlarge(table, catalogue):
    ordinary_only = solve_all([table])
    for k, (sol, _) in catalogue.results.items():
        if k in ordinary_only.results:
            assert set(sol.tuples) <= set(ordinary_only.solutions(k).tuples), k


def test_orders_subset(all_tables):
    cat = solve_all(all_tables, orders=[8])
    assert sorted(cat.results) == [1, 2, 4, 8]
    with pytest.raises(ValueError):
        solve_all(all_tables, orders=[7])


def test_parallel_matches_serial(all_tables, catalogue):
    par = solve_all(all_tables, max_order=24, jobs=2)
    for k in par.results:
        assert par.solutions(k).tuples == catalogue.solutions(k).tuples
        assert [c.eliminated_by for c in par.solutions(k).cases] == [c.eliminated_by for c in catalogue.solutions(k).cases]


def numeric_mu(tb, chi, k, by_order):
    """mu_l(u, chi) for all l from complex character values of u^j, j = 0..k-1.

    ``by_order`` maps each order e | k to the partial augmentations of u^(k/e);
    u^j with gcd(j, k) = k/e is a Galois conjugate of that power, found through
    the class power maps.
    """
    import cmath
    from math import gcd

    out = []
    for l in range(k):
        s = 0
        for j in range(k):
            g = gcd(j, k)
            e = k // g
            base = by_order[e]
            m = j // g
            vals = {tb.base.power_class(c, m) if e > 1 else c: v for c, v in base.items()}
            chival = sum(v * complex(tb.value(chi, c)) for c, v in vals.items())
            s += chival * cmath.exp(-2j * cmath.pi * j * l / k)
        out.append(s / k)
    return out


def test_order12_survivors_pass_numeric_oracle(table, all_tables, catalogue):
    sol = catalogue.solutions(12)
    assert len(sol.tuples) == 3
    for t in sol.tuples:
        for pa in sol.admitting(t):
            by_order = {1: {0: 1}, 12: t.as_dict(), **{e: x.as_dict() for e, x in pa.tuples}}
            for tb in all_tables:
                if getattr(tb, "prime", None) in (2, 3):
                    continue
                for chi in range(len(tb.characters)):
                    for mu in numeric_mu(tb, chi, 12, by_order):
                        assert abs(mu.imag) < 1e-9
                        assert mu.real > -1e-9 and abs(mu.real - round(mu.real)) < 1e-9


def test_order12_third_tuple_comes_from_second_order4_power(table, catalogue):
    sol = catalogue.solutions(12)
    idx = [table.class_index(n) for n in ("2a", "3a", "4a", "6a")]
    (extra,) = [t for t in sol.tuples if tuple(t.get(i) for i in idx) == (1, 0, -1, 1)]
    (pa,) = sol.admitting(extra)
    assert named(table, pa[4]) == {"2a": 2, "4a": -1}
    assert named(table, pa[6]) == {"3a": 3, "6a": -2}
