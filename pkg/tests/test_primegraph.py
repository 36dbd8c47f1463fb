from math import gcd

import pytest

from torsion_units.grouptable import load_table, validate_orthogonality
from torsion_units.primegraph import PrimeGraph, group_prime_graph, kimmerle_check, unit_prime_graph
from torsion_units.solver import OrderVerdict, SURVIVES

TRIVIAL = {
    "name": "1",
    "order": 1,
    "classes": [{"name": "1a", "order": 1, "size": 1}],
    "powermaps": {},
    "characters": [[1]],
}


def cyclic(n):
    names = [f"g{i}" if i else "1a" for i in range(n)]
    classes = [{"name": names[i], "order": n // gcd(i, n), "size": 1} for i in range(n)]
    primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
    chars = [
        [1 if (i * j) % n == 0 else {"n": n, "terms": [[1, 1, (i * j) % n]]} for i in range(n)]
        for j in range(n)
    ]
    return {
        "name": f"C{n}",
        "order": n,
        "classes": classes,
        "powermaps": {str(p): [(p * i) % n for i in range(n)] for p in primes},
        "characters": chars,
    }


def test_m11_group_graph(table):
    g = group_prime_graph(table)
    assert g.vertices == (2, 3, 5, 11)
    assert g.sorted_edges() == [(2, 3)]


def test_trivial_group():
    t = load_table(TRIVIAL)
    assert group_prime_graph(t) == PrimeGraph.make([], [])
    assert unit_prime_graph(t, {1: OrderVerdict(1, "realized-by-group-element", True)}) == PrimeGraph.make([], [])


def test_cyclic_six():
    t = load_table(cyclic(6))
    assert validate_orthogonality(t) == []
    g = group_prime_graph(t)
    assert g.vertices == (2, 3) and g.sorted_edges() == [(2, 3)]


def test_unit_graph_m11(table, catalogue):
    verdicts = {k: v for k, (_, v) in catalogue.results.items()}
    u = unit_prime_graph(table, verdicts)
    assert u == PrimeGraph.make([2, 3, 5, 11], [(2, 3)])
    ok, diff = kimmerle_check(group_prime_graph(table), u)
    assert ok and diff == {"vertices": [], "edges": []}


def test_unit_graph_gains_edge_when_order_survives(table, catalogue):
    verdicts = {k: v for k, (_, v) in catalogue.results.items()}
    verdicts[10] = OrderVerdict(10, SURVIVES, False)
    u = unit_prime_graph(table, verdicts)
    assert u.sorted_edges() == [(2, 3), (2, 5)]
    ok, diff = kimmerle_check(group_prime_graph(table), u)
    assert not ok and diff["edges"] == [(2, 5)]


def test_unit_graph_missing_verdict(table, catalogue):
    verdicts = {k: v for k, (_, v) in catalogue.results.items() if k != 22}
    with pytest.raises(ValueError, match="22"):
        unit_prime_graph(table, verdicts)


def test_unit_graph_contains_group_graph(table, catalogue):
    verdicts = {k: v for k, (_, v) in catalogue.results.items()}
    g, u = group_prime_graph(table), unit_prime_graph(table, verdicts)
    assert g.edges <= u.edges and g.vertices == u.vertices


def test_kimmerle_check_basics():
    assert kimmerle_check(PrimeGraph.make([]), PrimeGraph.make([])) == (True, {"vertices": [], "edges": []})
    a = PrimeGraph.make([2, 3, 5], [(3, 2)])
    b = PrimeGraph.make([2, 3, 5], [(2, 3), (2, 5)])
    assert kimmerle_check(a, b) == (False, {"vertices": [], "edges": [(2, 5)]})


def test_edge_endpoints_must_be_vertices():
    with pytest.raises(ValueError):
        PrimeGraph.make([2, 3], [(2, 7)])
