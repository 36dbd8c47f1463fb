"""Prime graphs of a group and of its normalized unit group."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from .cyclo import prime_divisors
from .grouptable import CharacterTable
from .solver import EXCLUDED, OrderVerdict

Edge = tuple[int, int]


@dataclass(frozen=True)
class PrimeGraph:
    vertices: tuple[int, ...]
    edges: frozenset[Edge]

    def __post_init__(self):
        for p, q in self.edges:
            if p not in self.vertices or q not in self.vertices:
                raise ValueError(f"edge {{{p},{q}}} has an endpoint outside the vertex set")

    @classmethod
    def make(cls, vertices, edges=()) -> "PrimeGraph":
        return cls(tuple(sorted(set(vertices))), frozenset(tuple(sorted(e)) for e in edges))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}


def group_prime_graph(table: CharacterTable) -> PrimeGraph:
    """Primes of ``|G|``; p, q adjacent when some class order is divisible by pq."""
    primes = prime_divisors(table.group_order) if table.group_order > 1 else []
    orders = {c.element_order for c in table.classes}
    edges = [(p, q) for p, q in combinations(primes, 2) if any(o % (p * q) == 0 for o in orders)]
    return PrimeGraph.make(primes, edges)


def unit_prime_graph(table: CharacterTable, verdicts: Mapping[int, OrderVerdict]) -> PrimeGraph:
    """Adjacency from the solver: order pq is not excluded.

    Orders ``pq`` not dividing the exponent are skipped (no unit has them), as
    are pruned ones; a ``pq`` that was neither pruned nor solved is an error.
    """
    primes = prime_divisors(table.group_order) if table.group_order > 1 else []
    exp = table.exponent
    edges = []
    for p, q in combinations(primes, 2):
        n = p * q
        if exp % n:
            continue
        if n not in verdicts:
            if all(n // r in verdicts and verdicts[n // r].status != EXCLUDED for r in (p, q)):
                raise ValueError(f"no verdict for order {n}; run the solver on it first")
            continue
        if verdicts[n].status != EXCLUDED:
            edges.append((p, q))
    return PrimeGraph.make(primes, edges)


def kimmerle_check(g1: PrimeGraph, g2: PrimeGraph) -> tuple[bool, dict]:
    """Compare two prime graphs; the diff holds symmetric differences."""
    diff = {
        "vertices": sorted(set(g1.vertices) ^ set(g2.vertices)),
        "edges": sorted(g1.edges ^ g2.edges),
    }
    return not (diff["vertices"] or diff["edges"]), diff
