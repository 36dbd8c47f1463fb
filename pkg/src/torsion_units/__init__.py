"""Luthar-Passi (HeLP) constraints for torsion units in integral group rings."""

from .cyclo import Cyclotomic, ramanujan_sum
from .grouptable import BrauerTable, CharacterTable, load_brauer, load_m11, load_table
from .help_engine import AugmentationTuple, PowerAssignment, build_system, mu_linear_form
from .primegraph import PrimeGraph, group_prime_graph, kimmerle_check, unit_prime_graph
from .solver import branch_assignments, derive_bounds, enumerate_solutions, solve_all, solve_order

__version__ = "1.0.0"

__all__ = [
    "AugmentationTuple",
    "BrauerTable",
    "CharacterTable",
    "Cyclotomic",
    "PowerAssignment",
    "PrimeGraph",
    "branch_assignments",
    "build_system",
    "derive_bounds",
    "enumerate_solutions",
    "group_prime_graph",
    "kimmerle_check",
    "load_brauer",
    "load_m11",
    "load_table",
    "mu_linear_form",
    "ramanujan_sum",
    "solve_all",
    "solve_order",
    "unit_prime_graph",
]
