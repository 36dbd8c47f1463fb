"""Exhaustive integer search for admissible partial augmentations, order by order."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cyclo import divisors, prime_divisors
from .grouptable import AnyTable, CharacterTable
from .help_engine import (
    AugmentationTuple,
    ConstraintSystem,
    LinearForm,
    PowerAssignment,
    build_system,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 128
REALIZED = "realized-by-group-element"
EXCLUDED = "excluded"
SURVIVES = "survives-nontrivially"


@dataclass
class Box:
    lower: dict[int, int]
    upper: dict[int, int]
    empty: bool = False
    capped: list[int] = field(default_factory=list)
    conflict: str | None = None

    @property
    def flagged(self) -> bool:
        return bool(self.capped)

    def size(self) -> int:
        if self.empty:
            return 0
        return math.prod(self.upper[v] - self.lower[v] + 1 for v in self.lower)


@dataclass
class BranchResult:
    assignment: PowerAssignment
    tuples: list[AugmentationTuple]
    eliminated_by: str | None = None
    flagged: bool = False


@dataclass
class Case:
    """One combination of power tuples at the orders realized by group elements."""

    choice: PowerAssignment
    branches: list[BranchResult] = field(default_factory=list)
    eliminated_by: str | None = None

    @property
    def tuples(self) -> list[AugmentationTuple]:
        return sorted({t for b in self.branches for t in b.tuples})


@dataclass
class SolutionSet:
    order: int
    tuples: list[AugmentationTuple]
    cases: list[Case] = field(default_factory=list)

    @property
    def branches(self) -> list[BranchResult]:
        return [b for c in self.cases for b in c.branches]

    def admitting(self, t: AugmentationTuple) -> list[PowerAssignment]:
        return [b.assignment for b in self.branches if t in b.tuples]

    @property
    def flagged(self) -> bool:
        return any(b.flagged for b in self.branches)


@dataclass
class OrderVerdict:
    order: int
    status: str
    rationally_conjugate: bool


# --- bounds ------------------------------------------------------------------


def _rows(system: ConstraintSystem):
    """(coeff vector, lo, hi, tag) rows; constant forms are returned separately."""
    vs = system.variables
    rows = {}
    constants = []
    for f in system.forms:
        vec = tuple(f.coeff(v) for v in vs)
        hi = system.upper_bound(f)
        if not any(vec):
            constants.append(f)
            continue
        lo, up = -f.constant, hi - f.constant
        key = vec
        if key in rows:
            old = rows[key]
            if lo > old[1] or up < old[2]:
                rows[key] = (vec, max(lo, old[1]), min(up, old[2]), f.tag if lo > old[1] else old[3])
        else:
            rows[key] = (vec, lo, up, f.tag)
    for eq in system.equalities:
        d = dict(eq.coeffs)
        vec = tuple(Fraction(d.get(v, 0)) for v in vs)
        rows[("eq", vec)] = (vec, Fraction(eq.rhs), Fraction(eq.rhs), eq.tag)
    return list(rows.values()), constants


def _constant_violation(system: ConstraintSystem, forms: Iterable[LinearForm]) -> str | None:
    k = system.order
    for f in forms:
        c = f.constant
        if c < 0 or c.denominator != 1 or c.numerator % k:
            return f.tag
    return None


def _propagate(rows, lb, ub, nvars):
    """Interval propagation to a fixpoint; returns conflicting tag or None."""
    changed = True
    rounds = 0
    while changed and rounds < 200:
        changed = False
        rounds += 1
        for vec, lo, hi, tag in rows:
            mins = []
            maxs = []
            for a, l_, u_ in zip(vec, lb, ub):
                if a == 0:
                    mins.append(0)
                    maxs.append(0)
                elif a > 0:
                    mins.append(a * l_)
                    maxs.append(a * u_)
                else:
                    mins.append(a * u_)
                    maxs.append(a * l_)
            tot_min = sum(mins)
            tot_max = sum(maxs)
            for j in range(nvars):
                a = vec[j]
                if a == 0:
                    continue
                rest_min = tot_min - mins[j] if math.isfinite(mins[j]) else _sum_except(mins, j)
                rest_max = tot_max - maxs[j] if math.isfinite(maxs[j]) else _sum_except(maxs, j)
                lo_j = lo - rest_max
                hi_j = hi - rest_min
                if a > 0:
                    new_l = _ceil(lo_j / a) if math.isfinite(lo_j) else -math.inf
                    new_u = _floor(hi_j / a) if math.isfinite(hi_j) else math.inf
                else:
                    new_l = _ceil(hi_j / a) if math.isfinite(hi_j) else -math.inf
                    new_u = _floor(lo_j / a) if math.isfinite(lo_j) else math.inf
                if new_l > lb[j]:
                    lb[j] = new_l
                    changed = True
                if new_u < ub[j]:
                    ub[j] = new_u
                    changed = True
                if lb[j] > ub[j]:
                    return tag
    return None


def _sum_except(vals, j):
    return sum(v for i, v in enumerate(vals) if i != j)


def _ceil(x):
    return math.ceil(x)


def _floor(x):
    return math.floor(x)


def _lp_bounds(rows, nvars, lb, ub):
    """LP relaxation bounds for variables propagation left unbounded."""
    from scipy.optimize import linprog

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for vec, lo, hi, _ in rows:
        v = [float(x) for x in vec]
        if lo == hi:
            a_eq.append(v)
            b_eq.append(float(lo))
            continue
        if math.isfinite(hi):
            a_ub.append(v)
            b_ub.append(float(hi))
        if math.isfinite(lo):
            a_ub.append([-x for x in v])
            b_ub.append(-float(lo))
    bounds = [
        (None if not math.isfinite(l_) else float(l_), None if not math.isfinite(u_) else float(u_))
        for l_, u_ in zip(lb, ub)
    ]
    kw = dict(
        A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq or None, b_eq=b_eq or None,
        bounds=bounds, method="highs",
    )
    for j in range(nvars):
        for sign in (1, -1):
            if (sign == 1 and math.isfinite(lb[j])) or (sign == -1 and math.isfinite(ub[j])):
                continue
            c = [0.0] * nvars
            c[j] = float(sign)
            res = linprog(c, **kw)
            if res.status == 2:
                return " + ".join(_infeasible_core(rows, nvars))
            if res.status == 0:
                val = sign * res.fun
                # round outward with a little slack for solver tolerance
                if sign == 1:
                    lb[j] = math.ceil(val - 1e-6)
                else:
                    ub[j] = math.floor(val + 1e-6)
    return None


def _lp_feasible(rows, nvars) -> bool:
    from scipy.optimize import linprog

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for vec, lo, hi, _ in rows:
        v = [float(x) for x in vec]
        if lo == hi:
            a_eq.append(v)
            b_eq.append(float(lo))
        else:
            a_ub += [v, [-x for x in v]]
            b_ub += [float(hi), -float(lo)]
    res = linprog(
        [0.0] * nvars, A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq or None, b_eq=b_eq or None,
        bounds=[(None, None)] * nvars, method="highs",
    )
    return res.status != 2


def _infeasible_core(rows, nvars) -> list[str]:
    """Deletion filter: a minimal set of rows whose real relaxation is already empty."""
    core = list(rows)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        if not _lp_feasible(trial, nvars):
            core = trial
        else:
            i += 1
    tags = [r[3] for r in core]
    forms = [t for t in tags if t.startswith("mu_")]
    return forms + [t for t in tags if t not in forms]


def derive_bounds(system: ConstraintSystem, cap: int = DEFAULT_CAP) -> Box:
    """Finite integer box containing every solution of ``system``.

    Every form is boxed between 0 and ``k * chi(1)`` and propagated together
    with the augmentation-sum equality.  Variables that remain unbounded get
    an LP relaxation bound, and failing that the cap (flagged in the result).
    """
    vs = system.variables
    n = len(vs)
    if n == 0:
        raise ValueError("derive_bounds needs at least one variable")
    rows, constants = _rows(system)
    bad = _constant_violation(system, constants)
    if bad:
        return Box({v: 0 for v in vs}, {v: -1 for v in vs}, empty=True, conflict=bad)
    lb: list = [-math.inf] * n
    ub: list = [math.inf] * n
    conflict = _propagate(rows, lb, ub, n)
    if conflict is None and not all(map(math.isfinite, lb + ub)):
        conflict = _lp_bounds(rows, n, lb, ub)
        if conflict is None:
            conflict = _propagate(rows, lb, ub, n)
    capped = []
    if conflict is None:
        for j in range(n):
            if not math.isfinite(lb[j]):
                lb[j] = -cap
                capped.append(vs[j])
            if not math.isfinite(ub[j]):
                ub[j] = cap
                if vs[j] not in capped:
                    capped.append(vs[j])
    if capped:
        log.warning("order %d: variables %s unbounded, capped at |nu| <= %d", system.order, capped, cap)
    if conflict is not None:
        return Box({v: 0 for v in vs}, {v: -1 for v in vs}, empty=True, conflict=conflict)
    return Box(dict(zip(vs, map(int, lb))), dict(zip(vs, map(int, ub))), capped=capped)


# --- enumeration ---------------------------------------------------------------

CHUNK = 2_000_000


def _grid(ranges: Sequence[range]):
    """Yield chunks of integer grid points as int64 arrays of shape (m, len(ranges))."""
    if not ranges:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    head, tail = ranges[0], list(ranges[1:])
    combos = list(itertools.product(*tail))
    tail_pts = np.array(combos, dtype=np.int64).reshape(len(combos), len(tail))
    per = max(1, CHUNK // max(1, len(tail_pts)))
    vals = list(head)
    for i in range(0, len(vals), per):
        h = np.array(vals[i:i + per], dtype=np.int64)
        left = np.repeat(h, len(tail_pts))[:, None]
        right = np.tile(tail_pts, (len(h), 1))
        yield np.hstack([left, right])


def enumerate_solutions(system: ConstraintSystem, box: Box) -> tuple[list[AugmentationTuple], str | None]:
    """Scan every integer point of ``box``; return survivors and, if none, a killing tag.

    A point survives when each ``k * mu_l`` form is a non-negative multiple of
    ``k``, the augmentation sum is 1 and every congruence holds.
    """
    k = system.order
    vs = system.variables
    if k == 1:
        return [AugmentationTuple.identity()], None
    if box.empty:
        return [], box.conflict
    _, constants = _rows(system)
    bad = _constant_violation(system, constants)
    if bad:
        return [], bad

    forms = [f for f in system.forms if any(a for _, a in f.coeffs)]
    if any(not f.is_integral() for f in forms):
        raise ValueError(f"order {k}: non-integral linear form; traces should be integers")
    coeff = np.array([[int(f.coeff(v)) for v in vs] for f in forms], dtype=np.int64).reshape(len(forms), len(vs))
    const = np.array([int(f.constant) for f in forms], dtype=np.int64)
    # dedupe identical forms; keep first tag
    _, first = np.unique(np.hstack([coeff, const[:, None]]), axis=0, return_index=True)
    keep = np.sort(first)
    coeff, const = coeff[keep], const[keep]
    tags = [forms[i].tag for i in keep]

    berman = system.equalities[0]
    assert set(dict(berman.coeffs)) == set(vs) and all(c == 1 for _, c in berman.coeffs)
    free = vs[:-1]
    last = vs[-1]
    ranges = [range(box.lower[v], box.upper[v] + 1) for v in free]
    survivors = []
    killer = None
    for pts in _grid(ranges):
        x_last = berman.rhs - pts.sum(axis=1)
        ok = (x_last >= box.lower[last]) & (x_last <= box.upper[last])
        pts = np.hstack([pts, x_last[:, None]])[ok]
        if not len(pts):
            killer = killer or "augmentation sum = 1"
            continue
        for cg in system.congruences:
            cols = [vs.index(c) for c in cg.classes if c in vs]
            pts = pts[pts[:, cols].sum(axis=1) % cg.modulus == 0]
            if not len(pts):
                killer = killer or cg.tag
                break
        for j in range(len(tags)):
            if not len(pts):
                break
            val = pts @ coeff[j] + const[j]
            pts = pts[(val >= 0) & (val % k == 0)]
            if not len(pts):
                killer = killer or tags[j]
        survivors.extend(map(tuple, pts.tolist()))
    tuples = [AugmentationTuple.make(k, dict(zip(vs, p))) for p in sorted(set(survivors))]
    return tuples, (None if tuples else killer or "no integer points")


# --- branching over powers -----------------------------------------------------


@dataclass
class BranchPlan:
    order: int
    cases: list[PowerAssignment]
    # per case: every full assignment (sub-orders filled in), before consistency
    expansions: list[list[PowerAssignment]]
    axis_orders: list[int]
    sub_orders: list[int]


def _proper_orders(k: int) -> list[int]:
    return [e for e in divisors(k) if 1 < e < k]


def is_consistent(pa: PowerAssignment, solutions: dict[int, SolutionSet]) -> bool:
    """Each chosen tuple must be admitted by a branch that agrees with ``pa`` below it."""
    chosen = pa.as_dict()
    for e, t in chosen.items():
        below = {d: chosen[d] for d in _proper_orders(e)}
        if not below:
            continue
        if not any(b.as_dict() == below for b in solutions[e].admitting(t)):
            return False
    return True


def branch_assignments(
    k: int,
    solutions_by_order: dict[int, SolutionSet],
    table: CharacterTable,
) -> BranchPlan:
    """Case split over the partial augmentations of the proper powers of a unit.

    The case axes are the power orders at which ``table`` has group elements;
    their tuple sets are multiplied out.  Orders that survive without a group
    element behind them are not axes: inside each case they take every tuple
    of their solution set, and consistency with the case is checked later.
    """
    orders = _proper_orders(k)
    missing = [e for e in orders if e not in solutions_by_order or not solutions_by_order[e].tuples]
    if missing:
        raise ValueError(f"order {k}: no solutions known for power orders {missing}")
    axis = [e for e in orders if table.classes_of_order(e)]
    sub = [e for e in orders if e not in axis]
    cases = [
        PowerAssignment.make(dict(zip(axis, combo)))
        for combo in itertools.product(*(solutions_by_order[e].tuples for e in axis))
    ]
    expansions = []
    for case in cases:
        full = []
        for combo in itertools.product(*(solutions_by_order[e].tuples for e in sub)):
            m = case.as_dict()
            m.update(zip(sub, combo))
            full.append(PowerAssignment.make(m))
        expansions.append(full)
    return BranchPlan(k, cases, expansions, axis, sub)


def _solve_branch(args) -> BranchResult:
    tables, k, pa, cap = args
    system = build_system(tables, k, pa)
    box = derive_bounds(system, cap)
    tuples, killer = enumerate_solutions(system, box)
    return BranchResult(pa, tuples, killer, box.flagged)


def _common_constant_violation(tables, k, pas) -> str | None:
    """A constant form violated under every listed assignment, if there is one."""
    common = None
    for pa in pas:
        system = build_system(tables, k, pa)
        bad = []
        for f in system.forms:
            if not any(a for _, a in f.coeffs):
                c = f.constant
                if c < 0 or c.denominator != 1 or c.numerator % k:
                    bad.append(f.tag)
        common = bad if common is None else [t for t in common if t in set(bad)]
        if not common:
            return None
    return common[0] if common else None


def solve_order(
    k: int,
    tables: Sequence[AnyTable],
    solutions_by_order: dict[int, SolutionSet],
    cap: int = DEFAULT_CAP,
    executor: ProcessPoolExecutor | None = None,
) -> tuple[SolutionSet, OrderVerdict]:
    base = tables[0].base
    if k == 1:
        ident = AugmentationTuple.identity()
        case = Case(PowerAssignment(), [BranchResult(PowerAssignment(), [ident])])
        return SolutionSet(1, [ident], [case]), OrderVerdict(1, REALIZED, True)

    plan = branch_assignments(k, solutions_by_order, base)
    cases = []
    jobs = []
    for choice, full in zip(plan.cases, plan.expansions):
        case = Case(choice)
        cases.append(case)
        killer = _common_constant_violation(tables, k, full) if plan.sub_orders else None
        if killer:
            case.eliminated_by = killer
            continue
        consistent = [pa for pa in full if is_consistent(pa, solutions_by_order)]
        if not consistent:
            case.eliminated_by = "inconsistent power assignment"
            continue
        jobs.extend((case, pa) for pa in consistent)

    args = [(tuple(tables), k, pa, cap) for _, pa in jobs]
    results = list(executor.map(_solve_branch, args)) if executor and len(args) > 1 else map(_solve_branch, args)
    for (case, _), res in zip(jobs, results):
        case.branches.append(res)
    for case in cases:
        if case.eliminated_by is None and not case.tuples:
            case.eliminated_by = case.branches[0].eliminated_by

    tuples = sorted({t for c in cases for t in c.tuples}, key=lambda t: t.vector(base.coordinates()))
    sol = SolutionSet(k, tuples, cases)
    return sol, _verdict(k, sol, base, solutions_by_order)


def _single(t: AugmentationTuple) -> bool:
    return len(t.entries) == 1


def _verdict(k, sol: SolutionSet, base: CharacterTable, solutions_by_order) -> OrderVerdict:
    if not sol.tuples:
        return OrderVerdict(k, EXCLUDED, False)
    status = REALIZED if base.classes_of_order(k) else SURVIVES
    rc = all(_single(t) for t in sol.tuples)
    if rc:
        for b in sol.branches:
            if b.tuples and not all(_single(t) for t in b.assignment.as_dict().values()):
                rc = False
                break
    return OrderVerdict(k, status, rc)


@dataclass
class Catalogue:
    results: dict[int, tuple[SolutionSet, OrderVerdict]]
    pruned: list[int]

    def verdict(self, k: int) -> OrderVerdict:
        return self.results[k][1]

    def solutions(self, k: int) -> SolutionSet:
        return self.results[k][0]

    def surviving_orders(self) -> list[int]:
        return [k for k, (_, v) in self.results.items() if v.status != EXCLUDED]

    def excluded_orders(self) -> list[int]:
        return [k for k, (_, v) in self.results.items() if v.status == EXCLUDED]


def candidate_order(k: int, done: dict[int, OrderVerdict]) -> bool:
    """``k`` is worth solving only if every ``k/p`` was solved and not excluded."""
    return all(k // p in done and done[k // p].status != EXCLUDED for p in prime_divisors(k))


def solve_all(
    tables: Sequence[AnyTable],
    max_order: int | None = None,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    orders: Iterable[int] | None = None,
) -> Catalogue:
    """Solve every divisor of the exponent, smallest first, pruning upward.

    With ``orders`` given, only what those orders need is solved.
    """
    base = tables[0].base
    exp = base.exponent
    limit = exp if max_order is None else max_order
    todo = [d for d in divisors(exp) if d <= limit]
    if orders is not None:
        wanted = set()
        for k in orders:
            if exp % k:
                raise ValueError(f"order {k} does not divide the exponent {exp}")
            wanted.update(divisors(k))
        todo = [d for d in todo if d in wanted]
    results: dict[int, tuple[SolutionSet, OrderVerdict]] = {}
    verdicts: dict[int, OrderVerdict] = {}
    pruned = []
    executor = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for k in todo:
            if k > 1 and not candidate_order(k, verdicts):
                pruned.append(k)
                continue
            sols = {e: results[e][0] for e in divisors(k) if e in results}
            sol, verdict = solve_order(k, tables, sols, cap, executor)
            results[k] = (sol, verdict)
            verdicts[k] = verdict
            log.info("order %d: %s (%d tuples)", k, verdict.status, len(sol.tuples))
    finally:
        if executor:
            executor.shutdown()
    return Catalogue(results, pruned)
