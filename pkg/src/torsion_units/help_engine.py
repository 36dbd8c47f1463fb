"""Luthar-Passi constraint systems for torsion units of a given order.

For a normalized torsion unit ``u`` of order ``k`` with partial augmentations
``nu_c`` and any (ordinary, or p-Brauer with p not dividing k) character chi,

    k * mu_l(u, chi) = sum_{d | k} Tr_{Q(zeta_{k/d})/Q}( chi(u^d) * zeta_k^{-d l} )

must be a non-negative multiple of k.  The d = 1 term is linear in the
unknown ``nu``; every other term is a constant once the partial augmentations
of the proper powers ``u^d`` are fixed by a :class:`PowerAssignment`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cyclo import Cyclotomic, divisors, factorize
from .grouptable import AnyTable, BrauerTable, CharacterTable


@dataclass(frozen=True, order=True)
class AugmentationTuple:
    """Partial augmentations of a unit of order ``order`` (zero entries omitted)."""

    order: int
    entries: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, order: int, entries: Mapping[int, int]) -> "AugmentationTuple":
        return cls(order, tuple(sorted((c, int(v)) for c, v in entries.items() if v)))

    @classmethod
    def identity(cls) -> "AugmentationTuple":
        return cls(1, ((0, 1),))

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def get(self, c: int) -> int:
        return self.as_dict().get(c, 0)

    def support(self) -> list[int]:
        return [c for c, _ in self.entries]

    def vector(self, coords: Sequence[int]) -> tuple[int, ...]:
        d = self.as_dict()
        return tuple(d.get(c, 0) for c in coords)


@dataclass(frozen=True)
class PowerAssignment:
    """Partial augmentations chosen for the proper powers of a unit.

    Keyed by the order ``e`` of the power ``u^(k/e)``; orders with a unique
    admissible tuple are stored too, so lookups never need the solver.
    """

    tuples: tuple[tuple[int, AugmentationTuple], ...] = ()

    @classmethod
    def make(cls, mapping: Mapping[int, AugmentationTuple]) -> "PowerAssignment":
        return cls(tuple(sorted(mapping.items())))

    def __getitem__(self, e: int) -> AugmentationTuple:
        if e == 1:
            return AugmentationTuple.identity()
        for order, t in self.tuples:
            if order == e:
                return t
        raise KeyError(e)

    def __contains__(self, e: int) -> bool:
        return e == 1 or any(order == e for order, _ in self.tuples)

    def as_dict(self) -> dict[int, AugmentationTuple]:
        return dict(self.tuples)

    def restrict(self, orders: Iterable[int]) -> "PowerAssignment":
        keep = set(orders)
        return PowerAssignment(tuple((e, t) for e, t in self.tuples if e in keep))


@dataclass(frozen=True)
class LinearForm:
    """``constant + sum(coeffs[c] * nu_c)``, standing for ``k * mu_l(u, chi)``."""

    constant: Fraction
    coeffs: tuple[tuple[int, Fraction], ...]
    table: str = ""
    character: int = 0  # 1-based, as printed (chi_1 is the trivial character)
    l: int = 0

    @property
    def tag(self) -> str:
        return f"mu_{self.l}(u, chi_{self.character}) [{self.table}]"

    def coeff(self, c: int) -> Fraction:
        return dict(self.coeffs).get(c, Fraction(0))

    def evaluate(self, nu: Mapping[int, int]) -> Fraction:
        return self.constant + sum((a * nu.get(c, 0) for c, a in self.coeffs), Fraction(0))

    def is_integral(self) -> bool:
        return self.constant.denominator == 1 and all(a.denominator == 1 for _, a in self.coeffs)

    def substitute(self, values: Mapping[int, int]) -> "LinearForm":
        """Fix some variables to integers and fold them into the constant."""
        const = self.constant + sum((a * values[c] for c, a in self.coeffs if c in values), Fraction(0))
        rest = tuple((c, a) for c, a in self.coeffs if c not in values)
        return LinearForm(const, rest, self.table, self.character, self.l)


@dataclass(frozen=True)
class Congruence:
    """``sum(nu_c for c in classes) == 0 (mod modulus)``."""

    classes: tuple[int, ...]
    modulus: int
    tag: str = ""


@dataclass(frozen=True)
class Equality:
    """``sum(coeffs[c] * nu_c) == rhs``."""

    coeffs: tuple[tuple[int, int], ...]
    rhs: int
    tag: str = ""


@dataclass
class ConstraintSystem:
    order: int
    variables: list[int]
    forms: list[LinearForm] = field(default_factory=list)
    equalities: list[Equality] = field(default_factory=list)
    congruences: list[Congruence] = field(default_factory=list)
    degrees: dict[tuple[str, int], int] = field(default_factory=dict)

    def upper_bound(self, form: LinearForm) -> int:
        """``k * chi(1)``: the mu_l of one character sum to its degree."""
        return self.order * self.degrees[(form.table, form.character)]


# --- constraint generators -------------------------------------------------


def admissible_classes(table: CharacterTable, k: int) -> list[int]:
    """Non-identity classes that may carry a nonzero partial augmentation.

    A class survives only if its element order divides ``k``; primes missing
    from ``|u|`` and oversized p-parts both force a zero.
    """
    if k < 1:
        raise ValueError("unit order must be positive")
    return [i for i, c in enumerate(table.classes) if i and k % c.element_order == 0]


def berman_constraint(variables: Sequence[int]) -> Equality:
    return Equality(tuple((c, 1) for c in variables), 1, "augmentation sum = 1")


def prime_power_divisibility(table: CharacterTable, k: int) -> list[Congruence]:
    """Partial-augmentation sums over classes of order p^m (m != n) vanish mod p.

    Only applies when ``k = p^n``; returns an empty list otherwise.
    """
    fac = factorize(k)
    if len(fac) != 1:
        return []
    p, n = fac[0]
    out = []
    for m in range(1, n):
        cls = table.classes_of_order(p**m)
        if cls:
            out.append(Congruence(tuple(cls), p, f"order-{p**m} classes sum = 0 mod {p}"))
    return out


def chi_on_unit(table: AnyTable, chi: int, t: AugmentationTuple) -> Cyclotomic:
    """``chi(u) = sum nu_c chi(h_c)`` for the unit described by ``t`` (0-based chi)."""
    total = Cyclotomic.rational(0)
    for c, nu in t.entries:
        total = total + table.value(chi, c) * nu
    return total


def _check_applicable(table: AnyTable, k: int) -> None:
    if isinstance(table, BrauerTable) and k % table.prime == 0:
        raise ValueError(f"{table.label} cannot be used for units of order {k} (p divides k)")


def mu_linear_form(
    table: AnyTable,
    chi: int,
    k: int,
    l: int,
    pa: PowerAssignment,
    variables: Sequence[int] | None = None,
) -> LinearForm:
    """The linear form ``k * mu_l(u, chi)`` in the unknown partial augmentations of u.

    ``chi`` is the 0-based row index; ``pa`` must hold a tuple for every order
    ``k/d`` with ``1 < d < k``.
    """
    _check_applicable(table, k)
    base = table.base
    if variables is None:
        variables = admissible_classes(base, k)
    coeffs = []
    for c in variables:
        a = _linear_coeff(table, chi, k, l % k, c)
        if a:
            coeffs.append((c, a))
    constant = Fraction(0)
    for d in divisors(k)[1:]:
        e = k // d
        if e not in pa:
            raise KeyError(f"power assignment lacks a tuple for order {e} (needed for k={k})")
        constant += _power_term(table, chi, e, l % e, pa[e])
    return LinearForm(constant, tuple(coeffs), table.label, chi + 1, l % k)


@lru_cache(maxsize=None)
def _linear_coeff(table: AnyTable, chi: int, k: int, l: int, c: int) -> Fraction:
    return (table.value(chi, c) * Cyclotomic.root(-l, k)).trace(k)


@lru_cache(maxsize=None)
def _power_term(table: AnyTable, chi: int, e: int, l: int, t: AugmentationTuple) -> Fraction:
    # zeta_k^(-d l) is a primitive e-th root raised to -l
    return (chi_on_unit(table, chi, t) * Cyclotomic.root(-l, e)).trace(e)


def build_system(
    tables: Sequence[AnyTable],
    k: int,
    pa: PowerAssignment,
    ls: Iterable[int] | None = None,
) -> ConstraintSystem:
    """All mu_l forms of every applicable table, plus the linear side conditions.

    Brauer tables whose prime divides ``k`` are skipped.
    """
    if not tables:
        raise ValueError("build_system needs at least one table")
    base = tables[0].base
    variables = admissible_classes(base, k)
    system = ConstraintSystem(k, variables)
    if k == 1:
        return system
    system.equalities.append(berman_constraint(variables))
    system.congruences.extend(prime_power_divisibility(base, k))
    lrange = list(range(k)) if ls is None else list(ls)
    for table in tables:
        if isinstance(table, BrauerTable) and k % table.prime == 0:
            continue
        for chi in range(len(table.characters)):
            system.degrees[(table.label, chi + 1)] = table.degree(chi)
            for l in lrange:
                system.forms.append(mu_linear_form(table, chi, k, l, pa, variables))
    return system


def applicable(tables: Sequence[AnyTable], k: int) -> list[AnyTable]:
    return [t for t in tables if not (isinstance(t, BrauerTable) and k % t.prime == 0)]
