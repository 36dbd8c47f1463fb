"""Exact arithmetic in cyclotomic fields.

A :class:`Cyclotomic` is stored as a sparse rational combination of powers of
``e(1/n) = exp(2*pi*i/n)``.  No canonical basis reduction is performed, so two
equal numbers may have different term maps; equality is decided with trace
probes instead.  Everything the Luthar-Passi forms need (products, Galois
conjugates, traces down to Q) is exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` as ``((p, e), ...)`` with increasing p."""
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi expects n >= 1, got {n}")
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError(f"moebius expects n >= 1, got {n}")
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=4096)
def ramanujan_sum(m: int, a: int) -> int:
    """Ramanujan sum c_m(a), i.e. the rational trace of ``e(a/m)`` from Q(zeta_m).

    Uses the closed form ``mu(m/g) * phi(m) / phi(m/g)`` with ``g = gcd(a, m)``.
    """
    if m < 1:
        raise ValueError(f"ramanujan_sum expects m >= 1, got {m}")
    g = gcd(a % m, m)  # gcd(0, m) == m
    q = m // g
    return moebius(q) * euler_phi(m) // euler_phi(q)


class Cyclotomic:
    """Immutable element ``sum(coeff[a] * e(a/order))`` of Q(zeta_order)."""

    __slots__ = ("_order", "_terms")

    def __init__(self, order: int, terms: Mapping[int, Number] | Iterable[tuple[int, Number]] = ()):
        if order < 1:
            raise ValueError(f"cyclotomic order must be positive, got {order}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for a, c in items:
            a %= order
            acc[a] = acc.get(a, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_terms", {a: c for a, c in sorted(acc.items()) if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    def __reduce__(self):
        return (Cyclotomic, (self._order, tuple(self._terms.items())))

    # constructors

    @classmethod
    def rational(cls, q: Number, order: int = 1) -> "Cyclotomic":
        return cls(order, {0: q})

    @classmethod
    def root(cls, a: int, n: int) -> "Cyclotomic":
        """The root of unity ``e(a/n)``."""
        return cls(n, {a: 1})

    @classmethod
    def coerce(cls, x: "Cyclotomic | Number") -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.rational(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Cyclotomic")

    # accessors

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_rational_constant(self) -> bool:
        """True when the stored form is ``q * e(0)`` (a sufficient, not necessary, test)."""
        return set(self._terms) <= {0}

    # structural operations

    def rescale_order(self, n2: int) -> "Cyclotomic":
        if n2 % self._order:
            raise ValueError(f"cannot embed order {self._order} into order {n2}: not a multiple")
        f = n2 // self._order
        return Cyclotomic(n2, {a * f: c for a, c in self._terms.items()})

    def galois_conjugate(self, j: int) -> "Cyclotomic":
        """Apply ``e(1/n) -> e(j/n)``; ``j = -1`` is complex conjugation."""
        if gcd(j, self._order) != 1:
            raise ValueError(f"Galois exponent {j} is not coprime to the order {self._order}")
        return Cyclotomic(self._order, {a * j: c for a, c in self._terms.items()})

    def conjugate(self) -> "Cyclotomic":
        return self.galois_conjugate(-1)

    def _common(self, other: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        n = _lcm(self._order, other._order)
        return self.rescale_order(n), other.rescale_order(n)

    # arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        x, y = self._common(other)
        merged = dict(x._terms)
        for a, c in y._terms.items():
            merged[a] = merged.get(a, 0) + c
        return Cyclotomic(x._order, merged)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self._order, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self._order, {a: c * other for a, c in self._terms.items()})
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        x, y = self._common(other)
        n = x._order
        prod: dict[int, Fraction] = {}
        for a, c in x._terms.items():
            for b, d in y._terms.items():
                k = (a + b) % n
                prod[k] = prod.get(k, 0) + c * d
        return Cyclotomic(n, prod)

    __rmul__ = __mul__

    # traces and comparison

    def trace(self, m: int | None = None) -> Fraction:
        """Trace from Q(zeta_m) down to Q (``m`` defaults to the stored order).

        When the stored order does not divide ``m`` the value is traced in the
        compositum and divided by the relative degree; this is only meaningful
        if the value actually lies in Q(zeta_m), which callers guarantee.
        """
        if m is None:
            m = self._order
        if m < 1:
            raise ValueError(f"trace field Q(zeta_{m}) is not defined")
        big = _lcm(self._order, m)
        x = self.rescale_order(big)
        total = sum((c * ramanujan_sum(big, a) for a, c in x._terms.items()), Fraction(0))
        if big != m:
            total /= euler_phi(big) // euler_phi(m)
        return total

    def is_zero(self) -> bool:
        n = self._order
        for b in range(n):
            if (self * Cyclotomic.root(-b, n)).trace() != 0:
                return False
        return True

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # equality is semantic, not structural

    def __complex__(self) -> complex:
        import cmath

        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * a / self._order) for a, c in self._terms.items()),
            0j,
        )

    def __repr__(self) -> str:
        if not self._terms:
            return "Cyclotomic(0)"
        parts = []
        for a, c in self._terms.items():
            parts.append(f"{c}" if a == 0 else f"{c}*e({a}/{self._order})")
        return "Cyclotomic(" + " + ".join(parts) + ")"

    # serialization (fixture value format)

    def to_json(self):
        if self.is_rational_constant():
            q = self._terms.get(0, Fraction(0))
            if q.denominator == 1:
                return int(q)
        return {
            "n": self._order,
            "terms": [[c.numerator, c.denominator, a] for a, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, value) -> "Cyclotomic":
        if isinstance(value, bool):
            raise TypeError("boolean is not a character value")
        if isinstance(value, int):
            return cls.rational(value)
        if isinstance(value, dict) and set(value) == {"n", "terms"}:
            n = value["n"]
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"bad cyclotomic order {n!r}")
            terms = []
            for t in value["terms"]:
                if len(t) != 3 or not all(isinstance(v, int) and not isinstance(v, bool) for v in t):
                    raise ValueError(f"bad cyclotomic term {t!r}; expected [num, den, exp]")
                num, den, exp = t
                if den == 0:
                    raise ValueError("zero denominator in cyclotomic term")
                terms.append((exp, Fraction(num, den)))
            return cls(n, terms)
        raise TypeError(f"unrecognized character value {value!r}")


def trace_to_rationals(x: Cyclotomic, m: int | None = None) -> Fraction:
    return x.trace(m)


def mul(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    return x * y


def galois_conjugate(x: Cyclotomic, j: int) -> Cyclotomic:
    return x.galois_conjugate(j)


def rescale_order(x: Cyclotomic, n2: int) -> Cyclotomic:
    return x.rescale_order(n2)
