"""Ordinary and Brauer character tables: data model, JSON ingestion, validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any, Sequence

from .cyclo import Cyclotomic, factorize, prime_divisors


class TableError(ValueError):
    """A character-table document failed schema or consistency validation."""


@dataclass(frozen=True)
class ConjugacyClass:
    name: str
    element_order: int
    size: int


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group_name: str
    group_order: int
    classes: tuple[ConjugacyClass, ...]
    power_maps: dict[int, tuple[int, ...]]
    characters: tuple[tuple[Cyclotomic, ...], ...]
    report_order: tuple[int, ...] = ()

    kind = "ordinary"

    @property
    def label(self) -> str:
        return "ordinary"

    @property
    def base(self) -> "CharacterTable":
        return self

    @property
    def exponent(self) -> int:
        e = 1
        for c in self.classes:
            e = _lcm(e, c.element_order)
        return e

    def class_index(self, name: str) -> int:
        for i, c in enumerate(self.classes):
            if c.name == name:
                return i
        raise KeyError(f"no class named {name!r} in {self.group_name}")

    def order_of(self, c: int) -> int:
        return self.classes[c].element_order

    def value(self, chi: int, c: int) -> Cyclotomic:
        """Value of character ``chi`` (0-based row) on class ``c`` (base index)."""
        return self.characters[chi][c]

    def degree(self, chi: int) -> int:
        return int(self.characters[chi][0].terms.get(0, 0))

    def power_class(self, c: int, m: int) -> int:
        if m < 0:
            raise ValueError("power exponent must be non-negative")
        o = self.classes[c].element_order
        m %= o
        if m == 0:
            return 0
        for p, e in factorize(m):
            for _ in range(e):
                if p in self.power_maps:
                    c = self.power_maps[p][c]
                else:
                    c = self._galois_class(c, p)
        return c

    def _galois_class(self, c: int, j: int) -> int:
        # j is coprime to the exponent here, so g -> g^j permutes classes of equal
        # order and is read off the columns: chi(g^j) = sigma_j(chi(g)).
        key = (c, j % self.classes[c].element_order)
        cache = self.__dict__.setdefault("_galois_cache", {})
        if key not in cache:
            o = self.classes[c].element_order
            want = []
            for row in self.characters:
                v = row[c]
                big = _lcm(v.order, o)
                want.append(v.rescale_order(big).galois_conjugate(_lift_unit(j, o, big)))
            hits = [
                d for d in self.classes_of_order(o)
                if all(row[d] == w for row, w in zip(self.characters, want))
            ]
            if len(hits) != 1:
                raise ValueError(f"cannot determine the {j}-th power of class {self.classes[c].name}")
            cache[key] = hits[0]
        return cache[key]

    def classes_of_order(self, k: int) -> list[int]:
        return [i for i, c in enumerate(self.classes) if c.element_order == k]

    def coordinates(self) -> tuple[int, ...]:
        """Non-identity class indices in reporting order."""
        return self.report_order or tuple(range(1, len(self.classes)))

    def __repr__(self) -> str:
        return f"CharacterTable({self.group_name!r}, {len(self.classes)} classes)"


@dataclass(frozen=True, eq=False)
class BrauerTable:
    prime: int
    base: CharacterTable
    class_indices: tuple[int, ...]
    characters: tuple[tuple[Cyclotomic, ...], ...]
    name: str = ""
    _column: dict[int, int] = field(default_factory=dict, repr=False)

    kind = "brauer"

    def __post_init__(self):
        self._column.update({c: j for j, c in enumerate(self.class_indices)})

    @property
    def label(self) -> str:
        return f"BCT({self.prime})"

    @property
    def classes(self) -> list[ConjugacyClass]:
        return [self.base.classes[c] for c in self.class_indices]

    def value(self, chi: int, c: int) -> Cyclotomic:
        try:
            return self.characters[chi][self._column[c]]
        except KeyError:
            name = self.base.classes[c].name
            raise ValueError(f"{self.label} has no value on {self.prime}-singular class {name}") from None

    def degree(self, chi: int) -> int:
        return int(self.characters[chi][0].terms.get(0, 0))

    def __repr__(self) -> str:
        return f"BrauerTable({self.base.group_name!r}, p={self.prime})"


AnyTable = CharacterTable | BrauerTable


# --- ingestion -------------------------------------------------------------


def _read(document: str | Path | dict) -> dict:
    if isinstance(document, dict):
        return document
    text = Path(document).read_text(encoding="utf-8") if isinstance(document, Path) else document
    if not text.strip():
        raise TableError("empty table document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"table document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise TableError("table document must be a JSON object")
    return doc


def _require(doc: dict, key: str, typ, where: str = "document"):
    if key not in doc:
        raise TableError(f"{where}: missing required field {key!r}")
    val = doc[key]
    if not isinstance(val, typ) or isinstance(val, bool):
        raise TableError(f"{where}: field {key!r} has wrong type {type(val).__name__}")
    return val


def _parse_rows(rows: Any, ncols: int, class_names: Sequence[str]) -> tuple[tuple[Cyclotomic, ...], ...]:
    if not isinstance(rows, list) or not rows:
        raise TableError("'characters' must be a non-empty list of rows")
    out = []
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != ncols:
            raise TableError(f"character {i}: expected {ncols} values, got {row!r:.60}")
        vals = []
        for j, v in enumerate(row):
            try:
                vals.append(Cyclotomic.from_json(v))
            except (TypeError, ValueError) as exc:
                raise TableError(f"character {i}, class {class_names[j]}: {exc}") from None
        deg = vals[0]
        q = deg.terms.get(0, Fraction(0))
        if not deg.is_rational_constant() or q.denominator != 1 or q <= 0:
            raise TableError(f"character {i}: degree {deg!r} is not a positive integer")
        out.append(tuple(vals))
    return tuple(out)


def load_table(document: str | Path | dict) -> CharacterTable:
    """Parse and validate an ordinary character-table document.

    ``document`` may be JSON text, a :class:`~pathlib.Path`, or an already
    decoded dict.
    """
    doc = _read(document)
    name = _require(doc, "name", str)
    order = _require(doc, "order", int)
    raw_classes = _require(doc, "classes", list)
    if not raw_classes:
        raise TableError("'classes' must not be empty")
    classes = []
    for i, rc in enumerate(raw_classes):
        where = f"class #{i}"
        if not isinstance(rc, dict):
            raise TableError(f"{where}: expected an object")
        cname = _require(rc, "name", str, where)
        corder = _require(rc, "order", int, where)
        csize = _require(rc, "size", int, where)
        if corder < 1 or csize < 1:
            raise TableError(f"class {cname}: order and size must be positive")
        if order % corder:
            raise TableError(f"class {cname}: element order {corder} does not divide |G| = {order}")
        classes.append(ConjugacyClass(cname, corder, csize))
    names = [c.name for c in classes]
    if len(set(names)) != len(names):
        raise TableError("class names are not unique")
    if classes[0].element_order != 1 or any(c.element_order == 1 for c in classes[1:]):
        raise TableError("exactly one class (the first) must have element order 1")
    if classes[0].size != 1:
        raise TableError(f"identity class {classes[0].name} must have size 1")
    total = sum(c.size for c in classes)
    if total != order:
        raise TableError(f"class sizes sum to {total}, but the group order is {order}")

    exponent = 1
    for c in classes:
        exponent = _lcm(exponent, c.element_order)
    raw_maps = doc.get("powermaps", {})
    if not isinstance(raw_maps, dict):
        raise TableError("'powermaps' must be an object keyed by prime")
    power_maps: dict[int, tuple[int, ...]] = {}
    for key, images in raw_maps.items():
        try:
            p = int(key)
        except ValueError:
            raise TableError(f"power map key {key!r} is not an integer") from None
        if not isinstance(images, list) or len(images) != len(classes):
            raise TableError(f"power map {p}: expected {len(classes)} images")
        for i, img in enumerate(images):
            if not isinstance(img, int) or not 0 <= img < len(classes):
                raise TableError(f"power map {p}, class {names[i]}: bad image {img!r}")
            o = classes[i].element_order
            want = o // gcd(o, p)
            if classes[img].element_order != want:
                raise TableError(
                    f"power map {p}, class {names[i]}: image {names[img]} has order "
                    f"{classes[img].element_order}, expected {want}"
                )
        power_maps[p] = tuple(images)
    for p in prime_divisors(exponent):
        if p not in power_maps:
            raise TableError(f"missing power map for prime {p} (divides the exponent {exponent})")

    characters = _parse_rows(doc.get("characters"), len(classes), names)

    report_order: tuple[int, ...] = ()
    if "report_order" in doc:
        ro = doc["report_order"]
        try:
            report_order = tuple(names.index(n) for n in ro)
        except (ValueError, TypeError):
            raise TableError(f"report_order names unknown classes: {ro!r}") from None
        if sorted(report_order) != list(range(1, len(classes))):
            raise TableError("report_order must list every non-identity class exactly once")

    return CharacterTable(name, order, tuple(classes), power_maps, characters, report_order)


def load_brauer(document: str | Path | dict, base: CharacterTable) -> BrauerTable:
    doc = _read(document)
    p = _require(doc, "prime", int)
    if p < 2 or len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
        raise TableError(f"'prime' must be a prime, got {p}")
    if base.group_order % p:
        raise TableError(f"prime {p} does not divide |{base.group_name}| = {base.group_order}")
    names = _require(doc, "classes", list)
    idx = []
    for n in names:
        try:
            c = base.class_index(n)
        except KeyError:
            raise TableError(f"BCT({p}): unknown class name {n!r}") from None
        if base.classes[c].element_order % p == 0:
            raise TableError(f"BCT({p}): class {n} is {p}-singular")
        idx.append(c)
    if len(set(idx)) != len(idx):
        raise TableError(f"BCT({p}): duplicate class names")
    characters = _parse_rows(doc.get("characters"), len(idx), names)
    return BrauerTable(p, base, tuple(idx), characters, doc.get("name", ""))


# --- validation ------------------------------------------------------------


def validate_orthogonality(table: CharacterTable) -> list[str]:
    """Exact first orthogonality relation; returns human-readable violations."""
    violations = []
    rows = table.characters
    sizes = [c.size for c in table.classes]
    conj = [[v.conjugate() for v in row] for row in rows]
    for a, chi in enumerate(rows):
        for b in range(a, len(rows)):
            s = Cyclotomic.rational(0)
            for i, size in enumerate(sizes):
                s = s + chi[i] * conj[b][i] * size
            want = table.group_order if a == b else 0
            if not s == want:
                violations.append(
                    f"<chi{a + 1}, chi{b + 1}>: class sum is {s!r}, expected {want}"
                )
    if len(rows) != len(table.classes):
        violations.append(f"{len(rows)} characters for {len(table.classes)} classes")
    return violations


def _lift_unit(j: int, o: int, big: int) -> int:
    """A residue congruent to ``j`` mod ``o`` that is a unit mod ``big``."""
    while gcd(j, big) != 1:
        j += o
    return j


def validate_galois(table: AnyTable) -> list[str]:
    """Check ``chi(g^j) == sigma_j(chi(g))`` for every unit ``j`` mod the class order.

    This ties the stored power maps to the stored values, which catches most
    transcription slips in either.
    """
    base = table.base
    cols = list(getattr(table, "class_indices", range(len(base.classes))))
    violations = []
    for c in cols:
        o = base.order_of(c)
        for j in range(2, o):
            if gcd(j, o) != 1:
                continue
            img = base.power_class(c, j)
            for chi in range(len(table.characters)):
                v = table.value(chi, c)
                big = _lcm(v.order, o)
                if not table.value(chi, img) == v.rescale_order(big).galois_conjugate(_lift_unit(j, o, big)):
                    violations.append(
                        f"{table.label} chi{chi + 1}: value on {base.classes[img].name} is not "
                        f"sigma_{j} of the value on {base.classes[c].name}"
                    )
    return violations


def validate_brauer(table: BrauerTable) -> list[str]:
    """Structural checks on a Brauer table beyond what loading enforces."""
    base = table.base
    violations = []
    regular = [i for i, c in enumerate(base.classes) if c.element_order % table.prime]
    missing = sorted(set(regular) - set(table.class_indices))
    if missing:
        violations.append(
            f"{table.label}: p-regular classes missing: {[base.classes[i].name for i in missing]}"
        )
    if len(table.characters) != len(regular):
        violations.append(
            f"{table.label}: {len(table.characters)} Brauer characters for {len(regular)} p-regular classes"
        )
    if missing:
        # the Galois check would look up the absent columns
        return violations
    return violations + validate_galois(table)


def table_summary(table: CharacterTable) -> dict:
    return {
        "name": table.group_name,
        "order": table.group_order,
        "exponent": table.exponent,
        "classes": [c.name for c in table.classes],
    }


DATA_DIR = Path(__file__).with_name("data")


def bundled(name: str) -> Path:
    """Path to a fixture shipped with the package, e.g. ``bundled("m11.json")``."""
    return DATA_DIR / name


def load_m11() -> tuple[CharacterTable, dict[int, BrauerTable]]:
    """The shipped M11 ordinary table and its Brauer tables keyed by prime."""
    table = load_table(bundled("m11.json"))
    brauer = {p: load_brauer(bundled(f"m11mod{p}.json"), table) for p in (2, 3, 5, 11)}
    return table, brauer
