"""Run reports: a versioned JSON document, its text rendering and golden diffs.

Reports hold no timing or host data, so identical inputs give byte-identical
JSON.  The layout is described in ``docs/report-schema.md``.
"""

from __future__ import annotations

import json
from typing import Sequence

from .cyclo import divisors
from .grouptable import AnyTable, CharacterTable
from .help_engine import AugmentationTuple, PowerAssignment
from .primegraph import PrimeGraph, group_prime_graph, kimmerle_check, unit_prime_graph
from .solver import EXCLUDED, Catalogue

SCHEMA = "torsion-units-report"
VERSION = 1


def tuple_json(table: CharacterTable, t: AugmentationTuple) -> dict[str, int]:
    return {table.classes[c].name: v for c, v in t.entries}


def powers_json(table: CharacterTable, pa: PowerAssignment) -> dict[str, dict[str, int]]:
    return {str(e): tuple_json(table, t) for e, t in pa.tuples}


def _unsolved_reason(k: int, table: CharacterTable, verdicts) -> str:
    if table.exponent % k:
        return f"order does not divide the exponent {table.exponent}"
    dead = [d for d in divisors(k)[:-1] if d in verdicts and verdicts[d].status == EXCLUDED]
    return f"a proper power has excluded order {max(dead)}" if dead else "not solved"


def _kills(sol) -> dict[str, int]:
    kills: dict[str, int] = {}
    for c in sol.cases:
        if c.eliminated_by:
            kills[c.eliminated_by] = kills.get(c.eliminated_by, 0) + 1
    return kills


def order_json(table: CharacterTable, cat: Catalogue, k: int, detail: bool = True) -> dict:
    verdicts = {n: v for n, (_, v) in cat.results.items()}
    if k not in cat.results:
        return {
            "order": k,
            "status": EXCLUDED,
            "rationally_conjugate": False,
            "pruned": True,
            "reason": _unsolved_reason(k, table, verdicts),
            "tuples": [],
        }
    sol, verdict = cat.results[k]
    out = {
        "order": k,
        "status": verdict.status,
        "rationally_conjugate": verdict.rationally_conjugate,
        "pruned": False,
        "flagged": sol.flagged,
        "tuples": [tuple_json(table, t) for t in sol.tuples],
        "case_count": len(sol.cases),
        "eliminations": _kills(sol),
    }
    if detail:
        out["admitted_by"] = [
            [powers_json(table, pa) for pa in sol.admitting(t)] for t in sol.tuples
        ]
        out["cases"] = [
            {
                "powers": powers_json(table, c.choice),
                "eliminated_by": c.eliminated_by,
                "branches": [
                    {
                        "powers": powers_json(table, b.assignment),
                        "tuples": [tuple_json(table, t) for t in b.tuples],
                        "eliminated_by": b.eliminated_by,
                    }
                    for b in c.branches
                ],
            }
            for c in sol.cases
        ]
    return out


def graphs_json(table: CharacterTable, cat: Catalogue) -> tuple[dict, PrimeGraph, PrimeGraph]:
    verdicts = {n: v for n, (_, v) in cat.results.items()}
    g = group_prime_graph(table)
    u = unit_prime_graph(table, verdicts)
    ok, diff = kimmerle_check(g, u)
    data = {
        "group": g.to_json(),
        "units": u.to_json(),
        "kimmerle": ok,
        "difference": {"vertices": diff["vertices"], "edges": [list(e) for e in diff["edges"]]},
    }
    return data, g, u


def build_report(
    tables: Sequence[AnyTable],
    cat: Catalogue,
    orders: Sequence[int],
    cap: int,
    full: bool,
    detail: bool = True,
) -> dict:
    base = tables[0].base
    report = {
        "schema": SCHEMA,
        "version": VERSION,
        "group": base.group_name,
        "group_order": base.group_order,
        "exponent": base.exponent,
        "config": {"cap": cap, "tables": [t.label for t in tables], "mode": "all" if full else "orders"},
        "coordinates": [base.classes[c].name for c in base.coordinates()],
        "orders": [order_json(base, cat, k, detail) for k in orders],
        "pruned": sorted(cat.pruned),
    }
    if full:
        report["prime_graphs"] = graphs_json(base, cat)[0]
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# --- text ----------------------------------------------------------------------


def _fmt_tuple(coords: Sequence[str], t: dict[str, int]) -> str:
    return "(" + ", ".join(str(t.get(c, 0)) for c in coords) + ")"


def render_text(report: dict) -> str:
    coords = report["coordinates"]
    lines = [
        f"group {report['group']}  order {report['group_order']}  exponent {report['exponent']}",
        f"tables: {', '.join(report['config']['tables'])}  cap |nu| <= {report['config']['cap']}",
        "coordinates: (" + ", ".join(coords) + ")",
        "",
    ]
    for o in report["orders"]:
        head = f"order {o['order']}: {o['status']}"
        if o["status"] != EXCLUDED:
            head += "  rationally conjugate" if o["rationally_conjugate"] else "  not known rationally conjugate"
        if o.get("flagged"):
            head += "  [FLAGGED: bounds capped]"
        lines.append(head)
        if o["pruned"]:
            lines.append(f"    pruned: {o['reason']}")
            continue
        for t in o["tuples"]:
            lines.append(f"    {_fmt_tuple(coords, t)}")
        kills = o["eliminations"]
        if o["case_count"] > 1 or kills:
            lines.append(f"    {o['case_count']} power cases, {sum(kills.values())} eliminated")
            for tag, n in sorted(kills.items()):
                lines.append(f"      {n} by {tag}")
    if report["pruned"]:
        lines.append("")
        lines.append("pruned orders: " + ", ".join(map(str, report["pruned"])))
    pg = report.get("prime_graphs")
    if pg:
        def edges(g):
            return ", ".join("{%d,%d}" % tuple(e) for e in g["edges"]) or "none"

        lines.append("")
        lines.append(f"prime graph of G:      vertices {pg['group']['vertices']}  edges {edges(pg['group'])}")
        lines.append(f"prime graph of V(ZG):  vertices {pg['units']['vertices']}  edges {edges(pg['units'])}")
        lines.append("Kimmerle check: " + ("holds" if pg["kimmerle"] else f"FAILS, difference {pg['difference']}"))
    return "\n".join(lines) + "\n"


# --- golden files --------------------------------------------------------------


def golden_from_report(report: dict) -> dict:
    """The part of a report that a golden file pins."""
    g = {
        "schema": SCHEMA + "-golden",
        "version": VERSION,
        "group": report["group"],
        "orders": {
            str(o["order"]): {
                "status": o["status"],
                "rationally_conjugate": o["rationally_conjugate"],
                "tuples": o["tuples"],
            }
            for o in report["orders"]
        },
    }
    if "prime_graphs" in report:
        pg = report["prime_graphs"]
        g["prime_graphs"] = {"group": pg["group"], "units": pg["units"], "kimmerle": pg["kimmerle"]}
    return g


def _tupset(ts) -> set[tuple]:
    return {tuple(sorted(t.items())) for t in ts}


def diff_golden(report: dict, golden: dict) -> list[str]:
    """Human-readable mismatches between a run and a golden file (empty if equal)."""
    out = []
    if golden.get("group") != report["group"]:
        out.append(f"group: golden {golden.get('group')!r}, run {report['group']!r}")
    run = golden_from_report(report)["orders"]
    want = golden.get("orders", {})
    for key in sorted(set(run) | set(want), key=int):
        if key not in run:
            out.append(f"order {key}: in golden file but not in this run")
            continue
        if key not in want:
            out.append(f"order {key}: not in golden file")
            continue
        r, w = run[key], want[key]
        for field in ("status", "rationally_conjugate"):
            if r[field] != w.get(field):
                out.append(f"order {key}: {field} golden {w.get(field)!r}, run {r[field]!r}")
        missing = _tupset(w.get("tuples", [])) - _tupset(r["tuples"])
        extra = _tupset(r["tuples"]) - _tupset(w.get("tuples", []))
        if missing:
            out.append(f"order {key}: tuples missing from run: {sorted(map(dict, missing), key=str)!s}")
        if extra:
            out.append(f"order {key}: tuples not in golden file: {sorted(map(dict, extra), key=str)!s}")
    if "prime_graphs" in golden and "prime_graphs" in report:
        pg = report["prime_graphs"]
        for which in ("group", "units"):
            if golden["prime_graphs"][which] != pg[which]:
                out.append(f"prime graph of {which}: golden {golden['prime_graphs'][which]}, run {pg[which]}")
        if golden["prime_graphs"].get("kimmerle") != pg["kimmerle"]:
            out.append(f"kimmerle: golden {golden['prime_graphs'].get('kimmerle')}, run {pg['kimmerle']}")
    return out
