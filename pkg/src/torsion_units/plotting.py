"""Figures for a run report, written to files with the Agg backend."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STATUS_COLORS = {
    "realized-by-group-element": "#4477aa",
    "survives-nontrivially": "#ee7733",
    "excluded": "#bbbbbb",
}

RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    # fixed metadata keeps repeated renders identical
    "svg.hashsalt": "torsion-units",
}


def _draw_graph(ax, graph: dict, title: str) -> None:
    verts = graph["vertices"]
    n = len(verts)
    pos = {
        p: (math.cos(2 * math.pi * i / max(n, 1) + math.pi / 2), math.sin(2 * math.pi * i / max(n, 1) + math.pi / 2))
        for i, p in enumerate(verts)
    }
    for p, q in graph["edges"]:
        (x0, y0), (x1, y1) = pos[p], pos[q]
        ax.plot([x0, x1], [y0, y1], color="#333333", lw=1.5, zorder=1)
    for p, (x, y) in pos.items():
        ax.scatter([x], [y], s=500, color="white", edgecolor="#333333", zorder=2)
        ax.text(x, y, str(p), ha="center", va="center", zorder=3)
    ax.set_title(title)
    ax.set_xlim(-1.5, 1.5)
    ax.set_ylim(-1.5, 1.5)
    ax.set_aspect("equal")
    ax.axis("off")


def plot_prime_graphs(report: dict, path: Path) -> Path:
    pg = report["prime_graphs"]
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 2, figsize=(6, 3))
        _draw_graph(axes[0], pg["group"], f"prime graph of {report['group']}")
        _draw_graph(axes[1], pg["units"], "prime graph of V(ZG)")
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
        plt.close(fig)
    return path


def plot_solution_counts(report: dict, path: Path) -> Path:
    orders = [o for o in report["orders"] if o["order"] > 1 and not o["pruned"]]
    labels = [str(o["order"]) for o in orders]
    counts = [len(o["tuples"]) for o in orders]
    colors = [STATUS_COLORS.get(o["status"], "#000000") for o in orders]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.bar(labels, counts, color=colors)
        for i, o in enumerate(orders):
            if o["status"] == "excluded":
                ax.text(i, 0.05, "x", ha="center", va="bottom", color="#666666")
        ax.set_xlabel("unit order k")
        ax.set_ylabel("admissible tuples")
        handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in STATUS_COLORS.values()]
        ax.legend(handles, list(STATUS_COLORS), frameon=False, fontsize=7)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
        plt.close(fig)
    return path


def render_figures(report: dict, outdir: str | Path, fmt: str = "png") -> list[Path]:
    """Write every figure the report supports into ``outdir``; return the paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = report["group"].lower()
    paths = [plot_solution_counts(report, out / f"{stem}_solution_counts.{fmt}")]
    if "prime_graphs" in report:
        paths.append(plot_prime_graphs(report, out / f"{stem}_prime_graphs.{fmt}"))
    return paths
