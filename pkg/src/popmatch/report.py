"""Figures for the command line reports.

Uses the non-interactive Agg backend; every function writes one image
file and returns its path.
"""

from __future__ import annotations

from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .graph import Matching, make_edge  # noqa: E402
from .instance import Instance  # noqa: E402
from .lp import DualVector  # noqa: E402
from .verdict import StructuralWitness  # noqa: E402


def _positions(inst: Instance) -> Dict:
    pos = {}
    for col, side in ((0.0, inst.left), (1.0, inst.right)):
        n = len(side)
        for i, v in enumerate(side):
            pos[v] = (col, 1.0 - (i + 0.5) / n)
    return pos


def draw_instance(
    inst: Instance,
    matching: Optional[Matching],
    path: str,
    dual: Optional[DualVector] = None,
    witness: Optional[StructuralWitness] = None,
    title: Optional[str] = None,
) -> str:
    """Bipartite drawing: matched edges bold, witness edges dashed red,
    dual values next to the vertices."""
    pos = _positions(inst)
    highlight = {make_edge(*e) for e in witness.edges} if witness is not None and len(witness.payload) > 1 else set()
    marked = set(witness.payload) if witness is not None else set()
    height = max(2.5, 0.6 * max(len(inst.left), len(inst.right)))
    fig, ax = plt.subplots(figsize=(5, height))
    for a, h in inst.edges:
        (x0, y0), (x1, y1) = pos[a], pos[h]
        if matching is not None and (a, h) in matching.edges:
            style = dict(color="black", lw=2.5, zorder=2)
        else:
            style = dict(color="0.75", lw=1, zorder=1)
        ax.plot([x0, x1], [y0, y1], **style)
        if (a, h) in highlight:
            ax.plot([x0, x1], [y0, y1], color="tab:red", lw=1.5, ls="--", zorder=3)
        rank = inst.rank(a, h) + 1
        ax.text(x0 + 0.12 * (x1 - x0), y0 + 0.12 * (y1 - y0), str(rank), fontsize=7, color="0.4")
    for v, (x, y) in pos.items():
        face = "tab:red" if v in marked else ("white" if v.synthetic else "tab:blue")
        ax.scatter([x], [y], s=220, c=face, edgecolors="black", zorder=4)
        ha = "right" if x == 0 else "left"
        dx = -0.06 if x == 0 else 0.06
        label = v.name if dual is None else f"{v.name}  y={dual.y.get(v, 0)}"
        if x == 0 and dual is not None:
            label = f"y={dual.y.get(v, 0)}  {v.name}"
        ax.text(x + dx, y, label, ha=ha, va="center", fontsize=9)
    ax.set_xlim(-0.6, 1.6)
    ax.set_ylim(0, 1)
    ax.axis("off")
    ax.set_title(title or f"{inst.variant.value} instance", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def draw_fuzz_summary(summary: dict, path: str) -> str:
    """Checks run and failures per criterion, plus structural witness kinds."""
    criteria = summary["criteria"]
    names = list(criteria)
    checked = [criteria[c]["checked"] for c in names]
    failed = [criteria[c]["failed"] for c in names]
    kinds = summary.get("witness_kinds", {})
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), gridspec_kw={"width_ratios": [3, 2]})
    ax = axes[0]
    ys = range(len(names))
    ax.barh(ys, checked, color="tab:green", label="checked")
    ax.barh(ys, failed, color="tab:red", label="failed")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("checks")
    ax.legend(fontsize=8)
    ax.set_title(f"{summary['variant']} seed={summary['seed']} instances={summary['instances']}", fontsize=10)
    ax = axes[1]
    if kinds:
        ax.bar(range(len(kinds)), list(kinds.values()), color="tab:orange")
        ax.set_xticks(range(len(kinds)))
        ax.set_xticklabels(list(kinds), rotation=30, ha="right", fontsize=8)
    ax.set_title("witness kinds (non-popular candidates)", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
