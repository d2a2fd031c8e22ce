"""File-based session report for the CLI.

Writes the printable exports next to machine-friendly ones: the plaintext and
PDF handouts, a delimited (CSV) dump of the question bank, and a matplotlib
rendering of the teacher's concept map.
"""

from __future__ import annotations

import csv
from datetime import datetime
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import export
from .models import SessionState
from .store import SessionStore


def write_report(
    store: SessionStore,
    session_id: str,
    out_dir: Path,
    include_summary: bool = True,
    page_size: str = "letter",
    generated_at: Optional[datetime] = None,
) -> list[Path]:
    """Write questions.txt/.pdf/.csv and concept_map.png; returns the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    state = store.get_session(session_id)
    doc = export.build_preview(store, session_id, generated_at=generated_at)

    txt_path = out_dir / "questions.txt"
    txt_path.write_text(export.render_plaintext(doc, include_summary), encoding="utf-8")

    pdf_path = out_dir / "questions.pdf"
    pdf_path.write_bytes(export.render_pdf(doc, page_size, include_summary))

    csv_path = out_dir / "questions.csv"
    _write_bank_csv(state, csv_path)

    png_path = out_dir / "concept_map.png"
    _write_concept_map(state, png_path)

    return [txt_path, pdf_path, csv_path, png_path]


def _write_bank_csv(state: SessionState, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp)
        writer.writerow(["position", "question", "original_text", "group_id", "concepts"])
        for q in state.bank():
            group = state.find_group(q.group_id)
            labels = []
            if group:
                labels = [
                    state.graph.concepts[cid].label
                    for cid in group.attached
                    if cid in state.graph.concepts
                ]
            writer.writerow([q.accepted_at, q.current_text, q.original_text, q.group_id, "; ".join(labels)])


def _write_concept_map(state: SessionState, path: Path) -> None:
    placed = [c for c in state.graph.concepts.values() if c.in_graph]
    fig, ax = plt.subplots(figsize=(8, 6))
    ax.set_title("Concept map")
    if placed:
        by_id = {c.id: c for c in placed}
        for edge in state.graph.edges.values():
            a, b = by_id.get(edge.a), by_id.get(edge.b)
            if a and b:
                ax.plot([a.x, b.x], [a.y, b.y], color="#8899aa", linewidth=1.5, zorder=1)
        xs = [c.x for c in placed]
        ys = [c.y for c in placed]
        ax.scatter(xs, ys, s=900, color="#dce9f7", edgecolors="#3b6ea5", zorder=2)
        for c in placed:
            ax.annotate(
                c.label,
                (c.x, c.y),
                ha="center",
                va="center",
                fontsize=8,
                zorder=3,
                wrap=True,
            )
        ax.margins(0.2)
    else:
        ax.text(0.5, 0.5, "No concepts placed on the graph", ha="center", va="center")
    waiting = sum(1 for c in state.graph.concepts.values() if not c.in_graph)
    if waiting:
        ax.set_xlabel(f"{waiting} concept(s) still in the waiting area")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
