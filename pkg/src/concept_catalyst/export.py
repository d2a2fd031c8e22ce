"""Final preview and printable artifacts of the approved questions.

The preview document is assembled from the approved summary and the bank;
rendering to plaintext is byte-deterministic, and rendering to PDF is
deterministic given the document (reportlab runs in invariant mode and the
visible timestamp comes from the document itself, so golden tests can inject
it).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional
from xml.sax.saxutils import escape

from reportlab.lib.pagesizes import A4, letter
from reportlab.lib.styles import getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer

from .errors import EmptyBankError, NoApprovedSummaryError, RenderFailureError
from .models import utcnow
from .store import SessionStore

DEFAULT_TITLE = "Scaffolding Questions"

PAGE_SIZES = {"letter": letter, "a4": A4}


@dataclass(frozen=True)
class ExportDocument:
    title: str
    summary_text: str
    questions: list[tuple[int, str]]  # (1-based index, current text) in bank order
    generated_at: datetime = field(default_factory=utcnow)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "summary_text": self.summary_text,
            "questions": [{"index": i, "text": t} for i, t in self.questions],
            "generated_at": self.generated_at.isoformat(),
        }


def build_preview(
    store: SessionStore,
    session_id: str,
    title: str = DEFAULT_TITLE,
    generated_at: Optional[datetime] = None,
) -> ExportDocument:
    """Assemble the export document from the approved summary and the bank."""
    state = store.get_session(session_id)
    bank = state.bank()
    if not bank:
        raise EmptyBankError("no accepted questions to export")
    if state.summary is None or not state.summary.approved:
        raise NoApprovedSummaryError("export needs an approved summary")
    return ExportDocument(
        title=title,
        summary_text=state.summary.text,
        questions=[(i, q.current_text) for i, q in enumerate(bank, start=1)],
        generated_at=generated_at or utcnow(),
    )


def _single_line(text: str) -> str:
    return " ".join(text.split())


def render_plaintext(doc: ExportDocument, include_summary: bool = True) -> str:
    """Title line, blank line, summary, blank line, then ``N. question`` lines.

    Empty title (or summary exclusion) drops that block and its separator.
    Question text is forced onto a single line.
    """
    blocks = []
    if doc.title.strip():
        blocks.append(_single_line(doc.title))
    if include_summary and doc.summary_text.strip():
        blocks.append(doc.summary_text.strip())
    blocks.append("\n".join(f"{i}. {_single_line(t)}" for i, t in doc.questions))
    return "\n\n".join(blocks) + "\n"


def render_pdf(
    doc: ExportDocument,
    page_size: str = "letter",
    include_summary: bool = True,
) -> bytes:
    """A printable PDF of the export document; raises render-failure on error."""
    try:
        styles = getSampleStyleSheet()
        story = []
        if doc.title.strip():
            story.append(Paragraph(escape(_single_line(doc.title)), styles["Title"]))
        story.append(
            Paragraph(
                escape(f"Generated {doc.generated_at.strftime('%Y-%m-%d %H:%M UTC')}"),
                styles["Italic"],
            )
        )
        story.append(Spacer(1, 0.2 * inch))
        if include_summary and doc.summary_text.strip():
            for para in doc.summary_text.split("\n"):
                if para.strip():
                    story.append(Paragraph(escape(_single_line(para)), styles["Normal"]))
            story.append(Spacer(1, 0.2 * inch))
        for index, text in doc.questions:
            story.append(Paragraph(f"{index}. {escape(_single_line(text))}", styles["Normal"]))
            story.append(Spacer(1, 0.08 * inch))

        buffer = io.BytesIO()
        pdf = SimpleDocTemplate(
            buffer,
            pagesize=PAGE_SIZES.get(page_size.lower(), letter),
            invariant=1,
            title=doc.title or DEFAULT_TITLE,
        )
        pdf.build(story)
        return buffer.getvalue()
    except Exception as exc:
        raise RenderFailureError(f"pdf rendering failed: {exc}") from exc
