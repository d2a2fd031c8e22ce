"""Export preview, plaintext format, and PDF round trips."""

import re
from datetime import datetime, timezone

import pytest

from concept_catalyst import export, graph, ingest, synthesis
from concept_catalyst.errors import EmptyBankError, NoApprovedSummaryError
from concept_catalyst.export import ExportDocument
from concept_catalyst.textextract import extract_pdf_text, normalize_text

FIXED_TS = datetime(2026, 3, 2, 12, 0, tzinfo=timezone.utc)


def _session_with_bank(approved_session, mock_cfg, accept=3):
    store, sid = approved_session
    concept = graph.create_custom_concept(store, sid, "load")
    graph.place_concept(store, sid, concept.id, 0.0, 0.0)
    group = synthesis.create_group(store, sid)
    synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    questions = synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)
    for q in questions[:accept]:
        synthesis.review_question(store, sid, q.id, "accept")
    return store, sid, questions


def test_preview_indices_dense(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=3)
    doc = export.build_preview(store, sid)
    assert [i for i, _ in doc.questions] == [1, 2, 3]
    bank = synthesis.question_bank(store, sid)
    assert [t for _, t in doc.questions] == [q.current_text for q in bank]


def test_preview_empty_bank(approved_session):
    store, sid = approved_session
    with pytest.raises(EmptyBankError):
        export.build_preview(store, sid)


def test_preview_requires_approved_summary(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg)
    ingest.edit_summary(store, sid, "Edited, so approval is gone.")
    with pytest.raises(NoApprovedSummaryError):
        export.build_preview(store, sid)


def test_preview_reflects_modify_after_accept(approved_session, mock_cfg):
    store, sid, questions = _session_with_bank(approved_session, mock_cfg, accept=1)
    synthesis.review_question(store, sid, questions[0].id, "modify", "Edited wording?")
    doc = export.build_preview(store, sid)
    assert doc.questions[0][1] == "Edited wording?"


def test_plaintext_layout(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=2)
    doc = export.build_preview(store, sid, generated_at=FIXED_TS)
    text = export.render_plaintext(doc)
    blocks = text.split("\n\n")
    assert blocks[0] == "Scaffolding Questions"
    assert blocks[1].startswith("Design a catapult")
    question_lines = blocks[2].strip().split("\n")
    assert len(question_lines) == 2
    assert all(re.match(r"^\d+\. ", line) for line in question_lines)
    assert text.endswith("\n")


def test_plaintext_excludes_summary_when_configured(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=1)
    doc = export.build_preview(store, sid)
    text = export.render_plaintext(doc, include_summary=False)
    assert "Design a catapult" not in text
    assert "1. " in text


def test_plaintext_newlines_in_question_become_spaces():
    doc = ExportDocument(
        title="T",
        summary_text="S",
        questions=[(1, "line one\nline two")],
        generated_at=FIXED_TS,
    )
    text = export.render_plaintext(doc)
    assert "1. line one line two" in text


def test_plaintext_idempotent():
    doc = ExportDocument("T", "S", [(1, "Q?"), (2, "R?")], FIXED_TS)
    assert export.render_plaintext(doc) == export.render_plaintext(doc)


def test_plaintext_empty_title_omitted():
    doc = ExportDocument("", "Summary here.", [(1, "Q?")], FIXED_TS)
    text = export.render_plaintext(doc)
    assert text.startswith("Summary here.")


def test_pdf_contains_all_questions(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=3)
    doc = export.build_preview(store, sid, generated_at=FIXED_TS)
    pdf = export.render_pdf(doc)
    assert pdf.startswith(b"%PDF")
    extracted = " ".join(normalize_text(extract_pdf_text(pdf)).split())
    assert doc.title in extracted
    for _, question in doc.questions:
        assert question in extracted
    assert "Design a catapult" in extracted


def test_pdf_sixty_questions_multipage():
    doc = ExportDocument(
        title="Scaffolding Questions",
        summary_text="A summary.",
        questions=[(i, f"Question number {i} about part {i}?") for i in range(1, 61)],
        generated_at=FIXED_TS,
    )
    pdf = export.render_pdf(doc)
    assert pdf.count(b"/Type /Page") >= 2
    extracted = " ".join(normalize_text(extract_pdf_text(pdf)).split())
    for i, question in doc.questions:
        assert question in extracted, f"question {i} missing after extraction"


def test_pdf_empty_title_renders(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=1)
    doc = export.build_preview(store, sid, title="", generated_at=FIXED_TS)
    pdf = export.render_pdf(doc)  # no render-failure
    extracted = " ".join(normalize_text(extract_pdf_text(pdf)).split())
    assert "Scaffolding Questions" not in extracted


def test_pdf_deterministic_given_document(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=2)
    doc = export.build_preview(store, sid, generated_at=FIXED_TS)
    assert export.render_pdf(doc) == export.render_pdf(doc)


def test_pdf_embeds_injected_timestamp(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=1)
    doc = export.build_preview(store, sid, generated_at=FIXED_TS)
    extracted = " ".join(normalize_text(extract_pdf_text(export.render_pdf(doc))).split())
    assert "2026-03-02" in extracted


def test_pdf_a4_page_size(approved_session, mock_cfg):
    store, sid, _ = _session_with_bank(approved_session, mock_cfg, accept=1)
    doc = export.build_preview(store, sid, generated_at=FIXED_TS)
    pdf_letter = export.render_pdf(doc, page_size="letter")
    pdf_a4 = export.render_pdf(doc, page_size="a4")
    assert b"612 792" in pdf_letter  # letter MediaBox
    assert b"595" in pdf_a4  # a4 MediaBox width
