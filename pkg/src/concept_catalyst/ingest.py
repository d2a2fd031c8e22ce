"""Document upload handling and the summary lifecycle.

Accepts an uploaded unit map (pdf/docx) or typed text, obtains an LLM summary
at an advisory target word count, and manages teacher edits and approval.
Editing a summary bumps its revision, clears approval, and marks every
highlight span created against an earlier revision as stale (the concepts and
their labels survive; only the offsets stop being trustworthy).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import llm, textextract
from .errors import (
    EmptyCompletionError,
    EmptyTextError,
    NoSummaryError,
    UnreadableFileError,
    UnsupportedFormatError,
)
from .models import SessionState, Stage, Summary, word_count
from .store import SessionStore

KNOWN_EXTENSIONS = ("pdf", "doc", "docx")


@dataclass(frozen=True)
class UploadedDocument:
    filename: str
    data: bytes

    @property
    def extension(self) -> str:
        name = self.filename.rsplit("/", 1)[-1]
        if "." not in name:
            return ""
        return name.rsplit(".", 1)[-1].lower()

    @property
    def byte_length(self) -> int:
        return len(self.data)


def extract_text(doc: UploadedDocument) -> str:
    """Reading-order text of an uploaded pdf/docx, whitespace-normalized."""
    ext = doc.extension
    if ext == "doc":
        raise UnsupportedFormatError(
            "legacy .doc files are not supported; save the document as .docx and retry"
        )
    if ext not in ("pdf", "docx"):
        shown = f".{ext}" if ext else "without an extension"
        raise UnsupportedFormatError(
            f"unsupported file type {shown}; supported types are .pdf and .docx"
        )
    if doc.byte_length == 0:
        raise UnreadableFileError("uploaded file is empty")

    # Extension is cross-checked against magic bytes before parsing.
    if ext == "pdf":
        if not doc.data.startswith(b"%PDF"):
            raise UnreadableFileError("file extension is .pdf but content is not a PDF")
        raw = textextract.extract_pdf_text(doc.data)
    else:
        if not doc.data.startswith(b"PK"):
            raise UnreadableFileError("file extension is .docx but content is not a docx archive")
        raw = textextract.extract_docx_text(doc.data)
    return textextract.require_text(raw)


def _mark_highlight_spans_stale(state: SessionState) -> None:
    for concept in state.graph.concepts.values():
        if concept.span is not None:
            concept.span.stale = True


def set_summary_text(store: SessionStore, session_id: str, text: str) -> Summary:
    """Replace the summary with typed text; approval is cleared."""
    cleaned = text.strip()
    if not cleaned:
        raise EmptyTextError("summary text is empty")
    with store.mutate(session_id) as state:
        revision = state.summary.revision + 1 if state.summary else 1
        state.summary = Summary(
            text=cleaned,
            source="typed",
            word_count=word_count(cleaned),
            approved=False,
            revision=revision,
        )
        _mark_highlight_spans_stale(state)
        result = state.summary
    return Summary.from_dict(result.to_dict())


def request_summary(
    store: SessionStore,
    session_id: str,
    raw_text: str,
    target_words: int,
    provider_cfg: llm.ProviderConfig,
    provider: Optional[llm.Provider] = None,
) -> Summary:
    """Summarize uploaded material via the gateway and store the result.

    The target word count is advisory to the model; the stored word_count is
    whatever the completion actually contains.
    """
    req = llm.build_summary_prompt(raw_text, target_words)
    completion = llm.complete(req, provider_cfg, provider)
    text = completion.text.strip()
    if not text:
        raise EmptyCompletionError("provider returned an empty summary")
    with store.mutate(session_id) as state:
        revision = state.summary.revision + 1 if state.summary else 1
        state.summary = Summary(
            text=text,
            source="uploaded",
            word_count=word_count(text),
            approved=False,
            revision=revision,
        )
        _mark_highlight_spans_stale(state)
        result = state.summary
    return Summary.from_dict(result.to_dict())


def edit_summary(store: SessionStore, session_id: str, text: str) -> Summary:
    """Teacher edit: text replaced, approval cleared, source preserved."""
    cleaned = text.strip()
    if not cleaned:
        raise EmptyTextError("summary text is empty")
    with store.mutate(session_id) as state:
        if state.summary is None:
            raise NoSummaryError("session has no summary to edit")
        state.summary.text = cleaned
        state.summary.word_count = word_count(cleaned)
        state.summary.approved = False
        state.summary.revision += 1
        _mark_highlight_spans_stale(state)
        result = state.summary
    return Summary.from_dict(result.to_dict())


def approve_summary(store: SessionStore, session_id: str) -> SessionState:
    """Approve the current summary and advance to the Conceptualize stage."""
    with store.mutate(session_id) as state:
        if state.summary is None or not state.summary.text.strip():
            raise NoSummaryError("session has no summary to approve")
        state.summary.approved = True
        state.stage = Stage.CONCEPTUALIZE
    return store.get_session(session_id)
