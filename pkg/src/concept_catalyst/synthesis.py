"""Question groups, generation, teacher review, and the question bank.

A group is a click-to-attach set of canvas concepts. Generation builds a
prompt from the approved summary, the attached labels, and the edges whose
both endpoints are attached, then appends exactly ``questions_per_group``
pending questions (regeneration appends, never replaces). Review is free and
reversible; the bank is always exactly the accepted questions in acceptance
order, with accepted_at kept dense (1..k) by renumbering on removal.
"""

from __future__ import annotations

from typing import Optional

from . import llm
from .errors import (
    ConceptNotInGraphError,
    EmptyGroupError,
    EmptyTextError,
    GenerationInFlightError,
    NoApprovedSummaryError,
    NotFoundError,
)
from .models import Question, QuestionGroup, ReviewStatus, SessionState, new_id
from .store import SessionStore

VERDICTS = ("accept", "reject", "modify")


def _copy_group(group: QuestionGroup) -> QuestionGroup:
    return QuestionGroup.from_dict(group.to_dict())


def create_group(store: SessionStore, session_id: str) -> QuestionGroup:
    with store.mutate(session_id) as state:
        if state.summary is None or not state.summary.approved:
            raise NoApprovedSummaryError("question groups need an approved summary")
        group = QuestionGroup(id=new_id())
        state.groups.append(group)
        return _copy_group(group)


def toggle_concept_in_group(
    store: SessionStore, session_id: str, group_id: str, concept_id: str
) -> QuestionGroup:
    """Click semantics: attach if absent, detach if present."""
    with store.mutate(session_id) as state:
        group = state.find_group(group_id)
        if group is None:
            raise NotFoundError(f"no question group {group_id}")
        concept = state.graph.concepts.get(concept_id)
        if concept is None:
            raise NotFoundError(f"no concept {concept_id}")
        if concept_id in group.attached:
            group.attached.remove(concept_id)
        else:
            if not concept.in_graph:
                raise ConceptNotInGraphError(
                    f"concept {concept_id} is in the waiting area, not on the graph"
                )
            group.attached.append(concept_id)
        return _copy_group(group)


def generate_questions(
    store: SessionStore,
    session_id: str,
    group_id: str,
    provider_cfg: llm.ProviderConfig,
    questions_per_group: int = 5,
    provider: Optional[llm.Provider] = None,
) -> list[Question]:
    """Generate one batch of questions for a group and append them as pending.

    The provider call runs outside the session lock so a slow backend never
    blocks reads or other sessions; the in-flight registry keeps a second
    generation for the same group out until this one settles.
    """
    with store.mutate(session_id) as state:
        group = state.find_group(group_id)
        if group is None:
            raise NotFoundError(f"no question group {group_id}")
        if not group.attached:
            raise EmptyGroupError("attach at least one concept before generating")
        if not store.begin_generation(session_id, group_id):
            raise GenerationInFlightError(f"group {group_id} already has a generation in flight")
        summary_text = state.summary.text if state.summary else ""
        labels = [state.graph.concepts[cid].label for cid in group.attached]
        # Relations go into the prompt in attachment order (stored endpoint
        # order is an id artifact), so identical teacher actions render
        # identical prompts.
        order = {cid: i for i, cid in enumerate(group.attached)}
        relations = []
        for e in state.graph.edges.values():
            if e.a in order and e.b in order:
                lo, hi = sorted((e.a, e.b), key=order.__getitem__)
                relations.append(
                    (state.graph.concepts[lo].label, state.graph.concepts[hi].label)
                )

    try:
        texts = llm.request_questions(
            summary_text, labels, relations, questions_per_group, provider_cfg, provider
        )
        with store.mutate(session_id) as state:
            group = state.find_group(group_id)
            if group is None:
                raise NotFoundError(f"question group {group_id} vanished during generation")
            batch = [
                Question(id=new_id(), group_id=group_id, original_text=t, current_text=t)
                for t in texts
            ]
            group.questions.extend(batch)
            group.generation_count += 1
            return [Question.from_dict(q.to_dict()) for q in batch]
    finally:
        store.end_generation(session_id, group_id)


def review_question(
    store: SessionStore,
    session_id: str,
    question_id: str,
    verdict: str,
    new_text: Optional[str] = None,
) -> Question:
    """Apply one teacher verdict: accept, reject, or modify(new_text).

    Accepting appends to the bank (position len(bank)+1); rejecting an
    accepted question removes it and renumbers the rest down so positions
    stay dense; modify rewrites current_text wherever the question stands,
    never touching original_text.
    """
    if verdict not in VERDICTS:
        raise ValueError(f"unknown verdict {verdict!r}")
    with store.mutate(session_id) as state:
        question = state.find_question(question_id)
        if question is None:
            raise NotFoundError(f"no question {question_id}")

        if verdict == "accept":
            if question.status is not ReviewStatus.ACCEPTED:
                position = len(state.bank()) + 1
                question.status = ReviewStatus.ACCEPTED
                question.accepted_at = position
        elif verdict == "reject":
            if question.status is ReviewStatus.ACCEPTED:
                _renumber_after_removal(state, question.accepted_at)
            question.status = ReviewStatus.REJECTED
            question.accepted_at = None
        else:
            cleaned = (new_text or "").strip()
            if not cleaned:
                raise EmptyTextError("modified question text is empty")
            question.current_text = cleaned

        return Question.from_dict(question.to_dict())


def _renumber_after_removal(state: SessionState, removed_position: int) -> None:
    for q in state.all_questions():
        if q.accepted_at is not None and q.accepted_at > removed_position:
            q.accepted_at -= 1


def question_bank(store: SessionStore, session_id: str) -> list[Question]:
    """Accepted questions in acceptance order; pure read."""
    state = store.get_session(session_id)
    return state.bank()
