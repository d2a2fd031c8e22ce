"""Question groups, generation semantics, review transitions, and the bank."""

import threading

import pytest

from concept_catalyst import graph, synthesis
from concept_catalyst.errors import (
    ConceptNotInGraphError,
    EmptyGroupError,
    EmptyTextError,
    GenerationInFlightError,
    NoApprovedSummaryError,
    NotFoundError,
)
from concept_catalyst.models import ReviewStatus


def _placed_concepts(store, sid, labels):
    concepts = []
    for i, label in enumerate(labels):
        concept = graph.create_custom_concept(store, sid, label)
        graph.place_concept(store, sid, concept.id, float(i * 10), 0.0)
        concepts.append(concept)
    return concepts


def test_create_group_initial(approved_session):
    store, sid = approved_session
    group = synthesis.create_group(store, sid)
    assert group.attached == []
    assert group.questions == []
    assert group.generation_count == 0


def test_groups_preserve_creation_order(approved_session):
    store, sid = approved_session
    ids = [synthesis.create_group(store, sid).id for _ in range(3)]
    assert [g.id for g in store.get_session(sid).groups] == ids


def test_create_group_requires_approved_summary(store):
    state = store.create_session()
    with pytest.raises(NoApprovedSummaryError):
        synthesis.create_group(store, state.id)


def test_toggle_is_an_involution(approved_session):
    store, sid = approved_session
    concept, = _placed_concepts(store, sid, ["load"])
    group = synthesis.create_group(store, sid)
    attached = synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    assert attached.attached == [concept.id]
    detached = synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    assert detached.attached == []


def test_toggle_preserves_order(approved_session):
    store, sid = approved_session
    a, b, c = _placed_concepts(store, sid, ["a", "b", "c"])
    group = synthesis.create_group(store, sid)
    for concept in (a, b, c):
        synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    result = synthesis.toggle_concept_in_group(store, sid, group.id, b.id)
    assert result.attached == [a.id, c.id]


def test_toggle_waiting_concept_rejected(approved_session):
    store, sid = approved_session
    concept = graph.create_custom_concept(store, sid, "waiting")
    group = synthesis.create_group(store, sid)
    with pytest.raises(ConceptNotInGraphError):
        synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)


def test_toggle_unknown_group_or_concept(approved_session):
    store, sid = approved_session
    group = synthesis.create_group(store, sid)
    with pytest.raises(NotFoundError):
        synthesis.toggle_concept_in_group(store, sid, "ghost", "ghost")
    with pytest.raises(NotFoundError):
        synthesis.toggle_concept_in_group(store, sid, group.id, "ghost")


def test_generate_exactly_five_pending(approved_session, mock_cfg):
    store, sid = approved_session
    load, span = _placed_concepts(store, sid, ["load", "span"])
    group = synthesis.create_group(store, sid)
    for concept in (load, span):
        synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    questions = synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)
    assert len(questions) == 5
    assert all(q.status is ReviewStatus.PENDING for q in questions)
    assert all(q.current_text for q in questions)
    assert store.get_session(sid).find_group(group.id).generation_count == 1


def test_generate_empty_group(approved_session, mock_cfg):
    store, sid = approved_session
    group = synthesis.create_group(store, sid)
    with pytest.raises(EmptyGroupError):
        synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)


def test_two_generations_append(approved_session, mock_cfg):
    store, sid = approved_session
    concept, = _placed_concepts(store, sid, ["load"])
    group = synthesis.create_group(store, sid)
    synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    first = synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)
    second = synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)

    refreshed = store.get_session(sid).find_group(group.id)
    assert len(refreshed.questions) == 10
    assert refreshed.generation_count == 2
    # first batch kept in place, second appended after it (mock output repeats
    # per prompt, so compare ids rather than text)
    assert [q.id for q in refreshed.questions] == [q.id for q in first + second]


def test_generation_in_flight_conflict(approved_session, mock_cfg):
    store, sid = approved_session
    concept, = _placed_concepts(store, sid, ["load"])
    group = synthesis.create_group(store, sid)
    synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)

    release = threading.Event()
    started = threading.Event()

    class _Blocking:
        provider_id = "blocking"

        def complete(self, req):
            started.set()
            release.wait(timeout=10)
            from concept_catalyst.llm import MockProvider

            return MockProvider(seed=0).complete(req)

    worker = threading.Thread(
        target=synthesis.generate_questions,
        args=(store, sid, group.id, mock_cfg, 5, _Blocking()),
    )
    worker.start()
    try:
        assert started.wait(timeout=10)
        with pytest.raises(GenerationInFlightError):
            synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)
    finally:
        release.set()
        worker.join(timeout=10)
    # settled: a new generation is allowed again
    synthesis.generate_questions(store, sid, group.id, mock_cfg, 5)
    assert len(store.get_session(sid).find_group(group.id).questions) == 10


def _group_with_questions(approved_session, mock_cfg, n=5):
    store, sid = approved_session
    concept, = _placed_concepts(store, sid, ["load"])
    group = synthesis.create_group(store, sid)
    synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
    questions = synthesis.generate_questions(store, sid, group.id, mock_cfg, n)
    return store, sid, group, questions


def test_accept_ordering(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    synthesis.review_question(store, sid, questions[0].id, "accept")
    synthesis.review_question(store, sid, questions[1].id, "accept")
    bank = synthesis.question_bank(store, sid)
    assert [q.id for q in bank] == [questions[0].id, questions[1].id]
    assert [q.accepted_at for q in bank] == [1, 2]


def test_modify_then_accept_keeps_original(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    synthesis.review_question(store, sid, questions[0].id, "modify", "What loads act on the deck?")
    synthesis.review_question(store, sid, questions[0].id, "accept")
    banked = synthesis.question_bank(store, sid)[0]
    assert banked.current_text == "What loads act on the deck?"
    assert banked.original_text == questions[0].original_text
    assert banked.original_text != banked.current_text


def test_modify_after_accept_updates_bank_in_place(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    synthesis.review_question(store, sid, questions[0].id, "accept")
    synthesis.review_question(store, sid, questions[1].id, "accept")
    synthesis.review_question(store, sid, questions[0].id, "modify", "Sharper wording?")
    bank = synthesis.question_bank(store, sid)
    assert bank[0].current_text == "Sharper wording?"
    assert [q.accepted_at for q in bank] == [1, 2]  # position unchanged


def test_modify_requires_text(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    with pytest.raises(EmptyTextError):
        synthesis.review_question(store, sid, questions[0].id, "modify", "   ")


def test_reject_then_accept_appends_at_new_position(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    synthesis.review_question(store, sid, questions[0].id, "reject")
    synthesis.review_question(store, sid, questions[1].id, "accept")
    reviewed = synthesis.review_question(store, sid, questions[0].id, "accept")
    assert reviewed.status is ReviewStatus.ACCEPTED
    bank = synthesis.question_bank(store, sid)
    assert [q.id for q in bank] == [questions[1].id, questions[0].id]
    assert [q.accepted_at for q in bank] == [1, 2]


def test_reject_accepted_removes_from_bank_and_renumbers(approved_session, mock_cfg):
    store, sid, _, questions = _group_with_questions(approved_session, mock_cfg)
    for q in questions[:3]:
        synthesis.review_question(store, sid, q.id, "accept")
    synthesis.review_question(store, sid, questions[0].id, "reject")
    bank = synthesis.question_bank(store, sid)
    assert [q.id for q in bank] == [questions[1].id, questions[2].id]
    assert [q.accepted_at for q in bank] == [1, 2]


def test_unknown_question(approved_session, mock_cfg):
    store, sid, _, _ = _group_with_questions(approved_session, mock_cfg)
    with pytest.raises(NotFoundError):
        synthesis.review_question(store, sid, "ghost", "accept")


def test_bank_empty_initially(approved_session):
    store, sid = approved_session
    assert synthesis.question_bank(store, sid) == []


def test_bank_spans_groups_in_global_order(approved_session, mock_cfg):
    store, sid = approved_session
    a, b = _placed_concepts(store, sid, ["a", "b"])
    groups = []
    for concept in (a, b):
        group = synthesis.create_group(store, sid)
        synthesis.toggle_concept_in_group(store, sid, group.id, concept.id)
        groups.append(group)
    first = synthesis.generate_questions(store, sid, groups[0].id, mock_cfg, 5)
    second = synthesis.generate_questions(store, sid, groups[1].id, mock_cfg, 5)

    synthesis.review_question(store, sid, second[0].id, "accept")
    synthesis.review_question(store, sid, first[0].id, "accept")
    synthesis.review_question(store, sid, second[1].id, "accept")
    bank = synthesis.question_bank(store, sid)
    assert [q.id for q in bank] == [second[0].id, first[0].id, second[1].id]
