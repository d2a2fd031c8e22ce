"""Concept graph operations for the Conceptualize stage.

Concepts are born in the waiting area (from a summary highlight or the '+'
button), get placed onto the 2-D canvas, and can be connected with undirected
lines. Cascade rules keep the structure consistent: pulling a concept off the
canvas or deleting it removes its edges and its question-group attachments,
while questions already generated from it are retained for teacher review.
"""

from __future__ import annotations

import math

from .errors import (
    BlankLabelError,
    BlankSpanError,
    DuplicateEdgeError,
    InvalidSpanError,
    NoApprovedSummaryError,
    NonFiniteCoordinateError,
    NotFoundError,
    NotInGraphError,
    SelfEdgeError,
)
from .models import Concept, Edge, HighlightSpan, SessionState, new_id
from .store import SessionStore


def _copy(concept: Concept) -> Concept:
    return Concept.from_dict(concept.to_dict())


def _require_concept(state: SessionState, concept_id: str) -> Concept:
    concept = state.graph.concepts.get(concept_id)
    if concept is None:
        raise NotFoundError(f"no concept {concept_id}")
    return concept


def create_concept_from_highlight(
    store: SessionStore, session_id: str, start: int, end: int
) -> Concept:
    with store.mutate(session_id) as state:
        if state.summary is None or not state.summary.approved:
            raise NoApprovedSummaryError("highlighting needs an approved summary")
        text = state.summary.text
        if not (0 <= start < end <= len(text)):
            raise InvalidSpanError(
                f"span ({start}, {end}) out of range for summary of length {len(text)}"
            )
        label = text[start:end].strip()
        if not label:
            raise BlankSpanError(f"span ({start}, {end}) selects only whitespace")
        concept = Concept(
            id=new_id(),
            label=label,
            origin="highlight",
            span=HighlightSpan(start=start, end=end, summary_revision=state.summary.revision),
            area="waiting",
        )
        state.graph.concepts[concept.id] = concept
        return _copy(concept)


def create_custom_concept(store: SessionStore, session_id: str, label: str) -> Concept:
    cleaned = label.strip()
    if not cleaned:
        raise BlankLabelError("concept label is blank")
    with store.mutate(session_id) as state:
        concept = Concept(id=new_id(), label=cleaned, origin="custom", area="waiting")
        state.graph.concepts[concept.id] = concept
        return _copy(concept)


def place_concept(
    store: SessionStore, session_id: str, concept_id: str, x: float, y: float
) -> Concept:
    """Move a concept onto the canvas, or reposition it; edges are untouched."""
    if not (isinstance(x, (int, float)) and isinstance(y, (int, float))):
        raise NonFiniteCoordinateError("coordinates must be numbers")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFiniteCoordinateError(f"coordinates must be finite, got ({x}, {y})")
    with store.mutate(session_id) as state:
        concept = _require_concept(state, concept_id)
        concept.area = "graph"
        concept.x = float(x)
        concept.y = float(y)
        return _copy(concept)


def return_to_waiting(store: SessionStore, session_id: str, concept_id: str) -> Concept:
    """Pull a concept back off the canvas; cascades edges and attachments."""
    with store.mutate(session_id) as state:
        concept = _require_concept(state, concept_id)
        if not concept.in_graph:
            raise NotInGraphError(f"concept {concept_id} is not on the graph")
        _cascade_detach(state, concept_id)
        concept.area = "waiting"
        concept.x = None
        concept.y = None
        return _copy(concept)


def connect_concepts(store: SessionStore, session_id: str, a: str, b: str) -> Edge:
    if a == b:
        raise SelfEdgeError("cannot connect a concept to itself")
    with store.mutate(session_id) as state:
        first = _require_concept(state, a)
        second = _require_concept(state, b)
        for concept in (first, second):
            if not concept.in_graph:
                raise NotInGraphError(f"concept {concept.id} is not on the graph")
        if state.graph.edge_between(a, b) is not None:
            raise DuplicateEdgeError(f"concepts {a} and {b} are already connected")
        lo, hi = sorted((a, b))
        edge = Edge(id=new_id(), a=lo, b=hi)
        state.graph.edges[edge.id] = edge
        return Edge.from_dict(edge.to_dict())


def disconnect(store: SessionStore, session_id: str, edge_id: str) -> None:
    with store.mutate(session_id) as state:
        if edge_id not in state.graph.edges:
            raise NotFoundError(f"no edge {edge_id}")
        del state.graph.edges[edge_id]


def remove_concept(store: SessionStore, session_id: str, concept_id: str) -> None:
    """Delete a concept; its edges and group attachments go with it."""
    with store.mutate(session_id) as state:
        _require_concept(state, concept_id)
        _cascade_detach(state, concept_id)
        del state.graph.concepts[concept_id]


def _cascade_detach(state: SessionState, concept_id: str) -> None:
    for edge in state.graph.edges_at(concept_id):
        del state.graph.edges[edge.id]
    for group in state.groups:
        if concept_id in group.attached:
            group.attached.remove(concept_id)
