"""Domain model: sessions, summaries, concept graphs, question groups.

One serialization lives here. ``SessionState.to_dict`` is both the snapshot
body (wrapped with a ``format_version`` tag by the store) and the HTTP
representation, so there is exactly one schema to test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional
from uuid import uuid4

from .errors import CorruptBlobError


class Stage(str, Enum):
    SUMMARIZE = "summarize"
    CONCEPTUALIZE = "conceptualize"
    SYNTHESIZE = "synthesize"


def new_id() -> str:
    return uuid4().hex


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def word_count(text: str) -> int:
    """Whitespace-delimited token count; the one definition used everywhere."""
    return len(text.split())


@dataclass
class Summary:
    text: str
    source: str  # "uploaded" | "typed"
    word_count: int
    approved: bool = False
    revision: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "source": self.source,
            "word_count": self.word_count,
            "approved": self.approved,
            "revision": self.revision,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Summary":
        return cls(
            text=d["text"],
            source=d["source"],
            word_count=d["word_count"],
            approved=d["approved"],
            revision=d["revision"],
        )


@dataclass
class HighlightSpan:
    start: int
    end: int
    summary_revision: int
    stale: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "start": self.start,
            "end": self.end,
            "summary_revision": self.summary_revision,
            "stale": self.stale,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "HighlightSpan":
        return cls(d["start"], d["end"], d["summary_revision"], d["stale"])


@dataclass
class Concept:
    id: str
    label: str
    origin: str  # "highlight" | "custom"
    span: Optional[HighlightSpan] = None  # highlight origin only
    area: str = "waiting"  # "waiting" | "graph"
    x: Optional[float] = None  # graph area only
    y: Optional[float] = None

    @property
    def in_graph(self) -> bool:
        return self.area == "graph"

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "origin": self.origin,
            "span": self.span.to_dict() if self.span else None,
            "area": self.area,
            "position": {"x": self.x, "y": self.y} if self.area == "graph" else None,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Concept":
        pos = d.get("position")
        return cls(
            id=d["id"],
            label=d["label"],
            origin=d["origin"],
            span=HighlightSpan.from_dict(d["span"]) if d.get("span") else None,
            area=d["area"],
            x=pos["x"] if pos else None,
            y=pos["y"] if pos else None,
        )


@dataclass
class Edge:
    id: str
    a: str  # concept ids, canonically ordered a < b
    b: str

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.a, self.b))

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Edge":
        return cls(d["id"], d["a"], d["b"])


@dataclass
class ConceptGraph:
    concepts: dict[str, Concept] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)

    def edges_at(self, concept_id: str) -> list[Edge]:
        return [e for e in self.edges.values() if concept_id in e.pair]

    def edge_between(self, a: str, b: str) -> Optional[Edge]:
        pair = frozenset((a, b))
        for e in self.edges.values():
            if e.pair == pair:
                return e
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "concepts": [c.to_dict() for c in self.concepts.values()],
            "edges": [e.to_dict() for e in self.edges.values()],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ConceptGraph":
        g = cls()
        for cd in d["concepts"]:
            c = Concept.from_dict(cd)
            g.concepts[c.id] = c
        for ed in d["edges"]:
            e = Edge.from_dict(ed)
            g.edges[e.id] = e
        return g


class ReviewStatus(str, Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass
class Question:
    id: str
    group_id: str
    original_text: str
    current_text: str
    status: ReviewStatus = ReviewStatus.PENDING
    accepted_at: Optional[int] = None  # dense 1-based bank position while accepted

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "group_id": self.group_id,
            "original_text": self.original_text,
            "current_text": self.current_text,
            "status": self.status.value,
            "accepted_at": self.accepted_at,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Question":
        return cls(
            id=d["id"],
            group_id=d["group_id"],
            original_text=d["original_text"],
            current_text=d["current_text"],
            status=ReviewStatus(d["status"]),
            accepted_at=d["accepted_at"],
        )


@dataclass
class QuestionGroup:
    id: str
    attached: list[str] = field(default_factory=list)  # concept ids, click order
    questions: list[Question] = field(default_factory=list)
    generation_count: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "attached": list(self.attached),
            "questions": [q.to_dict() for q in self.questions],
            "generation_count": self.generation_count,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "QuestionGroup":
        return cls(
            id=d["id"],
            attached=list(d["attached"]),
            questions=[Question.from_dict(q) for q in d["questions"]],
            generation_count=d["generation_count"],
        )


@dataclass
class SessionState:
    id: str
    stage: Stage = Stage.SUMMARIZE
    summary: Optional[Summary] = None
    graph: ConceptGraph = field(default_factory=ConceptGraph)
    groups: list[QuestionGroup] = field(default_factory=list)
    created_at: datetime = field(default_factory=utcnow)
    updated_at: datetime = field(default_factory=utcnow)

    # -- lookups -----------------------------------------------------------

    def find_group(self, group_id: str) -> Optional[QuestionGroup]:
        for g in self.groups:
            if g.id == group_id:
                return g
        return None

    def find_question(self, question_id: str) -> Optional[Question]:
        for g in self.groups:
            for q in g.questions:
                if q.id == question_id:
                    return q
        return None

    def all_questions(self) -> list[Question]:
        return [q for g in self.groups for q in g.questions]

    def bank(self) -> list[Question]:
        """Accepted questions in acceptance order; derived, never stored."""
        accepted = [q for q in self.all_questions() if q.status is ReviewStatus.ACCEPTED]
        accepted.sort(key=lambda q: q.accepted_at)
        return accepted

    # -- serialization (snapshot schema, version tag added by the store) ----

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "stage": self.stage.value,
            "summary": self.summary.to_dict() if self.summary else None,
            "graph": self.graph.to_dict(),
            "groups": [g.to_dict() for g in self.groups],
            "created_at": self.created_at.isoformat(),
            "updated_at": self.updated_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SessionState":
        try:
            return cls(
                id=d["id"],
                stage=Stage(d["stage"]),
                summary=Summary.from_dict(d["summary"]) if d.get("summary") else None,
                graph=ConceptGraph.from_dict(d["graph"]),
                groups=[QuestionGroup.from_dict(g) for g in d["groups"]],
                created_at=datetime.fromisoformat(d["created_at"]),
                updated_at=datetime.fromisoformat(d["updated_at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptBlobError(f"malformed session data: {exc}") from exc


def check_invariants(state: SessionState) -> None:
    """Assert every structural invariant; used by tests and snapshot restore.

    Raises AssertionError with a readable reason on the first violation.
    """
    if state.stage is not Stage.SUMMARIZE:
        assert state.summary is not None and state.summary.approved, (
            f"stage {state.stage.value} requires an approved summary"
        )
    if state.summary is not None:
        assert state.summary.word_count == word_count(state.summary.text), "stale word_count"
        if state.summary.approved:
            assert state.summary.text.strip(), "approved summary must be non-empty"
        assert state.summary.revision >= 1, "revision must start at 1"

    graph = state.graph
    seen_pairs: set[frozenset[str]] = set()
    for edge in graph.edges.values():
        assert edge.a != edge.b, f"self edge {edge.id}"
        assert edge.pair not in seen_pairs, f"duplicate edge pair {edge.a},{edge.b}"
        seen_pairs.add(edge.pair)
        for endpoint in (edge.a, edge.b):
            concept = graph.concepts.get(endpoint)
            assert concept is not None, f"dangling edge endpoint {endpoint}"
            assert concept.in_graph, f"edge endpoint {endpoint} not in graph area"

    for concept in graph.concepts.values():
        assert concept.label.strip(), f"blank label on {concept.id}"
        if concept.in_graph:
            assert concept.x is not None and concept.y is not None
            assert math.isfinite(concept.x) and math.isfinite(concept.y)
        else:
            assert concept.area == "waiting"
        if concept.origin == "highlight":
            assert concept.span is not None, "highlight concept without span"
            assert 0 <= concept.span.start < concept.span.end, "degenerate span"
        else:
            assert concept.origin == "custom" and concept.span is None

    for group in state.groups:
        for cid in group.attached:
            concept = graph.concepts.get(cid)
            assert concept is not None, f"group {group.id} references missing concept {cid}"
            assert concept.in_graph, f"group {group.id} references waiting concept {cid}"
        assert len(set(group.attached)) == len(group.attached), "duplicate attachment"
        if group.questions:
            assert group.generation_count >= 1, "questions without a generation"
        for q in group.questions:
            assert q.current_text, f"empty question text {q.id}"
            if q.status is ReviewStatus.ACCEPTED:
                assert q.accepted_at is not None, f"accepted {q.id} lacks accepted_at"
            else:
                assert q.accepted_at is None, f"{q.status.value} {q.id} carries accepted_at"

    positions = [q.accepted_at for q in state.bank()]
    assert positions == list(range(1, len(positions) + 1)), (
        f"bank positions not dense: {positions}"
    )
