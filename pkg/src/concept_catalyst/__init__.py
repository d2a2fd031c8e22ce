"""Concept Catalyst: teacher-in-control authoring of LLM-assisted scaffolding questions.

A session walks three stages (summarize, conceptualize, synthesize): summarize
or type the design challenge, highlight and connect its concepts on a canvas,
then generate, review, and print scaffolding questions.
"""

__version__ = "0.1.0"

from .models import (  # noqa: F401
    Concept,
    ConceptGraph,
    Edge,
    Question,
    QuestionGroup,
    ReviewStatus,
    SessionState,
    Stage,
    Summary,
)
from .store import SessionStore  # noqa: F401
