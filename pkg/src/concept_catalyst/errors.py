"""Error types shared across the package.

Every error carries a stable machine-readable ``code`` that the HTTP layer
maps onto the error envelope, so callers can branch on codes instead of
matching message text.
"""

from __future__ import annotations


class CatalystError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "internal-error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class NotFoundError(CatalystError):
    code = "not-found"


class StoreFullError(CatalystError):
    code = "store-full"


class SummaryNotApprovedError(CatalystError):
    code = "summary-not-approved"


class NoApprovedSummaryError(CatalystError):
    code = "no-approved-summary"


class NoSummaryError(CatalystError):
    code = "no-summary"


class EmptyTextError(CatalystError):
    code = "empty-text"


class SerializationFailureError(CatalystError):
    code = "serialization-failure"


class CorruptBlobError(CatalystError):
    code = "corrupt-blob"


class VersionMismatchError(CatalystError):
    code = "version-mismatch"


class IdCollisionError(CatalystError):
    code = "id-collision"


class UnsupportedFormatError(CatalystError):
    code = "unsupported-format"


class UnreadableFileError(CatalystError):
    code = "unreadable-file"


class EmptyDocumentError(CatalystError):
    code = "empty-document"


class PayloadTooLargeError(CatalystError):
    code = "payload-too-large"


class EmptyConceptsError(CatalystError):
    code = "empty-concepts"


class ProviderError(CatalystError):
    code = "provider-error"


class ProviderTimeoutError(ProviderError):
    code = "timeout"


class AuthFailureError(ProviderError):
    code = "auth-failure"


class EmptyCompletionError(CatalystError):
    code = "empty-completion"


class TooFewQuestionsError(CatalystError):
    code = "too-few-questions"


class InvalidSpanError(CatalystError):
    code = "invalid-span"


class BlankSpanError(CatalystError):
    code = "blank-span"


class BlankLabelError(CatalystError):
    code = "blank-label"


class NonFiniteCoordinateError(CatalystError):
    code = "non-finite-coordinate"


class NotInGraphError(CatalystError):
    code = "not-in-graph"


class SelfEdgeError(CatalystError):
    code = "self-edge"


class DuplicateEdgeError(CatalystError):
    code = "duplicate-edge"


class ConceptNotInGraphError(CatalystError):
    code = "concept-not-in-graph"


class EmptyGroupError(CatalystError):
    code = "empty-group"


class GenerationInFlightError(CatalystError):
    code = "generation-in-flight"


class EmptyBankError(CatalystError):
    code = "empty-bank"


class RenderFailureError(CatalystError):
    code = "render-failure"


class DataDirUnwritableError(CatalystError):
    code = "data-dir-unwritable"


class InvalidRequestError(CatalystError):
    code = "invalid-request"
