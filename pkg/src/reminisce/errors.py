"""Error taxonomy shared by every layer.

Domain operations raise :class:`DomainError` (single failure) or
:class:`ValidationFailure` (all field violations at once).  The HTTP layer
maps error codes to status codes via ``HTTP_STATUS_BY_CODE``.
"""

from __future__ import annotations

from dataclasses import dataclass

# Validation (HTTP 400)
MOOD_OUT_OF_RANGE = "MOOD_OUT_OF_RANGE"
EMPTY_DESCRIPTION = "EMPTY_DESCRIPTION"
BAD_DATE = "BAD_DATE"
UNKNOWN_RELATED_PERSON = "UNKNOWN_RELATED_PERSON"
CROSS_PATIENT_REFERENCE = "CROSS_PATIENT_REFERENCE"
INVALID_FILTER = "INVALID_FILTER"
EMPTY_QUERY = "EMPTY_QUERY"
GDS_OUT_OF_RANGE = "GDS_OUT_OF_RANGE"
SCORE_OUTSIDE_INSTRUMENT_RANGE = "SCORE_OUTSIDE_INSTRUMENT_RANGE"
PARTICIPATION_OUT_OF_RANGE = "PARTICIPATION_OUT_OF_RANGE"
OUTCOME_FOR_UNWORKED_MEMORY = "OUTCOME_FOR_UNWORKED_MEMORY"
FOREIGN_MEMORY = "FOREIGN_MEMORY"
UNSUPPORTED_MEDIA_TYPE = "UNSUPPORTED_MEDIA_TYPE"
EMPTY_CONTENT = "EMPTY_CONTENT"
NO_CONTACT_EMAIL = "NO_CONTACT_EMAIL"
BAD_EMAIL = "BAD_EMAIL"
EMPTY_FIELD = "EMPTY_FIELD"

# Auth (401 / 403)
UNAUTHENTICATED = "UNAUTHENTICATED"
FORBIDDEN = "FORBIDDEN"
UNASSIGNED_THERAPIST = "UNASSIGNED_THERAPIST"

# Missing entities (404)
UNKNOWN_PATIENT = "UNKNOWN_PATIENT"
UNKNOWN_SESSION = "UNKNOWN_SESSION"
UNKNOWN_MEMORY = "UNKNOWN_MEMORY"
UNKNOWN_ASSESSMENT = "UNKNOWN_ASSESSMENT"
UNKNOWN_ENTITY = "UNKNOWN_ENTITY"
REPORT_MISSING = "REPORT_MISSING"
MEDIA_UNRESOLVED = "MEDIA_UNRESOLVED"

# State / concurrency conflicts (409)
ILLEGAL_TRANSITION = "ILLEGAL_TRANSITION"
SESSION_NOT_LIVE = "SESSION_NOT_LIVE"
VERSION_CONFLICT = "VERSION_CONFLICT"
NOT_EMPTY = "NOT_EMPTY"
SCHEMA_TOO_NEW = "SCHEMA_TOO_NEW"
HASH_MISMATCH = "HASH_MISMATCH"

HTTP_STATUS_BY_CODE = {
    MOOD_OUT_OF_RANGE: 400,
    EMPTY_DESCRIPTION: 400,
    BAD_DATE: 400,
    UNKNOWN_RELATED_PERSON: 400,
    CROSS_PATIENT_REFERENCE: 400,
    INVALID_FILTER: 400,
    EMPTY_QUERY: 400,
    GDS_OUT_OF_RANGE: 400,
    SCORE_OUTSIDE_INSTRUMENT_RANGE: 400,
    PARTICIPATION_OUT_OF_RANGE: 400,
    OUTCOME_FOR_UNWORKED_MEMORY: 400,
    FOREIGN_MEMORY: 400,
    UNSUPPORTED_MEDIA_TYPE: 400,
    EMPTY_CONTENT: 400,
    NO_CONTACT_EMAIL: 400,
    BAD_EMAIL: 400,
    EMPTY_FIELD: 400,
    SCHEMA_TOO_NEW: 400,
    HASH_MISMATCH: 400,
    UNAUTHENTICATED: 401,
    FORBIDDEN: 403,
    UNASSIGNED_THERAPIST: 403,
    UNKNOWN_PATIENT: 404,
    UNKNOWN_SESSION: 404,
    UNKNOWN_MEMORY: 404,
    UNKNOWN_ASSESSMENT: 404,
    UNKNOWN_ENTITY: 404,
    REPORT_MISSING: 404,
    MEDIA_UNRESOLVED: 404,
    ILLEGAL_TRANSITION: 409,
    SESSION_NOT_LIVE: 409,
    VERSION_CONFLICT: 409,
    NOT_EMPTY: 409,
}


@dataclass(frozen=True)
class FieldError:
    """One violated rule on one field."""

    field: str
    code: str
    message: str = ""


class DomainError(Exception):
    """A single-cause domain failure with a machine-readable code."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code
        self.message = message or code


class ValidationFailure(DomainError):
    """Carries every violated field of a draft at once."""

    def __init__(self, errors: list[FieldError]):
        codes = ", ".join(sorted({e.code for e in errors}))
        super().__init__(errors[0].code if errors else "INVALID", codes)
        self.errors = list(errors)
