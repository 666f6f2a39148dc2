"""Core domain model: entities, enumerations, validation, session lifecycle.

Everything else in the package builds on the types defined here.  Entities
are plain dataclasses; each persisted entity carries a ``record_version``
that the store bumps on every committed mutation.
"""

from __future__ import annotations

import calendar
import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from functools import total_ordering

from .errors import (
    BAD_DATE,
    CROSS_PATIENT_REFERENCE,
    EMPTY_DESCRIPTION,
    EMPTY_FIELD,
    GDS_OUT_OF_RANGE,
    ILLEGAL_TRANSITION,
    MOOD_OUT_OF_RANGE,
    PARTICIPATION_OUT_OF_RANGE,
    SCORE_OUTSIDE_INSTRUMENT_RANGE,
    UNKNOWN_RELATED_PERSON,
    DomainError,
    FieldError,
    ValidationFailure,
)

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")


def is_valid_email(text: str) -> bool:
    """Loose addr-spec check: one @, non-empty local and dotted domain."""
    return bool(_EMAIL_RE.match(text))


class LifeStage(Enum):
    """Five biography phases, in chapter order."""

    CHILDHOOD = "childhood"
    ADOLESCENCE = "adolescence"
    YOUNG_ADULT = "young_adult"
    ADULT = "adult"
    OLDER_ADULT = "older_adult"

    @property
    def order(self) -> int:
        return _LIFE_STAGE_ORDER[self]

    @property
    def label(self) -> str:
        return self.value.replace("_", " ").title()


_LIFE_STAGE_ORDER = {s: i for i, s in enumerate(LifeStage)}


class PreservationStatus(Enum):
    PRESERVED = "preserved"
    AT_RISK = "at_risk"
    LOST = "lost"


class EmotionValence(Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"


class MediaKind(Enum):
    PHOTO = "photo"
    IMAGE = "image"
    AUDIO = "audio"
    VIDEO = "video"

    @property
    def is_visual(self) -> bool:
        return self in (MediaKind.PHOTO, MediaKind.IMAGE)


class SessionStatus(Enum):
    PLANNED = "planned"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    CANCELLED = "cancelled"


class OverallImpression(Enum):
    IMPROVED = "improved"
    STABLE = "stable"
    WORSENED = "worsened"


_PRESERVATION_ALIASES = {
    "preserved": PreservationStatus.PRESERVED,
    "memory preserved": PreservationStatus.PRESERVED,
    "at_risk": PreservationStatus.AT_RISK,
    "atrisk": PreservationStatus.AT_RISK,
    "at risk": PreservationStatus.AT_RISK,
    "at risk of loss": PreservationStatus.AT_RISK,
    "lost": PreservationStatus.LOST,
}

_IMPRESSION_ALIASES = {
    "improved": OverallImpression.IMPROVED,
    "stable": OverallImpression.STABLE,
    "remains stable": OverallImpression.STABLE,
    "worsened": OverallImpression.WORSENED,
}


def _enum_aliases(enum_cls) -> dict:
    out = {}
    for member in enum_cls:
        out[member.value] = member
        out[member.name.lower()] = member
        out[member.value.replace("_", " ")] = member
        out[member.name.replace("_", "").lower()] = member
    return out


def parse_life_stage(raw) -> LifeStage:
    if isinstance(raw, LifeStage):
        return raw
    key = str(raw).strip().lower()
    try:
        return _enum_aliases(LifeStage)[key]
    except KeyError:
        raise DomainError(EMPTY_FIELD, f"unknown life stage: {raw!r}")


def parse_preservation(raw) -> PreservationStatus:
    if isinstance(raw, PreservationStatus):
        return raw
    key = str(raw).strip().lower()
    aliases = dict(_enum_aliases(PreservationStatus))
    aliases.update(_PRESERVATION_ALIASES)
    try:
        return aliases[key]
    except KeyError:
        raise DomainError(EMPTY_FIELD, f"unknown preservation status: {raw!r}")


def parse_emotion(raw) -> EmotionValence:
    if isinstance(raw, EmotionValence):
        return raw
    try:
        return _enum_aliases(EmotionValence)[str(raw).strip().lower()]
    except KeyError:
        raise DomainError(EMPTY_FIELD, f"unknown emotion valence: {raw!r}")


def parse_impression(raw) -> OverallImpression:
    if isinstance(raw, OverallImpression):
        return raw
    key = str(raw).strip().lower()
    aliases = dict(_enum_aliases(OverallImpression))
    aliases.update(_IMPRESSION_ALIASES)
    try:
        return aliases[key]
    except KeyError:
        raise DomainError(EMPTY_FIELD, f"unknown overall impression: {raw!r}")


@total_ordering
@dataclass(frozen=True)
class PartialDate:
    """A calendar date whose month and day may be unknown.

    Elderly memories are often year-only; missing parts default to 1 for
    ordering, which keeps comparison a total order consistent with calendar
    order whenever full dates are present.
    """

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if not (1850 <= self.year <= 2100):
            raise DomainError(BAD_DATE, f"year {self.year} outside 1850-2100")
        if self.day is not None and self.month is None:
            raise DomainError(BAD_DATE, "day requires month")
        if self.month is not None and not (1 <= self.month <= 12):
            raise DomainError(BAD_DATE, f"month {self.month} outside 1-12")
        if self.day is not None:
            last = calendar.monthrange(self.year, self.month)[1]
            if not (1 <= self.day <= last):
                raise DomainError(
                    BAD_DATE, f"day {self.day} invalid for {self.year}-{self.month}"
                )

    def normal_form(self) -> tuple[int, int, int]:
        return (self.year, self.month or 1, self.day or 1)

    def __lt__(self, other: "PartialDate") -> bool:
        return self.normal_form() < other.normal_form()

    def __str__(self) -> str:
        if self.day is not None:
            return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"
        if self.month is not None:
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}"


def parse_partial_date(raw) -> PartialDate:
    """Accepts PartialDate, {'year':..,'month':..,'day':..} or 'YYYY[-MM[-DD]]'."""
    if isinstance(raw, PartialDate):
        return raw
    if isinstance(raw, dict):
        try:
            return PartialDate(
                year=int(raw["year"]),
                month=int(raw["month"]) if raw.get("month") is not None else None,
                day=int(raw["day"]) if raw.get("day") is not None else None,
            )
        except (KeyError, TypeError, ValueError):
            raise DomainError(BAD_DATE, f"bad date: {raw!r}")
    if isinstance(raw, str):
        parts = raw.strip().split("-")
        try:
            nums = [int(p) for p in parts if p != ""]
        except ValueError:
            raise DomainError(BAD_DATE, f"bad date: {raw!r}")
        if not 1 <= len(nums) <= 3:
            raise DomainError(BAD_DATE, f"bad date: {raw!r}")
        return PartialDate(*nums)
    if isinstance(raw, int):
        return PartialDate(year=raw)
    raise DomainError(BAD_DATE, f"bad date: {raw!r}")


@dataclass
class TherapistAccount:
    id: str
    display_name: str
    email: str
    credential_hash: bytes = b""
    record_version: int = 0


@dataclass
class Patient:
    id: str
    display_name: str
    assigned_therapists: set[str]
    file_number: str | None = None
    marital_status: str | None = None
    employment_history: str | None = None
    leisure_interests: list[str] = field(default_factory=list)
    record_version: int = 0

    def __post_init__(self):
        self.assigned_therapists = set(self.assigned_therapists)
        if not self.assigned_therapists:
            raise DomainError(EMPTY_FIELD, "patient needs at least one therapist")


@dataclass
class RelatedPerson:
    id: str
    patient_id: str
    display_name: str
    relationship_type: str
    contact_email: str | None = None
    profession: str | None = None
    remarks: str | None = None
    is_caregiver: bool = False
    record_version: int = 0

    def __post_init__(self):
        self.relationship_type = self.relationship_type.strip()
        if not self.relationship_type:
            raise DomainError(EMPTY_FIELD, "relationship_type must be non-empty")
        if self.contact_email is not None and not is_valid_email(self.contact_email):
            raise DomainError("BAD_EMAIL", f"not an email: {self.contact_email!r}")


# Seed vocabularies; both are open sets.
SEED_CATEGORIES = ("family", "friends", "work", "hobbies", "pets")
SEED_RELATIONSHIPS = ("spouse", "child", "sibling", "friend", "professional-caregiver")


@dataclass
class MediaAsset:
    id: str
    kind: MediaKind
    content_hash: str
    media_type_label: str
    byte_length: int
    description: str | None = None
    location: str | None = None
    date: PartialDate | None = None
    life_stage: LifeStage | None = None
    record_version: int = 0

    def __post_init__(self):
        if not re.fullmatch(r"[0-9a-f]{64}", self.content_hash):
            raise DomainError(EMPTY_FIELD, "content_hash must be 64 lowercase hex chars")
        if self.byte_length <= 0:
            raise DomainError(EMPTY_FIELD, "byte_length must be positive")


@dataclass
class Memory:
    id: str
    patient_id: str
    description: str
    date: PartialDate
    life_stage: LifeStage
    preservation_status: PreservationStatus
    emotion_valence: EmotionValence
    mood_score: int
    location: str | None = None
    categories: set[str] = field(default_factory=set)
    related_person_ids: set[str] = field(default_factory=set)
    media: list[str] = field(default_factory=list)
    record_version: int = 0


def normalize_categories(raw_categories) -> set[str]:
    """Lowercase, trim, drop empties, deduplicate."""
    out = set()
    for cat in raw_categories or ():
        cleaned = str(cat).strip().lower()
        if cleaned:
            out.add(cleaned)
    return out


def validate_memory(
    draft: dict,
    *,
    memory_id: str,
    patient_id: str,
    related_person_owner: dict[str, str],
    record_version: int = 0,
) -> Memory:
    """Validate a raw memory draft into a Memory, or raise every violation.

    ``related_person_owner`` maps known RelatedPerson ids to their patient id;
    it is how cross-patient references are caught.
    """
    errors: list[FieldError] = []

    description = str(draft.get("description") or "")
    if not description.strip():
        errors.append(FieldError("description", EMPTY_DESCRIPTION, "description is empty"))

    date = None
    try:
        date = parse_partial_date(draft.get("date"))
    except DomainError as exc:
        errors.append(FieldError("date", BAD_DATE, exc.message))

    life_stage = None
    try:
        life_stage = parse_life_stage(draft.get("life_stage"))
    except DomainError as exc:
        errors.append(FieldError("life_stage", BAD_DATE, exc.message))

    preservation = None
    try:
        preservation = parse_preservation(draft.get("preservation_status", "preserved"))
    except DomainError as exc:
        errors.append(FieldError("preservation_status", EMPTY_FIELD, exc.message))

    emotion = None
    try:
        emotion = parse_emotion(draft.get("emotion_valence", "neutral"))
    except DomainError as exc:
        errors.append(FieldError("emotion_valence", EMPTY_FIELD, exc.message))

    mood_raw = draft.get("mood_score", 0)
    try:
        mood = int(mood_raw)
    except (TypeError, ValueError):
        mood = -1
    if not 0 <= mood <= 10:
        errors.append(
            FieldError("mood_score", MOOD_OUT_OF_RANGE, f"mood_score {mood_raw!r} outside 0-10")
        )

    related_ids = set(draft.get("related_person_ids") or ())
    for rid in sorted(related_ids):
        owner = related_person_owner.get(rid)
        if owner is None:
            errors.append(
                FieldError("related_person_ids", UNKNOWN_RELATED_PERSON, f"unknown person {rid}")
            )
        elif owner != patient_id:
            errors.append(
                FieldError(
                    "related_person_ids",
                    CROSS_PATIENT_REFERENCE,
                    f"person {rid} belongs to another patient",
                )
            )

    if errors:
        raise ValidationFailure(errors)

    return Memory(
        id=memory_id,
        patient_id=patient_id,
        description=description,
        location=(str(draft["location"]) if draft.get("location") else None),
        date=date,
        life_stage=life_stage,
        categories=normalize_categories(draft.get("categories")),
        related_person_ids=related_ids,
        preservation_status=preservation,
        emotion_valence=emotion,
        mood_score=mood,
        media=list(draft.get("media") or ()),
        record_version=record_version,
    )


@dataclass(frozen=True)
class AmendmentEntry:
    at: datetime
    memory_id: str
    summary: str


@dataclass
class Session:
    id: str
    patient_id: str
    scheduled_at: datetime
    objectives: str
    description: str
    barriers: str | None = None
    facilitators: str | None = None
    activity_sequence: list[str] = field(default_factory=list)
    session_location: str | None = None
    planned_memory_ids: list[str] = field(default_factory=list)
    planned_media_ids: set[str] = field(default_factory=set)
    status: SessionStatus = SessionStatus.PLANNED
    amendment_log: list[AmendmentEntry] = field(default_factory=list)
    record_version: int = 0

    def worked_memory_ids(self) -> set[str]:
        """Memories a report may reference: planned plus amended-in."""
        return set(self.planned_memory_ids) | {e.memory_id for e in self.amendment_log}


LEGAL_TRANSITIONS = {
    (SessionStatus.PLANNED, SessionStatus.IN_PROGRESS),
    (SessionStatus.PLANNED, SessionStatus.CANCELLED),
    (SessionStatus.IN_PROGRESS, SessionStatus.COMPLETED),
}


def check_transition(current: SessionStatus, target: SessionStatus) -> None:
    if (current, target) not in LEGAL_TRANSITIONS:
        raise DomainError(
            ILLEGAL_TRANSITION, f"cannot move session from {current.value} to {target.value}"
        )


@dataclass(frozen=True)
class MemoryOutcome:
    memory_id: str
    observed_preservation: PreservationStatus
    emotional_reaction: EmotionValence
    notes: str | None = None


@dataclass
class SessionReport:
    session_id: str
    overall_impression: str
    memory_outcomes: list[MemoryOutcome]
    participation_score: int
    repeat_recommended: bool
    created_at: datetime
    future_proposals: str | None = None
    record_version: int = 0

    def __post_init__(self):
        if not self.overall_impression.strip():
            raise DomainError(EMPTY_FIELD, "overall_impression must be non-empty")
        if not 0 <= self.participation_score <= 10:
            raise DomainError(
                PARTICIPATION_OUT_OF_RANGE,
                f"participation_score {self.participation_score} outside 0-10",
            )


@dataclass(frozen=True)
class InstrumentResult:
    instrument_name: str
    score: float
    range_min: float
    range_max: float

    def __post_init__(self):
        if not self.range_min < self.range_max:
            raise DomainError(
                SCORE_OUTSIDE_INSTRUMENT_RANGE,
                f"{self.instrument_name}: range {self.range_min}-{self.range_max} is empty",
            )
        if not self.range_min <= self.score <= self.range_max:
            raise DomainError(
                SCORE_OUTSIDE_INSTRUMENT_RANGE,
                f"{self.instrument_name}: score {self.score} outside "
                f"{self.range_min}-{self.range_max}",
            )


@dataclass(frozen=True)
class Signature:
    therapist_id: str
    signed_at: datetime


@dataclass
class ClinicalAssessment:
    id: str
    patient_id: str
    assessed_at: PartialDate
    diagnosis_type: str
    overall_impression: OverallImpression
    signature: Signature
    diagnosis_date: PartialDate | None = None
    gds_stage: int | None = None
    instrument_results: list[InstrumentResult] = field(default_factory=list)
    nonstandard_instruments: str | None = None
    observations: str | None = None
    record_version: int = 0

    def __post_init__(self):
        if self.gds_stage is not None and not 1 <= self.gds_stage <= 7:
            raise DomainError(GDS_OUT_OF_RANGE, f"gds_stage {self.gds_stage} outside 1-7")
