"""Application service: every therapist-facing operation over the store.

All mutations run through the store's optimistic version checks; callers
may pass the record version they last saw (HTTP ``If-Match``), otherwise
the current committed version is used.
"""

from __future__ import annotations

import hashlib
import secrets
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from .catalog import (
    MemoryFilter,
    RelatedPersonSort,
    SortKey,
    filter_memories,
    list_related_persons,
    search_memories,
    sort_memories,
)
from .domain import (
    AmendmentEntry,
    ClinicalAssessment,
    InstrumentResult,
    LifeStage,
    MediaAsset,
    MediaKind,
    Memory,
    MemoryOutcome,
    Patient,
    PartialDate,
    RelatedPerson,
    Session,
    SessionReport,
    SessionStatus,
    Signature,
    TherapistAccount,
    check_transition,
    is_valid_email,
    parse_emotion,
    parse_impression,
    parse_life_stage,
    parse_partial_date,
    parse_preservation,
    validate_memory,
)
from .errors import (
    BAD_EMAIL,
    EMPTY_CONTENT,
    FOREIGN_MEMORY,
    NO_CONTACT_EMAIL,
    OUTCOME_FOR_UNWORKED_MEMORY,
    SESSION_NOT_LIVE,
    UNASSIGNED_THERAPIST,
    UNKNOWN_MEMORY,
    UNKNOWN_PATIENT,
    UNKNOWN_SESSION,
    UNSUPPORTED_MEDIA_TYPE,
    DomainError,
)
from .lifestory import (
    BookLayout,
    BookOptions,
    StoryboardManifest,
    StoryboardOptions,
    compose_book,
    compose_storyboard,
    describe_query,
    select_story_entries,
)
from .outbox import OutboxEntry
from .store import BlobStore, Store


def new_id() -> str:
    return uuid.uuid4().hex


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


_MEDIA_PREFIX_KIND = {
    "image/": MediaKind.PHOTO,
    "audio/": MediaKind.AUDIO,
    "video/": MediaKind.VIDEO,
}


@dataclass(frozen=True)
class CalendarEntry:
    session_id: str
    patient_id: str
    scheduled_at: datetime
    status: SessionStatus
    title: str


@dataclass(frozen=True)
class EvolutionPoint:
    assessed_at: PartialDate
    score: float
    range_min: float
    range_max: float


class TherapyService:
    def __init__(self, store: Store, blobs: BlobStore, clock=utc_now):
        self.store = store
        self.blobs = blobs
        self.clock = clock

    # -- people ------------------------------------------------------------

    def create_therapist(
        self, display_name: str, email: str, password: str | None = None
    ) -> tuple[TherapistAccount, str]:
        """Returns the account and a fresh bearer token."""
        if not is_valid_email(email):
            raise DomainError(BAD_EMAIL, f"not an email: {email!r}")
        credential = hashlib.pbkdf2_hmac(
            "sha256", (password or secrets.token_hex(16)).encode(), b"reminisce", 50_000
        )
        account = TherapistAccount(
            id=new_id(), display_name=display_name, email=email, credential_hash=credential
        )
        self.store.upsert("therapists", account, 0)
        token = secrets.token_urlsafe(24)
        self.store.put_token(token, account.id)
        return self.store.get("therapists", account.id), token

    def create_patient(self, draft: dict) -> Patient:
        patient = Patient(
            id=new_id(),
            display_name=str(draft["display_name"]),
            file_number=draft.get("file_number"),
            marital_status=draft.get("marital_status"),
            employment_history=draft.get("employment_history"),
            leisure_interests=list(draft.get("leisure_interests") or ()),
            assigned_therapists=set(draft["assigned_therapists"]),
        )
        for tid in patient.assigned_therapists:
            if self.store.find("therapists", tid) is None:
                raise DomainError(UNASSIGNED_THERAPIST, f"unknown therapist {tid}")
        return self.store.upsert("patients", patient, 0)

    def update_patient(self, patient_id: str, changes: dict, expected_version=None) -> Patient:
        patient = self._patient(patient_id)
        version = patient.record_version if expected_version is None else expected_version
        for attr in (
            "display_name",
            "file_number",
            "marital_status",
            "employment_history",
        ):
            if attr in changes:
                setattr(patient, attr, changes[attr])
        if "leisure_interests" in changes:
            patient.leisure_interests = list(changes["leisure_interests"] or ())
        if "assigned_therapists" in changes:
            patient.assigned_therapists = set(changes["assigned_therapists"])
            if not patient.assigned_therapists:
                raise DomainError(UNASSIGNED_THERAPIST, "patient needs a therapist")
        return self.store.upsert("patients", patient, version)

    def add_related_person(self, patient_id: str, draft: dict) -> RelatedPerson:
        self._patient(patient_id)
        person = RelatedPerson(
            id=new_id(),
            patient_id=patient_id,
            display_name=str(draft["display_name"]),
            relationship_type=str(draft["relationship_type"]),
            contact_email=draft.get("contact_email"),
            profession=draft.get("profession"),
            remarks=draft.get("remarks"),
            is_caregiver=bool(draft.get("is_caregiver", False)),
        )
        return self.store.upsert("related_persons", person, 0)

    def related_persons(
        self, patient_id: str, sort: RelatedPersonSort = RelatedPersonSort.NAME
    ) -> list[RelatedPerson]:
        self._patient(patient_id)
        persons = self.store.list("related_persons", lambda p: p.patient_id == patient_id)
        return list_related_persons(persons, sort)

    # -- memories ----------------------------------------------------------

    def _related_owner_index(self) -> dict[str, str]:
        return {p.id: p.patient_id for p in self.store.list("related_persons")}

    def create_memory(self, patient_id: str, draft: dict) -> Memory:
        self._patient(patient_id)
        memory = validate_memory(
            draft,
            memory_id=new_id(),
            patient_id=patient_id,
            related_person_owner=self._related_owner_index(),
        )
        return self.store.upsert("memories", memory, 0)

    def update_memory(self, memory_id: str, changes: dict, expected_version=None) -> Memory:
        current = self._memory(memory_id)
        draft = self._memory_as_draft(current)
        draft.update(changes)
        version = current.record_version if expected_version is None else expected_version
        memory = validate_memory(
            draft,
            memory_id=memory_id,
            patient_id=current.patient_id,
            related_person_owner=self._related_owner_index(),
        )
        return self.store.upsert("memories", memory, version)

    @staticmethod
    def _memory_as_draft(m: Memory) -> dict:
        return {
            "description": m.description,
            "location": m.location,
            "date": m.date,
            "life_stage": m.life_stage,
            "categories": set(m.categories),
            "related_person_ids": set(m.related_person_ids),
            "preservation_status": m.preservation_status,
            "emotion_valence": m.emotion_valence,
            "mood_score": m.mood_score,
            "media": list(m.media),
        }

    def patient_memories(self, patient_id: str) -> list[Memory]:
        self._patient(patient_id)
        return self.store.list("memories", lambda m: m.patient_id == patient_id)

    def query_memories(
        self,
        patient_id: str,
        flt: MemoryFilter | None = None,
        sort: SortKey | None = None,
        search: str | None = None,
    ) -> list[Memory]:
        memories = self.patient_memories(patient_id)
        if search is not None:
            memories = search_memories(memories, search)
        else:
            memories = filter_memories(memories, flt)
        if sort is not None:
            memories = sort_memories(memories, sort)
        return memories

    # -- media -------------------------------------------------------------

    def store_media(self, data: bytes, metadata: dict) -> MediaAsset:
        if not data:
            raise DomainError(EMPTY_CONTENT, "media content is empty")
        label = str(metadata.get("media_type_label") or "")
        kind = None
        for prefix, default_kind in _MEDIA_PREFIX_KIND.items():
            if label.startswith(prefix):
                kind = default_kind
        if kind is None:
            raise DomainError(UNSUPPORTED_MEDIA_TYPE, f"unsupported media type {label!r}")
        if metadata.get("kind"):
            kind = MediaKind(str(metadata["kind"]).lower())
        content_hash = self.blobs.put(data)
        asset = MediaAsset(
            id=new_id(),
            kind=kind,
            content_hash=content_hash,
            media_type_label=label,
            byte_length=len(data),
            description=metadata.get("description"),
            location=metadata.get("location"),
            date=parse_partial_date(metadata["date"]) if metadata.get("date") else None,
            life_stage=parse_life_stage(metadata["life_stage"])
            if metadata.get("life_stage")
            else None,
        )
        return self.store.upsert("media_assets", asset, 0)

    def attach_media(self, memory_id: str, asset_id: str, expected_version=None) -> Memory:
        memory = self._memory(memory_id)
        self.store.get("media_assets", asset_id)
        version = memory.record_version if expected_version is None else expected_version
        if asset_id not in memory.media:
            memory.media.append(asset_id)
        return self.store.upsert("memories", memory, version)

    # -- sessions ----------------------------------------------------------

    def plan_session(self, patient_id: str, draft: dict) -> Session:
        patient = self._patient(patient_id)
        planned_ids = list(draft.get("planned_memory_ids") or ())
        for mid in planned_ids:
            memory = self.store.find("memories", mid)
            if memory is None:
                raise DomainError(UNKNOWN_MEMORY, f"unknown memory {mid}")
            if memory.patient_id != patient_id:
                raise DomainError(
                    FOREIGN_MEMORY, f"memory {mid} belongs to another patient"
                )
        media_ids = set(draft.get("planned_media_ids") or ())
        self._check_planned_media(patient.id, planned_ids, media_ids)
        scheduled_at = draft["scheduled_at"]
        if isinstance(scheduled_at, str):
            scheduled_at = datetime.fromisoformat(scheduled_at)
        if scheduled_at.tzinfo is None:
            scheduled_at = scheduled_at.replace(tzinfo=timezone.utc)
        session = Session(
            id=new_id(),
            patient_id=patient_id,
            scheduled_at=scheduled_at,
            objectives=str(draft.get("objectives") or ""),
            description=str(draft.get("description") or ""),
            barriers=draft.get("barriers"),
            facilitators=draft.get("facilitators"),
            activity_sequence=list(draft.get("activity_sequence") or ()),
            session_location=draft.get("session_location"),
            planned_memory_ids=planned_ids,
            planned_media_ids=media_ids,
        )
        return self.store.upsert("sessions", session, 0)

    def _check_planned_media(self, patient_id, planned_memory_ids, media_ids) -> None:
        """A planned media id must exist; if the asset is attached to any
        memory, that memory must belong to this patient (loose, unattached
        prompts are fine)."""
        if not media_ids:
            return
        all_memories = self.store.list("memories")
        for aid in sorted(media_ids):
            self.store.get("media_assets", aid)
            owners = {m.patient_id for m in all_memories if aid in m.media}
            if owners and patient_id not in owners:
                raise DomainError(
                    FOREIGN_MEMORY, f"media {aid} is attached to another patient's memory"
                )

    def start_session(self, session_id: str, expected_version=None) -> Session:
        session = self._session(session_id)
        version = session.record_version if expected_version is None else expected_version
        check_transition(session.status, SessionStatus.IN_PROGRESS)
        session.status = SessionStatus.IN_PROGRESS
        return self.store.upsert("sessions", session, version)

    def cancel_session(self, session_id: str, expected_version=None) -> Session:
        session = self._session(session_id)
        version = session.record_version if expected_version is None else expected_version
        check_transition(session.status, SessionStatus.CANCELLED)
        session.status = SessionStatus.CANCELLED
        return self.store.upsert("sessions", session, version)

    def reschedule_session(
        self, session_id: str, new_time: datetime, expected_version=None
    ) -> Session:
        session = self._session(session_id)
        version = session.record_version if expected_version is None else expected_version
        if session.status is not SessionStatus.PLANNED:
            raise DomainError(
                "ILLEGAL_TRANSITION",
                f"cannot reschedule a {session.status.value} session",
            )
        if isinstance(new_time, str):
            new_time = datetime.fromisoformat(new_time)
        if new_time.tzinfo is None:
            new_time = new_time.replace(tzinfo=timezone.utc)
        session.scheduled_at = new_time
        return self.store.upsert("sessions", session, version)

    def amend_memory_in_session(
        self, session_id: str, draft: dict, expected_version=None
    ) -> tuple[Memory, Session]:
        """Adds or updates a memory mid-session and appends to the audit log
        in the same commit."""
        session = self._session(session_id)
        if session.status is not SessionStatus.IN_PROGRESS:
            raise DomainError(SESSION_NOT_LIVE, "session is not in progress")
        version = session.record_version if expected_version is None else expected_version

        owner_index = self._related_owner_index()
        memory_id = draft.get("id")
        if memory_id is not None:
            current = self._memory(memory_id)
            if current.patient_id != session.patient_id:
                raise DomainError(FOREIGN_MEMORY, "memory belongs to another patient")
            merged = self._memory_as_draft(current)
            merged.update({k: v for k, v in draft.items() if k != "id"})
            memory = validate_memory(
                merged,
                memory_id=memory_id,
                patient_id=session.patient_id,
                related_person_owner=owner_index,
            )
            memory_version = current.record_version
            summary = draft.get("summary") or "memory updated during session"
        else:
            memory = validate_memory(
                draft,
                memory_id=new_id(),
                patient_id=session.patient_id,
                related_person_owner=owner_index,
            )
            memory_version = 0
            summary = draft.get("summary") or "memory added during session"

        session.amendment_log.append(
            AmendmentEntry(at=self.clock(), memory_id=memory.id, summary=summary)
        )
        committed = self.store.commit_many(
            [("memories", memory, memory_version), ("sessions", session, version)]
        )
        return committed[0], committed[1]

    def end_session(
        self, session_id: str, report_draft: dict, expected_version=None
    ) -> tuple[Session, SessionReport]:
        """Atomically completes the session and persists its one report."""
        session = self._session(session_id)
        if session.status is not SessionStatus.IN_PROGRESS:
            raise DomainError(SESSION_NOT_LIVE, "session is not in progress")
        version = session.record_version if expected_version is None else expected_version

        outcomes = []
        worked = session.worked_memory_ids()
        for raw in report_draft.get("memory_outcomes") or ():
            if raw["memory_id"] not in worked:
                raise DomainError(
                    OUTCOME_FOR_UNWORKED_MEMORY,
                    f"memory {raw['memory_id']} was neither planned nor amended",
                )
            outcomes.append(
                MemoryOutcome(
                    memory_id=raw["memory_id"],
                    observed_preservation=parse_preservation(raw["observed_preservation"]),
                    emotional_reaction=parse_emotion(raw["emotional_reaction"]),
                    notes=raw.get("notes"),
                )
            )
        report = SessionReport(
            session_id=session_id,
            overall_impression=str(report_draft.get("overall_impression") or ""),
            memory_outcomes=outcomes,
            participation_score=int(report_draft.get("participation_score", -1)),
            repeat_recommended=bool(report_draft.get("repeat_recommended", False)),
            future_proposals=report_draft.get("future_proposals"),
            created_at=self.clock(),
        )
        check_transition(session.status, SessionStatus.COMPLETED)
        session.status = SessionStatus.COMPLETED
        committed = self.store.commit_many(
            [("sessions", session, version), ("session_reports", report, 0)]
        )
        return committed[0], committed[1]

    def session_report(self, session_id: str) -> SessionReport:
        self._session(session_id)
        report = self.store.find("session_reports", session_id)
        if report is None:
            raise DomainError("REPORT_MISSING", f"session {session_id} has no report")
        return report

    def patient_sessions(self, patient_id: str) -> list[Session]:
        self._patient(patient_id)
        sessions = self.store.list("sessions", lambda s: s.patient_id == patient_id)
        sessions.sort(key=lambda s: (s.scheduled_at, s.id))
        return sessions

    def calendar_view(
        self, patient_id: str, window_from: datetime, window_to: datetime
    ) -> list[CalendarEntry]:
        patient = self._patient(patient_id)
        entries = []
        for s in self.store.list("sessions", lambda s: s.patient_id == patient_id):
            if s.status is SessionStatus.CANCELLED:
                continue
            if not window_from <= s.scheduled_at <= window_to:
                continue
            excerpt = s.objectives[:40] + ("..." if len(s.objectives) > 40 else "")
            entries.append(
                CalendarEntry(
                    session_id=s.id,
                    patient_id=patient_id,
                    scheduled_at=s.scheduled_at,
                    status=s.status,
                    title=f"{patient.display_name}: {excerpt}".rstrip(": "),
                )
            )
        entries.sort(key=lambda e: (e.scheduled_at, e.session_id))
        return entries

    # -- assessments -------------------------------------------------------

    def record_assessment(self, patient_id: str, draft: dict) -> ClinicalAssessment:
        patient = self._patient(patient_id)
        therapist_id = draft["signature"]["therapist_id"]
        if therapist_id not in patient.assigned_therapists:
            raise DomainError(
                UNASSIGNED_THERAPIST, f"therapist {therapist_id} is not assigned"
            )
        signed_at = draft["signature"].get("signed_at")
        if isinstance(signed_at, str):
            signed_at = datetime.fromisoformat(signed_at)
        assessment = ClinicalAssessment(
            id=draft.get("id") or new_id(),
            patient_id=patient_id,
            assessed_at=parse_partial_date(draft["assessed_at"]),
            diagnosis_type=str(draft.get("diagnosis_type") or ""),
            diagnosis_date=parse_partial_date(draft["diagnosis_date"])
            if draft.get("diagnosis_date")
            else None,
            gds_stage=draft.get("gds_stage"),
            instrument_results=[
                InstrumentResult(
                    instrument_name=r["instrument_name"],
                    score=float(r["score"]),
                    range_min=float(r["range_min"]),
                    range_max=float(r["range_max"]),
                )
                for r in draft.get("instrument_results") or ()
            ],
            nonstandard_instruments=draft.get("nonstandard_instruments"),
            observations=draft.get("observations"),
            overall_impression=parse_impression(draft["overall_impression"]),
            signature=Signature(therapist_id=therapist_id, signed_at=signed_at or self.clock()),
        )
        expected = draft.get("record_version", 0)
        return self.store.upsert("assessments", assessment, expected)

    def patient_assessments(self, patient_id: str) -> list[ClinicalAssessment]:
        self._patient(patient_id)
        rows = self.store.list("assessments", lambda a: a.patient_id == patient_id)
        rows.sort(key=lambda a: (a.assessed_at.normal_form(), a.id))
        return rows

    def evolution_series(self, patient_id: str, instrument_name: str) -> list[EvolutionPoint]:
        """Dated score points for one instrument, date-ascending, ties broken
        by assessment id."""
        points = []
        for a in self.patient_assessments(patient_id):
            for r in a.instrument_results:
                if r.instrument_name == instrument_name:
                    points.append(
                        (
                            a.assessed_at.normal_form(),
                            a.id,
                            EvolutionPoint(a.assessed_at, r.score, r.range_min, r.range_max),
                        )
                    )
        points.sort(key=lambda t: (t[0], t[1]))
        return [p for _, _, p in points]

    # -- life story --------------------------------------------------------

    def life_story_entries(self, patient_id: str, query: MemoryFilter):
        memories = self.patient_memories(patient_id)
        media = {a.id: a for a in self.store.list("media_assets")}
        persons = {p.id: p for p in self.store.list("related_persons")}
        return select_story_entries(memories, query, media, persons)

    def life_story_book(
        self, patient_id: str, query: MemoryFilter, options: BookOptions = BookOptions()
    ) -> BookLayout:
        patient = self._patient(patient_id)
        entries = self.life_story_entries(patient_id, query)
        return compose_book(
            patient,
            entries,
            generated_at=self.clock(),
            query_summary=describe_query(query),
            options=options,
        )

    def life_story_storyboard(
        self,
        patient_id: str,
        query: MemoryFilter,
        options: StoryboardOptions = StoryboardOptions(),
    ) -> StoryboardManifest:
        patient = self._patient(patient_id)
        entries = self.life_story_entries(patient_id, query)
        media = {a.id: a for a in self.store.list("media_assets")}
        return compose_storyboard(
            patient, entries, media, query_summary=describe_query(query), options=options
        )

    # -- email -------------------------------------------------------------

    def enqueue_email(self, related_person_id: str, subject: str, body: str) -> OutboxEntry:
        person = self.store.get("related_persons", related_person_id)
        if not person.contact_email:
            raise DomainError(NO_CONTACT_EMAIL, f"{person.display_name} has no email")
        entry = OutboxEntry(
            id=new_id(),
            to_email=person.contact_email,
            subject=subject,
            body=body,
            related_person_id=related_person_id,
            created_at=self.clock(),
        )
        return self.store.upsert("outbox", entry, 0)

    # -- lookups -----------------------------------------------------------

    def _patient(self, patient_id: str) -> Patient:
        patient = self.store.find("patients", patient_id)
        if patient is None:
            raise DomainError(UNKNOWN_PATIENT, f"no patient {patient_id}")
        return patient

    def _session(self, session_id: str) -> Session:
        session = self.store.find("sessions", session_id)
        if session is None:
            raise DomainError(UNKNOWN_SESSION, f"no session {session_id}")
        return session

    def _memory(self, memory_id: str) -> Memory:
        memory = self.store.find("memories", memory_id)
        if memory is None:
            raise DomainError(UNKNOWN_MEMORY, f"no memory {memory_id}")
        return memory
