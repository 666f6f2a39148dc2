"""Dict <-> entity conversion used by the archive format and the JSON API.

Field names are snake_case, PartialDate serializes as ``{"year": 1952,
"month": 6}`` with absent parts omitted, sets become sorted lists, and
timestamps are ISO 8601 strings.
"""

from __future__ import annotations

from datetime import datetime

from .domain import (
    AmendmentEntry,
    ClinicalAssessment,
    InstrumentResult,
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
    parse_emotion,
    parse_impression,
    parse_life_stage,
    parse_preservation,
)


def partial_date_to_dict(d: PartialDate | None) -> dict | None:
    if d is None:
        return None
    out = {"year": d.year}
    if d.month is not None:
        out["month"] = d.month
    if d.day is not None:
        out["day"] = d.day
    return out


def partial_date_from_dict(raw: dict | None) -> PartialDate | None:
    if raw is None:
        return None
    return PartialDate(
        year=raw["year"], month=raw.get("month"), day=raw.get("day")
    )


def _dt_to_str(dt: datetime) -> str:
    return dt.isoformat()


def _dt_from_str(raw: str) -> datetime:
    return datetime.fromisoformat(raw)


def patient_to_dict(p: Patient) -> dict:
    return {
        "id": p.id,
        "display_name": p.display_name,
        "file_number": p.file_number,
        "marital_status": p.marital_status,
        "employment_history": p.employment_history,
        "leisure_interests": list(p.leisure_interests),
        "assigned_therapists": sorted(p.assigned_therapists),
        "record_version": p.record_version,
    }


def patient_from_dict(raw: dict) -> Patient:
    return Patient(
        id=raw["id"],
        display_name=raw["display_name"],
        file_number=raw.get("file_number"),
        marital_status=raw.get("marital_status"),
        employment_history=raw.get("employment_history"),
        leisure_interests=list(raw.get("leisure_interests") or ()),
        assigned_therapists=set(raw["assigned_therapists"]),
        record_version=raw.get("record_version", 0),
    )


def related_person_to_dict(p: RelatedPerson) -> dict:
    return {
        "id": p.id,
        "patient_id": p.patient_id,
        "display_name": p.display_name,
        "relationship_type": p.relationship_type,
        "contact_email": p.contact_email,
        "profession": p.profession,
        "remarks": p.remarks,
        "is_caregiver": p.is_caregiver,
        "record_version": p.record_version,
    }


def related_person_from_dict(raw: dict) -> RelatedPerson:
    return RelatedPerson(
        id=raw["id"],
        patient_id=raw["patient_id"],
        display_name=raw["display_name"],
        relationship_type=raw["relationship_type"],
        contact_email=raw.get("contact_email"),
        profession=raw.get("profession"),
        remarks=raw.get("remarks"),
        is_caregiver=raw.get("is_caregiver", False),
        record_version=raw.get("record_version", 0),
    )


def memory_to_dict(m: Memory) -> dict:
    return {
        "id": m.id,
        "patient_id": m.patient_id,
        "description": m.description,
        "location": m.location,
        "date": partial_date_to_dict(m.date),
        "life_stage": m.life_stage.value,
        "categories": sorted(m.categories),
        "related_person_ids": sorted(m.related_person_ids),
        "preservation_status": m.preservation_status.value,
        "emotion_valence": m.emotion_valence.value,
        "mood_score": m.mood_score,
        "media": list(m.media),
        "record_version": m.record_version,
    }


def memory_from_dict(raw: dict) -> Memory:
    return Memory(
        id=raw["id"],
        patient_id=raw["patient_id"],
        description=raw["description"],
        location=raw.get("location"),
        date=partial_date_from_dict(raw["date"]),
        life_stage=parse_life_stage(raw["life_stage"]),
        categories=set(raw.get("categories") or ()),
        related_person_ids=set(raw.get("related_person_ids") or ()),
        preservation_status=parse_preservation(raw["preservation_status"]),
        emotion_valence=parse_emotion(raw["emotion_valence"]),
        mood_score=raw["mood_score"],
        media=list(raw.get("media") or ()),
        record_version=raw.get("record_version", 0),
    )


def media_asset_to_dict(a: MediaAsset) -> dict:
    return {
        "id": a.id,
        "kind": a.kind.value,
        "content_hash": a.content_hash,
        "media_type_label": a.media_type_label,
        "description": a.description,
        "location": a.location,
        "date": partial_date_to_dict(a.date),
        "life_stage": a.life_stage.value if a.life_stage else None,
        "byte_length": a.byte_length,
        "record_version": a.record_version,
    }


def media_asset_from_dict(raw: dict) -> MediaAsset:
    return MediaAsset(
        id=raw["id"],
        kind=MediaKind(raw["kind"]),
        content_hash=raw["content_hash"],
        media_type_label=raw["media_type_label"],
        description=raw.get("description"),
        location=raw.get("location"),
        date=partial_date_from_dict(raw.get("date")),
        life_stage=parse_life_stage(raw["life_stage"]) if raw.get("life_stage") else None,
        byte_length=raw["byte_length"],
        record_version=raw.get("record_version", 0),
    )


def session_to_dict(s: Session) -> dict:
    return {
        "id": s.id,
        "patient_id": s.patient_id,
        "scheduled_at": _dt_to_str(s.scheduled_at),
        "objectives": s.objectives,
        "description": s.description,
        "barriers": s.barriers,
        "facilitators": s.facilitators,
        "activity_sequence": list(s.activity_sequence),
        "session_location": s.session_location,
        "planned_memory_ids": list(s.planned_memory_ids),
        "planned_media_ids": sorted(s.planned_media_ids),
        "status": s.status.value,
        "amendment_log": [
            {"at": _dt_to_str(e.at), "memory_id": e.memory_id, "summary": e.summary}
            for e in s.amendment_log
        ],
        "record_version": s.record_version,
    }


def session_from_dict(raw: dict) -> Session:
    return Session(
        id=raw["id"],
        patient_id=raw["patient_id"],
        scheduled_at=_dt_from_str(raw["scheduled_at"]),
        objectives=raw["objectives"],
        description=raw["description"],
        barriers=raw.get("barriers"),
        facilitators=raw.get("facilitators"),
        activity_sequence=list(raw.get("activity_sequence") or ()),
        session_location=raw.get("session_location"),
        planned_memory_ids=list(raw.get("planned_memory_ids") or ()),
        planned_media_ids=set(raw.get("planned_media_ids") or ()),
        status=SessionStatus(raw["status"]),
        amendment_log=[
            AmendmentEntry(
                at=_dt_from_str(e["at"]), memory_id=e["memory_id"], summary=e["summary"]
            )
            for e in raw.get("amendment_log") or ()
        ],
        record_version=raw.get("record_version", 0),
    )


def session_report_to_dict(r: SessionReport) -> dict:
    return {
        "session_id": r.session_id,
        "overall_impression": r.overall_impression,
        "memory_outcomes": [
            {
                "memory_id": o.memory_id,
                "observed_preservation": o.observed_preservation.value,
                "emotional_reaction": o.emotional_reaction.value,
                "notes": o.notes,
            }
            for o in r.memory_outcomes
        ],
        "participation_score": r.participation_score,
        "repeat_recommended": r.repeat_recommended,
        "future_proposals": r.future_proposals,
        "created_at": _dt_to_str(r.created_at),
        "record_version": r.record_version,
    }


def session_report_from_dict(raw: dict) -> SessionReport:
    return SessionReport(
        session_id=raw["session_id"],
        overall_impression=raw["overall_impression"],
        memory_outcomes=[
            MemoryOutcome(
                memory_id=o["memory_id"],
                observed_preservation=parse_preservation(o["observed_preservation"]),
                emotional_reaction=parse_emotion(o["emotional_reaction"]),
                notes=o.get("notes"),
            )
            for o in raw.get("memory_outcomes") or ()
        ],
        participation_score=raw["participation_score"],
        repeat_recommended=raw["repeat_recommended"],
        future_proposals=raw.get("future_proposals"),
        created_at=_dt_from_str(raw["created_at"]),
        record_version=raw.get("record_version", 0),
    )


def assessment_to_dict(a: ClinicalAssessment) -> dict:
    return {
        "id": a.id,
        "patient_id": a.patient_id,
        "assessed_at": partial_date_to_dict(a.assessed_at),
        "diagnosis_type": a.diagnosis_type,
        "diagnosis_date": partial_date_to_dict(a.diagnosis_date),
        "gds_stage": a.gds_stage,
        "instrument_results": [
            {
                "instrument_name": r.instrument_name,
                "score": r.score,
                "range_min": r.range_min,
                "range_max": r.range_max,
            }
            for r in a.instrument_results
        ],
        "nonstandard_instruments": a.nonstandard_instruments,
        "observations": a.observations,
        "overall_impression": a.overall_impression.value,
        "signature": {
            "therapist_id": a.signature.therapist_id,
            "signed_at": _dt_to_str(a.signature.signed_at),
        },
        "record_version": a.record_version,
    }


def assessment_from_dict(raw: dict) -> ClinicalAssessment:
    return ClinicalAssessment(
        id=raw["id"],
        patient_id=raw["patient_id"],
        assessed_at=partial_date_from_dict(raw["assessed_at"]),
        diagnosis_type=raw["diagnosis_type"],
        diagnosis_date=partial_date_from_dict(raw.get("diagnosis_date")),
        gds_stage=raw.get("gds_stage"),
        instrument_results=[
            InstrumentResult(
                instrument_name=r["instrument_name"],
                score=r["score"],
                range_min=r["range_min"],
                range_max=r["range_max"],
            )
            for r in raw.get("instrument_results") or ()
        ],
        nonstandard_instruments=raw.get("nonstandard_instruments"),
        observations=raw.get("observations"),
        overall_impression=parse_impression(raw["overall_impression"]),
        signature=Signature(
            therapist_id=raw["signature"]["therapist_id"],
            signed_at=_dt_from_str(raw["signature"]["signed_at"]),
        ),
        record_version=raw.get("record_version", 0),
    )


def therapist_to_dict(t: TherapistAccount, *, include_credentials: bool = False) -> dict:
    out = {
        "id": t.id,
        "display_name": t.display_name,
        "email": t.email,
        "record_version": t.record_version,
    }
    if include_credentials:
        out["credential_hash"] = t.credential_hash.hex()
    return out


def therapist_from_dict(raw: dict) -> TherapistAccount:
    return TherapistAccount(
        id=raw["id"],
        display_name=raw["display_name"],
        email=raw["email"],
        credential_hash=bytes.fromhex(raw.get("credential_hash", "")),
        record_version=raw.get("record_version", 0),
    )


from .outbox import outbox_entry_from_dict, outbox_entry_to_dict  # noqa: E402

TO_DICT = {
    "outbox": outbox_entry_to_dict,
    "patients": patient_to_dict,
    "related_persons": related_person_to_dict,
    "memories": memory_to_dict,
    "media_assets": media_asset_to_dict,
    "sessions": session_to_dict,
    "session_reports": session_report_to_dict,
    "assessments": assessment_to_dict,
    "therapists": therapist_to_dict,
}

FROM_DICT = {
    "outbox": outbox_entry_from_dict,
    "patients": patient_from_dict,
    "related_persons": related_person_from_dict,
    "memories": memory_from_dict,
    "media_assets": media_asset_from_dict,
    "sessions": session_from_dict,
    "session_reports": session_report_from_dict,
    "assessments": assessment_from_dict,
    "therapists": therapist_from_dict,
}
