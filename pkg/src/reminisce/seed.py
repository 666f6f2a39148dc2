"""Demo dataset used by the ``seed-demo`` command and the test fixtures."""

from __future__ import annotations

import io

from .service import TherapyService


def tiny_png(color=(120, 150, 200), size=(64, 48)) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.new("RGB", size, color).save(buf, format="PNG")
    return buf.getvalue()


def build_demo(service: TherapyService) -> dict:
    """Seeds one therapist, two patients, and a small catalog; returns ids."""
    therapist, token = service.create_therapist(
        "Ana Ferreiro", "ana@clinic.example", password="demo-password"
    )
    patient = service.create_patient(
        {
            "display_name": "Manuel Castro",
            "file_number": "HC-1042",
            "marital_status": "widowed",
            "employment_history": "fisherman, later shipyard worker",
            "leisure_interests": ["dominoes", "gardening"],
            "assigned_therapists": [therapist.id],
        }
    )
    other = service.create_patient(
        {"display_name": "Carmen Lopez", "assigned_therapists": [therapist.id]}
    )
    spouse = service.add_related_person(
        patient.id,
        {
            "display_name": "Rosa Castro",
            "relationship_type": "spouse",
            "contact_email": "rosa@example.org",
            "remarks": "visits every weekend",
        },
    )
    daughter = service.add_related_person(
        patient.id,
        {
            "display_name": "Lucia Castro",
            "relationship_type": "child",
            "contact_email": "lucia@example.org",
            "is_caregiver": True,
            "profession": "nurse",
        },
    )
    memories = []
    specs = [
        ("First day at the village school", "Ribeira", {"year": 1948, "month": 9},
         "childhood", {"friends"}, "preserved", "positive", 8, set()),
        ("Summer festivals by the harbour", "Ribeira", {"year": 1955},
         "adolescence", {"friends", "family"}, "at_risk", "positive", 7, set()),
        ("Wedding day", "Santiago", {"year": 1963, "month": 6, "day": 12},
         "young_adult", {"family"}, "preserved", "positive", 10, {spouse.id}),
        ("Working at the shipyard", "Ferrol", {"year": 1975},
         "adult", {"work"}, "at_risk", "neutral", 5, set()),
        ("Daughter's graduation", "Coruna", {"year": 1990, "month": 7},
         "adult", {"family"}, "preserved", "positive", 9, {daughter.id}),
        ("Retirement trip to the coast", "Fisterra", {"year": 2006},
         "older_adult", {"family", "hobbies"}, "lost", "neutral", 4, {spouse.id}),
    ]
    for desc, loc, date, stage, cats, pres, emo, mood, rel in specs:
        memories.append(
            service.create_memory(
                patient.id,
                {
                    "description": desc,
                    "location": loc,
                    "date": date,
                    "life_stage": stage,
                    "categories": cats,
                    "preservation_status": pres,
                    "emotion_valence": emo,
                    "mood_score": mood,
                    "related_person_ids": rel,
                },
            )
        )
    photo = service.store_media(
        tiny_png(),
        {"media_type_label": "image/png", "description": "wedding photo",
         "life_stage": "young_adult"},
    )
    memories[2] = service.attach_media(memories[2].id, photo.id)

    session = service.plan_session(
        patient.id,
        {
            "scheduled_at": "2025-03-10T10:00:00+00:00",
            "objectives": "revisit early family memories",
            "description": "first reminiscence block",
            "barriers": "hearing difficulties",
            "facilitators": "family photos available",
            "activity_sequence": ["welcome", "photo prompts", "closing talk"],
            "session_location": "day care centre, room 2",
            "planned_memory_ids": [memories[0].id, memories[2].id],
        },
    )
    service.start_session(session.id)
    service.end_session(
        session.id,
        {
            "overall_impression": "engaged and talkative",
            "memory_outcomes": [
                {"memory_id": memories[0].id, "observed_preservation": "preserved",
                 "emotional_reaction": "positive"},
                {"memory_id": memories[2].id, "observed_preservation": "at_risk",
                 "emotional_reaction": "positive", "notes": "needed photo prompt"},
            ],
            "participation_score": 8,
            "repeat_recommended": True,
        },
    )
    upcoming = service.plan_session(
        patient.id,
        {
            "scheduled_at": "2025-04-02T11:00:00+00:00",
            "objectives": "work memories",
            "description": "second block",
            "planned_memory_ids": [memories[3].id],
        },
    )
    assessment_a = service.record_assessment(
        patient.id,
        {
            "assessed_at": {"year": 2024, "month": 11, "day": 5},
            "diagnosis_type": "Alzheimer's disease",
            "diagnosis_date": {"year": 2022, "month": 3},
            "gds_stage": 4,
            "instrument_results": [
                {"instrument_name": "MMSE", "score": 21, "range_min": 0, "range_max": 30}
            ],
            "overall_impression": "stable",
            "signature": {"therapist_id": therapist.id},
        },
    )
    assessment_b = service.record_assessment(
        patient.id,
        {
            "assessed_at": {"year": 2025, "month": 5, "day": 9},
            "diagnosis_type": "Alzheimer's disease",
            "gds_stage": 4,
            "instrument_results": [
                {"instrument_name": "MMSE", "score": 19, "range_min": 0, "range_max": 30}
            ],
            "nonstandard_instruments": "house drawing exercise",
            "observations": "slower word recall than autumn",
            "overall_impression": "worsened",
            "signature": {"therapist_id": therapist.id},
        },
    )
    return {
        "therapist_id": therapist.id,
        "token": token,
        "patient_id": patient.id,
        "other_patient_id": other.id,
        "related_person_ids": [spouse.id, daughter.id],
        "memory_ids": [m.id for m in memories],
        "photo_asset_id": photo.id,
        "completed_session_id": session.id,
        "planned_session_id": upcoming.id,
        "assessment_ids": [assessment_a.id, assessment_b.id],
    }
