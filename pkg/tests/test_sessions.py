import random
from datetime import timedelta

import pytest

from reminisce.domain import SessionStatus
from reminisce.errors import (
    FOREIGN_MEMORY,
    OUTCOME_FOR_UNWORKED_MEMORY,
    SESSION_NOT_LIVE,
    DomainError,
)


def plan(service, demo, memory_ids=None, **extra):
    draft = {
        "scheduled_at": "2025-07-01T10:00:00+00:00",
        "objectives": "obj",
        "description": "desc",
        "planned_memory_ids": memory_ids if memory_ids is not None else [],
    }
    draft.update(extra)
    return service.plan_session(demo["patient_id"], draft)


def report_draft(memory_ids=(), participation=7):
    return {
        "overall_impression": "went well",
        "participation_score": participation,
        "repeat_recommended": True,
        "memory_outcomes": [
            {
                "memory_id": mid,
                "observed_preservation": "preserved",
                "emotional_reaction": "positive",
            }
            for mid in memory_ids
        ],
    }


def new_memory_draft(n=0):
    return {
        "description": f"session discovery {n}",
        "date": {"year": 1970},
        "life_stage": "adult",
        "mood_score": 6,
    }


class TestPlan:
    def test_plan_stores_fields(self, service, demo):
        s = plan(service, demo, demo["memory_ids"][:3], barriers="noise in room")
        assert s.status is SessionStatus.PLANNED
        assert s.barriers == "noise in room"
        assert s.amendment_log == []
        assert s.record_version == 1

    def test_plan_with_zero_memories_is_legal(self, service, demo):
        assert plan(service, demo, []).status is SessionStatus.PLANNED

    def test_foreign_memory_rejected(self, service, demo):
        foreign = service.create_memory(
            demo["other_patient_id"], new_memory_draft()
        )
        with pytest.raises(DomainError) as exc:
            plan(service, demo, [foreign.id])
        assert exc.value.code == FOREIGN_MEMORY

    def test_loose_media_prompt_allowed(self, service, demo):
        from reminisce.seed import tiny_png

        loose = service.store_media(tiny_png((1, 2, 3)), {"media_type_label": "image/png"})
        s = plan(service, demo, [], planned_media_ids=[loose.id])
        assert loose.id in s.planned_media_ids

    def test_foreign_attached_media_rejected(self, service, demo):
        from reminisce.seed import tiny_png

        asset = service.store_media(tiny_png((9, 9, 9)), {"media_type_label": "image/png"})
        m = service.create_memory(demo["other_patient_id"], new_memory_draft(1))
        service.attach_media(m.id, asset.id)
        with pytest.raises(DomainError) as exc:
            plan(service, demo, [], planned_media_ids=[asset.id])
        assert exc.value.code == FOREIGN_MEMORY


class TestLifecycle:
    def test_start(self, service, demo):
        s = plan(service, demo)
        started = service.start_session(s.id)
        assert started.status is SessionStatus.IN_PROGRESS
        assert started.record_version == s.record_version + 1

    def test_start_completed_session_fails(self, service, demo):
        sid = demo["completed_session_id"]
        with pytest.raises(DomainError) as exc:
            service.start_session(sid)
        assert exc.value.code == "ILLEGAL_TRANSITION"

    def test_start_cancelled_session_fails(self, service, demo):
        s = plan(service, demo)
        service.cancel_session(s.id)
        with pytest.raises(DomainError) as exc:
            service.start_session(s.id)
        assert exc.value.code == "ILLEGAL_TRANSITION"

    def test_reschedule_planned(self, service, demo):
        s = plan(service, demo)
        moved = service.reschedule_session(s.id, s.scheduled_at + timedelta(days=1))
        assert moved.scheduled_at == s.scheduled_at + timedelta(days=1)
        assert moved.record_version == s.record_version + 1

    def test_reschedule_same_timestamp_bumps_version(self, service, demo):
        s = plan(service, demo)
        moved = service.reschedule_session(s.id, s.scheduled_at)
        assert moved.scheduled_at == s.scheduled_at
        assert moved.record_version == s.record_version + 1

    def test_reschedule_completed_fails(self, service, demo):
        with pytest.raises(DomainError) as exc:
            service.reschedule_session(
                demo["completed_session_id"], "2025-09-01T10:00:00+00:00"
            )
        assert exc.value.code == "ILLEGAL_TRANSITION"

    def test_calendar_reflects_reschedule(self, service, demo):
        from datetime import datetime, timezone

        s = plan(service, demo)
        service.reschedule_session(s.id, "2025-07-15T10:00:00+00:00")
        entries = service.calendar_view(
            demo["patient_id"],
            datetime(2025, 7, 1, tzinfo=timezone.utc),
            datetime(2025, 7, 31, tzinfo=timezone.utc),
        )
        mine = [e for e in entries if e.session_id == s.id]
        assert len(mine) == 1
        assert mine[0].scheduled_at.isoformat() == "2025-07-15T10:00:00+00:00"

    def test_cancelled_absent_from_calendar(self, service, demo):
        from datetime import datetime, timezone

        s = plan(service, demo)
        service.cancel_session(s.id)
        entries = service.calendar_view(
            demo["patient_id"],
            datetime(2025, 1, 1, tzinfo=timezone.utc),
            datetime(2025, 12, 31, tzinfo=timezone.utc),
        )
        assert s.id not in {e.session_id for e in entries}


class TestAmend:
    def test_add_new_memory_mid_session(self, service, demo):
        s = plan(service, demo)
        service.start_session(s.id)
        before = len(service.patient_memories(demo["patient_id"]))
        memory, session = service.amend_memory_in_session(s.id, new_memory_draft())
        assert len(service.patient_memories(demo["patient_id"])) == before + 1
        assert len(session.amendment_log) == 1
        assert session.amendment_log[0].memory_id == memory.id

    def test_change_preservation_is_logged(self, service, demo):
        s = plan(service, demo, demo["memory_ids"][:1])
        service.start_session(s.id)
        mid = demo["memory_ids"][0]
        memory, session = service.amend_memory_in_session(
            s.id,
            {"id": mid, "preservation_status": "at_risk",
             "summary": "preservation downgraded"},
        )
        assert memory.preservation_status.value == "at_risk"
        assert service.store.get("memories", mid).preservation_status.value == "at_risk"
        assert session.amendment_log[-1].summary == "preservation downgraded"

    def test_amend_while_planned_rejected(self, service, demo):
        s = plan(service, demo)
        with pytest.raises(DomainError) as exc:
            service.amend_memory_in_session(s.id, new_memory_draft())
        assert exc.value.code == SESSION_NOT_LIVE

    def test_catalog_and_log_agree_after_random_amendments(self, service, demo, rng):
        s = plan(service, demo)
        service.start_session(s.id)
        created = []
        for i in range(20):
            if created and rng.random() < 0.5:
                target = rng.choice(created)
                memory, session = service.amend_memory_in_session(
                    s.id, {"id": target, "mood_score": rng.randint(0, 10)}
                )
            else:
                memory, session = service.amend_memory_in_session(
                    s.id, new_memory_draft(i)
                )
                created.append(memory.id)
            assert len(session.amendment_log) == i + 1
            # every logged id exists in the catalog with matching content
            stored = service.store.get("memories", memory.id)
            assert stored.mood_score == memory.mood_score
        times = [e.at for e in session.amendment_log]
        assert times == sorted(times)


class TestEnd:
    def test_end_with_outcomes(self, service, demo):
        ids = demo["memory_ids"][:3]
        s = plan(service, demo, ids)
        service.start_session(s.id)
        session, report = service.end_session(s.id, report_draft(ids))
        assert session.status is SessionStatus.COMPLETED
        assert len(report.memory_outcomes) == 3
        assert service.session_report(s.id).session_id == s.id

    def test_amended_memory_usable_in_report(self, service, demo):
        s = plan(service, demo)
        service.start_session(s.id)
        memory, _ = service.amend_memory_in_session(s.id, new_memory_draft())
        session, report = service.end_session(s.id, report_draft([memory.id]))
        assert report.memory_outcomes[0].memory_id == memory.id

    def test_outcome_for_unworked_memory(self, service, demo):
        s = plan(service, demo, demo["memory_ids"][:1])
        service.start_session(s.id)
        with pytest.raises(DomainError) as exc:
            service.end_session(s.id, report_draft([demo["memory_ids"][5]]))
        assert exc.value.code == OUTCOME_FOR_UNWORKED_MEMORY

    def test_participation_out_of_range(self, service, demo):
        s = plan(service, demo)
        service.start_session(s.id)
        with pytest.raises(DomainError) as exc:
            service.end_session(s.id, report_draft((), participation=11))
        assert exc.value.code == "PARTICIPATION_OUT_OF_RANGE"

    def test_end_planned_session_rejected(self, service, demo):
        s = plan(service, demo)
        with pytest.raises(DomainError) as exc:
            service.end_session(s.id, report_draft())
        assert exc.value.code == SESSION_NOT_LIVE

    def test_crash_between_writes_leaves_clean_state(self, service, demo):
        s = plan(service, demo)
        service.start_session(s.id)
        service.store.fail_after_writes = 1  # session write ok, report write dies
        with pytest.raises(RuntimeError):
            service.end_session(s.id, report_draft())
        service.store.fail_after_writes = None
        observed = service.store.get("sessions", s.id)
        assert observed.status is SessionStatus.IN_PROGRESS
        assert service.store.find("session_reports", s.id) is None
        # and the operation succeeds cleanly afterwards
        session, _ = service.end_session(s.id, report_draft())
        assert session.status is SessionStatus.COMPLETED


class TestStateMachineProperty:
    EVENTS = ("plan", "start", "amend", "end", "reschedule", "cancel")

    def run_sequence(self, service, demo, rng, length=8):
        sessions = []
        for _ in range(length):
            event = rng.choice(self.EVENTS)
            try:
                if event == "plan" or not sessions:
                    sessions.append(plan(service, demo).id)
                    continue
                sid = rng.choice(sessions)
                if event == "start":
                    service.start_session(sid)
                elif event == "amend":
                    service.amend_memory_in_session(sid, new_memory_draft(rng.randrange(99)))
                elif event == "end":
                    worked = service.store.get("sessions", sid).worked_memory_ids()
                    service.end_session(sid, report_draft(sorted(worked)))
                elif event == "reschedule":
                    service.reschedule_session(sid, "2025-08-01T09:00:00+00:00")
                elif event == "cancel":
                    service.cancel_session(sid)
            except DomainError:
                pass  # guarded rejection is a legal outcome
        return sessions

    def test_invariants_over_random_sequences(self, service, demo):
        rng = random.Random(7)
        for trial in range(150):
            sessions = self.run_sequence(service, demo, rng)
            for sid in sessions:
                s = service.store.get("sessions", sid)
                report = service.store.find("session_reports", sid)
                assert (report is not None) == (s.status is SessionStatus.COMPLETED)
                if s.amendment_log:
                    assert s.status in (SessionStatus.IN_PROGRESS, SessionStatus.COMPLETED)
                    times = [e.at for e in s.amendment_log]
                    assert times == sorted(times)
