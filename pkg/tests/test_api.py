from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from reminisce.api import PATIENT_SCOPE_PARAMS, create_app
from reminisce.outbox import FileDropTransport, OutboxWorker
from reminisce.seed import tiny_png


class Clock:
    def __init__(self):
        self.now = datetime(2025, 6, 1, 12, 0, tzinfo=timezone.utc)

    def __call__(self):
        return self.now


@pytest.fixture
def clock(service):
    c = Clock()
    service.clock = c
    return c


@pytest.fixture
def app(service, demo, clock, tmp_path):
    worker = OutboxWorker(service.store, FileDropTransport(tmp_path / "outbox"))
    return create_app(service, worker)


@pytest.fixture
def client(app, demo):
    return TestClient(
        app, headers={"Authorization": f"Bearer {demo['token']}"}
    )


@pytest.fixture
def anon(app):
    return TestClient(app)


@pytest.fixture
def outsider(app, service):
    """A valid therapist who is assigned to no patient."""
    _, token = service.create_therapist("Out Sider", "out@clinic.example")
    return TestClient(app, headers={"Authorization": f"Bearer {token}"})


class TestAuth:
    def test_missing_token_401_empty(self, anon, demo):
        r = anon.get(f"/patients/{demo['patient_id']}")
        assert r.status_code == 401
        assert r.content == b""

    def test_me_echoes_account(self, client, demo):
        r = client.get("/me")
        assert r.status_code == 200
        assert r.json()["id"] == demo["therapist_id"]
        assert "credential_hash" not in r.json()

    def test_expired_token_401(self, app, service, clock):
        account, token = service.create_therapist("Temp", "temp@clinic.example")
        record = service.store.token_record(token)
        service.store.put_token(token, account.id,
                                expires_at=clock.now + timedelta(minutes=5))
        c = TestClient(app, headers={"Authorization": f"Bearer {token}"})
        assert c.get("/me").status_code == 200
        clock.now += timedelta(minutes=10)
        assert c.get("/me").status_code == 401

    def test_garbage_token_401(self, anon):
        r = anon.get("/me", headers={"Authorization": "Bearer nope"})
        assert r.status_code == 401


def sample_path(path, demo):
    values = {
        "patient_id": demo["patient_id"],
        "memory_id": demo["memory_ids"][0],
        "session_id": demo["completed_session_id"],
        "assessment_id": demo["assessment_ids"][0],
        "related_person_id": demo["related_person_ids"][0],
        "instrument_name": "MMSE",
    }
    for name, value in values.items():
        path = path.replace("{" + name + "}", value)
    return path


class TestAuthorization:
    def patient_scoped_routes(self, app):
        from fastapi.routing import APIRoute

        routes = []
        for route in app.routes:
            if isinstance(route, APIRoute) and any(
                "{" + p + "}" in route.path for p in PATIENT_SCOPE_PARAMS
            ):
                routes.append(route)
        return routes

    def test_route_table_has_no_unguarded_patient_route(self, app):
        routes = self.patient_scoped_routes(app)
        assert len(routes) >= 20
        for route in routes:
            guard_names = {
                d.call.__name__ for d in route.dependant.dependencies if d.call
            }
            assert "require_patient_access" in guard_names, route.path

    def test_unassigned_therapist_gets_empty_403_everywhere(self, app, demo, outsider):
        for route in self.patient_scoped_routes(app):
            path = sample_path(route.path, demo)
            for method in route.methods:
                kwargs = {"json": {}} if method in ("POST", "PATCH", "PUT") else {}
                r = outsider.request(method, path, **kwargs)
                assert r.status_code == 403, (method, path, r.status_code)
                assert r.content == b"", (method, path)

    def test_two_assigned_therapists_both_allowed(self, app, service, demo, client):
        second, token = service.create_therapist("Second", "second@clinic.example")
        patient = service.store.get("patients", demo["patient_id"])
        service.update_patient(
            patient.id,
            {"assigned_therapists": sorted(patient.assigned_therapists | {second.id})},
        )
        other = TestClient(app, headers={"Authorization": f"Bearer {token}"})
        for c in (client, other):
            assert c.get(f"/patients/{demo['patient_id']}/memories").status_code == 200

    def test_listing_patients_scoped_to_therapist(self, outsider):
        assert outsider.get("/patients").json() == []


class TestRoundTrips:
    def test_patient_create_read(self, client):
        created = client.post(
            "/patients",
            json={"display_name": "New Patient", "file_number": "HC-9",
                  "leisure_interests": ["chess"]},
        )
        assert created.status_code == 201
        got = client.get(f"/patients/{created.json()['id']}")
        assert got.json() == created.json()

    def test_related_person_create_read(self, client, demo):
        pid = demo["patient_id"]
        created = client.post(
            f"/patients/{pid}/related-persons",
            json={"display_name": "Pepe", "relationship_type": "friend",
                  "contact_email": "pepe@example.org"},
        )
        assert created.status_code == 201
        listing = client.get(f"/patients/{pid}/related-persons").json()
        assert created.json() in listing

    def test_memory_create_read(self, client, demo):
        pid = demo["patient_id"]
        created = client.post(
            f"/patients/{pid}/memories",
            json={"description": "api memory", "date": {"year": 1980},
                  "life_stage": "adult", "mood_score": 6,
                  "categories": ["Work", " work "]},
        )
        assert created.status_code == 201
        body = created.json()
        assert body["categories"] == ["work"]
        assert client.get(f"/memories/{body['id']}").json() == body

    def test_session_create_read(self, client, demo):
        pid = demo["patient_id"]
        created = client.post(
            f"/patients/{pid}/sessions",
            json={"scheduled_at": "2025-09-01T10:00:00+00:00", "objectives": "o",
                  "description": "d", "planned_memory_ids": demo["memory_ids"][:2]},
        )
        assert created.status_code == 201
        assert client.get(f"/sessions/{created.json()['id']}").json() == created.json()

    def test_assessment_create_read_and_edit(self, client, demo):
        pid = demo["patient_id"]
        created = client.post(
            f"/patients/{pid}/assessments",
            json={
                "assessed_at": {"year": 2025, "month": 6},
                "diagnosis_type": "mixed dementia",
                "gds_stage": 5,
                "overall_impression": "remains stable",
                "instrument_results": [
                    {"instrument_name": "MMSE", "score": 18,
                     "range_min": 0, "range_max": 30}
                ],
                "signature": {"therapist_id": demo["therapist_id"]},
            },
        )
        assert created.status_code == 201
        body = created.json()
        assert body["overall_impression"] == "stable"
        aid = body["id"]
        assert client.get(f"/assessments/{aid}").json() == body
        patched = client.patch(
            f"/assessments/{aid}",
            json={"observations": "edited"},
            headers={"If-Match": str(body["record_version"])},
        )
        assert patched.status_code == 200
        assert patched.json()["observations"] == "edited"
        assert patched.json()["record_version"] == body["record_version"] + 1


class TestErrors:
    def test_validation_maps_to_400_with_codes(self, client, demo):
        r = client.post(
            f"/patients/{demo['patient_id']}/memories",
            json={"description": "", "date": {"year": 1980},
                  "life_stage": "adult", "mood_score": 12},
        )
        assert r.status_code == 400
        codes = {e["code"] for e in r.json()["errors"]}
        assert codes == {"EMPTY_DESCRIPTION", "MOOD_OUT_OF_RANGE"}

    def test_unknown_patient_404(self, client):
        assert client.get("/patients/nope").status_code == 404

    def test_illegal_transition_409(self, client, demo):
        r = client.post(f"/sessions/{demo['completed_session_id']}/start")
        assert r.status_code == 409
        assert r.json()["error"] == "ILLEGAL_TRANSITION"

    def test_version_conflict_409(self, client, demo):
        r = client.post(
            f"/sessions/{demo['planned_session_id']}/start",
            headers={"If-Match": "42"},
        )
        assert r.status_code == 409
        assert r.json()["error"] == "VERSION_CONFLICT"

    def test_report_missing_404(self, client, demo):
        r = client.get(f"/sessions/{demo['planned_session_id']}/report")
        assert r.status_code == 404
        assert r.json()["error"] == "REPORT_MISSING"


class TestQueries:
    def test_filter_params(self, client, demo):
        pid = demo["patient_id"]
        r = client.get(f"/patients/{pid}/memories",
                       params={"life_stages": "childhood,adolescence"})
        assert {m["life_stage"] for m in r.json()} <= {"childhood", "adolescence"}
        r = client.get(f"/patients/{pid}/memories",
                       params={"preservation_statuses": "at_risk",
                               "emotion_valences": "positive"})
        for m in r.json():
            assert m["preservation_status"] == "at_risk"
            assert m["emotion_valence"] == "positive"

    def test_reversed_date_bounds_400(self, client, demo):
        r = client.get(f"/patients/{demo['patient_id']}/memories",
                       params={"date_from": "1950", "date_to": "1940"})
        assert r.status_code == 400
        assert r.json()["error"] == "INVALID_FILTER"

    def test_search_param(self, client, demo):
        r = client.get(f"/patients/{demo['patient_id']}/memories",
                       params={"search": "wedding"})
        assert [m["description"] for m in r.json()] == ["Wedding day"]

    def test_sort_param(self, client, demo):
        r = client.get(f"/patients/{demo['patient_id']}/memories",
                       params={"sort": "date", "direction": "desc"})
        years = [m["date"]["year"] for m in r.json()]
        assert years == sorted(years, reverse=True)

    def test_related_person_sort_param(self, client, demo):
        r = client.get(f"/patients/{demo['patient_id']}/related-persons",
                       params={"sort": "relationship_type"})
        types = [p["relationship_type"] for p in r.json()]
        assert types == sorted(types)


class TestMediaUpload:
    def test_multipart_upload_attaches(self, client, demo):
        mid = demo["memory_ids"][0]
        r = client.post(
            f"/memories/{mid}/media",
            files={"file": ("a.png", tiny_png((3, 3, 3)), "image/png")},
            data={"description": "uploaded", "kind": "photo"},
        )
        assert r.status_code == 201
        asset = r.json()["asset"]
        assert asset["kind"] == "photo"
        assert len(asset["content_hash"]) == 64
        assert asset["id"] in r.json()["memory"]["media"]


class TestLifeStoryAndCalendar:
    def test_preview_matches_stage_query(self, client, demo):
        r = client.post(
            f"/patients/{demo['patient_id']}/life-story/preview",
            json={"life_stages": ["childhood"]},
        )
        assert r.status_code == 200
        assert all(e["life_stage"] == "childhood" for e in r.json())

    def test_storyboard_first_slide_title(self, client, demo):
        r = client.post(
            f"/patients/{demo['patient_id']}/life-story/storyboard", json={}
        )
        assert r.json()["slides"][0]["kind"] == "title_card"

    def test_book_pdf_headers(self, client, demo):
        r = client.post(
            f"/patients/{demo['patient_id']}/life-story/book.pdf", json={}
        )
        assert r.status_code == 200
        assert r.headers["content-type"] == "application/pdf"
        assert r.content.startswith(b"%PDF-")
        assert "X-Structural-Digest" in r.headers

    def test_calendar_window(self, client, demo):
        r = client.get(
            f"/patients/{demo['patient_id']}/calendar",
            params={"from": "2025-03-01T00:00:00+00:00",
                    "to": "2025-03-31T23:59:59+00:00"},
        )
        assert [e["session_id"] for e in r.json()] == [demo["completed_session_id"]]

    def test_calendar_empty_window(self, client, demo):
        r = client.get(
            f"/patients/{demo['patient_id']}/calendar",
            params={"from": "1990-01-01T00:00:00+00:00",
                    "to": "1990-12-31T00:00:00+00:00"},
        )
        assert r.json() == []
