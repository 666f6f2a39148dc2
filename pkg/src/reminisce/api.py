"""HTTP/1.1 JSON API over the whole service.

Authentication is static bearer tokens; every patient-scoped route runs the
``require_patient_access`` guard before any read or write.  Mutating
requests honor ``If-Match: <record_version>`` and answer 409 on mismatch.
"""

from __future__ import annotations

from datetime import datetime, timezone

from fastapi import Depends, FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from . import serialize
from .catalog import (
    MemoryFilter,
    RelatedPersonSort,
    SortDirection,
    SortField,
    SortKey,
)
from .domain import (
    EmotionValence,
    parse_emotion,
    parse_life_stage,
    parse_partial_date,
    parse_preservation,
)
from .errors import HTTP_STATUS_BY_CODE, DomainError, ValidationFailure
from .lifestory import StoryboardOptions, life_story_query
from .outbox import OutboxWorker, outbox_entry_to_dict
from .reporting import (
    DocumentKind,
    export_filename,
    render_assessment_report,
    render_life_story_book,
    render_session_report,
)
from .service import TherapyService

# Path parameters whose presence makes a route patient-scoped; the guard
# resolves each to its owning patient.  The authorization meta-test keys
# off this same table.
PATIENT_SCOPE_PARAMS = (
    "patient_id",
    "memory_id",
    "session_id",
    "assessment_id",
    "related_person_id",
)


def _empty(status: int) -> Response:
    return Response(status_code=status)


def create_app(
    service: TherapyService,
    outbox_worker: OutboxWorker | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="Reminiscence therapy service", docs_url=None, redoc_url=None)
    store = service.store

    @app.exception_handler(DomainError)
    async def domain_error_handler(_request, exc: DomainError):
        status = HTTP_STATUS_BY_CODE.get(exc.code, 400)
        if status in (401, 403):
            return _empty(status)
        body = {"error": exc.code, "message": exc.message}
        if isinstance(exc, ValidationFailure):
            body["errors"] = [
                {"field": e.field, "code": e.code, "message": e.message}
                for e in exc.errors
            ]
        return JSONResponse(status_code=status, content=body)

    # -- auth --------------------------------------------------------------

    def current_therapist(request: Request):
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise DomainError("UNAUTHENTICATED", "missing bearer token")
        token = header.split(" ", 1)[1].strip()
        record = store.token_record(token)
        if record is None:
            raise DomainError("UNAUTHENTICATED", "unknown token")
        if record.get("expires_at"):
            expires = datetime.fromisoformat(record["expires_at"])
            if service.clock() >= expires:
                raise DomainError("UNAUTHENTICATED", "token expired")
        account = store.find("therapists", record["therapist_id"])
        if account is None:
            raise DomainError("UNAUTHENTICATED", "account removed")
        return account

    def _owning_patient_id(params: dict) -> str | None:
        if "patient_id" in params:
            return params["patient_id"]
        if "memory_id" in params:
            return service.store.get("memories", params["memory_id"]).patient_id
        if "session_id" in params:
            return service.store.get("sessions", params["session_id"]).patient_id
        if "assessment_id" in params:
            return service.store.get("assessments", params["assessment_id"]).patient_id
        if "related_person_id" in params:
            return service.store.get(
                "related_persons", params["related_person_id"]
            ).patient_id
        return None

    def require_patient_access(request: Request, therapist=Depends(current_therapist)):
        patient_id = _owning_patient_id(request.path_params)
        if patient_id is not None:
            patient = store.find("patients", patient_id)
            if patient is None:
                raise DomainError("UNKNOWN_PATIENT", f"no patient {patient_id}")
            if therapist.id not in patient.assigned_therapists:
                raise DomainError("FORBIDDEN", "therapist not assigned to patient")
        return therapist

    guarded = [Depends(require_patient_access)]

    def _if_match(request: Request) -> int | None:
        raw = request.headers.get("if-match")
        if raw is None:
            return None
        try:
            return int(raw.strip().strip('"'))
        except ValueError:
            raise DomainError("VERSION_CONFLICT", f"bad If-Match value {raw!r}")

    # -- account -----------------------------------------------------------

    @app.get("/me")
    def me(therapist=Depends(current_therapist)):
        return serialize.therapist_to_dict(therapist)

    # -- patients ----------------------------------------------------------

    @app.get("/patients")
    def list_patients(therapist=Depends(current_therapist)):
        mine = store.list("patients", lambda p: therapist.id in p.assigned_therapists)
        return [serialize.patient_to_dict(p) for p in mine]

    @app.post("/patients", status_code=201)
    async def create_patient(request: Request, therapist=Depends(current_therapist)):
        draft = await request.json()
        draft.setdefault("assigned_therapists", [therapist.id])
        return serialize.patient_to_dict(service.create_patient(draft))

    @app.get("/patients/{patient_id}", dependencies=guarded)
    def get_patient(patient_id: str):
        return serialize.patient_to_dict(store.get("patients", patient_id))

    @app.patch("/patients/{patient_id}", dependencies=guarded)
    async def patch_patient(patient_id: str, request: Request):
        changes = await request.json()
        patient = service.update_patient(patient_id, changes, _if_match(request))
        return serialize.patient_to_dict(patient)

    # -- related persons ---------------------------------------------------

    @app.get("/patients/{patient_id}/related-persons", dependencies=guarded)
    def related_persons(patient_id: str, sort: str = "name"):
        key = (
            RelatedPersonSort.RELATIONSHIP_TYPE
            if sort in ("relationship_type", "relationship-type")
            else RelatedPersonSort.NAME
        )
        return [
            serialize.related_person_to_dict(p)
            for p in service.related_persons(patient_id, key)
        ]

    @app.post("/patients/{patient_id}/related-persons", status_code=201,
              dependencies=guarded)
    async def add_related_person(patient_id: str, request: Request):
        draft = await request.json()
        return serialize.related_person_to_dict(
            service.add_related_person(patient_id, draft)
        )

    # -- memories ----------------------------------------------------------

    def _filter_from_query(request: Request) -> MemoryFilter:
        q = request.query_params

        def split(name):
            raw = q.get(name)
            return [p for p in raw.split(",") if p] if raw else []

        return MemoryFilter(
            life_stages=frozenset(parse_life_stage(s) for s in split("life_stages")),
            date_from=parse_partial_date(q["date_from"]) if q.get("date_from") else None,
            date_to=parse_partial_date(q["date_to"]) if q.get("date_to") else None,
            categories=frozenset(c.lower() for c in split("categories")),
            location_contains=q.get("location_contains"),
            related_person_ids=frozenset(split("related_person_ids")),
            preservation_statuses=frozenset(
                parse_preservation(s) for s in split("preservation_statuses")
            ),
            emotion_valences=frozenset(
                parse_emotion(s) for s in split("emotion_valences")
            ),
        )

    @app.get("/patients/{patient_id}/memories", dependencies=guarded)
    def list_memories(patient_id: str, request: Request):
        q = request.query_params
        sort = None
        if q.get("sort"):
            sort = SortKey(
                SortField(q["sort"]),
                SortDirection(q.get("direction", "asc")),
            )
        memories = service.query_memories(
            patient_id,
            flt=_filter_from_query(request),
            sort=sort,
            search=q.get("search"),
        )
        return [serialize.memory_to_dict(m) for m in memories]

    @app.post("/patients/{patient_id}/memories", status_code=201, dependencies=guarded)
    async def create_memory(patient_id: str, request: Request):
        draft = await request.json()
        return serialize.memory_to_dict(service.create_memory(patient_id, draft))

    @app.get("/memories/{memory_id}", dependencies=guarded)
    def get_memory(memory_id: str):
        return serialize.memory_to_dict(store.get("memories", memory_id))

    @app.patch("/memories/{memory_id}", dependencies=guarded)
    async def patch_memory(memory_id: str, request: Request):
        changes = await request.json()
        memory = service.update_memory(memory_id, changes, _if_match(request))
        return serialize.memory_to_dict(memory)

    @app.post("/memories/{memory_id}/media", status_code=201, dependencies=guarded)
    async def upload_media(memory_id: str, request: Request, file: UploadFile):
        form = await request.form()
        data = await file.read()
        asset = service.store_media(
            data,
            {
                "media_type_label": form.get("media_type_label")
                or file.content_type
                or "",
                "kind": form.get("kind"),
                "description": form.get("description"),
                "location": form.get("location"),
                "date": form.get("date"),
                "life_stage": form.get("life_stage"),
            },
        )
        memory = service.attach_media(memory_id, asset.id, _if_match(request))
        return {
            "asset": serialize.media_asset_to_dict(asset),
            "memory": serialize.memory_to_dict(memory),
        }

    # -- sessions ----------------------------------------------------------

    @app.get("/patients/{patient_id}/sessions", dependencies=guarded)
    def list_sessions(patient_id: str):
        return [serialize.session_to_dict(s) for s in service.patient_sessions(patient_id)]

    @app.post("/patients/{patient_id}/sessions", status_code=201, dependencies=guarded)
    async def plan_session(patient_id: str, request: Request):
        draft = await request.json()
        return serialize.session_to_dict(service.plan_session(patient_id, draft))

    @app.get("/sessions/{session_id}", dependencies=guarded)
    def get_session(session_id: str):
        return serialize.session_to_dict(store.get("sessions", session_id))

    @app.post("/sessions/{session_id}/start", dependencies=guarded)
    def start_session(session_id: str, request: Request):
        return serialize.session_to_dict(
            service.start_session(session_id, _if_match(request))
        )

    @app.post("/sessions/{session_id}/cancel", dependencies=guarded)
    def cancel_session(session_id: str, request: Request):
        return serialize.session_to_dict(
            service.cancel_session(session_id, _if_match(request))
        )

    @app.post("/sessions/{session_id}/reschedule", dependencies=guarded)
    async def reschedule_session(session_id: str, request: Request):
        body = await request.json()
        return serialize.session_to_dict(
            service.reschedule_session(session_id, body["scheduled_at"], _if_match(request))
        )

    @app.post("/sessions/{session_id}/amend", dependencies=guarded)
    async def amend_session(session_id: str, request: Request):
        draft = await request.json()
        memory, session = service.amend_memory_in_session(
            session_id, draft, _if_match(request)
        )
        return {
            "memory": serialize.memory_to_dict(memory),
            "session": serialize.session_to_dict(session),
        }

    @app.post("/sessions/{session_id}/end", dependencies=guarded)
    async def end_session(session_id: str, request: Request):
        draft = await request.json()
        session, report = service.end_session(session_id, draft, _if_match(request))
        return {
            "session": serialize.session_to_dict(session),
            "report": serialize.session_report_to_dict(report),
        }

    @app.get("/sessions/{session_id}/report", dependencies=guarded)
    def get_report(session_id: str):
        return serialize.session_report_to_dict(service.session_report(session_id))

    @app.get("/sessions/{session_id}/report.pdf", dependencies=guarded)
    def get_report_pdf(session_id: str):
        session = store.get("sessions", session_id)
        report = service.session_report(session_id)
        patient = store.get("patients", session.patient_id)
        captions = {
            m.id: m.description
            for m in store.list("memories", lambda m: m.patient_id == patient.id)
        }
        doc = render_session_report(session, report, patient, memory_captions=captions)
        return _pdf_response(doc, patient.id, DocumentKind.SESSION_REPORT)

    # -- assessments -------------------------------------------------------

    @app.get("/patients/{patient_id}/assessments", dependencies=guarded)
    def list_assessments(patient_id: str):
        return [
            serialize.assessment_to_dict(a)
            for a in service.patient_assessments(patient_id)
        ]

    @app.post("/patients/{patient_id}/assessments", status_code=201,
              dependencies=guarded)
    async def create_assessment(patient_id: str, request: Request):
        draft = await request.json()
        return serialize.assessment_to_dict(service.record_assessment(patient_id, draft))

    # registered before GET /assessments/{assessment_id}: the plain path
    # param would otherwise swallow the ".pdf" suffix
    @app.get("/assessments/{assessment_id}.pdf", dependencies=guarded)
    def assessment_pdf(assessment_id: str):
        assessment = store.get("assessments", assessment_id)
        patient = store.get("patients", assessment.patient_id)
        therapist = store.find("therapists", assessment.signature.therapist_id)
        series = {
            r.instrument_name: service.evolution_series(patient.id, r.instrument_name)
            for r in assessment.instrument_results
        }
        doc = render_assessment_report(assessment, patient, therapist, series)
        return _pdf_response(doc, patient.id, DocumentKind.ASSESSMENT)

    @app.get("/assessments/{assessment_id}", dependencies=guarded)
    def get_assessment(assessment_id: str):
        return serialize.assessment_to_dict(store.get("assessments", assessment_id))

    @app.patch("/assessments/{assessment_id}", dependencies=guarded)
    async def patch_assessment(assessment_id: str, request: Request):
        current = store.get("assessments", assessment_id)
        draft = serialize.assessment_to_dict(current)
        changes = await request.json()
        draft.update(changes)
        draft["id"] = assessment_id
        expected = _if_match(request)
        draft["record_version"] = (
            current.record_version if expected is None else expected
        )
        return serialize.assessment_to_dict(
            service.record_assessment(current.patient_id, draft)
        )

    @app.get("/patients/{patient_id}/evolution/{instrument_name}", dependencies=guarded)
    def evolution(patient_id: str, instrument_name: str):
        return [
            {
                "assessed_at": serialize.partial_date_to_dict(p.assessed_at),
                "score": p.score,
                "range_min": p.range_min,
                "range_max": p.range_max,
            }
            for p in service.evolution_series(patient_id, instrument_name)
        ]

    # -- life story --------------------------------------------------------

    def _story_query(body: dict) -> MemoryFilter:
        return life_story_query(
            life_stages=frozenset(
                parse_life_stage(s) for s in body.get("life_stages") or ()
            ),
            date_from=parse_partial_date(body["date_from"])
            if body.get("date_from")
            else None,
            date_to=parse_partial_date(body["date_to"]) if body.get("date_to") else None,
            categories=frozenset(
                str(c).lower() for c in body.get("categories") or ()
            ),
        )

    @app.post("/patients/{patient_id}/life-story/preview", dependencies=guarded)
    async def life_story_preview(patient_id: str, request: Request):
        body = await request.json()
        entries = service.life_story_entries(patient_id, _story_query(body))
        return [
            {
                "memory_id": e.memory_id,
                "date": serialize.partial_date_to_dict(e.date),
                "life_stage": e.life_stage.value,
                "caption": e.caption,
                "location": e.location,
                "visual_media": list(e.visual_media),
                "av_media": list(e.av_media),
                "related_person_names": list(e.related_person_names),
            }
            for e in entries
        ]

    @app.post("/patients/{patient_id}/life-story/book.pdf", dependencies=guarded)
    async def life_story_book_pdf(patient_id: str, request: Request):
        body = await request.json()
        book = service.life_story_book(patient_id, _story_query(body))
        index = {
            a.id: (a.content_hash, a.kind.value, a.description)
            for a in store.list("media_assets")
        }
        doc = render_life_story_book(book, service.blobs.get, media_index=index)
        return _pdf_response(doc, patient_id, DocumentKind.LIFE_STORY_BOOK)

    @app.post("/patients/{patient_id}/life-story/storyboard", dependencies=guarded)
    async def life_story_storyboard(patient_id: str, request: Request):
        body = await request.json()
        options = StoryboardOptions(
            slide_seconds=float(body.get("slide_seconds", 5.0))
        )
        manifest = service.life_story_storyboard(
            patient_id, _story_query(body), options
        )
        return manifest.to_json_dict()

    # -- calendar ----------------------------------------------------------

    @app.get("/patients/{patient_id}/calendar", dependencies=guarded)
    def calendar(patient_id: str, request: Request):
        q = request.query_params

        def parse_dt(name, default):
            raw = q.get(name)
            if not raw:
                return default
            dt = datetime.fromisoformat(raw)
            return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)

        window_from = parse_dt("from", datetime(1850, 1, 1, tzinfo=timezone.utc))
        window_to = parse_dt("to", datetime(2100, 12, 31, tzinfo=timezone.utc))
        return [
            {
                "session_id": e.session_id,
                "patient_id": e.patient_id,
                "scheduled_at": e.scheduled_at.isoformat(),
                "status": e.status.value,
                "title": e.title,
            }
            for e in service.calendar_view(patient_id, window_from, window_to)
        ]

    # -- email -------------------------------------------------------------

    @app.post("/related-persons/{related_person_id}/email", status_code=202,
              dependencies=guarded)
    async def send_email(related_person_id: str, request: Request):
        body = await request.json()
        entry = service.enqueue_email(
            related_person_id, body.get("subject", ""), body.get("body", "")
        )
        if outbox_worker is not None:
            outbox_worker.deliver_pending()
            entry = store.get("outbox", entry.id)
        return outbox_entry_to_dict(entry)

    # -- static UI ---------------------------------------------------------

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _pdf_response(doc, patient_id: str, kind: DocumentKind) -> Response:
    from datetime import date

    filename = export_filename(patient_id, kind, date.today().isoformat())
    return Response(
        content=doc.bytes,
        media_type="application/pdf",
        headers={
            "Content-Disposition": f'attachment; filename="{filename}"',
            "X-Structural-Digest": doc.structural_digest,
            "X-Page-Count": str(doc.page_count),
        },
    )
