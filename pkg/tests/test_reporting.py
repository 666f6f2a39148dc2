import pytest

from reminisce.catalog import MemoryFilter
from reminisce.errors import DomainError
from reminisce.pdftext import extract_text
from reminisce.reporting import (
    DocumentKind,
    export_filename,
    render_assessment_report,
    render_life_story_book,
    render_session_report,
)
from reminisce.seed import tiny_png


@pytest.fixture
def completed(service, demo):
    session = service.store.get("sessions", demo["completed_session_id"])
    report = service.session_report(session.id)
    patient = service.store.get("patients", demo["patient_id"])
    captions = {m.id: m.description for m in service.patient_memories(patient.id)}
    return session, report, patient, captions


def media_index(service):
    return {
        a.id: (a.content_hash, a.kind.value, a.description)
        for a in service.store.list("media_assets")
    }


class TestSessionReportPdf:
    def test_pdf_header_and_pages(self, completed):
        session, report, patient, captions = completed
        doc = render_session_report(session, report, patient, memory_captions=captions)
        assert doc.bytes.startswith(b"%PDF-")
        assert doc.page_count >= 1
        assert doc.document_kind is DocumentKind.SESSION_REPORT

    def test_outcome_rows_in_extracted_text(self, completed):
        session, report, patient, captions = completed
        doc = render_session_report(session, report, patient, memory_captions=captions)
        text = extract_text(doc.bytes)
        rows = [ln for ln in text.splitlines() if "preservation" in ln and ln.startswith("- ")]
        assert len(rows) == len(report.memory_outcomes) == 2

    def test_every_source_field_verbatim(self, completed):
        session, report, patient, captions = completed
        doc = render_session_report(session, report, patient, memory_captions=captions)
        text = extract_text(doc.bytes)
        for expected in (
            patient.display_name,
            session.objectives,
            session.description,
            session.barriers,
            session.facilitators,
            session.session_location,
            report.overall_impression,
            report.future_proposals or "",
            *session.activity_sequence,
        ):
            if expected:
                assert expected in text

    def test_repeat_render_equal_digest(self, completed):
        session, report, patient, captions = completed
        a = render_session_report(session, report, patient, memory_captions=captions)
        b = render_session_report(session, report, patient, memory_captions=captions)
        assert a.structural_digest == b.structural_digest
        assert a.bytes == b.bytes

    def test_missing_report_rejected(self, completed):
        session, _, patient, _ = completed
        with pytest.raises(DomainError) as exc:
            render_session_report(session, None, patient)
        assert exc.value.code == "REPORT_MISSING"

    def test_overlong_text_flows_to_more_pages(self, completed):
        session, report, patient, captions = completed
        report.future_proposals = "continue with maritime themes. " * 400
        doc = render_session_report(session, report, patient, memory_captions=captions)
        assert doc.page_count >= 2
        assert "maritime themes" in extract_text(doc.bytes)


class TestAssessmentPdf:
    def render(self, service, demo, which=1, with_series=True):
        assessment = service.store.get("assessments", demo["assessment_ids"][which])
        patient = service.store.get("patients", demo["patient_id"])
        therapist = service.store.get("therapists", demo["therapist_id"])
        series = (
            {"MMSE": service.evolution_series(patient.id, "MMSE")}
            if with_series
            else {}
        )
        return render_assessment_report(assessment, patient, therapist, series)

    def test_instrument_row_shows_score_and_range(self, service, demo):
        text = extract_text(self.render(service, demo).bytes)
        assert "MMSE: 19 (range 0-30)" in text

    def test_signature_block(self, service, demo):
        text = extract_text(self.render(service, demo).bytes)
        assert "Signature" in text
        assert "Ana Ferreiro" in text
        assert "Signed" in text

    def test_gds_and_impression_present(self, service, demo):
        text = extract_text(self.render(service, demo).bytes)
        assert "Global Deterioration Scale stage: 4" in text
        assert "worsened" in text
        assert "house drawing exercise" in text

    def test_chart_only_with_two_or_more_points(self, service, demo):
        with_chart = self.render(service, demo, with_series=True)
        assert "Evolution: MMSE" in extract_text(with_chart.bytes)
        # a single point series renders no chart section
        single = self.render(service, demo, with_series=False)
        assert "Evolution: MMSE" not in extract_text(single.bytes)
        # chart contributes vector line ops beyond the rules/signature lines
        chart_lines = [op for op in with_chart.placement_ops if op[0] == "line"]
        plain_lines = [op for op in single.placement_ops if op[0] == "line"]
        assert len(chart_lines) > len(plain_lines)

    def test_deterministic(self, service, demo):
        assert (
            self.render(service, demo).structural_digest
            == self.render(service, demo).structural_digest
        )


class TestBookPdf:
    def book(self, service, demo, query=None):
        return service.life_story_book(demo["patient_id"], query or MemoryFilter())

    def test_empty_book_single_page(self, service, demo):
        patient = service.create_patient(
            {"display_name": "Empty", "assigned_therapists": [demo["therapist_id"]]}
        )
        book = service.life_story_book(patient.id, MemoryFilter())
        doc = render_life_story_book(book, service.blobs.get, media_index={})
        assert doc.page_count == 1
        assert "Life Story Book" in extract_text(doc.bytes)

    def test_chapters_in_life_stage_order(self, service, demo):
        doc = render_life_story_book(
            self.book(service, demo), service.blobs.get, media_index=media_index(service)
        )
        text = extract_text(doc.bytes)
        positions = [
            text.index(label)
            for label in ("Childhood", "Adolescence", "Young Adult", "Older Adult")
        ]
        assert positions == sorted(positions)

    def test_embedded_image_preserves_aspect_ratio(self, service, demo):
        # non-square source so a stretch would be caught
        data = tiny_png((200, 40, 40), size=(320, 117))
        asset = service.store_media(data, {"media_type_label": "image/png"})
        service.attach_media(demo["memory_ids"][1], asset.id)
        doc = render_life_story_book(
            self.book(service, demo), service.blobs.get, media_index=media_index(service)
        )
        images = [op for op in doc.placement_ops if op[0] == "image"]
        assert images
        for _, _page, _x, _y, w, h, _hash, src_w, src_h in images:
            assert abs((w / h) / (src_w / src_h) - 1) < 0.005

    def test_dangling_media_rejected(self, service, demo):
        book = self.book(service, demo)
        bad_index = {
            aid: ("0" * 64, kind, desc)
            for aid, (_h, kind, desc) in media_index(service).items()
        }
        with pytest.raises(DomainError) as exc:
            render_life_story_book(book, service.blobs.get, media_index=bad_index)
        assert exc.value.code == "MEDIA_UNRESOLVED"

    def test_av_placeholder_box(self, service, demo):
        audio = service.store_media(b"RIFF....WAVE", {"media_type_label": "audio/wav",
                                                      "description": "sea shanty tape"})
        service.attach_media(demo["memory_ids"][3], audio.id)
        doc = render_life_story_book(
            self.book(service, demo), service.blobs.get, media_index=media_index(service)
        )
        assert "[audio] sea shanty tape" in extract_text(doc.bytes)
        assert any(op[0] == "rect" for op in doc.placement_ops)

    def test_captions_dates_locations_present(self, service, demo):
        doc = render_life_story_book(
            self.book(service, demo), service.blobs.get, media_index=media_index(service)
        )
        text = extract_text(doc.bytes)
        for m in service.patient_memories(demo["patient_id"]):
            assert m.description in text
            if m.location:
                assert m.location in text


def test_export_filename_convention():
    name = export_filename("p123", DocumentKind.ASSESSMENT, "2025-06-01")
    assert name == "p123_assessment_2025-06-01.pdf"
