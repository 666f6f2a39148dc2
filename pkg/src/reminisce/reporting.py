"""PDF rendering for session reports, clinical assessments, and life-story
books.

The layout engine first produces a placement stream (text, lines, images
with coordinates), then a reportlab canvas replays it.  PDFs are written
uncompressed with reportlab's invariant mode, so identical inputs give
identical bytes; the structural digest hashes the placement stream with
volatile fields (timestamps, record ids) masked.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from enum import Enum

from reportlab.lib.pagesizes import A4
from reportlab.lib.units import mm
from reportlab.lib.utils import ImageReader
from reportlab.pdfbase.pdfmetrics import stringWidth
from reportlab.pdfgen.canvas import Canvas

from .domain import ClinicalAssessment, Patient, Session, SessionReport, TherapistAccount
from .errors import MEDIA_UNRESOLVED, REPORT_MISSING, DomainError
from .lifestory import BookLayout, BookOptions

PAGE_W, PAGE_H = A4
MARGIN = 20 * mm
CONTENT_W = PAGE_W - 2 * MARGIN
BODY_FONT = "Helvetica"
BOLD_FONT = "Helvetica-Bold"
BODY_SIZE = 10.5
HEADING_SIZE = 14
TITLE_SIZE = 20
LEADING = 1.35
MAX_IMAGE_H = 110 * mm


class DocumentKind(Enum):
    SESSION_REPORT = "session_report"
    ASSESSMENT = "assessment"
    LIFE_STORY_BOOK = "life_story_book"


@dataclass(frozen=True)
class RenderedDocument:
    bytes: bytes
    page_count: int
    document_kind: DocumentKind
    structural_digest: str
    placement_ops: tuple = ()


def export_filename(patient_id: str, kind: DocumentKind, date_str: str) -> str:
    return f"{patient_id}_{kind.value}_{date_str}.pdf"


def _wrap(text: str, font: str, size: float, width: float) -> list[str]:
    lines = []
    for para in text.split("\n"):
        words = para.split(" ")
        line = ""
        for word in words:
            trial = f"{line} {word}".strip()
            if stringWidth(trial, font, size) <= width or not line:
                line = trial
            else:
                lines.append(line)
                line = word
        lines.append(line)
    return lines


class PageComposer:
    """Cursor-flow layout over A4 pages; overlong content flows onward."""

    def __init__(self):
        self.ops: list[tuple] = []
        self.page = 1
        self.y = PAGE_H - MARGIN

    def _ensure(self, height: float) -> None:
        if self.y - height < MARGIN:
            self.page += 1
            self.y = PAGE_H - MARGIN

    def text(
        self,
        content: str,
        *,
        font: str = BODY_FONT,
        size: float = BODY_SIZE,
        indent: float = 0.0,
        volatile: bool = False,
    ) -> None:
        width = CONTENT_W - indent
        for line in _wrap(content, font, size, width):
            step = size * LEADING
            self._ensure(step)
            self.y -= step
            self.ops.append(
                ("text", self.page, round(MARGIN + indent, 2), round(self.y, 2),
                 font, size, line, volatile)
            )

    def heading(self, content: str, size: float = HEADING_SIZE) -> None:
        self.spacer(size * 0.6)
        self.text(content, font=BOLD_FONT, size=size)
        self.rule()

    def labelled(self, label: str, value: str, *, volatile: bool = False) -> None:
        if value:
            self.text(f"{label}: {value}", volatile=volatile)

    def spacer(self, height: float) -> None:
        self._ensure(height)
        self.y -= height

    def rule(self) -> None:
        self._ensure(4)
        self.y -= 3
        self.ops.append(
            ("line", self.page, round(MARGIN, 2), round(self.y, 2),
             round(MARGIN + CONTENT_W, 2), round(self.y, 2))
        )
        self.y -= 3

    def line(self, x1: float, y1: float, x2: float, y2: float) -> None:
        self.ops.append(
            ("line", self.page, round(x1, 2), round(y1, 2), round(x2, 2), round(y2, 2))
        )

    def image(self, image_bytes: bytes, content_hash: str) -> None:
        from PIL import Image

        with Image.open(io.BytesIO(image_bytes)) as img:
            src_w, src_h = img.size
        scale = min(CONTENT_W / src_w, MAX_IMAGE_H / src_h, 1.0)
        w, h = src_w * scale, src_h * scale
        self._ensure(h + 6)
        self.y -= h + 3
        self.ops.append(
            ("image", self.page, round(MARGIN, 2), round(self.y, 2),
             round(w, 3), round(h, 3), content_hash, src_w, src_h)
        )
        self.y -= 3

    def placeholder_box(self, caption: str) -> None:
        h = 16 * mm
        self._ensure(h + 6)
        self.y -= h + 3
        x0, y0 = MARGIN, self.y
        self.ops.append(("rect", self.page, round(x0, 2), round(y0, 2),
                         round(CONTENT_W, 2), round(h, 2)))
        self.ops.append(
            ("text", self.page, round(x0 + 6, 2), round(y0 + h / 2 - 4, 2),
             BODY_FONT, BODY_SIZE, caption, False)
        )
        self.y -= 3


def _digest(ops: list[tuple]) -> str:
    masked = []
    for op in ops:
        if op[0] == "text" and op[7]:
            masked.append(op[:6] + ("<volatile>",))
        elif op[0] == "text":
            masked.append(op[:7])
        else:
            masked.append(op)
    payload = json.dumps(masked, sort_keys=False).encode()
    return hashlib.sha256(payload).hexdigest()


def _to_pdf(ops: list[tuple], page_count: int, media_resolver=None) -> bytes:
    buf = io.BytesIO()
    canvas = Canvas(buf, pagesize=A4, pageCompression=0, invariant=1)
    for page in range(1, page_count + 1):
        for op in ops:
            if op[1] != page:
                continue
            if op[0] == "text":
                _, _, x, y, font, size, content, _volatile = op
                canvas.setFont(font, size)
                canvas.drawString(x, y, content)
            elif op[0] == "line":
                _, _, x1, y1, x2, y2 = op
                canvas.line(x1, y1, x2, y2)
            elif op[0] == "rect":
                _, _, x, y, w, h = op
                canvas.rect(x, y, w, h)
            elif op[0] == "image":
                _, _, x, y, w, h, content_hash, _sw, _sh = op
                canvas.drawImage(
                    ImageReader(io.BytesIO(media_resolver(content_hash))),
                    x, y, width=w, height=h,
                )
        canvas.showPage()
    canvas.save()
    return buf.getvalue()


def _finish(
    composer: PageComposer, kind: DocumentKind, media_resolver=None
) -> RenderedDocument:
    ops = composer.ops
    data = _to_pdf(ops, composer.page, media_resolver)
    return RenderedDocument(
        bytes=data,
        page_count=composer.page,
        document_kind=kind,
        structural_digest=_digest(ops),
        placement_ops=tuple(ops),
    )


def render_session_report(
    session: Session,
    report: SessionReport | None,
    patient: Patient,
    therapist: TherapistAccount | None = None,
    memory_captions: dict[str, str] | None = None,
) -> RenderedDocument:
    if report is None:
        raise DomainError(REPORT_MISSING, f"session {session.id} has no report")
    captions = memory_captions or {}
    c = PageComposer()
    c.text("Session Report", font=BOLD_FONT, size=TITLE_SIZE)
    c.rule()
    c.labelled("Patient", patient.display_name)
    c.labelled("File number", patient.file_number or "")
    c.spacer(4)
    c.heading("Session")
    c.labelled("Date", session.scheduled_at.strftime("%Y-%m-%d %H:%M %Z"))
    c.labelled("Objectives", session.objectives)
    c.labelled("Description", session.description)
    c.labelled("Barriers", session.barriers or "")
    c.labelled("Facilitators", session.facilitators or "")
    if session.activity_sequence:
        c.text("Activity sequence:")
        for i, step in enumerate(session.activity_sequence, 1):
            c.text(f"{i}. {step}", indent=12)
    c.labelled("Location", session.session_location or "")
    c.heading("Memory outcomes")
    for outcome in report.memory_outcomes:
        caption = captions.get(outcome.memory_id, outcome.memory_id)
        line = (
            f"- {caption}: preservation {outcome.observed_preservation.value}, "
            f"reaction {outcome.emotional_reaction.value}"
        )
        c.text(line, volatile=outcome.memory_id not in captions)
        if outcome.notes:
            c.text(f"  notes: {outcome.notes}", indent=12)
    c.heading("Evaluation")
    c.labelled("Overall impression", report.overall_impression)
    c.labelled("Participation score", f"{report.participation_score} / 10")
    c.labelled("Repeat recommended", "yes" if report.repeat_recommended else "no")
    c.labelled("Future proposals", report.future_proposals or "")
    c.spacer(8)
    if therapist is not None:
        c.labelled("Therapist", f"{therapist.display_name} <{therapist.email}>")
    c.labelled("Report created", report.created_at.strftime("%Y-%m-%d %H:%M %Z"),
               volatile=True)
    return _finish(c, DocumentKind.SESSION_REPORT)


def _draw_evolution_chart(c: PageComposer, instrument: str, points) -> None:
    """Vector line chart: x spreads the points evenly, y spans the
    instrument range."""
    chart_h = 45 * mm
    chart_w = CONTENT_W
    c.text(f"Evolution: {instrument}", font=BOLD_FONT)
    c.spacer(6)
    c._ensure(chart_h + 10)
    c.y -= chart_h
    x0, y0 = MARGIN, c.y
    lo = min(p.range_min for p in points)
    hi = max(p.range_max for p in points)
    span = (hi - lo) or 1.0
    # axes
    c.line(x0, y0, x0 + chart_w, y0)
    c.line(x0, y0, x0, y0 + chart_h)
    n = len(points)
    coords = []
    for i, p in enumerate(points):
        px = x0 + (chart_w * (i / (n - 1)) if n > 1 else chart_w / 2)
        py = y0 + chart_h * (p.score - lo) / span
        coords.append((px, py))
    for (ax, ay), (bx, by) in zip(coords, coords[1:]):
        c.line(ax, ay, bx, by)
    for px, py in coords:
        c.line(px - 1.5, py, px + 1.5, py)
        c.line(px, py - 1.5, px, py + 1.5)
    c.y -= 6
    c.text(f"scale {lo:g} to {hi:g}, {n} assessments")


def render_assessment_report(
    assessment: ClinicalAssessment,
    patient: Patient,
    therapist: TherapistAccount | None = None,
    series_by_instrument: dict | None = None,
) -> RenderedDocument:
    c = PageComposer()
    c.text("Clinical Assessment Report", font=BOLD_FONT, size=TITLE_SIZE)
    c.rule()
    c.labelled("Patient", patient.display_name)
    c.labelled("File number", patient.file_number or "")
    c.labelled("Assessed", str(assessment.assessed_at))
    c.heading("Diagnosis")
    c.labelled("Type", assessment.diagnosis_type)
    if assessment.diagnosis_date:
        c.labelled("Diagnosis date", str(assessment.diagnosis_date))
    if assessment.gds_stage is not None:
        c.labelled("Global Deterioration Scale stage", str(assessment.gds_stage))
    if assessment.instrument_results:
        c.heading("Assessment instruments")
        for r in assessment.instrument_results:
            c.text(
                f"{r.instrument_name}: {r.score:g} (range {r.range_min:g}-{r.range_max:g})"
            )
    c.labelled("Non-standardized instruments", assessment.nonstandard_instruments or "")
    c.labelled("Observations", assessment.observations or "")
    c.labelled("Overall impression", assessment.overall_impression.value)
    for instrument, points in (series_by_instrument or {}).items():
        if len(points) >= 2:
            c.spacer(6)
            _draw_evolution_chart(c, instrument, points)
    c.spacer(12)
    c.heading("Signature")
    if therapist is not None:
        c.labelled("Therapist", therapist.display_name)
    c.labelled(
        "Signed",
        assessment.signature.signed_at.strftime("%Y-%m-%d %H:%M %Z"),
        volatile=True,
    )
    c.line(MARGIN, c.y - 14, MARGIN + 60 * mm, c.y - 14)
    return _finish(c, DocumentKind.ASSESSMENT)


def render_life_story_book(
    book: BookLayout,
    blob_resolver,
    options: BookOptions = BookOptions(),
    media_index: dict | None = None,
) -> RenderedDocument:
    """``media_index`` maps MediaAsset id -> (content_hash, kind label,
    description); blobs come from ``blob_resolver(content_hash)``."""
    index = media_index or {}
    # check all visual refs resolve before emitting anything
    for _, entries in book.chapters:
        for entry in entries:
            for mid in entry.visual_media:
                if mid not in index:
                    raise DomainError(MEDIA_UNRESOLVED, f"no media asset {mid}")
                content_hash = index[mid][0]
                try:
                    blob_resolver(content_hash)
                except DomainError:
                    raise DomainError(MEDIA_UNRESOLVED, f"no blob {content_hash}")

    c = PageComposer()
    c.spacer(60)
    c.text(book.title_page.patient_name, font=BOLD_FONT, size=26)
    c.spacer(10)
    c.text("Life Story Book", font=BOLD_FONT, size=TITLE_SIZE)
    c.spacer(10)
    c.text(f"Selection: {book.title_page.query_summary}")
    c.text(
        "Generated " + book.title_page.generated_at.strftime("%Y-%m-%d"),
        volatile=True,
    )
    for stage, entries in book.chapters:
        c.page += 1
        c.y = PAGE_H - MARGIN
        c.text(stage.label, font=BOLD_FONT, size=TITLE_SIZE)
        c.rule()
        for entry in entries:
            c.spacer(8)
            c.text(entry.caption, font=BOLD_FONT, size=12)
            meta = str(entry.date)
            if entry.location:
                meta += f" - {entry.location}"
            if entry.related_person_names:
                meta += " - with " + ", ".join(entry.related_person_names)
            c.text(meta)
            for mid in entry.visual_media:
                content_hash = index[mid][0]
                c.image(blob_resolver(content_hash), content_hash)
            if options.include_av_placeholders:
                for mid in entry.av_media:
                    kind = index.get(mid, (None, "media", None))[1]
                    desc = index.get(mid, (None, None, None))[2] or entry.caption
                    c.placeholder_box(f"[{kind}] {desc}")
    return _finish(c, DocumentKind.LIFE_STORY_BOOK, media_resolver=blob_resolver)
