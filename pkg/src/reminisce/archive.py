"""Portable zip archive: ``manifest.json`` plus ``media/<sha256>`` blobs.

Every blob is verified against its filename hash before anything is
committed; any verification failure aborts the whole import.  Credentials
never travel in archives.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field

from . import serialize
from .errors import HASH_MISMATCH, NOT_EMPTY, SCHEMA_TOO_NEW, DomainError
from .store import BlobStore, Store, entity_key, sha256_hex

SCHEMA_VERSION = 1

ARCHIVE_COLLECTIONS = (
    "patients",
    "related_persons",
    "memories",
    "media_assets",
    "sessions",
    "session_reports",
    "assessments",
    "therapists",
)

# schema_version -> migration applied to the raw manifest to reach the next
# version; version 1 is current, so the table is empty for now.
MIGRATIONS: dict[int, callable] = {}


def _patient_scope(store: Store, patient_id: str) -> dict[str, list]:
    patient = store.get("patients", patient_id)
    related = store.list("related_persons", lambda p: p.patient_id == patient_id)
    memories = store.list("memories", lambda m: m.patient_id == patient_id)
    sessions = store.list("sessions", lambda s: s.patient_id == patient_id)
    session_ids = {s.id for s in sessions}
    reports = store.list("session_reports", lambda r: r.session_id in session_ids)
    assessments = store.list("assessments", lambda a: a.patient_id == patient_id)
    media_ids = set()
    for m in memories:
        media_ids.update(m.media)
    for s in sessions:
        media_ids.update(s.planned_media_ids)
    media = store.list("media_assets", lambda a: a.id in media_ids)
    therapists = store.list("therapists", lambda t: t.id in patient.assigned_therapists)
    return {
        "patients": [patient],
        "related_persons": related,
        "memories": memories,
        "media_assets": media,
        "sessions": sessions,
        "session_reports": reports,
        "assessments": assessments,
        "therapists": therapists,
    }


def export_archive(
    store: Store, blobs: BlobStore, patient_id: str | None = None
) -> bytes:
    """Zip bytes holding all in-scope entities and exactly their blobs."""
    if patient_id is not None:
        scope = _patient_scope(store, patient_id)
    else:
        scope = {kind: store.list(kind) for kind in ARCHIVE_COLLECTIONS}

    collections = {}
    for kind in ARCHIVE_COLLECTIONS:
        to_dict = serialize.TO_DICT[kind]
        rows = scope[kind]
        collections[kind] = [to_dict(e) for e in sorted(rows, key=entity_key)]

    manifest = {"schema_version": SCHEMA_VERSION, "collections": collections}
    needed_hashes = sorted({a.content_hash for a in scope["media_assets"]})

    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=1, sort_keys=True))
        for content_hash in needed_hashes:
            zf.writestr(f"media/{content_hash}", blobs.get(content_hash))
    return buf.getvalue()


@dataclass
class ImportReport:
    counts: dict[str, int] = field(default_factory=dict)
    conflicts: list[str] = field(default_factory=list)
    blobs_written: int = 0


def import_archive(
    store: Store, blobs: BlobStore, archive_bytes: bytes, mode: str = "fresh"
) -> ImportReport:
    """Imports an archive; fresh mode requires an empty store, merge mode
    skips id collisions and reports them.  All-or-nothing."""
    if mode not in ("fresh", "merge"):
        raise ValueError(f"unknown import mode: {mode}")

    with zipfile.ZipFile(io.BytesIO(archive_bytes)) as zf:
        manifest = json.loads(zf.read("manifest.json"))
        version = manifest.get("schema_version", 0)
        if version > SCHEMA_VERSION:
            raise DomainError(
                SCHEMA_TOO_NEW, f"archive schema {version} > supported {SCHEMA_VERSION}"
            )
        while version < SCHEMA_VERSION:
            manifest = MIGRATIONS[version](manifest)
            version += 1

        if mode == "fresh" and not store.is_empty():
            raise DomainError(NOT_EMPTY, "fresh import requires an empty store")

        # verify every blob against its filename before touching the store
        blob_bytes: dict[str, bytes] = {}
        for name in zf.namelist():
            if not name.startswith("media/") or name == "media/":
                continue
            content_hash = name.split("/", 1)[1]
            data = zf.read(name)
            if sha256_hex(data) != content_hash:
                raise DomainError(HASH_MISMATCH, f"blob {content_hash} fails verification")
            blob_bytes[content_hash] = data

        collections = manifest.get("collections", {})
        for asset in collections.get("media_assets", ()):
            if asset["content_hash"] not in blob_bytes:
                raise DomainError(
                    HASH_MISMATCH, f"manifest references missing blob {asset['content_hash']}"
                )

    report = ImportReport()
    incoming: dict[str, dict[str, object]] = {}
    for kind in ARCHIVE_COLLECTIONS:
        from_dict = serialize.FROM_DICT[kind]
        rows = {}
        existing = {entity_key(e) for e in store.list(kind)} if mode == "merge" else set()
        for raw in collections.get(kind, ()):
            entity = from_dict(raw)
            key = entity_key(entity)
            if key in existing:
                report.conflicts.append(f"{kind}/{key}")
                continue
            rows[key] = entity
        report.counts[kind] = len(rows)
        incoming[kind] = rows

    if mode == "merge":
        for kind in ARCHIVE_COLLECTIONS:
            merged = {entity_key(e): e for e in store.list(kind)}
            merged.update(incoming[kind])
            incoming[kind] = merged

    for content_hash, data in sorted(blob_bytes.items()):
        if not blobs.exists(content_hash):
            blobs.put(data)
            report.blobs_written += 1
    store.replace_all(incoming)
    return report
