"""Durable storage: versioned entity repositories plus a content-addressed
blob store.

The store is an in-process map of collections guarded by one lock; reads
hand out deep copies (committed snapshots), writes go through optimistic
version checks, and multi-entity commits are all-or-nothing.  When a data
directory is configured every commit is flushed to one JSON file per
collection, so a restarted process reloads the exact committed state.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import threading
from pathlib import Path

from . import serialize
from .errors import (
    UNKNOWN_ENTITY,
    UNKNOWN_PATIENT,
    UNKNOWN_SESSION,
    VERSION_CONFLICT,
    DomainError,
)

COLLECTIONS = (
    "therapists",
    "patients",
    "related_persons",
    "memories",
    "media_assets",
    "sessions",
    "session_reports",
    "assessments",
    "outbox",
    "tokens",
)

# parent collection checked before a child row may be written
_PARENT = {
    "related_persons": ("patients", "patient_id", UNKNOWN_PATIENT),
    "memories": ("patients", "patient_id", UNKNOWN_PATIENT),
    "sessions": ("patients", "patient_id", UNKNOWN_PATIENT),
    "assessments": ("patients", "patient_id", UNKNOWN_PATIENT),
    "session_reports": ("sessions", "session_id", UNKNOWN_SESSION),
}


def entity_key(entity) -> str:
    key = getattr(entity, "id", None)
    if key is None:
        key = entity.session_id
    return key


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class BlobStore:
    """Content-addressed file store: blob path is its lowercase hex SHA-256."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, content_hash: str) -> Path:
        return self.root / content_hash

    def put(self, data: bytes) -> str:
        digest = sha256_hex(data)
        final = self.path_for(digest)
        if not final.exists():
            tmp = final.with_name(f".tmp-{os.getpid()}-{threading.get_ident()}")
            tmp.write_bytes(data)
            os.replace(tmp, final)
        return digest

    def get(self, content_hash: str) -> bytes:
        path = self.path_for(content_hash)
        if not path.exists():
            raise DomainError("MEDIA_UNRESOLVED", f"no blob {content_hash}")
        return path.read_bytes()

    def exists(self, content_hash: str) -> bool:
        return self.path_for(content_hash).exists()

    def hashes(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if not p.name.startswith("."))

    def verify_all(self) -> list[str]:
        """Returns the hashes whose stored bytes no longer match the name."""
        bad = []
        for name in self.hashes():
            if sha256_hex(self.path_for(name).read_bytes()) != name:
                bad.append(name)
        return bad


class Store:
    """Versioned repositories over all entity collections."""

    def __init__(self, data_dir: str | Path | None = None):
        self._lock = threading.RLock()
        self._data: dict[str, dict[str, object]] = {k: {} for k in COLLECTIONS}
        self.data_dir = Path(data_dir) if data_dir else None
        # test hook: raise after N writes inside commit_many
        self.fail_after_writes: int | None = None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load()

    # -- snapshot reads ----------------------------------------------------

    def get(self, kind: str, key: str):
        with self._lock:
            entity = self._data[kind].get(key)
            if entity is None:
                raise DomainError(UNKNOWN_ENTITY, f"no {kind[:-1]} with id {key}")
            return copy.deepcopy(entity)

    def find(self, kind: str, key: str):
        with self._lock:
            entity = self._data[kind].get(key)
            return copy.deepcopy(entity) if entity is not None else None

    def list(self, kind: str, predicate=None) -> list:
        with self._lock:
            items = [
                copy.deepcopy(e)
                for e in self._data[kind].values()
                if predicate is None or predicate(e)
            ]
        items.sort(key=entity_key)
        return items

    def count(self, kind: str) -> int:
        with self._lock:
            return len(self._data[kind])

    def is_empty(self) -> bool:
        with self._lock:
            return all(not self._data[k] for k in COLLECTIONS if k != "tokens")

    # -- versioned writes --------------------------------------------------

    def _check_version(self, kind: str, entity, expected_version: int) -> None:
        current = self._data[kind].get(entity_key(entity))
        current_version = current.record_version if current is not None else 0
        if expected_version != current_version:
            raise DomainError(
                VERSION_CONFLICT,
                f"{kind}/{entity_key(entity)}: expected version "
                f"{expected_version}, stored {current_version}",
            )

    def _check_parent(self, kind: str, entity) -> None:
        parent = _PARENT.get(kind)
        if parent is None:
            return
        parent_kind, attr, code = parent
        if getattr(entity, attr) not in self._data[parent_kind]:
            raise DomainError(code, f"{kind} row references missing {parent_kind[:-1]}")

    def upsert(self, kind: str, entity, expected_version: int):
        """Insert or replace; expected_version 0 means 'must not exist yet'."""
        return self.commit_many([(kind, entity, expected_version)])[0]

    def commit_many(self, writes: list[tuple]) -> list:
        """Apply several versioned writes as one all-or-nothing unit."""
        with self._lock:
            for kind, entity, expected_version in writes:
                self._check_version(kind, entity, expected_version)
                self._check_parent(kind, entity)
            saved = [
                (kind, entity_key(entity), copy.deepcopy(self._data[kind].get(entity_key(entity))))
                for kind, entity, _ in writes
            ]
            committed = []
            try:
                for i, (kind, entity, expected_version) in enumerate(writes):
                    if self.fail_after_writes is not None and i >= self.fail_after_writes:
                        raise RuntimeError("injected commit failure")
                    stored = copy.deepcopy(entity)
                    stored.record_version = expected_version + 1
                    self._data[kind][entity_key(stored)] = stored
                    committed.append(copy.deepcopy(stored))
            except BaseException:
                for kind, key, original in saved:
                    if original is None:
                        self._data[kind].pop(key, None)
                    else:
                        self._data[kind][key] = original
                raise
            self._flush()
            return committed

    def delete(self, kind: str, key: str, expected_version: int) -> None:
        with self._lock:
            current = self._data[kind].get(key)
            if current is None:
                raise DomainError(UNKNOWN_ENTITY, f"no {kind[:-1]} with id {key}")
            if current.record_version != expected_version:
                raise DomainError(
                    VERSION_CONFLICT,
                    f"{kind}/{key}: expected version {expected_version}, "
                    f"stored {current.record_version}",
                )
            del self._data[kind][key]
            self._flush()

    def replace_all(self, data: dict[str, dict[str, object]]) -> None:
        """Wholesale swap used by archive import; caller prepared the dicts."""
        with self._lock:
            for kind in COLLECTIONS:
                if kind in data:
                    self._data[kind] = copy.deepcopy(data[kind])
            self._flush()

    # -- token table (not a versioned entity collection) -------------------

    def put_token(self, token: str, therapist_id: str, expires_at=None) -> None:
        with self._lock:
            self._data["tokens"][token] = {
                "therapist_id": therapist_id,
                "expires_at": expires_at.isoformat() if expires_at else None,
            }
            self._flush()

    def token_record(self, token: str) -> dict | None:
        with self._lock:
            rec = self._data["tokens"].get(token)
            return dict(rec) if rec else None

    # -- disk persistence --------------------------------------------------

    def _flush(self) -> None:
        if not self.data_dir:
            return
        for kind in COLLECTIONS:
            path = self.data_dir / f"{kind}.json"
            if kind == "tokens":
                rows = self._data[kind]
            else:
                to_dict = serialize.TO_DICT[kind]
                if kind == "therapists":
                    rows = {
                        k: to_dict(v, include_credentials=True)
                        for k, v in self._data[kind].items()
                    }
                else:
                    rows = {k: to_dict(v) for k, v in self._data[kind].items()}
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(json.dumps(rows, indent=1, sort_keys=True), encoding="utf-8")
            os.replace(tmp, path)

    def _load(self) -> None:
        for kind in COLLECTIONS:
            path = self.data_dir / f"{kind}.json"
            if not path.exists():
                continue
            rows = json.loads(path.read_text(encoding="utf-8"))
            if kind == "tokens":
                self._data[kind] = rows
            else:
                from_dict = serialize.FROM_DICT[kind]
                self._data[kind] = {k: from_dict(v) for k, v in rows.items()}
