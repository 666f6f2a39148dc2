"""Email outbox: queued entries plus a pluggable delivery transport.

Delivery is at-least-once: a failed attempt marks the entry Failed and a
retry pass re-queues it, so with a transport that eventually succeeds every
entry reaches Sent.  The default transport drops RFC 5322 message files
into an outbox directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from email.message import EmailMessage
from enum import Enum
from pathlib import Path


class OutboxStatus(Enum):
    QUEUED = "queued"
    SENT = "sent"
    FAILED = "failed"


@dataclass
class OutboxEntry:
    id: str
    to_email: str
    subject: str
    body: str
    related_person_id: str
    created_at: datetime
    status: OutboxStatus = OutboxStatus.QUEUED
    attempts: int = 0
    record_version: int = 0


def outbox_entry_to_dict(e: OutboxEntry) -> dict:
    return {
        "id": e.id,
        "to_email": e.to_email,
        "subject": e.subject,
        "body": e.body,
        "related_person_id": e.related_person_id,
        "created_at": e.created_at.isoformat(),
        "status": e.status.value,
        "attempts": e.attempts,
        "record_version": e.record_version,
    }


def outbox_entry_from_dict(raw: dict) -> OutboxEntry:
    return OutboxEntry(
        id=raw["id"],
        to_email=raw["to_email"],
        subject=raw["subject"],
        body=raw["body"],
        related_person_id=raw["related_person_id"],
        created_at=datetime.fromisoformat(raw["created_at"]),
        status=OutboxStatus(raw["status"]),
        attempts=raw.get("attempts", 0),
        record_version=raw.get("record_version", 0),
    )


def build_rfc5322(entry: OutboxEntry, sender: str = "noreply@reminisce.local") -> EmailMessage:
    msg = EmailMessage()
    msg["From"] = sender
    msg["To"] = entry.to_email
    msg["Subject"] = entry.subject
    msg["Date"] = entry.created_at.strftime("%a, %d %b %Y %H:%M:%S %z")
    msg.set_content(entry.body)
    return msg


class FileDropTransport:
    """Writes each delivered message as one .eml file in a directory."""

    def __init__(self, outbox_dir: str | Path):
        self.outbox_dir = Path(outbox_dir)
        self.outbox_dir.mkdir(parents=True, exist_ok=True)

    def deliver(self, entry: OutboxEntry) -> None:
        msg = build_rfc5322(entry)
        path = self.outbox_dir / f"{entry.id}.eml"
        path.write_bytes(bytes(msg))


class SMTPTransport:
    """Hands messages to an SMTP server; construction is config-driven."""

    def __init__(self, host: str, port: int, username: str | None = None,
                 password: str | None = None):
        self.host = host
        self.port = port
        self.username = username
        self.password = password

    def deliver(self, entry: OutboxEntry) -> None:
        import smtplib

        msg = build_rfc5322(entry)
        with smtplib.SMTP(self.host, self.port) as smtp:
            if self.username:
                smtp.login(self.username, self.password or "")
            smtp.send_message(msg)


class OutboxWorker:
    """Single delivery loop over the store's outbox collection.

    Restart-safe because every status change is persisted before the next
    entry is attempted.
    """

    def __init__(self, store, transport):
        self.store = store
        self.transport = transport

    def deliver_pending(self) -> int:
        """One pass: attempt every Queued entry; returns number sent."""
        sent = 0
        for entry in self.store.list("outbox"):
            if entry.status is not OutboxStatus.QUEUED:
                continue
            version = entry.record_version
            entry.attempts += 1
            try:
                self.transport.deliver(entry)
            except Exception:
                entry.status = OutboxStatus.FAILED
            else:
                entry.status = OutboxStatus.SENT
                sent += 1
            self.store.upsert("outbox", entry, version)
        return sent

    def requeue_failed(self) -> int:
        """Moves Failed entries back to Queued for another pass."""
        moved = 0
        for entry in self.store.list("outbox"):
            if entry.status is not OutboxStatus.FAILED:
                continue
            version = entry.record_version
            entry.status = OutboxStatus.QUEUED
            self.store.upsert("outbox", entry, version)
            moved += 1
        return moved

    def run_until_drained(self, max_passes: int = 100) -> bool:
        """Retries until every entry is Sent or the pass budget runs out."""
        for _ in range(max_passes):
            self.deliver_pending()
            pending = self.requeue_failed()
            if pending == 0 and all(
                e.status is OutboxStatus.SENT for e in self.store.list("outbox")
            ):
                return True
        return False
