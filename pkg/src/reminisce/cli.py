"""Administration command line: serve, archive export/import, account and
data management."""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

import click

from .archive import export_archive, import_archive
from .config import AppConfig, load_config
from .outbox import FileDropTransport, OutboxWorker, SMTPTransport
from .service import TherapyService
from .store import BlobStore, Store


def build_runtime(cfg: AppConfig):
    store = Store(cfg.data_dir)
    blobs = BlobStore(cfg.media_dir)
    service = TherapyService(store, blobs)
    if cfg.outbox_transport == "smtp":
        transport = SMTPTransport(
            cfg.smtp_host, cfg.smtp_port, cfg.smtp_username or None, cfg.smtp_password or None
        )
    else:
        transport = FileDropTransport(cfg.outbox_dir)
    worker = OutboxWorker(store, transport)
    return store, blobs, service, worker


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; REMINISCE_* env vars override it.")
@click.pass_context
def main(ctx, config_path):
    ctx.obj = load_config(config_path)


@main.command()
@click.pass_obj
def serve(cfg: AppConfig):
    """Run the HTTP server (plus the outbox delivery loop)."""
    import uvicorn

    from .api import create_app

    store, _blobs, service, worker = build_runtime(cfg)
    static = cfg.static_dir if cfg.static_dir and Path(cfg.static_dir).is_dir() else None
    app = create_app(service, worker, static_dir=static)

    def outbox_loop():
        while True:
            try:
                worker.deliver_pending()
                worker.requeue_failed()
            except Exception:
                pass
            time.sleep(5)

    threading.Thread(target=outbox_loop, daemon=True).start()
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")


@main.command()
@click.pass_obj
def migrate(cfg: AppConfig):
    """Load the data directory, applying any pending schema migrations."""
    store, _, _, _ = build_runtime(cfg)
    counts = {k: store.count(k) for k in ("patients", "memories", "sessions")}
    click.echo(f"store ready: {counts}")


@main.command("export")
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--patient", "patient_id", default=None)
@click.pass_obj
def export_cmd(cfg: AppConfig, out_file, patient_id):
    """Write a portable zip archive of the store (optionally one patient)."""
    store, blobs, _, _ = build_runtime(cfg)
    data = export_archive(store, blobs, patient_id)
    Path(out_file).write_bytes(data)
    click.echo(f"wrote {len(data)} bytes to {out_file}")


@main.command("import")
@click.option("--in", "in_file", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["fresh", "merge"]), default="fresh")
@click.pass_obj
def import_cmd(cfg: AppConfig, in_file, mode):
    """Import an archive; fresh mode needs an empty store."""
    store, blobs, _, _ = build_runtime(cfg)
    report = import_archive(store, blobs, Path(in_file).read_bytes(), mode)
    click.echo(json.dumps({"counts": report.counts, "conflicts": report.conflicts}))


@main.command("create-therapist")
@click.option("--name", required=True)
@click.option("--email", required=True)
@click.option("--password", default=None)
@click.pass_obj
def create_therapist(cfg: AppConfig, name, email, password):
    _, _, service, _ = build_runtime(cfg)
    account, token = service.create_therapist(name, email, password)
    click.echo(json.dumps({"id": account.id, "token": token}))


@main.command("seed-demo")
@click.pass_obj
def seed_demo(cfg: AppConfig):
    """Populate the store with a small demo catalog; prints ids and a token."""
    from .seed import build_demo

    _, _, service, _ = build_runtime(cfg)
    ids = build_demo(service)
    click.echo(json.dumps(ids, indent=1))


@main.command("verify-media")
@click.pass_obj
def verify_media(cfg: AppConfig):
    """Full-scan check that every blob's bytes still hash to its filename."""
    _, blobs, _, _ = build_runtime(cfg)
    bad = blobs.verify_all()
    if bad:
        raise click.ClickException(f"corrupt blobs: {bad}")
    click.echo(f"{len(blobs.hashes())} blobs verified")


if __name__ == "__main__":
    main()
