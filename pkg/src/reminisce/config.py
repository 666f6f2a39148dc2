"""Runtime configuration: JSON file plus REMINISCE_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8600
    data_dir: str = "data"
    media_dir: str = "data/media"
    outbox_dir: str = "data/outbox"
    token_secret: str = "change-me"
    outbox_transport: str = "file-drop"  # file-drop | smtp
    smtp_host: str = "localhost"
    smtp_port: int = 25
    smtp_username: str = ""
    smtp_password: str = ""
    static_dir: str = ""


def load_config(path: str | Path | None = None) -> AppConfig:
    values: dict = {}
    if path is not None and Path(path).exists():
        values.update(json.loads(Path(path).read_text(encoding="utf-8")))
    for f in fields(AppConfig):
        env = os.environ.get(f"REMINISCE_{f.name.upper()}")
        if env is not None:
            values[f.name] = env
    known = {f.name for f in fields(AppConfig)}
    cfg = AppConfig(**{k: v for k, v in values.items() if k in known})
    cfg.port = int(cfg.port)
    cfg.smtp_port = int(cfg.smtp_port)
    return cfg
