"""Minimal text extraction from the uncompressed PDFs this package renders.

Used as the independent verification side of the rendering tests: scans
content streams for literal-string show operators and unescapes them.
Only supports the subset our own renderer emits (plain streams, Tj with
standard fonts).
"""

from __future__ import annotations

import re

_STREAM_RE = re.compile(rb"stream\r?\n(.*?)endstream", re.DOTALL)
_SHOW_RE = re.compile(rb"\(((?:\\.|[^\\()])*)\)\s*Tj")
_OCTAL_RE = re.compile(rb"\\([0-7]{1,3})")
_SIMPLE_ESCAPES = {
    b"\\n": b"\n",
    b"\\r": b"\r",
    b"\\t": b"\t",
    b"\\b": b"\b",
    b"\\f": b"\f",
    b"\\(": b"(",
    b"\\)": b")",
    b"\\\\": b"\\",
}


def _unescape(raw: bytes) -> bytes:
    out = bytearray()
    i = 0
    while i < len(raw):
        if raw[i : i + 1] == b"\\":
            m = _OCTAL_RE.match(raw, i)
            if m:
                out.append(int(m.group(1), 8))
                i = m.end()
                continue
            pair = raw[i : i + 2]
            if pair in _SIMPLE_ESCAPES:
                out += _SIMPLE_ESCAPES[pair]
                i += 2
                continue
            i += 1  # lone backslash: PDF says drop it
            continue
        out.append(raw[i])
        i += 1
    return bytes(out)


def extract_text(pdf_bytes: bytes) -> str:
    """All shown strings in stream order, newline-joined."""
    pieces = []
    for stream in _STREAM_RE.findall(pdf_bytes):
        for shown in _SHOW_RE.findall(stream):
            pieces.append(_unescape(shown).decode("cp1252", errors="replace"))
    return "\n".join(pieces)
