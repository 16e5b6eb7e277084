"""Container identification and read-only access to embedded databases.

Files are classified by content signatures, never by extension: seized
trees routinely carry mislabeled files (e.g. an HTML document saved as
.txt), and the catalog's expected kind is only a hint.
"""

from __future__ import annotations

import sqlite3
from pathlib import Path

from .errors import ContainerError, MissingTableError

SQLITE_MAGIC = b"SQLite format 3\x00"
BPLIST_MAGIC = b"bplist00"
PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
INDEX_DAT_MAGIC = b"Client UrlCache MMF"
ENT0_MAGIC = b"ENT0"
# Shell-link files open with header size 0x4C then the link CLSID.
LNK_HEADER = b"\x4c\x00\x00\x00\x01\x14\x02\x00\x00\x00\x00\x00\xc0\x00\x00\x00\x00\x00\x00\x46"

CONTAINER_KINDS = (
    "sqlite3", "binary-plist", "xml-plist", "generic-xml", "png", "html",
    "lnk", "index-dat", "text", "unknown",
)


def identify_container(data: bytes) -> str:
    """Classify file content by magic prefix; total over all inputs."""
    if not data:
        return "unknown"
    if data.startswith(SQLITE_MAGIC):
        return "sqlite3"
    if data.startswith(BPLIST_MAGIC):
        return "binary-plist"
    if data.startswith(PNG_SIGNATURE):
        return "png"
    if data.startswith(INDEX_DAT_MAGIC):
        return "index-dat"
    if data.startswith(LNK_HEADER):
        return "lnk"
    head = data[:4096]
    stripped = head.lstrip()
    if stripped.startswith(b"<?xml"):
        if b"<plist" in head or b"DOCTYPE plist" in head:
            return "xml-plist"
        return "generic-xml"
    lowered = stripped[:512].lower()
    if lowered.startswith((b"<!doctype html", b"<html")) or b"<html" in head[:512].lower():
        return "html"
    try:
        text = head.decode("utf-8")
    except UnicodeDecodeError:
        return "unknown"
    printable = sum(1 for ch in text if ch.isprintable() or ch in "\t\r\n")
    if text and printable / len(text) > 0.9:
        return "text"
    return "unknown"


def identify_container_file(path: str | Path) -> str:
    p = Path(path)
    try:
        with open(p, "rb") as fh:
            return identify_container(fh.read(4096))
    except OSError:
        return "unknown"


def _connect_readonly(path: Path) -> sqlite3.Connection:
    # immutable=1 guarantees the evidence file is never written, not
    # even journal or wal side files.
    uri = f"file:{path.as_posix()}?mode=ro&immutable=1"
    return sqlite3.connect(uri, uri=True)


def list_tables(path: str | Path) -> list[str]:
    p = Path(path)
    try:
        with _connect_readonly(p) as conn:
            rows = conn.execute(
                "SELECT name FROM sqlite_master WHERE type='table' ORDER BY name"
            ).fetchall()
    except sqlite3.Error as exc:
        raise ContainerError(f"cannot read database {p}: {exc}") from exc
    return [r[0] for r in rows]


def read_sqlite_table(path: str | Path, table: str) -> list[dict]:
    """Read every row of a table from an embedded database, read-only.

    Rows come back as ordered column->value dicts with the schema's
    declared column order; values keep their storage types (int, float,
    str, bytes, None). A missing table raises MissingTableError listing
    what is available; a corrupt file raises ContainerError carrying the
    engine's diagnostic (which names the bad page when known).
    """
    p = Path(path)
    available = list_tables(p)
    if table not in available:
        raise MissingTableError(table, available)
    try:
        with _connect_readonly(p) as conn:
            cursor = conn.execute(f'SELECT * FROM "{table}"')
            columns = [c[0] for c in cursor.description]
            return [dict(zip(columns, row)) for row in cursor.fetchall()]
    except sqlite3.DatabaseError as exc:
        raise ContainerError(f"corrupt database {p}: {exc}") from exc


def find_table_with_columns(path: str | Path, required: list[str]) -> str | None:
    """Name of the first table containing all required columns, if any."""
    p = Path(path)
    for table in list_tables(p):
        try:
            with _connect_readonly(p) as conn:
                cols = [r[1] for r in conn.execute(f'PRAGMA table_info("{table}")')]
        except sqlite3.Error:
            continue
        if all(c in cols for c in required):
            return table
    return None
