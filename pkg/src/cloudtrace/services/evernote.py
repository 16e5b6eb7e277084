"""Evernote artifact parsers.

Desktop note stores ([userID].exb on Windows, Evernote.sql on Mac) hold
one row per note with fractional-day-ordinal times, a deletion flag,
the creating platform and the note's location. The thumbnail container
next to the Windows store is a PNG concatenation behind a 24-byte
header; every synchronization appends a snapshot, so carving it
recovers note revision history. Application logs record authentication
attempts and sync activity. The iOS store keeps notes in Core Data
tables timed in seconds since 2001 and assigns sequential index
numbers; gaps in the sequence mean deleted notes. The Android store
uses unix milliseconds with separate availability and recycle-bin
flags.
"""

from __future__ import annotations

import plistlib
import re
import struct
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

from ..containers import ENT0_MAGIC, PNG_SIGNATURE, find_table_with_columns, read_sqlite_table
from ..errors import ContainerError, MissingTableError
from ..timestamps import (
    NormalizedTimestamp,
    from_datetime,
    normalize_apple_absolute,
    normalize_day_ordinal,
    normalize_iso8601,
    normalize_unix,
    parse_date_text,
    parse_utc_offset,
)

# Note index gaps mean deletions; carried on inferred-deletion records.
INDEX_GAP_NOTE = "missing sequential index numbers indicate deleted notes"


@dataclass
class NoteRecord:
    """One note (or local file row) from any platform's store."""

    title: str | None = None
    created: NormalizedTimestamp | None = None
    updated: NormalizedTimestamp | None = None
    deleted: NormalizedTimestamp | None = None
    last_accessed: NormalizedTimestamp | None = None
    latitude: float | None = None
    longitude: float | None = None
    source_platform: str | None = None
    is_deleted: bool = False
    availability: bool | None = None
    attachment_names: list[str] = field(default_factory=list)
    index_number: int | None = None
    content_excerpt: str | None = None
    extras: dict[str, str] = field(default_factory=dict)


# Per-platform column aliases. The two desktop stores carry the same
# information under the same names in every schema observed so far; the
# table is the seam to map them should a client version diverge.
_NOTE_STORE_ALIASES: dict[str, dict[str, str]] = {
    "windows-exb": {},
    "mac-sql": {},
}

_NOTE_COLUMNS = ["title", "date_created", "date_updated"]


def _opt_float(value) -> float | None:
    if value is None:
        return None
    return float(value)


def parse_note_store(path: str | Path, platform: str = "windows-exb") -> list[NoteRecord]:
    """Parse a desktop note store into NoteRecords.

    Times are fractional day ordinals and therefore always flagged; the
    deletion flag is the store's is_deleted column. Attachment columns
    are captured when the schema has them.
    """
    if platform not in _NOTE_STORE_ALIASES:
        raise ValueError(f"unknown note-store platform: {platform}")
    alias = _NOTE_STORE_ALIASES[platform]
    required = [alias.get(c, c) for c in _NOTE_COLUMNS]
    table = find_table_with_columns(path, required)
    if table is None:
        raise MissingTableError("notes", [])
    records = []
    for row in read_sqlite_table(path, table):
        def col(name):
            return row.get(alias.get(name, name))

        record = NoteRecord(
            title=col("title"),
            source_platform=col("source"),
            is_deleted=bool(col("is_deleted")),
            latitude=_opt_float(col("latitude")),
            longitude=_opt_float(col("longitude")),
        )
        if col("date_created") is not None:
            record.created = normalize_day_ordinal(float(col("date_created")))
        if col("date_updated") is not None:
            record.updated = normalize_day_ordinal(float(col("date_updated")))
        for name in ("attachment_filename", "attachment_type", "attachment_created"):
            value = col(name)
            if value is not None:
                if name == "attachment_filename":
                    record.attachment_names.append(str(value))
                else:
                    record.extras[name] = str(value)
        records.append(record)
    return records


@dataclass
class CarvedImage:
    data: bytes
    offset: int
    preamble: bytes
    truncated: bool = False


def _png_end(data: bytes, start: int) -> int | None:
    """Walk chunks from a signature; end offset after IEND+CRC or None."""
    pos = start + len(PNG_SIGNATURE)
    while pos + 8 <= len(data):
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        end = pos + 12 + length
        if end > len(data):
            return None
        if ctype == b"IEND":
            return end
        pos = end
    return None


def carve_thumbnails(container: bytes) -> list[CarvedImage]:
    """Carve embedded PNGs out of a thumbnail container.

    The container must open with the ENT0 magic; its 24-byte header is
    skipped and every PNG signature after it starts an image that runs
    through its IEND chunk and checksum. A final image cut off by the
    end of the container is returned truncated rather than dropped. The
    16 bytes in front of each signature are preserved as opaque
    inter-image metadata.
    """
    if not container.startswith(ENT0_MAGIC):
        raise ContainerError("thumbnail container lacks ENT0 magic")
    images = []
    pos = 24
    while True:
        sig = container.find(PNG_SIGNATURE, pos)
        if sig < 0:
            break
        preamble = container[max(24, sig - 16):sig]
        end = _png_end(container, sig)
        if end is None:
            images.append(CarvedImage(container[sig:], sig, preamble, truncated=True))
            break
        images.append(CarvedImage(container[sig:end], sig, preamble))
        pos = end
    return images


@dataclass
class AppEvent:
    """One line of an application log, classified."""

    kind: str
    detail: str
    timestamp: NormalizedTimestamp | None = None
    account: str | None = None
    attributes: dict[str, str] = field(default_factory=dict)


_WIN_HEADER_RE = re.compile(
    r"^Log opened on (\d{4})/(\d{2})/(\d{2}) (\d{2}):(\d{2}):(\d{2}) \((UTC[+-][\d:]+|UTC)\)"
)
_WIN_LINE_RE = re.compile(r"^(\d{2}):(\d{2}):(\d{2}) \[\d+\]\s+(.*)$")
_AUTH_RE = re.compile(r'Authenticating user "([^"]+)"')
_IOS_LINE_RE = re.compile(
    r"^(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2})(?:\.\d+)?\s+\[[^\]]*\]\s+(.*)$"
)
_NOTE_SYNC_RE = re.compile(r"Syncing note '([^']*)'")
_REACHABILITY_RE = re.compile(r"currentReachabilityStatus=(\w+)")


def _classify_windows_line(body: str) -> tuple[str, str | None]:
    m = _AUTH_RE.search(body)
    if m:
        return "auth-attempt", m.group(1)
    if "Session terminated abnormally" in body:
        return "auth-failure", None
    if "Opened database:" in body:
        return "db-open", None
    if "AutoUpdate:" in body:
        return "update-check", None
    return "other", None


def _parse_windows_applog(text: str) -> list[AppEvent]:
    events: list[AppEvent] = []
    date = None
    offset = timedelta(0)
    for line in text.splitlines():
        if not line.strip():
            continue
        header = _WIN_HEADER_RE.match(line)
        if header:
            y, mo, d, hh, mm, ss, zone = header.groups()
            offset = parse_utc_offset(zone)
            date = (int(y), int(mo), int(d))
            raw = f"{y}/{mo}/{d} {hh}:{mm}:{ss}"
            ts = normalize_iso8601(f"{y}-{mo}-{d}T{hh}:{mm}:{ss}")
            ts = NormalizedTimestamp(ts.utc_instant - offset, raw, "iso8601")
            events.append(AppEvent("session-open", line, ts,
                                   attributes={"utc_offset": zone}))
            continue
        body_match = _WIN_LINE_RE.match(line)
        if body_match and date is not None:
            hh, mm, ss, body = body_match.groups()
            y, mo, d = date
            raw = f"{hh}:{mm}:{ss}"
            ts = normalize_iso8601(f"{y:04d}-{mo:02d}-{d:02d}T{hh}:{mm}:{ss}")
            ts = NormalizedTimestamp(ts.utc_instant - offset, raw, "iso8601")
            kind, account = _classify_windows_line(body)
            event = AppEvent(kind, line, ts, account)
            if kind == "db-open":
                event.attributes["database"] = body.split("Opened database:", 1)[1].strip()
            events.append(event)
            continue
        events.append(AppEvent("other", line))
    return events


def _parse_ios_applog(text: str) -> list[AppEvent]:
    events: list[AppEvent] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        m = _IOS_LINE_RE.match(line)
        if not m:
            events.append(AppEvent("other", line))
            continue
        stamp, body = m.groups()
        # No zone in these lines: device-local wall time, kept flagged.
        ts = normalize_iso8601(stamp.replace(" ", "T"))
        ts = NormalizedTimestamp(ts.utc_instant, stamp, "iso8601", ts.confidence)
        kind = "other"
        attributes: dict[str, str] = {}
        if "Sync started." in body:
            kind = "sync-start"
        elif "Sync complete." in body:
            kind = "sync-end"
        else:
            note = _NOTE_SYNC_RE.search(body)
            if note:
                kind = "note-sync"
                attributes["note_title"] = note.group(1)
        reach = _REACHABILITY_RE.search(body)
        if reach:
            attributes["connection"] = reach.group(1)
        events.append(AppEvent(kind, line, ts, attributes=attributes))
    return events


def parse_app_log(text: str, dialect: str = "windows-applog") -> list[AppEvent]:
    """Parse an application log in one of the three dialects.

    windows-applog: 'Log opened on ... (UTC+h:mm)' header whose offset
    applies to all time-of-day lines in the file. mac-log uses the same
    grammar. ios-applog: ISO-prefixed lines; sync start/end, per-note
    syncs and the connection status (Wi-Fi/3G reachability) are picked
    out. Unrecognized lines are kept as 'other' events.
    """
    if not text:
        raise ValueError("empty application log")
    if dialect in ("windows-applog", "mac-log"):
        return _parse_windows_applog(text)
    if dialect == "ios-applog":
        return _parse_ios_applog(text)
    raise ValueError(f"unknown app-log dialect: {dialect}")


_SERVICE_ENTITY_COLUMNS = ["ZTITLE", "ZDATEUPDATED", "ZDATECREATED"]
_LOCAL_FILE_COLUMNS = ["ZLASTACCESSED", "ZLASTMODIFIED"]


def parse_ios_store(main_db: str | Path,
                    md_file: str | Path | None = None
                    ) -> tuple[list[NoteRecord], NormalizedTimestamp | None, list[str]]:
    """Parse the iOS note store and its sync-metadata sidecar.

    Service-entity rows become notes: apple-absolute times, deletion
    inferred from a non-null deleted stamp, and the first geo column
    mapped to latitude (its stored name says altitude; the paired value
    ranges say latitude, and the mismatch is recorded on the record).
    Local-file rows contribute access/modification times. The sidecar
    contributes the last synchronization time when present.
    """
    diagnostics: list[str] = []
    notes: list[NoteRecord] = []

    entity_table = find_table_with_columns(main_db, _SERVICE_ENTITY_COLUMNS)
    if entity_table is None:
        diagnostics.append(f"{main_db}: no service-entity table, store skipped")
    else:
        for row in read_sqlite_table(main_db, entity_table):
            record = NoteRecord(
                title=row.get("ZTITLE"),
                source_platform=row.get("ZSOURCE"),
                latitude=_opt_float(row.get("ZALTITUDE")),
                longitude=_opt_float(row.get("ZLONGITUDE")),
                index_number=row.get("Z_PK"),
            )
            if row.get("ZALTITUDE") is not None:
                record.extras["latitude_column"] = "ZALTITUDE"
            if row.get("ZDATECREATED") is not None:
                record.created = normalize_apple_absolute(float(row["ZDATECREATED"]))
            if row.get("ZDATEUPDATED") is not None:
                record.updated = normalize_apple_absolute(float(row["ZDATEUPDATED"]))
            if row.get("ZDATEDELETED") is not None:
                record.deleted = normalize_apple_absolute(float(row["ZDATEDELETED"]))
                record.is_deleted = True
            if row.get("ZFILENAME"):
                record.attachment_names.append(str(row["ZFILENAME"]))
            if row.get("ZSEARCHCONTENT"):
                record.content_excerpt = str(row["ZSEARCHCONTENT"])
            notes.append(record)

    file_table = find_table_with_columns(main_db, _LOCAL_FILE_COLUMNS)
    if file_table is None:
        diagnostics.append(f"{main_db}: no local-file table, file rows skipped")
    else:
        for row in read_sqlite_table(main_db, file_table):
            record = NoteRecord(
                title=row.get("ZFILENAME"),
                index_number=row.get("Z_PK"),
            )
            if row.get("ZLASTACCESSED") is not None:
                record.last_accessed = normalize_apple_absolute(float(row["ZLASTACCESSED"]))
            if row.get("ZLASTMODIFIED") is not None:
                record.updated = parse_date_text(str(row["ZLASTMODIFIED"]), "rfc1123")
            record.extras["row_kind"] = "local-file"
            notes.append(record)

    last_sync = None
    if md_file is not None and Path(md_file).exists():
        with open(md_file, "rb") as fh:
            md = plistlib.load(fh)
        stamp = md.get("lastSyncTime")
        if stamp is not None:
            raw = stamp.strftime("%Y-%m-%dT%H:%M:%SZ")
            last_sync = from_datetime(stamp, raw)
    return notes, last_sync, diagnostics


_ANDROID_NOTE_COLUMNS = ["title", "created", "updated", "is_active"]


def parse_android_db(path: str | Path) -> list[NoteRecord]:
    """Parse the Android note store (unix milliseconds, two flags).

    is_active=1 means the note is available; a non-zero deleted flag
    means it sits in the recycle bin.
    """
    table = find_table_with_columns(path, _ANDROID_NOTE_COLUMNS)
    if table is None:
        raise MissingTableError("notes", [])
    records = []
    for row in read_sqlite_table(path, table):
        record = NoteRecord(
            title=row.get("title"),
            source_platform=row.get("source"),
            availability=bool(row.get("is_active")),
            is_deleted=bool(row.get("deleted")),
            latitude=_opt_float(row.get("latitude")),
            longitude=_opt_float(row.get("longitude")),
        )
        if row.get("created") is not None:
            record.created = normalize_unix(int(row["created"]), "milliseconds")
        if row.get("updated") is not None:
            record.updated = normalize_unix(int(row["updated"]), "milliseconds")
        if row.get("country") is not None:
            record.extras["country"] = str(row["country"])
        records.append(record)
    return records


def detect_index_gaps(index_numbers: list[int]) -> list[int]:
    """Integers missing from the inclusive min..max span of the input."""
    if not index_numbers:
        raise ValueError("empty index-number list")
    present = set(index_numbers)
    return [n for n in range(min(present), max(present) + 1) if n not in present]
