"""Dropbox artifact parsers.

Desktop clients keep a key/value config.db (login email, sync-folder
path, five most-recently-changed files) and filecache.db (server-side
names and unix times of synced files). The iOS client stores the login
email and first-login time in a plist and view/upload activity in two
Core Data stores timed in seconds since 2001. The Android client keeps
a key/value store, a file-metadata store and an execution log timed in
unix milliseconds.

config.db deserves special attention: dropping a copy of it into a
fresh client install logs straight into the account, no password
needed, so parsing one always raises a portable-session-file credential
finding.
"""

from __future__ import annotations

import math
import plistlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..containers import find_table_with_columns, read_sqlite_table
from ..errors import MissingColumnError, MissingTableError
from ..records import CredentialFinding, SECRET_SESSION_FILE
from ..timestamps import (
    NormalizedTimestamp,
    from_datetime,
    normalize_apple_absolute,
    normalize_unix,
    parse_date_text,
)


@dataclass
class DropboxProfile:
    """Account facts from a desktop config.db."""

    source_path: str
    email: str | None = None
    dropbox_path: str | None = None
    recent_entries: list[tuple[str | None, str]] = field(default_factory=list)


@dataclass
class SyncedFileRecord:
    server_path: str
    local_filename: str
    modified: NormalizedTimestamp
    created: NormalizedTimestamp


# Recent-list entries inside the serialized blob look like
# V41248546./paper101.doc -- optional numeric server id, then a slash
# path running to the end of line or the serializer's next token.
_RECENT_TOKEN_RE = re.compile(
    r"V(\d*)\.(/.*?)(?=\s+(?:\d+\s+)?N?tp\d|[\r\n]|$)"
)


def extract_recent_list(blob: str) -> list[tuple[str | None, str]]:
    """Pull (server-id, path) pairs out of a recently_changed3 value.

    The blob is scanned for its path tokens rather than deserialized in
    full; serializer version drift then cannot hide the list. Entry
    order is preserved: index 0 is the most recently accessed file.
    """
    if not blob:
        raise ValueError("empty recent-list blob")
    entries = []
    for match in _RECENT_TOKEN_RE.finditer(blob):
        server_id, path = match.groups()
        entries.append((server_id or None, path))
    return entries


def parse_config_db(path: str | Path,
                    source_path: str = "") -> tuple[DropboxProfile, CredentialFinding]:
    """Parse a desktop config.db; always emits the session-file finding."""
    src = source_path or str(path)
    table = find_table_with_columns(path, ["key", "value"])
    if table is None:
        raise MissingTableError("config", [])
    kv = {row["key"]: row["value"] for row in read_sqlite_table(path, table)}
    profile = DropboxProfile(source_path=src)
    profile.email = kv.get("email")
    profile.dropbox_path = kv.get("dropbox_path")
    blob = kv.get("recently_changed3")
    if blob:
        profile.recent_entries = extract_recent_list(str(blob))[:5]
    finding = CredentialFinding(
        service="dropbox",
        account_id=profile.email,
        secret_kind=SECRET_SESSION_FILE,
        source_path=src,
        enables_remote_access=True,
    )
    return profile, finding


_FILECACHE_COLUMNS = ["server_path", "local_filename", "local_mtime", "local_ctime"]


def parse_filecache_db(path: str | Path) -> list[SyncedFileRecord]:
    """Parse filecache.db rows into synced-file records (unix seconds)."""
    table = find_table_with_columns(path, _FILECACHE_COLUMNS)
    if table is None:
        # Name the first missing column if a near-match table exists.
        partial = find_table_with_columns(path, _FILECACHE_COLUMNS[:2])
        if partial is not None:
            present = {c for c in _FILECACHE_COLUMNS
                       if find_table_with_columns(path, [c]) is not None}
            missing = next(c for c in _FILECACHE_COLUMNS if c not in present)
            raise MissingColumnError(missing, partial)
        raise MissingTableError("filecache", [])
    records = []
    for row in read_sqlite_table(path, table):
        records.append(SyncedFileRecord(
            server_path=str(row["server_path"]),
            local_filename=str(row["local_filename"]),
            modified=normalize_unix(int(row["local_mtime"])),
            created=normalize_unix(int(row["local_ctime"])),
        ))
    return records


@dataclass
class IosAccount:
    email: str | None
    first_login: NormalizedTimestamp | None


def parse_ios_plist(path: str | Path) -> IosAccount:
    """Read login email and first-login time from the iOS client plist."""
    with open(path, "rb") as fh:
        data = plistlib.load(fh)
    email = data.get("Dropbox Username")
    first_login = None
    stamp = data.get("AnalyticsLastUploaded")
    if stamp is not None:
        raw = stamp.strftime("%Y-%m-%dT%H:%M:%SZ")
        first_login = from_datetime(stamp, raw)
    return IosAccount(email, first_login)


@dataclass
class IosActivity:
    """One view or upload event from the iOS stores."""

    kind: str
    path: str
    timestamp: NormalizedTimestamp


def _ios_activity_rows(path, time_column, kind, diagnostics):
    table = find_table_with_columns(path, ["ZPATH", time_column])
    if table is None:
        diagnostics.append(f"{path}: no table with ZPATH/{time_column}, store skipped")
        return []
    events = []
    for row in read_sqlite_table(path, table):
        if row["ZPATH"] is None or row[time_column] is None:
            continue
        events.append(IosActivity(
            kind=kind,
            path=str(row["ZPATH"]),
            timestamp=normalize_apple_absolute(float(row[time_column])),
        ))
    return events


def parse_ios_activity(viewed_db: str | Path | None,
                       uploads_db: str | Path | None
                       ) -> tuple[list[IosActivity], list[str]]:
    """Parse the view-history and upload-history stores.

    Either store may be absent or tableless; that store is skipped with
    a diagnostic and the other still parses.
    """
    diagnostics: list[str] = []
    events: list[IosActivity] = []
    if viewed_db is not None:
        events.extend(_ios_activity_rows(viewed_db, "ZLASTVIEWDDATE",
                                         "file-viewed", diagnostics))
    if uploads_db is not None:
        events.extend(_ios_activity_rows(uploads_db, "ZDATEUPLOADED",
                                         "file-uploaded", diagnostics))
    return events, diagnostics


@dataclass
class AndroidProfile:
    display_name: str | None = None
    country: str | None = None
    email: str | None = None


@dataclass
class AndroidFileRecord:
    display_name: str
    modified: NormalizedTimestamp
    size_text: str
    size_bytes: int | None


_SIZE_RE = re.compile(r"^\s*([\d.]+)\s*([KMGT]?B)\s*$", re.IGNORECASE)
_SIZE_FACTORS = {"B": 1, "KB": 1024, "MB": 1024 ** 2,
                 "GB": 1024 ** 3, "TB": 1024 ** 4}


def parse_size_text(text: str) -> int | None:
    """'47.9KB' -> 49050 (1 KB = 1024 bytes, rounded to nearest byte)."""
    m = _SIZE_RE.match(text)
    if not m:
        return None
    value, unit = m.groups()
    try:
        return math.floor(float(value) * _SIZE_FACTORS[unit.upper()] + 0.5)
    except (ValueError, KeyError):
        return None


def parse_android_stores(prefs_db: str | Path | None,
                         db_db: str | Path | None
                         ) -> tuple[AndroidProfile, list[AndroidFileRecord]]:
    """Parse the Android key/value store and file-metadata store.

    prefs.db carries the account (DISPLAY_NAME / COUNTRY / EMAIL keys);
    db.db carries one row per stored file with an RFC 1123 modification
    time and a human-readable size, which is preserved verbatim next to
    a parsed byte estimate.
    """
    profile = AndroidProfile()
    if prefs_db is not None:
        table = find_table_with_columns(prefs_db, ["pref_name", "pref_value"])
        if table is not None:
            kv = {row["pref_name"]: row["pref_value"]
                  for row in read_sqlite_table(prefs_db, table)}
            profile.display_name = kv.get("DISPLAY_NAME")
            profile.country = kv.get("COUNTRY")
            profile.email = kv.get("EMAIL")
    files: list[AndroidFileRecord] = []
    if db_db is not None:
        table = find_table_with_columns(db_db, ["modified", "_display_name", "size"])
        if table is not None:
            for row in read_sqlite_table(db_db, table):
                size_text = str(row["size"])
                files.append(AndroidFileRecord(
                    display_name=str(row["_display_name"]),
                    modified=parse_date_text(str(row["modified"]), "rfc1123"),
                    size_text=size_text,
                    size_bytes=parse_size_text(size_text),
                ))
    return profile, files


@dataclass
class AndroidLogEvent:
    kind: str
    component: str | None
    message: str
    timestamp: NormalizedTimestamp | None
    subject: str | None = None


_LOG_LINE_RE = re.compile(r"^(\d{10,16})\s+(\S+)\s+(.*)$")
_LOG_PATH_RE = re.compile(r"(/[^\r\n]+)$")


def classify_log_message(component: str, message: str) -> tuple[str, str | None]:
    if "Not authenticated" in message:
        return "auth-state", None
    if "service has been started" in message:
        return "service-start", None
    if ".lock." in component or "SCREEN_OFF" in message or "SCREEN_ON" in message:
        return "screen-lock", None
    path_match = _LOG_PATH_RE.search(message)
    if path_match:
        return "file-watch", path_match.group(1).rstrip()
    return "other", None


def parse_android_log(text: str) -> list[AndroidLogEvent]:
    """Parse the Android execution log; every input line yields an event.

    Lines look like '<unix-ms> <component> <message>'. Anything that
    does not match (wrapped continuations included) is kept as an
    'other' event with the raw text, never dropped.
    """
    events = []
    for line in text.splitlines():
        if not line.strip():
            continue
        m = _LOG_LINE_RE.match(line)
        if not m:
            events.append(AndroidLogEvent("other", None, line, None))
            continue
        stamp, component, message = m.groups()
        kind, subject = classify_log_message(component, message)
        events.append(AndroidLogEvent(
            kind=kind,
            component=component,
            message=message,
            timestamp=normalize_unix(int(stamp), "milliseconds"),
            subject=subject,
        ))
    return events
