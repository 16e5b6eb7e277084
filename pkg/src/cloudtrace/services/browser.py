"""Browser-log parsers: Firefox profile stores and IE index.dat files.

Only traffic touching the supported cloud services is reported; the
host filter below names their web endpoints. Firefox history keeps
visit times in unix microseconds; index.dat records carry 64-bit
Windows FILETIME stamps which are decoded only when the result lands in
a plausible year, and returned raw otherwise.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

from ..containers import INDEX_DAT_MAGIC, find_table_with_columns, read_sqlite_table
from ..errors import ContainerError
from ..timestamps import NormalizedTimestamp, normalize_unix

SERVICE_HOSTS = (
    "dropbox.com",
    "docs.google.com",
    "s3.amazonaws.com",
    "evernote.com",
    "accounts.google.com",
)


def is_service_host(host: str) -> bool:
    host = host.lstrip(".").lower()
    return any(host == h or host.endswith("." + h) for h in SERVICE_HOSTS)


def is_service_url(url: str) -> bool:
    try:
        host = urlparse(url).netloc.split("@")[-1].split(":")[0]
    except ValueError:
        return False
    return bool(host) and is_service_host(host)


@dataclass
class VisitRecord:
    url: str
    title: str | None
    visited: NormalizedTimestamp


@dataclass
class CookieRecord:
    host: str
    name: str
    created: NormalizedTimestamp | None
    last_accessed: NormalizedTimestamp | None


def _micros_to_ts(value: int) -> NormalizedTimestamp:
    ts = normalize_unix(int(value) // 1_000_000)
    # Keep the store's microsecond counter as the raw value.
    return NormalizedTimestamp(ts.utc_instant, int(value), ts.encoding, ts.confidence)


def extract_firefox_history(places_db: str | Path | None,
                            cookies_db: str | Path | None
                            ) -> tuple[list[VisitRecord], list[CookieRecord], list[str]]:
    """Service-relevant visits and cookies from a Firefox profile.

    Missing stores or tables produce diagnostics and empty output, not
    failures; visit times are microsecond unix counters normalized to
    seconds with the counter preserved.
    """
    diagnostics: list[str] = []
    visits: list[VisitRecord] = []
    cookies: list[CookieRecord] = []

    if places_db is not None:
        places_table = find_table_with_columns(places_db, ["id", "url"])
        visits_table = find_table_with_columns(places_db, ["place_id", "visit_date"])
        if places_table is None or visits_table is None:
            diagnostics.append(f"{places_db}: history tables missing")
        else:
            pages = {row["id"]: row for row in read_sqlite_table(places_db, places_table)}
            for row in read_sqlite_table(places_db, visits_table):
                page = pages.get(row["place_id"])
                if page is None or row["visit_date"] is None:
                    continue
                url = str(page["url"])
                if not is_service_url(url):
                    continue
                visits.append(VisitRecord(
                    url=url,
                    title=page.get("title"),
                    visited=_micros_to_ts(row["visit_date"]),
                ))

    if cookies_db is not None:
        cookies_table = find_table_with_columns(cookies_db, ["host", "name"])
        if cookies_table is None:
            diagnostics.append(f"{cookies_db}: cookie table missing")
        else:
            for row in read_sqlite_table(cookies_db, cookies_table):
                host = str(row["host"])
                if not is_service_host(host):
                    continue
                created = row.get("creationTime")
                accessed = row.get("lastAccessed")
                cookies.append(CookieRecord(
                    host=host,
                    name=str(row["name"]),
                    created=_micros_to_ts(created) if created is not None else None,
                    last_accessed=_micros_to_ts(accessed) if accessed is not None else None,
                ))
    return visits, cookies, diagnostics


@dataclass
class IndexDatUrl:
    url: str
    record_type: str
    raw_timestamp: int | None
    decoded: NormalizedTimestamp | None


_RECORD_SIGS = (b"URL ", b"LEAK", b"REDR")
_FILETIME_UNIX_OFFSET = 116_444_736_000_000_000
_URL_CHARS = re.compile(rb"[\x20-\x7e]{4,}")


def _decode_filetime(value: int) -> NormalizedTimestamp | None:
    """FILETIME -> unix seconds, only when the year is plausible."""
    if value <= 0:
        return None
    seconds = (value - _FILETIME_UNIX_OFFSET) // 10_000_000
    if seconds < 0:
        return None
    ts = normalize_unix(int(seconds))
    if not 1990 <= ts.utc_instant.year <= 2100:
        return None
    return NormalizedTimestamp(ts.utc_instant, value, ts.encoding, ts.confidence)


def carve_index_dat_urls(data: bytes) -> list[IndexDatUrl]:
    """Shallow scan of an index.dat for service URLs.

    Records are located by their URL/LEAK/REDR signatures; each is read
    as signature, 32-bit block count (blocks of 0x80 bytes), two 64-bit
    timestamps and an embedded printable URL string. Anything deeper in
    the format is deliberately left alone.
    """
    if not data.startswith(INDEX_DAT_MAGIC):
        raise ContainerError("not an index.dat container (bad magic)")
    results: list[IndexDatUrl] = []
    pos = len(INDEX_DAT_MAGIC)
    n = len(data)
    while pos < n:
        offsets = [data.find(sig, pos) for sig in _RECORD_SIGS]
        offsets = [o for o in offsets if o >= 0]
        if not offsets:
            break
        start = min(offsets)
        sig = bytes(data[start:start + 4])
        if start + 24 > n:
            break
        nblocks = struct.unpack_from("<I", data, start + 4)[0]
        if not 1 <= nblocks <= 4096:
            pos = start + 4
            continue
        end = min(n, start + nblocks * 0x80)
        mtime = struct.unpack_from("<Q", data, start + 8)[0]
        record = data[start + 24:end]
        url = None
        for match in _URL_CHARS.finditer(record):
            candidate = match.group(0).split(b"\x00")[0].decode("ascii")
            if candidate.startswith(("http://", "https://", "file://")):
                url = candidate
                break
        if url is not None and is_service_url(url):
            results.append(IndexDatUrl(
                url=url,
                record_type=sig.decode("ascii").strip(),
                raw_timestamp=mtime or None,
                decoded=_decode_filetime(mtime),
            ))
        pos = end if end > start else start + 4
    return results
