"""Google Docs artifact parsers.

Browsing documents through IE leaves patterned temp files in the cache:
docs_google_com[n].htm (file listing), edit[n].htm (document or
presentation content), ccc[n].htm (spreadsheet content) and
viewer[n].{htm,txt,xml,png} (PDF title, text and page images). Pages
that Firefox caches on a Mac are recognized by three markers: the
keyword "docs", an element id starting with "goog_", and a
<div dir="ltr"> signature inside the body. The iOS client's plist holds
the account and, with auto-login on, the password; locally created text
files are HTML with the content in a font element id'd
iGoogDocs-Formatted. The Android client's DocList.db joins documents to
accounts with unix-millisecond times, and two shared-preferences files
name the administrator and the most recently connected account.
"""

from __future__ import annotations

import html
import plistlib
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from ..containers import find_table_with_columns, read_sqlite_table
from ..errors import ElementNotFoundError, MissingTableError
from ..records import CredentialFinding, SECRET_NONE, SECRET_PASSWORD
from ..timestamps import NormalizedTimestamp, normalize_unix

TEMP_FILE_KINDS = (
    "doc-list", "document-view-or-edit", "spreadsheet",
    "pdf-viewer-html", "pdf-viewer-text", "pdf-viewer-image",
)


@dataclass
class TempArtifact:
    """A classified browser-cache temp file."""

    filename: str
    kind: str
    sequence_n: int
    extracted_text: str | None = None
    source_path: str = ""


_TEMP_PATTERNS = (
    (re.compile(r"^docs_google_com\[([1-9]\d*)\]\.htm$", re.IGNORECASE), "doc-list"),
    (re.compile(r"^edit\[([1-9]\d*)\]\.htm$", re.IGNORECASE), "document-view-or-edit"),
    (re.compile(r"^ccc\[([1-9]\d*)\]\.htm$", re.IGNORECASE), "spreadsheet"),
    (re.compile(r"^viewer\[([1-9]\d*)\]\.htm$", re.IGNORECASE), "pdf-viewer-html"),
    (re.compile(r"^viewer\[([1-9]\d*)\]\.txt$", re.IGNORECASE), "pdf-viewer-text"),
    (re.compile(r"^viewer\[([1-9]\d*)\]\.xml$", re.IGNORECASE), "pdf-viewer-text"),
    (re.compile(r"^viewer\[([1-9]\d*)\]\.png$", re.IGNORECASE), "pdf-viewer-image"),
)


def classify_temp_file(filename: str) -> TempArtifact | None:
    """Classify a cache filename by its pattern; None when unrelated.

    Matching is case-insensitive (these names come from Windows
    filesystems). The .xml viewer spelling is an alias of the .txt one:
    both carry the PDF's text.
    """
    for pattern, kind in _TEMP_PATTERNS:
        m = pattern.match(filename)
        if m:
            return TempArtifact(filename, kind, int(m.group(1)))
    return None


_GOOG_ID_RE = re.compile(r"""id\s*=\s*['"]goog_""")
_LTR_DIV = '<div dir="ltr">'
_TAG_RE = re.compile(r"<[^>]+>")
_BODY_RE = re.compile(r"<body[^>]*>(.*)</body>", re.DOTALL | re.IGNORECASE)


def _strip_tags(markup: str) -> str:
    return html.unescape(_TAG_RE.sub(" ", markup)).strip()


def detect_gdocs_cache_html(data: bytes) -> str | None:
    """Detect a cached page by its three markers and pull the text.

    Positive iff the document contains the keyword "docs", an id
    attribute beginning "goog_", and the <div dir="ltr"> signature
    inside the body; the extraction is everything after the signature,
    tags stripped. Collapsing whitespace keeps the result line-stable.
    """
    try:
        text = data.decode("utf-8", errors="replace")
    except Exception:
        return None
    if "docs" not in text:
        return None
    if not _GOOG_ID_RE.search(text):
        return None
    body_match = _BODY_RE.search(text)
    if not body_match:
        return None
    body = body_match.group(1)
    idx = body.find(_LTR_DIV)
    if idx < 0:
        return None
    content = body[idx + len(_LTR_DIV):]
    return re.sub(r"\s+", " ", _strip_tags(content)).strip()


_ANCHOR_RE = re.compile(r"<a\b[^>]*>(.*?)</a>", re.DOTALL | re.IGNORECASE)


def harvest_anchor_texts(data: bytes) -> list[str]:
    """Anchor texts from a file-listing page; heuristic, low confidence."""
    text = data.decode("utf-8", errors="replace")
    out = []
    for match in _ANCHOR_RE.finditer(text):
        stripped = _strip_tags(match.group(1))
        if stripped:
            out.append(stripped)
    return out


@dataclass
class IosSettings:
    username: str | None
    rememberme: bool
    has_password: bool


def parse_igoogdocs_plist(path: str | Path, source_path: str = ""
                          ) -> tuple[CredentialFinding | None, IosSettings]:
    """Read the iOS client plist; password finding when auto-login is on."""
    src = source_path or str(path)
    with open(path, "rb") as fh:
        data = plistlib.load(fh)
    username = data.get("username")
    rememberme = bool(data.get("rememberme", False))
    password = data.get("password")
    settings = IosSettings(username, rememberme, password is not None)
    if rememberme and password is not None:
        finding = CredentialFinding(
            service="google-docs",
            account_id=username,
            secret_kind=SECRET_PASSWORD,
            source_path=src,
            secret_value=str(password),
            enables_remote_access=True,
        )
    elif username is not None:
        finding = CredentialFinding(
            service="google-docs",
            account_id=username,
            secret_kind=SECRET_NONE,
            source_path=src,
        )
    else:
        finding = None
    return finding, settings


_LOCAL_FILE_RE = re.compile(
    r"""<font\b[^>]*id\s*=\s*['"]iGoogDocs-Formatted['"][^>]*>(.*?)</font>""",
    re.DOTALL | re.IGNORECASE,
)


def extract_local_file_html(data: bytes) -> str:
    """Inner text of the iGoogDocs-Formatted element of a local file."""
    text = data.decode("utf-8", errors="replace")
    m = _LOCAL_FILE_RE.search(text)
    if not m:
        raise ElementNotFoundError("no element with id iGoogDocs-Formatted")
    return html.unescape(m.group(1))


@dataclass
class DocRecord:
    """One document row joined to its account."""

    account_email: str
    title: str
    kind: str
    last_sync: NormalizedTimestamp | None
    created: NormalizedTimestamp | None
    modified: NormalizedTimestamp | None
    order_violation: bool = False


_FLAT_COLUMNS = ["accountHolderName", "lastSyncTime", "title", "kind",
                 "creationTime", "lastModifiedTime"]


def _ms(value) -> NormalizedTimestamp | None:
    if value is None:
        return None
    return normalize_unix(int(value), "milliseconds")


def _doc_record(email, sync, title, kind, created, modified) -> DocRecord:
    record = DocRecord(
        account_email=str(email),
        title=str(title),
        kind=str(kind),
        last_sync=_ms(sync),
        created=_ms(created),
        modified=_ms(modified),
    )
    if record.created and record.modified:
        if record.created.utc_instant > record.modified.utc_instant:
            record.order_violation = True
    return record


def parse_doclist_db(path: str | Path) -> list[DocRecord]:
    """Parse document rows (unix milliseconds) joined to their accounts.

    Handles both the joined accounts/documents schema and a flat
    single-table export. Rows whose creation time exceeds their
    modification time are flagged rather than rejected.
    """
    flat = find_table_with_columns(path, _FLAT_COLUMNS)
    if flat is not None:
        return [
            _doc_record(row["accountHolderName"], row["lastSyncTime"],
                        row["title"], row["kind"], row["creationTime"],
                        row["lastModifiedTime"])
            for row in read_sqlite_table(path, flat)
        ]
    accounts_table = find_table_with_columns(path, ["accountHolderName", "lastSyncTime"])
    documents_table = find_table_with_columns(path, ["title", "kind", "creationTime",
                                                     "lastModifiedTime", "accountId"])
    if accounts_table is None or documents_table is None:
        raise MissingTableError("documents", [])
    accounts = {row["_id"]: row for row in read_sqlite_table(path, accounts_table)}
    records = []
    for row in read_sqlite_table(path, documents_table):
        account = accounts.get(row["accountId"])
        if account is None:
            continue
        records.append(_doc_record(
            account["accountHolderName"], account["lastSyncTime"],
            row["title"], row["kind"], row["creationTime"],
            row["lastModifiedTime"]))
    return records


_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")


def _first_email_in_prefs(path: str | Path | None) -> str | None:
    if path is None or not Path(path).exists():
        return None
    try:
        tree = ET.parse(path)
    except ET.ParseError:
        return None
    for element in tree.getroot().iter():
        for candidate in (element.text, *(element.attrib.values())):
            if candidate:
                m = _EMAIL_RE.search(candidate)
                if m:
                    return m.group(0)
    return None


def parse_gdocs_shared_prefs(drive_xml: str | Path | None,
                             webview_xml: str | Path | None
                             ) -> tuple[str | None, str | None]:
    """(admin email, latest connected email) from the two pref files.

    The latest-connected address matters when one device saw several
    accounts; either file may be absent.
    """
    return _first_email_in_prefs(drive_xml), _first_email_in_prefs(webview_xml)
