"""Amazon S3 artifact parsers.

Server access ("bucket") logs browsed through a PC's browser land in
the browser cache as plain text: one request per line with the bucket
owner, bucket, bracketed request time, requester, operation, object
key, quoted request line, status and transfer sizes. Opening an Office
file straight from storage leaves a shortcut named
'<file> on s3.amazonaws.com.lnk' in the Office Recent folder. The iOS
client keeps account triples (name, access key ID, secret access key)
in its preferences plist and a DOWNLOADS table of fetched objects; the
Android client stores per-bucket configuration, keys included, as
base64-coded values in a shared-preferences XML file.
"""

from __future__ import annotations

import base64
import binascii
import plistlib
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..containers import read_sqlite_table
from ..errors import MalformedLineError
from ..records import CredentialFinding, SECRET_KEY_PAIR
from ..timestamps import NormalizedTimestamp, normalize_unix, parse_date_text

OFFICE_EXTENSIONS = ("ppt", "pptx", "doc", "docx", "xls", "xlsx")

_FIELDS = (
    "owner_canonical_id", "bucket", "time", "remote_ip",
    "requester_canonical_id", "request_id", "operation", "key",
    "request_uri", "http_status", "error_code", "bytes_sent",
    "object_size", "total_ms", "turnaround_ms", "referrer", "user_agent",
)
# A line must reach through the status field to be usable at all.
_MIN_FIELDS = _FIELDS.index("http_status") + 1
_INT_FIELDS = ("bytes_sent", "object_size", "total_ms", "turnaround_ms")


@dataclass
class BucketLogEntry:
    owner_canonical_id: str
    bucket: str
    time: NormalizedTimestamp
    remote_ip: str | None
    requester_canonical_id: str | None
    request_id: str | None
    operation: str | None
    key: str | None
    request_uri: str | None
    http_status: int
    error_code: str | None = None
    bytes_sent: int | None = None
    object_size: int | None = None
    total_ms: int | None = None
    turnaround_ms: int | None = None
    referrer: str | None = None
    user_agent: str | None = None
    raw_tail: str | None = None


def _tokenize_log_line(line: str) -> list[str]:
    """Split on whitespace honoring [..] and ".." groups."""
    tokens = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "[":
            end = line.find("]", i + 1)
            if end < 0:
                raise MalformedLineError("unterminated bracket group", line)
            tokens.append(line[i + 1:end])
            i = end + 1
        elif ch == '"':
            end = line.find('"', i + 1)
            if end < 0:
                raise MalformedLineError("unterminated quote group", line)
            tokens.append(line[i + 1:end])
            i = end + 1
        else:
            end = i
            while end < n and line[end] not in " \t":
                end += 1
            tokens.append(line[i:end])
            i = end
    return tokens


def parse_bucket_log_line(line: str) -> BucketLogEntry:
    """Parse one bucket access-log record.

    '-' placeholders map to absent values. Fields past the user agent
    are kept unparsed in raw_tail; log format revisions append there.
    """
    if not line.strip():
        raise MalformedLineError("empty line", line)
    tokens = _tokenize_log_line(line)
    if len(tokens) < _MIN_FIELDS:
        raise MalformedLineError(
            f"expected at least {_MIN_FIELDS} fields, got {len(tokens)}", line)

    def opt(value: str) -> str | None:
        return None if value == "-" else value

    values = dict(zip(_FIELDS, tokens))
    tail = tokens[len(_FIELDS):]
    try:
        status = int(values["http_status"])
    except ValueError:
        raise MalformedLineError("non-numeric status field", line) from None
    if not 100 <= status <= 599:
        raise MalformedLineError(f"status {status} outside 100..599", line)

    ints: dict[str, int | None] = {}
    for name in _INT_FIELDS:
        raw = opt(values.get(name, "-"))
        if raw is None:
            ints[name] = None
        else:
            try:
                ints[name] = int(raw)
            except ValueError:
                raise MalformedLineError(f"non-numeric {name} field", line) from None

    return BucketLogEntry(
        owner_canonical_id=values["owner_canonical_id"],
        bucket=values["bucket"],
        time=parse_date_text(values["time"], "apache-log"),
        remote_ip=opt(values["remote_ip"]),
        requester_canonical_id=opt(values["requester_canonical_id"]),
        request_id=opt(values["request_id"]),
        operation=opt(values["operation"]),
        key=opt(values["key"]),
        request_uri=opt(values.get("request_uri", "-")),
        http_status=status,
        error_code=opt(values.get("error_code", "-")),
        bytes_sent=ints["bytes_sent"],
        object_size=ints["object_size"],
        total_ms=ints["total_ms"],
        turnaround_ms=ints["turnaround_ms"],
        referrer=opt(values.get("referrer", "-")),
        user_agent=opt(values.get("user_agent", "-")),
        raw_tail=" ".join(tail) if tail else None,
    )


def format_bucket_log_line(entry: BucketLogEntry) -> str:
    """Render an entry back to its canonical line form."""
    def opt(value) -> str:
        return "-" if value is None else str(value)

    parts = [
        entry.owner_canonical_id,
        entry.bucket,
        f"[{entry.time.render_raw()}]",
        opt(entry.remote_ip),
        opt(entry.requester_canonical_id),
        opt(entry.request_id),
        opt(entry.operation),
        opt(entry.key),
        f'"{entry.request_uri}"' if entry.request_uri is not None else '"-"',
        str(entry.http_status),
        opt(entry.error_code),
        opt(entry.bytes_sent),
        opt(entry.object_size),
        opt(entry.total_ms),
        opt(entry.turnaround_ms),
        f'"{entry.referrer}"' if entry.referrer is not None else '"-"',
        f'"{entry.user_agent}"' if entry.user_agent is not None else '"-"',
    ]
    line = " ".join(parts)
    if entry.raw_tail:
        line += " " + entry.raw_tail
    return line


_LNK_TRACE_RE = re.compile(r"^(.+) on s3\.amazonaws\.com\.lnk$")


def detect_lnk_trace(filename: str) -> str | None:
    """Downloaded-file name if the shortcut name matches the S3 pattern."""
    m = _LNK_TRACE_RE.match(filename)
    return m.group(1) if m else None


@dataclass
class S3Account:
    display_name: str
    access_key_id: str
    secret_access_key: str
    trailing_flag: str
    source_path: str


ACCOUNT_DELIMITER = "<$$$>"


def parse_iaws_plist(path: str | Path, source_path: str = ""
                     ) -> tuple[list[S3Account], list[CredentialFinding], list[str]]:
    """Parse ACCOUNTS strings from the iOS manager plist.

    Each well-formed string is name<$$$>keyid<$$$>secret<$$$>flag and
    yields one access-key-pair finding. Short strings are preserved in
    the diagnostics instead of being guessed at.
    """
    src = source_path or str(path)
    with open(path, "rb") as fh:
        data = plistlib.load(fh)
    accounts: list[S3Account] = []
    findings: list[CredentialFinding] = []
    diagnostics: list[str] = []
    for raw in data.get("ACCOUNTS", []):
        parts = str(raw).split(ACCOUNT_DELIMITER)
        if len(parts) < 4:
            diagnostics.append(f"malformed ACCOUNTS string: {raw!r}")
            continue
        account = S3Account(
            display_name=parts[0],
            access_key_id=parts[1],
            secret_access_key=parts[2],
            trailing_flag=ACCOUNT_DELIMITER.join(parts[3:]),
            source_path=src,
        )
        accounts.append(account)
        findings.append(CredentialFinding(
            service="amazon-s3",
            account_id=account.display_name,
            secret_kind=SECRET_KEY_PAIR,
            source_path=src,
            secret_value=f"{account.access_key_id}:{account.secret_access_key}",
            enables_remote_access=True,
        ))
    return accounts, findings, diagnostics


@dataclass
class S3Download:
    key: str
    bucket: str | None
    local_path: str | None
    size_bytes: int | None
    downloaded: NormalizedTimestamp | None
    etag: str | None = None


_ETAG_RE = re.compile(r"([0-9a-fA-F]{32})")


def parse_iaws_db(path: str | Path) -> list[S3Download]:
    """Parse the DOWNLOADS table of the iOS manager database."""
    downloads = []
    for row in read_sqlite_table(path, "DOWNLOADS"):
        local = row.get("FILENAME")
        etag = None
        if local:
            m = _ETAG_RE.search(str(local))
            if m:
                etag = m.group(1)
        downloaded = None
        if row.get("DOWNLOAD_DATE"):
            downloaded = parse_date_text(str(row["DOWNLOAD_DATE"]), "us-short")
        downloads.append(S3Download(
            key=str(row["S3KEY"]),
            bucket=row.get("S3BUCKET"),
            local_path=str(local) if local is not None else None,
            size_bytes=int(row["FILE_SIZE"]) if row.get("FILE_SIZE") is not None else None,
            downloaded=downloaded,
            etag=etag,
        ))
    return downloads


@dataclass
class S3BucketConfig:
    """Per-bucket settings from the Android shared-preferences file."""

    bucket: str
    remote_dir: str | None = None
    access_key_id: str | None = None
    secret_access_key: str | None = None
    local_dir: str | None = None
    last_sync: NormalizedTimestamp | None = None
    decode_failures: dict[str, str] = field(default_factory=dict)


_PREF_KEY_RE = re.compile(
    r"^s3\.(remotedir|keyid|key|sync\.last\.date|sync\.localdir)\[(.+)\]$"
)


def _decode_pref_value(text: str) -> tuple[str | None, str | None]:
    """Base64-decode a preference value; (decoded, failure) exclusive."""
    compact = text.strip()
    try:
        raw = base64.b64decode(compact, validate=True)
    except (binascii.Error, ValueError):
        return None, f"invalid base64: {compact!r}"
    try:
        return raw.decode("utf-8"), None
    except UnicodeDecodeError:
        return None, f"non-text payload: hex {raw.hex()}"


def parse_s3anywhere_xml(path: str | Path, source_path: str = ""
                         ) -> tuple[list[S3BucketConfig], list[CredentialFinding]]:
    """Parse per-bucket configuration from s3anywhere shared prefs.

    Element text is base64-coded; sync.last.date decodes to unix
    seconds. Undecodable values are retained raw with a failure note --
    evidence is never destroyed. A bucket with both keyid and key
    present yields an access-key-pair finding.
    """
    src = source_path or str(path)
    tree = ET.parse(path)
    buckets: dict[str, S3BucketConfig] = {}
    for element in tree.getroot().iter("string"):
        name = element.get("name", "")
        m = _PREF_KEY_RE.match(name)
        if not m:
            continue
        field_name, bucket = m.groups()
        config = buckets.setdefault(bucket, S3BucketConfig(bucket=bucket))
        decoded, failure = _decode_pref_value(element.text or "")
        if failure is not None:
            config.decode_failures[name] = failure
            continue
        if field_name == "remotedir":
            config.remote_dir = decoded
        elif field_name == "keyid":
            config.access_key_id = decoded
        elif field_name == "key":
            config.secret_access_key = decoded
        elif field_name == "sync.localdir":
            config.local_dir = decoded
        elif field_name == "sync.last.date":
            try:
                config.last_sync = normalize_unix(int(decoded))
            except ValueError:
                config.decode_failures[name] = f"non-numeric sync time: {decoded!r}"
    findings = []
    for bucket in sorted(buckets):
        config = buckets[bucket]
        if config.access_key_id and config.secret_access_key:
            findings.append(CredentialFinding(
                service="amazon-s3",
                account_id=config.access_key_id,
                secret_kind=SECRET_KEY_PAIR,
                source_path=src,
                secret_value=f"{config.access_key_id}:{config.secret_access_key}",
                enables_remote_access=True,
            ))
    return [buckets[b] for b in sorted(buckets)], findings
