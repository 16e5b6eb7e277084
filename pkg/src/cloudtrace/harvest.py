"""Glue between scanned candidate files and the service parsers.

Each service harvester receives that service's candidates for one
device, invokes the parsers, and emits ArtifactRecords, credential
findings, extracted payloads (carved thumbnails, recovered document
text) and diagnostics. Parser failures on individual files become
diagnostics; a damaged artifact never aborts the device scan.

Record kinds are a closed, documented vocabulary (DOCUMENTED_KINDS) so
downstream tooling can rely on it.
"""

from __future__ import annotations

import hashlib
import plistlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CloudTraceError
from .layout import DeviceProfile
from .records import ArtifactRecord, CredentialFinding
from .scan import CandidateFile
from .services import browser, dropbox, evernote, gdocs, s3
from .timestamps import NormalizedTimestamp

DOCUMENTED_KINDS = (
    # account and configuration facts
    "account-profile", "bucket-config", "sync-metadata",
    # file activity
    "recently-changed", "file-synced", "synced-file-present",
    "file-viewed", "file-uploaded", "file-downloaded",
    "file-downloaded-and-opened", "file-present",
    # notes
    "note", "note-attachment-row", "note-deleted-inferred", "note-thumbnail",
    # request and application logs
    "bucket-log-entry",
    "session-open", "auth-attempt", "auth-failure", "db-open",
    "sync-start", "sync-end", "note-sync", "update-check",
    "auth-state", "service-start", "file-watch", "screen-lock", "other",
    # browser traces
    "url-visited", "cookie", "cache-url", "cache-artifact",
    "document", "document-content",
)


@dataclass
class ExtractedPayload:
    """Bytes recovered from inside an artifact, written next to reports."""

    source_path: str
    name: str
    data: bytes


@dataclass
class HarvestResult:
    records: list[ArtifactRecord] = field(default_factory=list)
    findings: list[CredentialFinding] = field(default_factory=list)
    extracts: list[ExtractedPayload] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _record(profile: DeviceProfile, service: str, source_path: str, kind: str,
            subject: str | None = None,
            timestamps: list[tuple[str, NormalizedTimestamp]] | None = None,
            attributes: dict[str, str] | None = None,
            geo: tuple[float, float] | None = None) -> ArtifactRecord:
    return ArtifactRecord(
        service=service,
        device=profile.device_id,
        source_path=source_path,
        kind=kind,
        subject=subject,
        timestamps=timestamps or [],
        attributes=attributes or {},
        geo=geo,
    )


def _resolve_tree_path(path_text: str, profile: DeviceProfile,
                       tree_root: Path) -> Path | None:
    """Map a path stored inside an artifact onto the scanned tree."""
    text = path_text.replace("\\", "/")
    if len(text) > 2 and text[1] == ":":
        text = text[2:]
    candidates = []
    if "%UserProfile%" in text or "%Profile%" in text:
        marker = "%UserProfile%" if "%UserProfile%" in text else "%Profile%"
        for root in profile.profile_roots:
            candidates.append(root.rstrip("/") + text.split(marker, 1)[1])
    else:
        candidates.append(text.lstrip("/"))
        stripped = text.lstrip("/")
        for root in profile.profile_roots:
            # A stored absolute path often repeats the profile root.
            if stripped.startswith(root):
                candidates.append(stripped)
    for rel in candidates:
        resolved = tree_root / rel.lstrip("/")
        if resolved.exists():
            return resolved
    return None


def _note_to_record(profile: DeviceProfile, source_path: str,
                    note: evernote.NoteRecord) -> ArtifactRecord:
    timestamps = []
    for label, ts in (("created", note.created), ("updated", note.updated),
                      ("deleted", note.deleted),
                      ("last-accessed", note.last_accessed)):
        if ts is not None:
            timestamps.append((label, ts))
    attributes: dict[str, str] = {}
    if note.source_platform:
        attributes["source_platform"] = note.source_platform
    attributes["is_deleted"] = "true" if note.is_deleted else "false"
    if note.availability is not None:
        attributes["is_active"] = "true" if note.availability else "false"
    if note.attachment_names:
        attributes["attachments"] = ", ".join(note.attachment_names)
    if note.index_number is not None:
        attributes["index_number"] = str(note.index_number)
    if note.content_excerpt:
        attributes["content_excerpt"] = note.content_excerpt
    attributes.update(note.extras)
    geo = None
    if note.latitude is not None and note.longitude is not None:
        geo = (note.latitude, note.longitude)
    kind = "note"
    if note.extras.get("row_kind") == "local-file":
        kind = "note-attachment-row"
    return _record(profile, "evernote", source_path, kind,
                   subject=note.title, timestamps=timestamps,
                   attributes=attributes, geo=geo)


def _by_role(candidates: list[CandidateFile]) -> dict[str, list[CandidateFile]]:
    grouped: dict[str, list[CandidateFile]] = {}
    for candidate in candidates:
        grouped.setdefault(candidate.entry.role, []).append(candidate)
    return grouped


def _first(grouped: dict[str, list[CandidateFile]], role: str) -> CandidateFile | None:
    matches = grouped.get(role)
    return matches[0] if matches else None


def harvest_dropbox(candidates: list[CandidateFile], profile: DeviceProfile,
                    tree_root: Path) -> HarvestResult:
    result = HarvestResult()
    grouped = _by_role(candidates)

    for candidate in grouped.get("dropbox-config", []):
        try:
            account, finding = dropbox.parse_config_db(candidate.path,
                                                       candidate.relative_path)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        result.findings.append(finding)
        attributes = {}
        if account.email:
            attributes["email"] = account.email
        if account.dropbox_path:
            attributes["dropbox_path"] = account.dropbox_path
        result.records.append(_record(profile, "dropbox", candidate.relative_path,
                                      "account-profile", subject=account.email,
                                      attributes=attributes))
        for position, (server_id, path) in enumerate(account.recent_entries):
            attrs = {"position": str(position)}
            if server_id:
                attrs["server_id"] = server_id
            result.records.append(_record(profile, "dropbox",
                                          candidate.relative_path,
                                          "recently-changed", subject=path,
                                          attributes=attrs))
        if account.dropbox_path:
            sync_dir = _resolve_tree_path(account.dropbox_path, profile, tree_root)
            if sync_dir is not None and sync_dir.is_dir():
                for child in sorted(sync_dir.rglob("*")):
                    if not child.is_file() or child.is_symlink():
                        continue
                    rel = child.relative_to(tree_root).as_posix()
                    result.records.append(_record(
                        profile, "dropbox", rel, "synced-file-present",
                        subject=child.name,
                        attributes={"sha256": _sha256(child.read_bytes()),
                                    "sync_folder": "true"}))

    for candidate in grouped.get("dropbox-filecache", []):
        try:
            rows = dropbox.parse_filecache_db(candidate.path)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        for row in rows:
            result.records.append(_record(
                profile, "dropbox", candidate.relative_path, "file-synced",
                subject=row.local_filename,
                timestamps=[("modified", row.modified), ("created", row.created)],
                attributes={"server_path": row.server_path}))

    plist_candidate = _first(grouped, "dropbox-ios-plist")
    if plist_candidate is not None:
        try:
            account = dropbox.parse_ios_plist(plist_candidate.path)
        except Exception as exc:
            result.diagnostics.append(f"{plist_candidate.relative_path}: {exc}")
        else:
            attributes = {}
            if account.email:
                attributes["email"] = account.email
            timestamps = []
            if account.first_login is not None:
                timestamps.append(("first-login", account.first_login))
            result.records.append(_record(profile, "dropbox",
                                          plist_candidate.relative_path,
                                          "account-profile", subject=account.email,
                                          timestamps=timestamps,
                                          attributes=attributes))

    viewed = _first(grouped, "dropbox-ios-viewed")
    uploads = _first(grouped, "dropbox-ios-uploads")
    if viewed is not None or uploads is not None:
        events, diagnostics = dropbox.parse_ios_activity(
            viewed.path if viewed else None, uploads.path if uploads else None)
        result.diagnostics.extend(diagnostics)
        for event in events:
            source = viewed if event.kind == "file-viewed" else uploads
            result.records.append(_record(
                profile, "dropbox", source.relative_path, event.kind,
                subject=event.path,
                timestamps=[("event", event.timestamp)]))

    prefs = _first(grouped, "dropbox-android-prefs")
    db = _first(grouped, "dropbox-android-db")
    if prefs is not None or db is not None:
        try:
            account, files = dropbox.parse_android_stores(
                prefs.path if prefs else None, db.path if db else None)
        except CloudTraceError as exc:
            where = prefs or db
            result.diagnostics.append(f"{where.relative_path}: {exc}")
        else:
            if prefs is not None and (account.email or account.display_name):
                attributes = {}
                if account.email:
                    attributes["email"] = account.email
                if account.display_name:
                    attributes["display_name"] = account.display_name
                if account.country:
                    attributes["country"] = account.country
                result.records.append(_record(profile, "dropbox",
                                              prefs.relative_path,
                                              "account-profile",
                                              subject=account.email,
                                              attributes=attributes))
            for row in files:
                attrs = {"size": row.size_text}
                if row.size_bytes is not None:
                    attrs["size_bytes"] = str(row.size_bytes)
                result.records.append(_record(
                    profile, "dropbox", db.relative_path, "file-synced",
                    subject=row.display_name,
                    timestamps=[("modified", row.modified)],
                    attributes=attrs))

    for candidate in grouped.get("dropbox-android-log", []):
        try:
            text = candidate.path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        for event in dropbox.parse_android_log(text):
            timestamps = []
            if event.timestamp is not None:
                timestamps.append(("logged", event.timestamp))
            attrs = {"message": event.message}
            if event.component:
                attrs["component"] = event.component
            result.records.append(_record(
                profile, "dropbox", candidate.relative_path, event.kind,
                subject=event.subject, timestamps=timestamps, attributes=attrs))

    for candidate in grouped.get("dropbox-sdcard", []):
        result.records.append(_record(
            profile, "dropbox", candidate.relative_path, "file-present",
            subject=candidate.path.name,
            attributes={"sha256": _sha256(candidate.path.read_bytes())}))

    return result


def harvest_evernote(candidates: list[CandidateFile], profile: DeviceProfile,
                     tree_root: Path) -> HarvestResult:
    result = HarvestResult()
    grouped = _by_role(candidates)

    platform = "mac-sql" if profile.os_family == "mac" else "windows-exb"
    for candidate in grouped.get("evernote-notestore", []):
        try:
            notes = evernote.parse_note_store(candidate.path, platform)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        for note in notes:
            result.records.append(_note_to_record(profile,
                                                  candidate.relative_path, note))

    for candidate in grouped.get("evernote-thumbnails", []):
        try:
            images = evernote.carve_thumbnails(candidate.path.read_bytes())
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        for index, image in enumerate(images):
            attrs = {
                "offset": str(image.offset),
                "truncated": "true" if image.truncated else "false",
                "sha256": _sha256(image.data),
                "preamble_hex": image.preamble.hex(),
            }
            result.records.append(_record(
                profile, "evernote", candidate.relative_path, "note-thumbnail",
                subject=f"thumbnail {index}", attributes=attrs))
            result.extracts.append(ExtractedPayload(
                candidate.relative_path,
                f"{Path(candidate.relative_path).name}.thumb.{index}.png",
                image.data))

    for role, dialect in (("evernote-applog", None), ("evernote-ios-applog", "ios-applog")):
        for candidate in grouped.get(role, []):
            if dialect is None:
                file_dialect = "mac-log" if profile.os_family == "mac" else "windows-applog"
            else:
                file_dialect = dialect
            try:
                text = candidate.path.read_text(encoding="utf-8", errors="replace")
                events = evernote.parse_app_log(text, file_dialect)
            except (OSError, ValueError) as exc:
                result.diagnostics.append(f"{candidate.relative_path}: {exc}")
                continue
            for event in events:
                timestamps = []
                if event.timestamp is not None:
                    timestamps.append(("logged", event.timestamp))
                attrs = dict(event.attributes)
                if event.account:
                    attrs["account"] = event.account
                result.records.append(_record(
                    profile, "evernote", candidate.relative_path, event.kind,
                    subject=attrs.get("note_title"),
                    timestamps=timestamps, attributes=attrs))

    for candidate in grouped.get("evernote-enclipper", []):
        try:
            text = candidate.path.read_text(encoding="utf-8", errors="replace")
            events = evernote.parse_app_log(text, "windows-applog")
        except (OSError, ValueError) as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        # Only the start-of-application line is meaningful here.
        for event in events:
            if event.kind == "session-open":
                timestamps = [("logged", event.timestamp)] if event.timestamp else []
                result.records.append(_record(
                    profile, "evernote", candidate.relative_path, "session-open",
                    timestamps=timestamps, attributes=dict(event.attributes)))

    store = _first(grouped, "evernote-ios-store")
    if store is not None:
        md = _first(grouped, "evernote-ios-md")
        try:
            notes, last_sync, diagnostics = evernote.parse_ios_store(
                store.path, md.path if md else None)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{store.relative_path}: {exc}")
        else:
            result.diagnostics.extend(diagnostics)
            indexes = []
            for note in notes:
                result.records.append(_note_to_record(profile,
                                                      store.relative_path, note))
                # Local-file rows number their own sequence; gaps are
                # only meaningful within the note sequence.
                if (note.index_number is not None
                        and note.extras.get("row_kind") != "local-file"):
                    indexes.append(note.index_number)
            if indexes:
                for missing in evernote.detect_index_gaps(indexes):
                    result.records.append(_record(
                        profile, "evernote", store.relative_path,
                        "note-deleted-inferred",
                        subject=f"index {missing}",
                        attributes={"missing_index": str(missing),
                                    "interpretation": evernote.INDEX_GAP_NOTE}))
            if last_sync is not None:
                result.records.append(_record(
                    profile, "evernote",
                    md.relative_path if md else store.relative_path,
                    "sync-metadata",
                    timestamps=[("last-sync", last_sync)]))

    ios_plist = _first(grouped, "evernote-ios-plist")
    if ios_plist is not None:
        try:
            with open(ios_plist.path, "rb") as fh:
                data = plistlib.load(fh)
        except Exception as exc:
            result.diagnostics.append(f"{ios_plist.relative_path}: {exc}")
        else:
            username = data.get("username")
            if username:
                result.records.append(_record(
                    profile, "evernote", ios_plist.relative_path,
                    "account-profile", subject=str(username),
                    attributes={"username": str(username)}))

    for candidate in grouped.get("evernote-android-db", []):
        try:
            notes = evernote.parse_android_db(candidate.path)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        for note in notes:
            result.records.append(_note_to_record(profile,
                                                  candidate.relative_path, note))

    for role in ("evernote-android-content", "evernote-android-thumbs",
                 "evernote-fullthumb", "evernote-thumb"):
        for candidate in grouped.get(role, []):
            result.records.append(_record(
                profile, "evernote", candidate.relative_path, "file-present",
                subject=candidate.path.name,
                attributes={"sha256": _sha256(candidate.path.read_bytes())}))

    return result


def harvest_s3(candidates: list[CandidateFile], profile: DeviceProfile,
               tree_root: Path) -> HarvestResult:
    result = HarvestResult()
    grouped = _by_role(candidates)

    for candidate in grouped.get("s3-office-lnk", []):
        downloaded = s3.detect_lnk_trace(candidate.path.name)
        if downloaded is None:
            continue
        attrs = {}
        extension = downloaded.rsplit(".", 1)[-1].lower() if "." in downloaded else ""
        if extension in s3.OFFICE_EXTENSIONS:
            attrs["office_extension"] = extension
        result.records.append(_record(
            profile, "amazon-s3", candidate.relative_path,
            "file-downloaded-and-opened", subject=downloaded,
            attributes=attrs))

    for candidate in grouped.get("s3-bucket-log", []):
        try:
            text = candidate.path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        entries = []
        errors = []
        for line in text.splitlines():
            if not line.strip():
                continue
            try:
                entries.append(s3.parse_bucket_log_line(line))
            except CloudTraceError as exc:
                errors.append(str(exc))
        if not entries:
            # Cache .txt files that are not bucket logs are expected;
            # only a file that partially parses is worth flagging.
            continue
        result.diagnostics.extend(
            f"{candidate.relative_path}: {e}" for e in errors)
        for entry in entries:
            attrs = {
                "bucket": entry.bucket,
                "owner": entry.owner_canonical_id,
            }
            for label, value in (("operation", entry.operation),
                                 ("remote_ip", entry.remote_ip),
                                 ("request_uri", entry.request_uri),
                                 ("error_code", entry.error_code),
                                 ("user_agent", entry.user_agent)):
                if value is not None:
                    attrs[label] = value
            attrs["http_status"] = str(entry.http_status)
            for label, value in (("bytes_sent", entry.bytes_sent),
                                 ("object_size", entry.object_size),
                                 ("total_ms", entry.total_ms),
                                 ("turnaround_ms", entry.turnaround_ms)):
                if value is not None:
                    attrs[label] = str(value)
            result.records.append(_record(
                profile, "amazon-s3", candidate.relative_path,
                "bucket-log-entry", subject=entry.key,
                timestamps=[("request", entry.time)], attributes=attrs))

    plist_candidate = _first(grouped, "s3-iaws-plist")
    if plist_candidate is not None:
        try:
            accounts, findings, diagnostics = s3.parse_iaws_plist(
                plist_candidate.path, plist_candidate.relative_path)
        except Exception as exc:
            result.diagnostics.append(f"{plist_candidate.relative_path}: {exc}")
        else:
            result.findings.extend(findings)
            result.diagnostics.extend(
                f"{plist_candidate.relative_path}: {d}" for d in diagnostics)
            for account in accounts:
                result.records.append(_record(
                    profile, "amazon-s3", plist_candidate.relative_path,
                    "account-profile", subject=account.display_name,
                    attributes={"display_name": account.display_name,
                                "access_key_id": account.access_key_id,
                                "trailing_flag": account.trailing_flag}))

    db_candidate = _first(grouped, "s3-iaws-db")
    if db_candidate is not None:
        try:
            downloads = s3.parse_iaws_db(db_candidate.path)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{db_candidate.relative_path}: {exc}")
        else:
            for download in downloads:
                attrs = {}
                if download.bucket:
                    attrs["bucket"] = download.bucket
                if download.local_path:
                    attrs["local_path"] = download.local_path
                if download.size_bytes is not None:
                    attrs["size_bytes"] = str(download.size_bytes)
                if download.etag:
                    attrs["etag"] = download.etag
                timestamps = []
                if download.downloaded is not None:
                    timestamps.append(("downloaded", download.downloaded))
                result.records.append(_record(
                    profile, "amazon-s3", db_candidate.relative_path,
                    "file-downloaded", subject=download.key,
                    timestamps=timestamps, attributes=attrs))

    for candidate in grouped.get("s3-anywhere-xml", []):
        try:
            configs, findings = s3.parse_s3anywhere_xml(candidate.path,
                                                        candidate.relative_path)
        except Exception as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        result.findings.extend(findings)
        for config in configs:
            attrs = {"bucket": config.bucket}
            if config.remote_dir:
                attrs["remote_dir"] = config.remote_dir
            if config.access_key_id:
                attrs["access_key_id"] = config.access_key_id
            if config.local_dir:
                attrs["local_dir"] = config.local_dir
            for key, failure in sorted(config.decode_failures.items()):
                attrs[f"decode_failed:{key}"] = failure
            timestamps = []
            if config.last_sync is not None:
                timestamps.append(("last-sync", config.last_sync))
            result.records.append(_record(
                profile, "amazon-s3", candidate.relative_path, "bucket-config",
                subject=config.bucket, timestamps=timestamps, attributes=attrs))

    return result


def harvest_gdocs(candidates: list[CandidateFile], profile: DeviceProfile,
                  tree_root: Path) -> HarvestResult:
    result = HarvestResult()
    grouped = _by_role(candidates)
    extract_counter = 0

    temp_roles = ("gdocs-doclist-page", "gdocs-edit-page", "gdocs-ccc-page",
                  "gdocs-viewer-xml", "gdocs-viewer-png", "gdocs-viewer-txt")
    seen_paths = set()
    for role in temp_roles:
        for candidate in grouped.get(role, []):
            if candidate.relative_path in seen_paths:
                continue
            seen_paths.add(candidate.relative_path)
            artifact = gdocs.classify_temp_file(candidate.path.name)
            if artifact is None:
                continue
            attrs = {"temp_kind": artifact.kind,
                     "sequence_n": str(artifact.sequence_n)}
            data = candidate.path.read_bytes()
            if artifact.kind == "doc-list":
                names = gdocs.harvest_anchor_texts(data)
                if names:
                    attrs["listed_files"] = ", ".join(names)
                    attrs["extraction_confidence"] = "low"
            elif artifact.kind in ("document-view-or-edit", "spreadsheet",
                                   "pdf-viewer-html"):
                extracted = gdocs.detect_gdocs_cache_html(data)
                if extracted is not None:
                    attrs["extracted_text"] = extracted
                    result.extracts.append(ExtractedPayload(
                        candidate.relative_path,
                        f"{candidate.path.name}.extract.{extract_counter}.txt",
                        extracted.encode("utf-8")))
                    extract_counter += 1
            if artifact.kind == "pdf-viewer-image" or candidate.container == "png":
                attrs["sha256"] = _sha256(data)
            result.records.append(_record(
                profile, "google-docs", candidate.relative_path,
                "cache-artifact", subject=candidate.path.name,
                attributes=attrs))

    # Loose Firefox cache payloads: HTML pages by signature, PNG pages.
    for role in ("gdocs-cache-png", "gdocs-cache-html"):
        for candidate in grouped.get(role, []):
            if candidate.relative_path in seen_paths:
                continue
            data = candidate.path.read_bytes()
            if candidate.container == "png" and role == "gdocs-cache-png":
                seen_paths.add(candidate.relative_path)
                result.records.append(_record(
                    profile, "google-docs", candidate.relative_path,
                    "cache-artifact", subject=candidate.path.name,
                    attributes={"temp_kind": "page-image",
                                "sha256": _sha256(data)}))
            elif candidate.container == "html" and role == "gdocs-cache-html":
                extracted = gdocs.detect_gdocs_cache_html(data)
                if extracted is None:
                    continue
                seen_paths.add(candidate.relative_path)
                result.extracts.append(ExtractedPayload(
                    candidate.relative_path,
                    f"{candidate.path.name}.extract.{extract_counter}.txt",
                    extracted.encode("utf-8")))
                extract_counter += 1
                result.records.append(_record(
                    profile, "google-docs", candidate.relative_path,
                    "cache-artifact", subject=candidate.path.name,
                    attributes={"temp_kind": "cached-page",
                                "extracted_text": extracted}))

    plist_candidate = _first(grouped, "gdocs-ios-plist")
    if plist_candidate is not None:
        try:
            finding, settings = gdocs.parse_igoogdocs_plist(
                plist_candidate.path, plist_candidate.relative_path)
        except Exception as exc:
            result.diagnostics.append(f"{plist_candidate.relative_path}: {exc}")
        else:
            if finding is not None:
                result.findings.append(finding)
            attrs = {"rememberme": "true" if settings.rememberme else "false"}
            if settings.username:
                attrs["username"] = settings.username
            result.records.append(_record(
                profile, "google-docs", plist_candidate.relative_path,
                "account-profile", subject=settings.username,
                attributes=attrs))

    for candidate in grouped.get("gdocs-ios-localfile", []):
        try:
            text = gdocs.extract_local_file_html(candidate.path.read_bytes())
        except CloudTraceError as exc:
            result.diagnostics.append(f"{candidate.relative_path}: {exc}")
            continue
        title = candidate.path.name.rsplit(".", 1)[0]
        result.records.append(_record(
            profile, "google-docs", candidate.relative_path,
            "document-content", subject=title,
            attributes={"text": text}))
        result.extracts.append(ExtractedPayload(
            candidate.relative_path,
            f"{candidate.path.name}.extract.{extract_counter}.txt",
            text.encode("utf-8")))
        extract_counter += 1

    doclist = _first(grouped, "gdocs-doclist-db")
    if doclist is not None:
        try:
            documents = gdocs.parse_doclist_db(doclist.path)
        except CloudTraceError as exc:
            result.diagnostics.append(f"{doclist.relative_path}: {exc}")
        else:
            for document in documents:
                attrs = {"account_email": document.account_email,
                         "doc_kind": document.kind}
                if document.order_violation:
                    attrs["flag"] = "creation-after-modification"
                timestamps = []
                for label, ts in (("created", document.created),
                                  ("modified", document.modified),
                                  ("last-sync", document.last_sync)):
                    if ts is not None:
                        timestamps.append((label, ts))
                result.records.append(_record(
                    profile, "google-docs", doclist.relative_path, "document",
                    subject=document.title, timestamps=timestamps,
                    attributes=attrs))

    drive = _first(grouped, "gdocs-drive-prefs")
    webview = _first(grouped, "gdocs-webview-prefs")
    if drive is not None or webview is not None:
        admin, latest = gdocs.parse_gdocs_shared_prefs(
            drive.path if drive else None, webview.path if webview else None)
        if admin:
            result.records.append(_record(
                profile, "google-docs", drive.relative_path, "account-profile",
                subject=admin,
                attributes={"admin_email": admin, "email": admin}))
        if latest:
            result.records.append(_record(
                profile, "google-docs", webview.relative_path, "account-profile",
                subject=latest,
                attributes={"latest_email": latest, "email": latest,
                            "context": "latest connected account; relevant "
                                       "when several accounts used this device"}))

    return result


def harvest_browser(candidates: list[CandidateFile], profile: DeviceProfile,
                    tree_root: Path) -> HarvestResult:
    result = HarvestResult()
    grouped = _by_role(candidates)

    places = _first(grouped, "browser-places")
    cookies = _first(grouped, "browser-cookies")
    if places is not None or cookies is not None:
        visits, cookie_rows, diagnostics = browser.extract_firefox_history(
            places.path if places else None, cookies.path if cookies else None)
        result.diagnostics.extend(diagnostics)
        for visit in visits:
            attrs = {"url": visit.url}
            if visit.title:
                attrs["title"] = visit.title
            result.records.append(_record(
                profile, "browser", places.relative_path, "url-visited",
                subject=visit.url, timestamps=[("visited", visit.visited)],
                attributes=attrs))
        for cookie in cookie_rows:
            timestamps = []
            if cookie.created is not None:
                timestamps.append(("created", cookie.created))
            if cookie.last_accessed is not None:
                timestamps.append(("last-accessed", cookie.last_accessed))
            result.records.append(_record(
                profile, "browser", cookies.relative_path, "cookie",
                subject=cookie.host,
                timestamps=timestamps,
                attributes={"host": cookie.host, "name": cookie.name}))

    for role in ("browser-cache-index", "browser-history-index",
                 "browser-cookie-index", "browser-download-index"):
        for candidate in grouped.get(role, []):
            try:
                entries = browser.carve_index_dat_urls(candidate.path.read_bytes())
            except CloudTraceError as exc:
                result.diagnostics.append(f"{candidate.relative_path}: {exc}")
                continue
            for entry in entries:
                attrs = {"url": entry.url, "record_type": entry.record_type}
                if entry.raw_timestamp is not None:
                    attrs["raw_timestamp"] = str(entry.raw_timestamp)
                timestamps = []
                if entry.decoded is not None:
                    timestamps.append(("recorded", entry.decoded))
                result.records.append(_record(
                    profile, "browser", candidate.relative_path, "cache-url",
                    subject=entry.url, timestamps=timestamps, attributes=attrs))

    for candidate in grouped.get("browser-cache-files", []):
        # Generic cache payloads are inventoried with a hash; dedicated
        # entries (bucket logs, doc pages) parse the same files fully.
        result.records.append(_record(
            profile, "browser", candidate.relative_path, "file-present",
            subject=candidate.path.name,
            attributes={"sha256": _sha256(candidate.path.read_bytes()),
                        "container": candidate.container}))

    for role in ("browser-cookie-files", "browser-session", "browser-cache-map"):
        for candidate in grouped.get(role, []):
            result.records.append(_record(
                profile, "browser", candidate.relative_path, "file-present",
                subject=candidate.path.name,
                attributes={"sha256": _sha256(candidate.path.read_bytes()),
                            "container": candidate.container}))

    return result


_HARVESTERS = {
    "dropbox": harvest_dropbox,
    "evernote": harvest_evernote,
    "amazon-s3": harvest_s3,
    "google-docs": harvest_gdocs,
    "browser": harvest_browser,
}


def harvest_device(candidates: list[CandidateFile], profile: DeviceProfile,
                   tree_root: Path) -> HarvestResult:
    """Run every service harvester over one device's candidates."""
    merged = HarvestResult()
    by_service: dict[str, list[CandidateFile]] = {}
    for candidate in candidates:
        by_service.setdefault(candidate.entry.service, []).append(candidate)
    for service in sorted(by_service):
        harvester = _HARVESTERS.get(service)
        if harvester is None:
            continue
        partial = harvester(by_service[service], profile, tree_root)
        merged.records.extend(partial.records)
        merged.findings.extend(partial.findings)
        merged.extracts.extend(partial.extracts)
        merged.diagnostics.extend(partial.diagnostics)
    return merged
