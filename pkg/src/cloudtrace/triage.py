"""Timeline construction, cross-device correlation, and the
investigation decision procedure."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MissingJurisdictionError
from .records import (
    ArtifactRecord,
    CredentialFinding,
    REMOTE_CAPABLE_SECRETS,
)
from .timestamps import CONFIDENCE_AMBIGUOUS_TZ, NormalizedTimestamp

CONTENT_HASH_ALGORITHM = "sha256"

BRANCH_FULL = "full-credentials"
BRANCH_ID_IN = "id-only-in-jurisdiction"
BRANCH_ID_OUT = "id-only-out-of-jurisdiction"
BRANCH_NONE = "no-credentials"

# Branch strength for the monotonicity property: more credential
# material can only move the branch rightward.
BRANCH_RANK = {BRANCH_NONE: 0, BRANCH_ID_IN: 1, BRANCH_ID_OUT: 1, BRANCH_FULL: 2}


@dataclass
class TimelineEvent:
    instant: NormalizedTimestamp
    record: ArtifactRecord
    label: str

    def sort_key(self):
        return (self.instant.utc_instant, self.record.source_path, self.label)


def _render_label(record: ArtifactRecord, ts_label: str,
                  instant: NormalizedTimestamp) -> str:
    parts = [record.service, record.kind]
    if record.subject:
        parts.append(record.subject)
    label = " ".join(parts) + f" [{ts_label}]"
    if instant.confidence == CONFIDENCE_AMBIGUOUS_TZ:
        label += " (device-local time, timezone unknown)"
    elif instant.confidence != "exact":
        label += f" ({instant.confidence})"
    return label


def build_timeline(records: list[ArtifactRecord]) -> list[TimelineEvent]:
    """One event per labeled timestamp, in a total deterministic order.

    Order is (UTC instant, source path, label); ambiguous-timezone
    instants stay in the stream but say so in their label.
    """
    events = [
        TimelineEvent(instant, record, _render_label(record, ts_label, instant))
        for record in records
        for ts_label, instant in record.timestamps
    ]
    events.sort(key=TimelineEvent.sort_key)
    return events


@dataclass
class Correlation:
    kind: str
    left: ArtifactRecord
    right: ArtifactRecord
    evidence: str


# Attribute keys that carry account identifiers, across all parsers.
_ACCOUNT_KEYS = (
    "email", "account", "account_id", "username", "display_name",
    "admin_email", "latest_email", "account_email",
)


def _account_values(record: ArtifactRecord) -> list[str]:
    values = []
    for key in _ACCOUNT_KEYS:
        value = record.attributes.get(key)
        if value:
            values.append(value.strip().lower())
    return values


def _subject_filename(record: ArtifactRecord) -> str | None:
    subject = record.subject
    if not subject or "@" in subject:
        return None
    name = subject.replace("\\", "/").rstrip("/").rsplit("/", 1)[-1]
    if not name or "." not in name:
        return None
    return name


def _is_windows_record(record: ArtifactRecord) -> bool:
    return record.device.startswith("windows")


def correlate(records: list[ArtifactRecord]) -> list[Correlation]:
    """Cross-device links: same account, same filename, same content hash.

    Filename comparison is case-insensitive whenever either side comes
    from a Windows tree (that filesystem would treat the names as
    equal). Output order is deterministic and duplicates collapse.
    """
    seen: set[tuple] = set()
    out: list[Correlation] = []

    def add(kind: str, left: ArtifactRecord, right: ArtifactRecord, evidence: str):
        if left.device == right.device:
            return
        if (right.device, right.source_path, right.kind) < (left.device, left.source_path, left.kind):
            left, right = right, left
        key = (kind, evidence, left.device, left.source_path, left.kind,
               right.device, right.source_path, right.kind)
        if key in seen:
            return
        seen.add(key)
        out.append(Correlation(kind, left, right, evidence))

    indexed = list(enumerate(records))

    by_account: dict[str, list[ArtifactRecord]] = {}
    for _, record in indexed:
        for value in _account_values(record):
            by_account.setdefault(value, []).append(record)
    for value in sorted(by_account):
        group = by_account[value]
        for i, left in enumerate(group):
            for right in group[i + 1:]:
                add("same-account", left, right, value)

    by_name: dict[str, list[tuple[ArtifactRecord, str]]] = {}
    for _, record in indexed:
        name = _subject_filename(record)
        if name:
            by_name.setdefault(name.lower(), []).append((record, name))
    for lowered in sorted(by_name):
        group = by_name[lowered]
        for i, (left, left_name) in enumerate(group):
            for right, right_name in group[i + 1:]:
                if left_name == right_name or _is_windows_record(left) or _is_windows_record(right):
                    add("same-filename", left, right, lowered)

    by_hash: dict[str, list[ArtifactRecord]] = {}
    for _, record in indexed:
        digest = record.attributes.get(CONTENT_HASH_ALGORITHM)
        if digest:
            by_hash.setdefault(digest, []).append(record)
    for digest in sorted(by_hash):
        group = by_hash[digest]
        for i, left in enumerate(group):
            for right in group[i + 1:]:
                add("same-content-hash", left, right, digest)

    out.sort(key=lambda c: (c.kind, c.evidence, c.left.device, c.left.source_path,
                            c.right.device, c.right.source_path))
    return out


@dataclass
class TriageDecision:
    branch: str
    recommendations: list[str]


# Recommendation text, assembled per branch below.
_REC_WARRANT = "obtain a search and seizure warrant before touching the account"
_REC_REMOTE_FULL = ("collect data from the cloud storage remotely using the "
                    "recovered credentials")
_REC_REMOTE_ID = "collect the files in the user's cloud storage"
_REC_ANALYZE_BOTH = ("analyze the cloud-side data together with the artifacts "
                     "remaining in PCs and smartphones")
_REC_LOCAL_ONLY = "analyze only the artifacts that remain in PCs and smartphones"
_REC_ASSISTANCE = "request international judicial assistance"
_REC_SPOLIATION = ("warning: cooperation across jurisdictions takes time, and in "
                   "the interval the account holder might delete files from the "
                   "cloud storage")
_REC_REPORT = "write the investigation report"
_REC_NO_WARRANT = ("no warrant assumed: logging in without one is not due "
                   "process, so remote collection is off the table")


def decide_branch(findings: list[CredentialFinding],
                  in_jurisdiction: bool | None = None,
                  warrant_assumed: bool = False) -> TriageDecision:
    """Map findings plus legal inputs to an investigation branch.

    Remote-capable secret material (password, key pair, portable
    session file) dominates: branch full-credentials. Otherwise an
    account identifier alone branches on jurisdiction, which must be
    supplied -- identifier-only findings with in_jurisdiction left None
    raise MissingJurisdictionError instead of guessing. No findings at
    all means local analysis only. warrant_assumed=False strips every
    remote-collection step.
    """
    has_secret = any(
        f.enables_remote_access and f.secret_kind in REMOTE_CAPABLE_SECRETS
        for f in findings
    )
    has_identifier = any(f.account_id for f in findings)

    if has_secret:
        recommendations = [_REC_WARRANT]
        if warrant_assumed:
            recommendations += [_REC_REMOTE_FULL, _REC_ANALYZE_BOTH]
        else:
            recommendations += [_REC_NO_WARRANT, _REC_LOCAL_ONLY]
        recommendations.append(_REC_REPORT)
        return TriageDecision(BRANCH_FULL, recommendations)

    if has_identifier:
        if in_jurisdiction is None:
            raise MissingJurisdictionError(
                "identifier-only findings: specify whether the storage "
                "provider is in the investigator's jurisdiction")
        if in_jurisdiction:
            recommendations = [_REC_WARRANT]
            if warrant_assumed:
                recommendations += [_REC_REMOTE_ID, _REC_ANALYZE_BOTH]
            else:
                recommendations += [_REC_NO_WARRANT, _REC_LOCAL_ONLY]
            recommendations.append(_REC_REPORT)
            return TriageDecision(BRANCH_ID_IN, recommendations)
        recommendations = [_REC_ASSISTANCE, _REC_SPOLIATION]
        if warrant_assumed:
            recommendations.append(_REC_ANALYZE_BOTH)
        else:
            recommendations.append(_REC_LOCAL_ONLY)
        recommendations.append(_REC_REPORT)
        return TriageDecision(BRANCH_ID_OUT, recommendations)

    return TriageDecision(BRANCH_NONE, [_REC_LOCAL_ONLY, _REC_REPORT])


@dataclass
class TriageReport:
    findings: list[CredentialFinding]
    branch: str
    warrant_assumed: bool
    recommendations: list[str]
    correlations: list[Correlation]
    timeline_stats: dict[str, object] = field(default_factory=dict)


def summarize_timeline(events: list[TimelineEvent]) -> dict[str, object]:
    stats: dict[str, object] = {"event_count": len(events)}
    if events:
        stats["first_event_utc"] = events[0].instant.iso()
        stats["last_event_utc"] = events[-1].instant.iso()
    per_service: dict[str, int] = {}
    ambiguous = 0
    for event in events:
        per_service[event.record.service] = per_service.get(event.record.service, 0) + 1
        if event.instant.confidence != "exact":
            ambiguous += 1
    stats["events_per_service"] = dict(sorted(per_service.items()))
    stats["flagged_event_count"] = ambiguous
    return stats


def triage(records: list[ArtifactRecord],
           findings: list[CredentialFinding],
           events: list[TimelineEvent],
           in_jurisdiction: bool | None = None,
           warrant_assumed: bool = False) -> TriageReport:
    decision = decide_branch(findings, in_jurisdiction, warrant_assumed)
    return TriageReport(
        findings=findings,
        branch=decision.branch,
        warrant_assumed=warrant_assumed,
        recommendations=decision.recommendations,
        correlations=correlate(records),
        timeline_stats=summarize_timeline(events),
    )
