"""End-to-end scan pipeline: detect, scan, parse, timeline, triage."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .harvest import ExtractedPayload, harvest_device
from .layout import DeviceProfile, detect_case_layout
from .records import ArtifactRecord, CredentialFinding
from .scan import scan
from .timestamps import apply_assumed_offset, parse_utc_offset
from .triage import Correlation, TimelineEvent, TriageReport, build_timeline, triage

TZ_ENV_VAR = "CLOUDTRACE_TZ"


@dataclass
class ScanOutcome:
    case_root: Path
    devices: list[DeviceProfile]
    records: list[ArtifactRecord]
    findings: list[CredentialFinding]
    events: list[TimelineEvent]
    correlations: list[Correlation]
    report: TriageReport
    extracts: list[ExtractedPayload] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    assumed_tz: str | None = None


def _assumed_offset() -> tuple[str | None, object]:
    text = os.environ.get(TZ_ENV_VAR, "").strip()
    if not text:
        return None, None
    return text, parse_utc_offset(text)


def run_scan(case_root: str | Path, os_hint: str | None = None,
             in_jurisdiction: bool | None = None,
             warrant_assumed: bool = False) -> ScanOutcome:
    """Scan one case root (a device tree, or a directory of them)."""
    root = Path(case_root)
    profiles = detect_case_layout(root, os_hint)

    records: list[ArtifactRecord] = []
    findings: list[CredentialFinding] = []
    extracts: list[ExtractedPayload] = []
    diagnostics: list[str] = []
    skipped: list[str] = []

    tz_text, tz_offset = _assumed_offset()

    for profile in profiles:
        device_root = profile.root
        result = scan(device_root, profile)
        skipped.extend(f"{profile.device_id}: {s}" for s in result.skipped)
        harvested = harvest_device(result.candidates, profile, device_root)
        records.extend(harvested.records)
        findings.extend(harvested.findings)
        extracts.extend(harvested.extracts)
        diagnostics.extend(f"{profile.device_id}: {d}"
                           for d in harvested.diagnostics)

    if tz_offset is not None:
        for record in records:
            record.timestamps = [
                (label, apply_assumed_offset(ts, tz_offset))
                for label, ts in record.timestamps
            ]

    events = build_timeline(records)
    report = triage(records, findings, events, in_jurisdiction, warrant_assumed)
    return ScanOutcome(
        case_root=root,
        devices=profiles,
        records=records,
        findings=findings,
        events=events,
        correlations=report.correlations,
        report=report,
        extracts=extracts,
        diagnostics=diagnostics,
        skipped=skipped,
        assumed_tz=tz_text,
    )
