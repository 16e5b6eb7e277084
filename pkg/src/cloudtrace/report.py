"""Report writers: canonical JSON, timeline CSV, standalone HTML.

report.json is the canonical product: key order and event order are
fixed, nothing run-dependent (no wall-clock stamps) goes in, so two
scans of the same tree write byte-identical files. The HTML summary is
a single self-contained file -- no external assets, report directories
travel into offline evidence environments -- and redacts secret values
unless explicitly told otherwise.
"""

from __future__ import annotations

import csv
import html
import json
from pathlib import Path

from .pipeline import ScanOutcome
from .records import ArtifactRecord, CredentialFinding
from .timestamps import NormalizedTimestamp
from .triage import CONTENT_HASH_ALGORITHM

SCHEMA_VERSION = 1
REDACTED = "[redacted]"


def _ts_dict(ts: NormalizedTimestamp) -> dict:
    return {
        "utc": ts.iso(),
        "raw": ts.render_raw(),
        "encoding": ts.encoding,
        "confidence": ts.confidence,
    }


def _record_dict(record: ArtifactRecord) -> dict:
    out = {
        "service": record.service,
        "device": record.device,
        "source_path": record.source_path,
        "kind": record.kind,
        "subject": record.subject,
        "timestamps": [
            {"label": label, **_ts_dict(ts)} for label, ts in record.timestamps
        ],
        "attributes": dict(record.attributes),
    }
    if record.geo is not None:
        out["geo"] = {"latitude": record.geo[0], "longitude": record.geo[1]}
    return out


def _finding_dict(finding: CredentialFinding, reveal: bool = True) -> dict:
    secret = finding.secret_value
    if secret is not None and not reveal:
        secret = REDACTED
    return {
        "service": finding.service,
        "account_id": finding.account_id,
        "secret_kind": finding.secret_kind,
        "secret_value": secret,
        "enables_remote_access": finding.enables_remote_access,
        "source_path": finding.source_path,
    }


def outcome_to_dict(outcome: ScanOutcome) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "case_root": outcome.case_root.name,
        "content_hash_algorithm": CONTENT_HASH_ALGORITHM,
        "assumed_timezone": outcome.assumed_tz,
        "devices": [
            {
                "device": p.device_id,
                "os_family": p.os_family,
                "profile_roots": list(p.profile_roots),
                "evidence": list(p.evidence),
            }
            for p in outcome.devices
        ],
        "credential_findings": [_finding_dict(f) for f in outcome.findings],
        "triage": {
            "branch": outcome.report.branch,
            "warrant_assumed": outcome.report.warrant_assumed,
            "recommendations": list(outcome.report.recommendations),
            "timeline_stats": outcome.report.timeline_stats,
        },
        "correlations": [
            {
                "kind": c.kind,
                "evidence": c.evidence,
                "left": {"device": c.left.device, "source_path": c.left.source_path,
                         "kind": c.left.kind, "subject": c.left.subject},
                "right": {"device": c.right.device, "source_path": c.right.source_path,
                          "kind": c.right.kind, "subject": c.right.subject},
            }
            for c in outcome.correlations
        ],
        "records": [_record_dict(r) for r in outcome.records],
        "timeline": [
            {
                "utc": e.instant.iso(),
                "confidence": e.instant.confidence,
                "device": e.record.device,
                "service": e.record.service,
                "source_path": e.record.source_path,
                "label": e.label,
            }
            for e in outcome.events
        ],
        "diagnostics": list(outcome.diagnostics),
        "skipped_files": list(outcome.skipped),
    }


def write_json_report(outcome: ScanOutcome, path: Path) -> None:
    payload = json.dumps(outcome_to_dict(outcome), indent=2, ensure_ascii=False)
    path.write_text(payload + "\n", encoding="utf-8")


def write_csv_report(outcome: ScanOutcome, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["utc", "confidence", "device", "service", "kind",
                         "subject", "source_path", "label"])
        for event in outcome.events:
            writer.writerow([
                event.instant.iso(), event.instant.confidence,
                event.record.device, event.record.service, event.record.kind,
                event.record.subject or "", event.record.source_path,
                event.label,
            ])


_HTML_STYLE = """
body { font-family: sans-serif; margin: 2em; color: #222; }
h1 { border-bottom: 2px solid #447; }
h2 { margin-top: 1.6em; color: #447; }
table { border-collapse: collapse; margin: 0.6em 0; }
th, td { border: 1px solid #bbb; padding: 0.25em 0.6em; text-align: left; }
th { background: #eef; }
.flag { color: #a50; }
.branch { font-weight: bold; }
"""


def _rows(cells_list) -> str:
    out = []
    for cells in cells_list:
        tds = "".join(f"<td>{html.escape(str(c))}</td>" for c in cells)
        out.append(f"<tr>{tds}</tr>")
    return "\n".join(out)


def write_html_report(outcome: ScanOutcome, path: Path,
                      reveal_secrets: bool = False) -> None:
    data = outcome_to_dict(outcome)
    findings = [_finding_dict(f, reveal=reveal_secrets) for f in outcome.findings]
    sections = []
    sections.append(f"<h1>Cloud storage artifact report: {html.escape(data['case_root'])}</h1>")

    sections.append("<h2>Devices</h2><table><tr><th>Device</th><th>OS family</th>"
                    "<th>Profile roots</th></tr>")
    sections.append(_rows([(d["device"], d["os_family"], ", ".join(d["profile_roots"]))
                           for d in data["devices"]]))
    sections.append("</table>")

    sections.append("<h2>Triage</h2>")
    sections.append(f"<p>Branch: <span class='branch'>{html.escape(data['triage']['branch'])}</span>"
                    f" (warrant assumed: {str(outcome.report.warrant_assumed).lower()})</p>")
    sections.append("<ol>" + "".join(
        f"<li>{html.escape(r)}</li>" for r in data["triage"]["recommendations"])
        + "</ol>")

    sections.append("<h2>Credential findings</h2><table><tr><th>Service</th>"
                    "<th>Account</th><th>Secret kind</th><th>Secret</th>"
                    "<th>Remote access</th><th>Source</th></tr>")
    sections.append(_rows([
        (f["service"], f["account_id"] or "", f["secret_kind"],
         f["secret_value"] or "", str(f["enables_remote_access"]).lower(),
         f["source_path"])
        for f in findings]))
    sections.append("</table>")

    sections.append("<h2>Cross-device correlations</h2><table><tr><th>Kind</th>"
                    "<th>Evidence</th><th>Left</th><th>Right</th></tr>")
    sections.append(_rows([
        (c["kind"], c["evidence"],
         f"{c['left']['device']} {c['left']['source_path']}",
         f"{c['right']['device']} {c['right']['source_path']}")
        for c in data["correlations"]]))
    sections.append("</table>")

    sections.append(f"<h2>Timeline ({len(data['timeline'])} events)</h2>"
                    "<table><tr><th>UTC</th><th>Device</th><th>Label</th></tr>")
    sections.append(_rows([
        (e["utc"] + ("" if e["confidence"] == "exact" else " *"),
         e["device"], e["label"])
        for e in data["timeline"]]))
    sections.append("</table>")
    sections.append("<p class='flag'>* instant carries a confidence flag; "
                    "see report.json for the raw value.</p>")

    if data["diagnostics"] or data["skipped_files"]:
        sections.append("<h2>Diagnostics</h2><ul>")
        for d in data["diagnostics"] + data["skipped_files"]:
            sections.append(f"<li>{html.escape(d)}</li>")
        sections.append("</ul>")

    doc = ("<!DOCTYPE html><html><head><meta charset='utf-8'>"
           f"<title>cloudtrace report</title><style>{_HTML_STYLE}</style></head>"
           "<body>" + "\n".join(sections) + "</body></html>\n")
    path.write_text(doc, encoding="utf-8")


def write_reports(outcome: ScanOutcome, out_dir: Path, formats: list[str],
                  reveal_secrets: bool = False) -> list[Path]:
    """Write the selected report formats plus extracted payloads."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        target = out_dir / "report.json"
        write_json_report(outcome, target)
        written.append(target)
    if "csv" in formats:
        target = out_dir / "report.csv"
        write_csv_report(outcome, target)
        written.append(target)
    if "html" in formats:
        target = out_dir / "report.html"
        write_html_report(outcome, target, reveal_secrets)
        written.append(target)
    for payload in outcome.extracts:
        target = out_dir / payload.name
        target.write_bytes(payload.data)
        written.append(target)
    return written
