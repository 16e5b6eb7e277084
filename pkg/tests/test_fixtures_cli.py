"""Fixture/scan closure across supported pairs, CLI contract, reports."""

import hashlib
import json

import pytest

from cloudtrace import cli
from cloudtrace.errors import FixtureGapError
from cloudtrace.fixtures import (
    PRESETS,
    SUPPORTED_PAIRS,
    generate_corpus,
    generate_tree,
)
from cloudtrace.harvest import DOCUMENTED_KINDS
from cloudtrace.pipeline import run_scan

ALL_FAMILIES = ("windows-xp", "windows-vista7", "mac",
                "ios-app-sandbox", "android-data")


def _scan_single(tmp_path, service, family):
    tree = tmp_path / "tree"
    planted = generate_tree(tree, family, {service: {}}, user="tester")
    outcome = run_scan(tree, warrant_assumed=True) if service != "google-docs" \
        else run_scan(tree, warrant_assumed=True, in_jurisdiction=True)
    return planted, outcome


def _records_for(outcome, path):
    return [r for r in outcome.records if r.source_path == path]


def _assert_recovered(item, outcome, tree):
    """Value-exact recovery assertions per planted artifact role."""
    role = item["role"]
    path = item["path"]
    values = item["values"]
    records = _records_for(outcome, path)

    if role == "dropbox-config":
        profile = next(r for r in records if r.kind == "account-profile")
        assert profile.attributes["email"] == values["email"]
        assert profile.attributes["dropbox_path"] == values["dropbox_path"]
        recents = [r for r in records if r.kind == "recently-changed"]
        assert [r.subject for r in recents] == [p for _, p in values["recent"]]
        finding = next(f for f in outcome.findings if f.source_path == path)
        assert finding.secret_kind == "portable-session-file"
    elif role == "dropbox-filecache":
        synced = [r for r in records if r.kind == "file-synced"]
        assert len(synced) == len(values["rows"])
        for record, row in zip(synced, values["rows"]):
            assert record.attributes["server_path"] == row[0]
            assert record.subject == row[1]
            stamps = dict(record.timestamps)
            assert stamps["modified"].raw_value == row[2]
            assert stamps["created"].raw_value == row[3]
    elif role == "dropbox-sync-folder":
        assert any(r.kind == "synced-file-present" and r.subject == values["name"]
                   for r in records)
    elif role == "dropbox-ios-plist":
        profile = next(r for r in records if r.kind == "account-profile")
        assert profile.attributes["email"] == values["email"]
        assert dict(profile.timestamps)["first-login"].iso() == values["first_login"]
    elif role == "dropbox-ios-viewed":
        viewed = [r for r in records if r.kind == "file-viewed"]
        assert [(r.subject, dict(r.timestamps)["event"].raw_value)
                for r in viewed] == [tuple(r) for r in values["rows"]]
    elif role == "dropbox-ios-uploads":
        ups = [r for r in records if r.kind == "file-uploaded"]
        assert [(r.subject, dict(r.timestamps)["event"].raw_value)
                for r in ups] == [tuple(r) for r in values["rows"]]
    elif role == "dropbox-android-prefs":
        profile = next(r for r in records if r.kind == "account-profile")
        assert profile.attributes["email"] == values["email"]
        assert profile.attributes["display_name"] == values["display_name"]
        assert profile.attributes["country"] == values["country"]
    elif role == "dropbox-android-db":
        synced = [r for r in records if r.kind == "file-synced"]
        assert [(r.subject, r.attributes["size"]) for r in synced] == \
            [(row[1], row[2]) for row in values["rows"]]
    elif role == "dropbox-android-log":
        assert len(records) == len(values["lines"])
        watch_subjects = [r.subject for r in records if r.kind == "file-watch"]
        for line in values["lines"]:
            if "Trying to ignore:" in line:
                assert line.split("Trying to ignore: ", 1)[1] in watch_subjects
    elif role in ("dropbox-sdcard", "evernote-android-content",
                  "evernote-android-thumbs", "evernote-fullthumb",
                  "evernote-thumb"):
        record = next(r for r in records if r.kind == "file-present")
        digest = hashlib.sha256((tree / path).read_bytes()).hexdigest()
        assert record.attributes["sha256"] == digest
    elif role == "evernote-notestore":
        notes = [r for r in records if r.kind == "note"]
        assert len(notes) == len(values["rows"])
        for record, row in zip(notes, values["rows"]):
            assert record.subject == row[0]
            stamps = dict(record.timestamps)
            assert stamps["created"].raw_value == row[1]
            assert stamps["updated"].raw_value == row[2]
            assert record.attributes["is_deleted"] == ("true" if row[3] else "false")
            assert record.attributes["source_platform"] == row[4]
            if row[5] is not None:
                assert record.geo == (row[5], row[6])
    elif role == "evernote-thumbnails":
        thumbs = [r for r in records if r.kind == "note-thumbnail"]
        assert len(thumbs) == values["count"]
        carved = [e for e in outcome.extracts if e.source_path == path]
        assert len(carved) == values["count"]
        for payload in carved:
            assert payload.data.startswith(b"\x89PNG\r\n\x1a\n")
    elif role == "evernote-applog":
        attempts = [r for r in records if r.kind == "auth-attempt"]
        assert [r.attributes["account"] for r in attempts] == values["auth_accounts"]
        assert any(r.kind == "auth-failure" for r in records)
    elif role == "evernote-enclipper":
        assert any(r.kind == "session-open" for r in records)
    elif role == "evernote-ios-applog":
        syncs = [r for r in records if r.kind == "note-sync"]
        assert values["synced_note"] in [r.attributes.get("note_title") for r in syncs]
        assert any(r.kind == "sync-start" for r in records)
        assert any(r.kind == "sync-end" for r in records)
    elif role == "evernote-ios-plist":
        profile = next(r for r in records if r.kind == "account-profile")
        assert profile.attributes["username"] == values["username"]
    elif role == "evernote-ios-store":
        notes = [r for r in records if r.kind == "note"]
        assert len(notes) == len(values["entity_rows"])
        for record, row in zip(notes, values["entity_rows"]):
            assert record.subject == row[1]
            deleted = row[4] is not None
            assert record.attributes["is_deleted"] == ("true" if deleted else "false")
        locals_ = [r for r in records if r.kind == "note-attachment-row"]
        assert len(locals_) == len(values["local_rows"])
        indexes = [row[0] for row in values["entity_rows"]]
        expected_gaps = sorted(set(range(min(indexes), max(indexes) + 1))
                               - set(indexes))
        inferred = [r for r in records if r.kind == "note-deleted-inferred"]
        assert sorted(int(r.attributes["missing_index"]) for r in inferred) == \
            expected_gaps
    elif role == "evernote-ios-md":
        sync = next(r for r in records if r.kind == "sync-metadata")
        assert dict(sync.timestamps)["last-sync"].iso() == values["last_sync"]
    elif role == "evernote-android-db":
        notes = [r for r in records if r.kind == "note"]
        assert len(notes) == len(values["rows"])
        for record, row in zip(notes, values["rows"]):
            assert record.subject == row[0]
            stamps = dict(record.timestamps)
            assert stamps["created"].raw_value == row[2]
            assert stamps["updated"].raw_value == row[3]
            assert record.attributes["is_deleted"] == ("true" if row[4] else "false")
            assert record.attributes["is_active"] == ("true" if row[5] else "false")
    elif role == "s3-office-lnk":
        hits = [r for r in outcome.records
                if r.kind == "file-downloaded-and-opened"]
        assert sorted(r.subject for r in hits) == sorted(values["downloads"])
    elif role == "s3-bucket-log":
        entries = [r for r in records if r.kind == "bucket-log-entry"]
        assert len(entries) == len(values["lines"])
    elif role == "s3-iaws-plist":
        profiles = [r for r in records if r.kind == "account-profile"]
        assert len(profiles) == len(values["accounts"])
        for record, account in zip(profiles, values["accounts"]):
            assert record.attributes["display_name"] == account[0]
            assert record.attributes["access_key_id"] == account[1]
        findings = [f for f in outcome.findings if f.source_path == path]
        assert len(findings) == len(values["accounts"])
        for finding, account in zip(findings, values["accounts"]):
            assert finding.secret_value == f"{account[1]}:{account[2]}"
    elif role == "s3-iaws-db":
        downloads = [r for r in records if r.kind == "file-downloaded"]
        assert [(r.subject, r.attributes["bucket"]) for r in downloads] == \
            [(row[1], row[2]) for row in values["rows"]]
    elif role == "s3-anywhere-xml":
        configs = [r for r in records if r.kind == "bucket-config"]
        assert sorted(r.subject for r in configs) == \
            sorted(b["bucket"] for b in values["buckets"])
        for bucket in values["buckets"]:
            record = next(r for r in configs if r.subject == bucket["bucket"])
            assert record.attributes["access_key_id"] == bucket["keyid"]
            if "sync.last.date" in bucket:
                assert dict(record.timestamps)["last-sync"].raw_value == \
                    int(bucket["sync.last.date"])
        findings = [f for f in outcome.findings if f.source_path == path]
        assert len(findings) == len(values["buckets"])
    elif role == "gdocs-temp-files":
        cached = [r for r in outcome.records
                  if r.kind == "cache-artifact"
                  and r.source_path.startswith(path)]
        by_name = {r.subject: r for r in cached}
        assert set(by_name) == {"docs_google_com[1].htm", "edit[1].htm",
                                "ccc[1].htm", "viewer[1].png", "Viewer[1].txt",
                                "viewer[1].xml"}
        assert by_name["edit[1].htm"].attributes["extracted_text"] == \
            values["document_text"]
        listed = by_name["docs_google_com[1].htm"].attributes["listed_files"]
        for name in values["listing"]:
            assert name in listed
    elif role == "gdocs-mac-cache":
        cached = [r for r in outcome.records
                  if r.kind == "cache-artifact" and r.source_path.startswith(path)]
        kinds = {r.attributes["temp_kind"] for r in cached}
        assert kinds == {"cached-page", "page-image"}
        page = next(r for r in cached if r.attributes["temp_kind"] == "cached-page")
        assert page.attributes["extracted_text"] == values["document_text"]
    elif role == "gdocs-ios-plist":
        profile = next(r for r in records if r.kind == "account-profile")
        assert profile.attributes["username"] == values["username"]
        if values.get("password"):
            finding = next(f for f in outcome.findings if f.source_path == path)
            assert finding.secret_kind == "password"
            assert finding.secret_value == values["password"]
    elif role == "gdocs-ios-localfile":
        record = next(r for r in records if r.kind == "document-content")
        assert record.subject == values["title"]
        assert record.attributes["text"] == values["text"]
    elif role == "gdocs-doclist-db":
        documents = [r for r in records if r.kind == "document"]
        expected = [(doc[0], account["email"])
                    for account in values["accounts"]
                    for doc in account["documents"]]
        assert sorted((r.subject, r.attributes["account_email"])
                      for r in documents) == sorted(expected)
    elif role == "gdocs-drive-prefs":
        record = next(r for r in records if r.kind == "account-profile")
        assert record.attributes["admin_email"] == values["admin_email"]
    elif role == "gdocs-webview-prefs":
        record = next(r for r in records if r.kind == "account-profile")
        assert record.attributes["latest_email"] == values["latest_email"]
    elif role in ("browser-cache-index", "browser-cookie-index"):
        carved = [r for r in records if r.kind == "cache-url"]
        service_urls = [u for _, u, _ in values["urls"]
                        if any(h in u for h in ("dropbox.com", "docs.google.com",
                                                "evernote.com", "s3.amazonaws.com",
                                                "accounts.google.com"))]
        assert sorted(r.subject for r in carved) == sorted(service_urls)
    elif role == "browser-places":
        visits = [r for r in records if r.kind == "url-visited"]
        service_urls = [v[0] for v in values["visits"]
                        if any(h in v[0] for h in ("dropbox.com", "docs.google.com",
                                                   "evernote.com", "s3.amazonaws.com",
                                                   "accounts.google.com"))]
        assert sorted(r.subject for r in visits) == sorted(service_urls)
        for visit in visits:
            raw = dict(visit.timestamps)["visited"].raw_value
            assert raw in [v[2] for v in values["visits"]]
    elif role == "browser-cookies":
        cookies = [r for r in records if r.kind == "cookie"]
        service_hosts = [c[0] for c in values["cookies"]
                         if "dropbox.com" in c[0] or "google.com" in c[0]
                         or "evernote.com" in c[0] or "amazonaws.com" in c[0]]
        assert sorted(r.subject for r in cookies) == sorted(service_hosts)
    elif role == "browser-session":
        assert any(r.kind == "file-present" for r in records)
    else:
        raise AssertionError(f"no closure assertion for role {role}")


@pytest.mark.parametrize("service,family", [
    (service, family)
    for service in sorted(SUPPORTED_PAIRS)
    for family in SUPPORTED_PAIRS[service]
])
def test_fixture_scan_closure(tmp_path, service, family):
    planted, outcome = _scan_single(tmp_path, service, family)
    tree = tmp_path / "tree"
    assert outcome.devices[0].os_family == family
    for item in planted:
        _assert_recovered(item, outcome, tree)
    # nothing invented: every record kind is documented
    for record in outcome.records:
        assert record.kind in DOCUMENTED_KINDS, record.kind


@pytest.mark.parametrize("service,family", [
    ("amazon-s3", "mac"),
    ("browser", "ios-app-sandbox"),
    ("browser", "android-data"),
])
def test_unsupported_pairs_raise_named_gap(tmp_path, service, family):
    with pytest.raises(FixtureGapError) as exc:
        generate_tree(tmp_path / "t", family, {service: {}})
    assert service in str(exc.value) and family in str(exc.value)


def test_supported_pair_table_covers_all_services():
    assert set(SUPPORTED_PAIRS) == {"dropbox", "evernote", "amazon-s3",
                                    "google-docs", "browser"}
    for family in ALL_FAMILIES:
        assert any(family in families for families in SUPPORTED_PAIRS.values())


def test_zero_services_yields_bare_skeleton(tmp_path):
    planted = generate_tree(tmp_path / "t", "windows-vista7", {}, user="u")
    assert planted == []
    outcome = run_scan(tmp_path / "t")
    assert outcome.records == [] and outcome.events == []


# --- CLI contract -------------------------------------------------------------

def test_cli_scan_empty_tree_exit_zero(tmp_path, capsys):
    generate_tree(tmp_path / "t", "windows-vista7", {}, user="u")
    code = cli.main(["scan", str(tmp_path / "t"), "--out", str(tmp_path / "out")])
    assert code == 0
    assert (tmp_path / "out" / "report.json").exists()


def test_cli_scan_nonexistent_root_exit_one(tmp_path, capsys):
    assert cli.main(["scan", str(tmp_path / "missing")]) == 1


def test_cli_scan_unrecognized_layout_exit_one(tmp_path, capsys):
    (tmp_path / "t").mkdir()
    assert cli.main(["scan", str(tmp_path / "t")]) == 1


def test_cli_scan_skipped_files_exit_two(tmp_path, capsys, monkeypatch):
    generate_tree(tmp_path / "t", "windows-vista7", {"dropbox": {}}, user="u")
    real_open = open

    def flaky_open(path, *args, **kwargs):
        if str(path).endswith("filecache.db"):
            raise PermissionError(13, "Permission denied", str(path))
        return real_open(path, *args, **kwargs)

    monkeypatch.setattr("builtins.open", flaky_open)
    code = cli.main(["scan", str(tmp_path / "t"), "--out", str(tmp_path / "out")])
    assert code == 2


def test_cli_scan_id_only_demands_jurisdiction(tmp_path, capsys):
    generate_tree(tmp_path / "t", "ios-app-sandbox",
                  {"google-docs": {"rememberme": False}})
    code = cli.main(["scan", str(tmp_path / "t"), "--out", str(tmp_path / "out")])
    assert code == 1
    assert "--jurisdiction" in capsys.readouterr().err
    code = cli.main(["scan", str(tmp_path / "t"), "--out", str(tmp_path / "out"),
                     "--jurisdiction", "out"])
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["triage"]["branch"] == "id-only-out-of-jurisdiction"


def test_cli_scan_bad_format_exit_one(tmp_path, capsys):
    generate_tree(tmp_path / "t", "windows-vista7", {}, user="u")
    assert cli.main(["scan", str(tmp_path / "t"), "--format", "pdf"]) == 1


def test_cli_report_determinism(tmp_path, capsys):
    generate_corpus(PRESETS["paper-values"](), tmp_path / "corpus")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert cli.main(["scan", str(tmp_path / "corpus"), "--out", str(out1),
                     "--warrant"]) == 0
    assert cli.main(["scan", str(tmp_path / "corpus"), "--out", str(out2),
                     "--warrant"]) == 0
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_cli_scan_report_formats(tmp_path, capsys):
    generate_tree(tmp_path / "t", "windows-vista7", {"dropbox": {}}, user="u")
    out = tmp_path / "out"
    code = cli.main(["scan", str(tmp_path / "t"), "--out", str(out),
                     "--format", "json,csv,html", "--warrant"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["triage"]["branch"] == "full-credentials"
    csv_lines = (out / "report.csv").read_text().strip().splitlines()
    assert len(csv_lines) == 1 + len(report["timeline"])
    assert (out / "report.html").exists()


def test_html_redacts_secrets_by_default(tmp_path, capsys):
    generate_tree(tmp_path / "t", "ios-app-sandbox", {"google-docs": {}})
    out = tmp_path / "out"
    cli.main(["scan", str(tmp_path / "t"), "--out", str(out),
              "--format", "json,html", "--warrant"])
    html_text = (out / "report.html").read_text()
    json_text = (out / "report.json").read_text()
    assert "googledocspassword" not in html_text
    assert "[redacted]" in html_text
    assert "googledocspassword" in json_text  # evidentiary completeness
    out2 = tmp_path / "out2"
    cli.main(["scan", str(tmp_path / "t"), "--out", str(out2),
              "--format", "html", "--warrant", "--reveal-secrets"])
    assert "googledocspassword" in (out2 / "report.html").read_text()


def test_cli_catalog_counts(capsys):
    assert cli.main(["catalog"]) == 0
    rows = json.loads(capsys.readouterr().out)
    service_rows = [r for r in rows if r["group"] == "service-artifact"]
    assert len(service_rows) == 44
    assert cli.main(["catalog", "--service", "dropbox"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows and all(r["service"] == "dropbox" for r in rows)
    assert cli.main(["catalog", "--os", "ios-app-sandbox"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len([r for r in rows if r["group"] == "service-artifact"]) == 11


def test_cli_fixtures_preset(tmp_path, capsys):
    out = tmp_path / "corpus"
    assert cli.main(["fixtures", "--preset", "case-study", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert [t["name"] for t in manifest["trees"]] == ["pc", "android"]


def test_cli_fixtures_spec_file(tmp_path, capsys):
    spec = {"name": "mini", "trees": [
        {"name": "t1", "os_family": "android-data",
         "services": {"evernote": {}}},
    ]}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    assert cli.main(["fixtures", str(spec_path), "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "t1" / "data" / "data" / "com.evernote"
            / "databases" / "Evernote.db").exists()


def test_cli_fixtures_unsupported_pair_exit_one(tmp_path, capsys):
    spec = {"name": "bad", "trees": [
        {"name": "t1", "os_family": "mac", "services": {"amazon-s3": {}}},
    ]}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    assert cli.main(["fixtures", str(spec_path), "--out", str(tmp_path / "c")]) == 1
    assert "amazon-s3" in capsys.readouterr().err


def test_cli_fixtures_requires_exactly_one_source(tmp_path, capsys):
    assert cli.main(["fixtures", "--out", str(tmp_path / "c")]) == 1


def test_assumed_timezone_applies_to_ambiguous(tmp_path, monkeypatch):
    generate_tree(tmp_path / "t", "ios-app-sandbox", {"amazon-s3": {}})
    monkeypatch.setenv("CLOUDTRACE_TZ", "UTC+9:00")
    shifted = run_scan(tmp_path / "t", warrant_assumed=True)
    monkeypatch.delenv("CLOUDTRACE_TZ")
    plain = run_scan(tmp_path / "t", warrant_assumed=True)

    def download_instant(outcome):
        record = next(r for r in outcome.records if r.kind == "file-downloaded")
        return dict(record.timestamps)["downloaded"]

    before = download_instant(plain)
    after = download_instant(shifted)
    # local wall time minus the assumed +9:00 offset
    assert (before.utc_instant - after.utc_instant).total_seconds() == 9 * 3600
    assert after.confidence == "ambiguous-timezone"
    assert shifted.assumed_tz == "UTC+9:00"
