"""Container identification, embedded-database reads, tree scanning."""

import sqlite3

import pytest

from cloudtrace.containers import (
    identify_container,
    list_tables,
    read_sqlite_table,
)
from cloudtrace.errors import MissingTableError
from cloudtrace.fixtures import generate_tree, make_lnk_bytes, make_png
from cloudtrace.layout import detect_device_layout
from cloudtrace.scan import scan


def test_identify_magic_prefixes():
    assert identify_container(b"SQLite format 3\x00" + b"\x00" * 80) == "sqlite3"
    assert identify_container(b"bplist00" + b"\x00" * 8) == "binary-plist"
    assert identify_container(b"\x89PNG\r\n\x1a\n12345") == "png"
    assert identify_container(b"Client UrlCache MMF Ver 5.2\x00") == "index-dat"
    assert identify_container(make_lnk_bytes()) == "lnk"


def test_identify_xml_flavors():
    plist = b'<?xml version="1.0"?>\n<!DOCTYPE plist PUBLIC "x"><plist></plist>'
    assert identify_container(plist) == "xml-plist"
    assert identify_container(b'<?xml version="1.0"?><map></map>') == "generic-xml"


def test_identify_html_text_unknown():
    assert identify_container(b"<html><body>hi</body></html>") == "html"
    assert identify_container(b"  <!DOCTYPE html>\n<html>") == "html"
    assert identify_container(b"plain log line\nanother\n") == "text"
    assert identify_container(b"") == "unknown"
    assert identify_container(bytes(range(256)) * 4) == "unknown"


def test_identify_stable():
    data = make_png()
    assert identify_container(data) == identify_container(data) == "png"


@pytest.fixture
def sample_db(tmp_path):
    path = tmp_path / "filecache.db"
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE files (server_path TEXT, local_filename TEXT,"
                 " local_mtime INTEGER, local_ctime INTEGER)")
    conn.execute("INSERT INTO files VALUES ('37288970./Hello','Hello',"
                 "1307405626,1302685077)")
    conn.execute("CREATE TABLE empty_one (a INTEGER)")
    conn.commit()
    conn.close()
    return path


def test_read_sqlite_table_roundtrip(sample_db):
    rows = read_sqlite_table(sample_db, "files")
    assert rows == [{
        "server_path": "37288970./Hello",
        "local_filename": "Hello",
        "local_mtime": 1307405626,
        "local_ctime": 1302685077,
    }]
    assert list(rows[0]) == ["server_path", "local_filename",
                             "local_mtime", "local_ctime"]


def test_read_sqlite_empty_table(sample_db):
    assert read_sqlite_table(sample_db, "empty_one") == []


def test_read_sqlite_missing_table_lists_available(sample_db):
    with pytest.raises(MissingTableError) as exc:
        read_sqlite_table(sample_db, "nope")
    assert "files" in str(exc.value)
    assert exc.value.available == ["empty_one", "files"]


def test_read_sqlite_never_modifies(sample_db):
    before = sample_db.read_bytes()
    read_sqlite_table(sample_db, "files")
    list_tables(sample_db)
    assert sample_db.read_bytes() == before


def test_read_sqlite_value_types(tmp_path):
    path = tmp_path / "t.db"
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE v (i INTEGER, r REAL, t TEXT, b BLOB, n TEXT)")
    conn.execute("INSERT INTO v VALUES (1, 1.5, 'x', X'00ff', NULL)")
    conn.commit()
    conn.close()
    row = read_sqlite_table(path, "v")[0]
    assert row == {"i": 1, "r": 1.5, "t": "x", "b": b"\x00\xff", "n": None}


# --- scanning ------------------------------------------------------------

def test_scan_planted_config(tmp_path):
    generate_tree(tmp_path, "windows-vista7", {"dropbox": {}}, user="alice")
    profile = detect_device_layout(tmp_path)
    result = scan(tmp_path, profile)
    roles = [c.entry.role for c in result.candidates]
    assert "dropbox-config" in roles and "dropbox-filecache" in roles
    config = next(c for c in result.candidates if c.entry.role == "dropbox-config")
    assert config.container == "sqlite3"
    assert config.relative_path == "Users/alice/AppData/Roaming/Dropbox/config.db"


def test_scan_empty_tree(tmp_path):
    (tmp_path / "Users" / "alice" / "AppData").mkdir(parents=True)
    profile = detect_device_layout(tmp_path)
    assert scan(tmp_path, profile).candidates == []


def test_scan_deterministic_order(tmp_path):
    generate_tree(tmp_path, "windows-vista7",
                  {"dropbox": {}, "evernote": {}, "amazon-s3": {},
                   "google-docs": {}, "browser": {}}, user="alice")
    profile = detect_device_layout(tmp_path)
    first = [(c.relative_path, c.entry.role) for c in scan(tmp_path, profile).candidates]
    second = [(c.relative_path, c.entry.role) for c in scan(tmp_path, profile).candidates]
    assert first == second
    assert first == sorted(first)


def test_scan_overlapping_entries_yield_multiple_candidates(tmp_path):
    # a bucket-log text file inside the IE cache matches both the
    # service entry and the generic browser cache-files entry
    generate_tree(tmp_path, "windows-vista7", {"amazon-s3": {}}, user="alice")
    profile = detect_device_layout(tmp_path)
    result = scan(tmp_path, profile)
    log_matches = [c for c in result.candidates
                   if c.relative_path.endswith("access_log[1].txt")]
    assert {c.entry.role for c in log_matches} == {"s3-bucket-log",
                                                   "browser-cache-files"}


def test_scan_windows_matching_is_case_insensitive(tmp_path):
    generate_tree(tmp_path, "windows-vista7", {"dropbox": {}}, user="alice")
    config = tmp_path / "Users" / "alice" / "AppData" / "Roaming" / "Dropbox" / "config.db"
    config.rename(config.with_name("CONFIG.DB"))
    profile = detect_device_layout(tmp_path)
    roles = [c.entry.role for c in scan(tmp_path, profile).candidates]
    assert "dropbox-config" in roles


def test_scan_symlinks_not_followed(tmp_path):
    generate_tree(tmp_path, "windows-vista7", {"dropbox": {}}, user="alice")
    dropbox_dir = tmp_path / "Users" / "alice" / "AppData" / "Roaming" / "Dropbox"
    (dropbox_dir / "linked.db").symlink_to(dropbox_dir / "config.db")
    profile = detect_device_layout(tmp_path)
    paths = [c.relative_path for c in scan(tmp_path, profile).candidates]
    assert not any("linked.db" in p for p in paths)


def test_scan_unreadable_file_is_skipped_diagnostic(tmp_path, monkeypatch):
    generate_tree(tmp_path, "windows-vista7", {"dropbox": {}}, user="alice")
    profile = detect_device_layout(tmp_path)

    real_open = open

    def flaky_open(path, *args, **kwargs):
        if str(path).endswith("filecache.db"):
            raise PermissionError(13, "Permission denied", str(path))
        return real_open(path, *args, **kwargs)

    monkeypatch.setattr("builtins.open", flaky_open)
    result = scan(tmp_path, profile)
    assert any("filecache.db" in s for s in result.skipped)
    # the rest of the scan still completed
    assert any(c.entry.role == "dropbox-config" for c in result.candidates)
