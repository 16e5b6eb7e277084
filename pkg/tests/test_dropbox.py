"""Dropbox parser tests: desktop stores, iOS stores, Android stores/log."""

import plistlib
import sqlite3
from datetime import datetime

import pytest

from cloudtrace.errors import MissingColumnError, MissingTableError
from cloudtrace.fixtures import recent_list_blob
from cloudtrace.records import SECRET_SESSION_FILE
from cloudtrace.services import dropbox

# the recently_changed3 value as published, flattened onto one line
TABLE6_BLOB = ("(lp1 (V41248546./paper101.doc 100 tp2 "
               "a(V41248546./Digital Forensic of Cloud.pdf Ntp3 "
               "a(V41248546./Lecture1.pdf Ntp4 "
               "a(V41248546./Hello.ppt Ntp5 "
               "a(V41248546./snort.pdf Ntp6 a.")

TABLE6_EXPECTED = [
    ("41248546", "/paper101.doc"),
    ("41248546", "/Digital Forensic of Cloud.pdf"),
    ("41248546", "/Lecture1.pdf"),
    ("41248546", "/Hello.ppt"),
    ("41248546", "/snort.pdf"),
]


def test_extract_recent_list_published_blob():
    assert dropbox.extract_recent_list(TABLE6_BLOB) == TABLE6_EXPECTED


def test_extract_recent_list_serialized_form():
    # the on-disk serialization (newline separated) parses identically
    assert dropbox.extract_recent_list(recent_list_blob(TABLE6_EXPECTED)) == TABLE6_EXPECTED


def test_extract_recent_list_no_tokens():
    assert dropbox.extract_recent_list("xyz") == []
    with pytest.raises(ValueError):
        dropbox.extract_recent_list("")


def test_extract_recent_list_missing_server_id():
    entries = dropbox.extract_recent_list("(lp1\n(V./orphan.doc\nNtp2\na.")
    assert entries == [(None, "/orphan.doc")]


def test_extract_recent_list_order_preserved():
    fixture = [("1", "/a.txt"), ("2", "/b.txt"), ("3", "/c.txt")]
    assert dropbox.extract_recent_list(recent_list_blob(fixture)) == fixture


def _write_config(path, rows):
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE config (key TEXT, value TEXT)")
    conn.executemany("INSERT INTO config VALUES (?, ?)", rows)
    conn.commit()
    conn.close()


def test_parse_config_db_published_values(tmp_path):
    path = tmp_path / "config.db"
    _write_config(path, [
        ("dropbox_path", "%UserProfile%\\AppData\\Roaming\\Dropbox"),
        ("email", "foryou7187@yahoo.co.kr"),
        ("recently_changed3", TABLE6_BLOB),
    ])
    profile, finding = dropbox.parse_config_db(path, "pc/config.db")
    assert profile.email == "foryou7187@yahoo.co.kr"
    assert profile.dropbox_path == "%UserProfile%\\AppData\\Roaming\\Dropbox"
    assert profile.recent_entries == TABLE6_EXPECTED
    assert finding.secret_kind == SECRET_SESSION_FILE
    assert finding.enables_remote_access is True
    assert finding.source_path == "pc/config.db"


def test_parse_config_db_partial(tmp_path):
    path = tmp_path / "config.db"
    _write_config(path, [("email", "a@b.c")])
    profile, finding = dropbox.parse_config_db(path)
    assert profile.email == "a@b.c"
    assert profile.dropbox_path is None
    assert profile.recent_entries == []
    assert finding.secret_kind == SECRET_SESSION_FILE


def test_parse_config_db_caps_recent_entries_at_five(tmp_path):
    entries = [(str(i), f"/f{i}.txt") for i in range(8)]
    path = tmp_path / "config.db"
    _write_config(path, [("recently_changed3", recent_list_blob(entries))])
    profile, _ = dropbox.parse_config_db(path)
    assert profile.recent_entries == entries[:5]


def test_parse_config_db_missing_table(tmp_path):
    path = tmp_path / "config.db"
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE unrelated (a TEXT)")
    conn.commit()
    conn.close()
    with pytest.raises(MissingTableError):
        dropbox.parse_config_db(path)


def _write_filecache(path, rows, columns="server_path TEXT, local_filename TEXT,"
                                         " local_mtime INTEGER, local_ctime INTEGER"):
    conn = sqlite3.connect(path)
    conn.execute(f"CREATE TABLE files ({columns})")
    marks = ",".join("?" for _ in columns.split(","))
    if rows:
        conn.executemany(f"INSERT INTO files VALUES ({marks})", rows)
    conn.commit()
    conn.close()


def test_parse_filecache_published_row(tmp_path):
    path = tmp_path / "filecache.db"
    _write_filecache(path, [("37288970./Hello", "Hello", 1307405626, 1302685077)])
    records = dropbox.parse_filecache_db(path)
    assert len(records) == 1
    record = records[0]
    assert record.server_path == "37288970./Hello"
    assert record.modified.iso() == "2011-06-07T00:13:46Z"
    assert record.created.iso() == "2011-04-13T08:57:57Z"
    assert record.modified.encoding == "unix-seconds"
    assert record.created.encoding == "unix-seconds"


def test_parse_filecache_empty(tmp_path):
    path = tmp_path / "filecache.db"
    _write_filecache(path, [])
    assert dropbox.parse_filecache_db(path) == []


def test_parse_filecache_order_preserved_100_rows(tmp_path):
    path = tmp_path / "filecache.db"
    rows = [(f"id{i}./f{i}", f"f{i}", 1300000000 + i, 1290000000 + i)
            for i in range(100)]
    _write_filecache(path, rows)
    records = dropbox.parse_filecache_db(path)
    assert len(records) == 100
    assert [r.local_filename for r in records] == [f"f{i}" for i in range(100)]


def test_parse_filecache_missing_column_named(tmp_path):
    path = tmp_path / "filecache.db"
    _write_filecache(path, [], columns="server_path TEXT, local_filename TEXT,"
                                       " local_mtime INTEGER")
    with pytest.raises(MissingColumnError) as exc:
        dropbox.parse_filecache_db(path)
    assert "local_ctime" in str(exc.value)


def test_parse_ios_plist_published_values(tmp_path):
    path = tmp_path / "com.getdropbox.Dropbox.plist"
    with open(path, "wb") as fh:
        plistlib.dump({
            "AnalyticsLastUploaded": datetime(2011, 6, 3, 6, 44, 17),
            "Dropbox Username": "foryou7187@yahoo.co.kr",
        }, fh, fmt=plistlib.FMT_BINARY)
    account = dropbox.parse_ios_plist(path)
    assert account.email == "foryou7187@yahoo.co.kr"
    assert account.first_login.iso() == "2011-06-03T06:44:17Z"
    assert account.first_login.encoding == "iso8601"
    assert account.first_login.render_raw() == "2011-06-03T06:44:17Z"


def test_parse_ios_plist_missing_keys(tmp_path):
    path = tmp_path / "p.plist"
    with open(path, "wb") as fh:
        plistlib.dump({"Other": 1}, fh)
    account = dropbox.parse_ios_plist(path)
    assert account.email is None and account.first_login is None


def _write_activity(path, table, time_column, rows):
    conn = sqlite3.connect(path)
    conn.execute(f"CREATE TABLE {table} (Z_PK INTEGER, ZPATH TEXT, {time_column} REAL)")
    conn.executemany(f"INSERT INTO {table} VALUES (?, ?, ?)",
                     [(i + 1, p, t) for i, (p, t) in enumerate(rows)])
    conn.commit()
    conn.close()


def test_parse_ios_activity_published_rows(tmp_path):
    viewed = tmp_path / "Dropbox.sqlite"
    uploads = tmp_path / "Uploads.sqlite"
    _write_activity(viewed, "ZCACHEDFILE", "ZLASTVIEWDDATE",
                    [("/folder/Hello.pdf", 329200951.190889)])
    _write_activity(uploads, "ZUPLOAD", "ZDATEUPLOADED",
                    [("/folder/Photo 11.6.5 PM 9 02 50.png", 329198703.081349)])
    events, diagnostics = dropbox.parse_ios_activity(viewed, uploads)
    assert diagnostics == []
    assert [(e.kind, e.path) for e in events] == [
        ("file-viewed", "/folder/Hello.pdf"),
        ("file-uploaded", "/folder/Photo 11.6.5 PM 9 02 50.png"),
    ]
    assert events[0].timestamp.iso() == "2011-06-08T04:42:31Z"
    assert events[1].timestamp.iso() == "2011-06-08T04:05:03Z"
    assert all(e.timestamp.encoding == "apple-absolute-seconds" for e in events)


def test_parse_ios_activity_empty_stores(tmp_path):
    viewed = tmp_path / "v.sqlite"
    uploads = tmp_path / "u.sqlite"
    _write_activity(viewed, "ZCACHEDFILE", "ZLASTVIEWDDATE", [])
    _write_activity(uploads, "ZUPLOAD", "ZDATEUPLOADED", [])
    events, diagnostics = dropbox.parse_ios_activity(viewed, uploads)
    assert events == [] and diagnostics == []


def test_parse_ios_activity_missing_table_skips_store(tmp_path):
    viewed = tmp_path / "v.sqlite"
    conn = sqlite3.connect(viewed)
    conn.execute("CREATE TABLE misc (a TEXT)")
    conn.commit()
    conn.close()
    uploads = tmp_path / "u.sqlite"
    _write_activity(uploads, "ZUPLOAD", "ZDATEUPLOADED", [("/x.png", 1.0)])
    events, diagnostics = dropbox.parse_ios_activity(viewed, uploads)
    assert len(events) == 1 and events[0].kind == "file-uploaded"
    assert len(diagnostics) == 1


def _write_android_stores(tmp_path, prefs_rows, file_rows):
    prefs = tmp_path / "prefs.db"
    conn = sqlite3.connect(prefs)
    conn.execute("CREATE TABLE prefs (pref_name TEXT, pref_value TEXT)")
    conn.executemany("INSERT INTO prefs VALUES (?, ?)", prefs_rows)
    conn.commit()
    conn.close()
    db = tmp_path / "db.db"
    conn = sqlite3.connect(db)
    conn.execute("CREATE TABLE files (modified TEXT, _display_name TEXT, size TEXT)")
    conn.executemany("INSERT INTO files VALUES (?, ?, ?)", file_rows)
    conn.commit()
    conn.close()
    return prefs, db


def test_parse_android_stores_published_values(tmp_path):
    prefs, db = _write_android_stores(
        tmp_path,
        [("DISPLAY_NAME", "Hyunji Chung"), ("COUNTRY", "KR"),
         ("EMAIL", "foryou7187@yahoo.co.kr")],
        [("Thu, 17 Mar 2011 00:42:24 +0000", "Forensics.pdf", "47.9KB")],
    )
    profile, files = dropbox.parse_android_stores(prefs, db)
    assert profile.display_name == "Hyunji Chung"
    assert profile.country == "KR"
    assert profile.email == "foryou7187@yahoo.co.kr"
    assert len(files) == 1
    record = files[0]
    assert record.modified.iso() == "2011-03-17T00:42:24Z"
    assert record.modified.encoding == "rfc1123-date"
    assert record.size_text == "47.9KB"
    assert record.size_bytes == round(47.9 * 1024)


def test_parse_android_stores_empty(tmp_path):
    prefs, db = _write_android_stores(tmp_path, [], [])
    profile, files = dropbox.parse_android_stores(prefs, db)
    assert profile.email is None and files == []


@pytest.mark.parametrize("text,expected", [
    ("47.9KB", 49050),
    ("1B", 1),
    ("2 MB", 2097152),
    ("1.5GB", 1610612736),
    ("garbage", None),
])
def test_parse_size_text(text, expected):
    assert dropbox.parse_size_text(text) == expected


FIG13_LINES = [
    "1307430069151 com.dropbox.android.DropboxApplication Not authenticated, so authenticating",
    "1307430069376 com.dropbox.android.activity.DropboxBrowser DropboxBrowser starting up",
    "1307516652794 com.dropbox.android.service.DropboxService Dropbox service has been started",
    "1307516652872 com.dropbox.android.service.ServiceBinderDelegate Service is connected",
    "1307516666904 com.dropbox.android.util.FileWatcher Trying to ignore: /mnt/sdcard/dropbox/Photo 3.jpg",
    "1307532391331 com.dropbox.android.activity.lock.LockReceiver LockReceiver received onPause()",
    "1307532400297 com.dropbox.android.taskqueue.MetadataTask Directory changed, going through line-by-line:",
    "content://com.dropbox.android.Dropbox/metadata/",
    "1307535230918 com.dropbox.android.activity.lock.LockReceiver Received action: android.intent.action.SCREEN_OFF",
]


def test_parse_android_log_published_lines():
    events = dropbox.parse_android_log("\n".join(FIG13_LINES))
    assert len(events) == len(FIG13_LINES)  # one event per line, none dropped
    kinds = [e.kind for e in events]
    assert kinds == ["auth-state", "other", "service-start", "other",
                     "file-watch", "screen-lock", "other", "other",
                     "screen-lock"]
    watcher = events[4]
    assert watcher.subject == "/mnt/sdcard/dropbox/Photo 3.jpg"
    assert watcher.timestamp.iso() == "2011-06-08T07:04:26Z"
    assert watcher.timestamp.encoding == "unix-milliseconds"
    assert watcher.timestamp.render_raw() == "1307516666904"
    # the wrapped continuation line is preserved verbatim as 'other'
    continuation = events[7]
    assert continuation.timestamp is None
    assert continuation.message == "content://com.dropbox.android.Dropbox/metadata/"


def test_parse_android_log_first_line_auth_state():
    events = dropbox.parse_android_log(FIG13_LINES[0])
    assert events[0].kind == "auth-state"
    assert events[0].timestamp.iso() == "2011-06-07T07:01:09Z"


def test_parse_android_log_empty():
    assert dropbox.parse_android_log("") == []


def test_all_dropbox_encodings_in_allowed_set(tmp_path):
    allowed = {"unix-seconds", "unix-milliseconds", "apple-absolute-seconds",
               "rfc1123-date", "iso8601"}
    path = tmp_path / "filecache.db"
    _write_filecache(path, [("a./b", "b", 10, 20)])
    for r in dropbox.parse_filecache_db(path):
        assert {r.modified.encoding, r.created.encoding} <= allowed
    for e in dropbox.parse_android_log(FIG13_LINES[0]):
        assert e.timestamp.encoding in allowed
