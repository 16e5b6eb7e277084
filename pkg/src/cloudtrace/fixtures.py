"""Synthetic evidence-tree generator.

Builds device trees whose artifacts exercise every supported
service/OS-family writer, and a manifest recording exactly what was
planted so tests can assert value-exact recovery. Default scenario
values are the well-known published examples for each artifact format;
all of them can be overridden per tree through a fixture spec.

Two presets ship with the generator: "case-study" reproduces the
leaked-document scenario (a Windows 7 PC whose sync client lists a
renamed file, plus an Android phone holding the download trace and the
sd-card copy), and "paper-values" plants the full default corpus across
one tree per OS family.
"""

from __future__ import annotations

import base64
import json
import plistlib
import random
import sqlite3
import string
import struct
import zlib
from datetime import datetime
from pathlib import Path

from .errors import FixtureGapError

SECRET_DOCUMENT_BYTES = b"%PDF-1.4\n% confidential product design\n" * 16

SUPPORTED_PAIRS: dict[str, tuple[str, ...]] = {
    "dropbox": ("windows-xp", "windows-vista7", "mac", "ios-app-sandbox", "android-data"),
    "evernote": ("windows-xp", "windows-vista7", "mac", "ios-app-sandbox", "android-data"),
    "amazon-s3": ("windows-xp", "windows-vista7", "ios-app-sandbox", "android-data"),
    "google-docs": ("windows-xp", "windows-vista7", "mac", "ios-app-sandbox", "android-data"),
    "browser": ("windows-xp", "windows-vista7", "mac"),
}


# ---------------------------------------------------------------- helpers

def _write_sqlite(path: Path, tables: dict[str, tuple[list[str], list[tuple]]]):
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists():
        path.unlink()
    conn = sqlite3.connect(path)
    try:
        for name, (columns, rows) in tables.items():
            cols = ", ".join(columns)
            conn.execute(f'CREATE TABLE "{name}" ({cols})')
            if rows:
                marks = ", ".join("?" for _ in columns)
                conn.executemany(f'INSERT INTO "{name}" VALUES ({marks})', rows)
        conn.commit()
    finally:
        conn.close()


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_bytes(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _png_chunk(ctype: bytes, data: bytes) -> bytes:
    return (struct.pack(">I", len(data)) + ctype + data
            + struct.pack(">I", zlib.crc32(ctype + data)))


def make_png(width: int = 4, height: int = 4,
             rgb: tuple[int, int, int] = (200, 30, 30)) -> bytes:
    """A minimal, structurally valid truecolor PNG."""
    raw = b""
    for _ in range(height):
        raw += b"\x00" + bytes(rgb) * width
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n"
            + _png_chunk(b"IHDR", ihdr)
            + _png_chunk(b"IDAT", zlib.compress(raw))
            + _png_chunk(b"IEND", b""))


def make_thumbnail_container(pngs: list[bytes], truncate_last: int = 0) -> bytes:
    """ENT0 container: 24-byte header, 16 metadata bytes before each PNG."""
    header = b"ENT0" + bytes(range(20))
    body = b""
    for index, png in enumerate(pngs):
        meta = struct.pack("<IIII", len(png), index + 1, 0x0601_7416, 0x0004_CE6D)
        if truncate_last and index == len(pngs) - 1:
            png = png[:-truncate_last]
        body += meta + png
    return header + body


def make_lnk_bytes() -> bytes:
    header = (b"\x4c\x00\x00\x00"
              b"\x01\x14\x02\x00\x00\x00\x00\x00\xc0\x00\x00\x00\x00\x00\x00\x46")
    return header + b"\x00" * 56


def recent_list_blob(entries: list[tuple[str | None, str]]) -> str:
    """Serialize recent entries the way the sync client stores them."""
    lines = ["(lp1"]
    for index, (server_id, path) in enumerate(entries):
        lines.append(f"(V{server_id or ''}.{path}")
        if index == 0:
            lines.append("I100")
            lines.append(f"tp{index + 2}")
        else:
            lines.append(f"Ntp{index + 2}")
        lines.append("a" if index < len(entries) - 1 else "a.")
    # Entries after the first open with 'a(' glued as one token.
    return "\n".join(lines).replace("a\n(", "a(")


def _unix_to_filetime(seconds: int) -> int:
    return seconds * 10_000_000 + 116_444_736_000_000_000


def make_index_dat(records: list[tuple[str, str, int]]) -> bytes:
    """Minimal index.dat: magic header then fixed-layout activity records.

    records: (record type URL/LEAK/REDR, url, unix seconds or 0).
    """
    header = b"Client UrlCache MMF Ver 5.2\x00"
    header += b"\x00" * (0x80 - len(header))
    body = b""
    for rtype, url, unix_seconds in records:
        sig = rtype.encode("ascii").ljust(4)[:4]
        url_bytes = url.encode("ascii") + b"\x00"
        payload_len = 24 + len(url_bytes)
        nblocks = (payload_len + 0x7F) // 0x80
        ft = _unix_to_filetime(unix_seconds) if unix_seconds else 0
        record = (sig + struct.pack("<I", nblocks) + struct.pack("<QQ", ft, ft)
                  + url_bytes)
        record += b"\x00" * (nblocks * 0x80 - len(record))
        body += record
    return header + body


def _gdocs_marked_html(text: str) -> str:
    return ("<html><head><title>docs page</title></head>"
            "<body><span id=\"goog_12345\">x</span>"
            f"<div dir=\"ltr\">{text}</div></body></html>")


# -------------------------------------------------------- path resolution

def _profile_base(tree: Path, os_family: str, user: str) -> Path:
    if os_family == "windows-vista7":
        return tree / "Users" / user
    if os_family == "windows-xp":
        return tree / "Documents and Settings" / user
    if os_family == "mac":
        return tree / "Users" / user
    return tree


def make_skeleton(tree: Path, os_family: str, user: str) -> None:
    base = _profile_base(tree, os_family, user)
    if os_family == "windows-vista7":
        (base / "AppData").mkdir(parents=True, exist_ok=True)
    elif os_family == "windows-xp":
        (base / "Local Settings").mkdir(parents=True, exist_ok=True)
    elif os_family == "mac":
        (base / "Library").mkdir(parents=True, exist_ok=True)
    elif os_family == "ios-app-sandbox":
        (tree / "Library" / "Preferences").mkdir(parents=True, exist_ok=True)
        (tree / "Documents").mkdir(parents=True, exist_ok=True)
    elif os_family == "android-data":
        (tree / "data" / "data").mkdir(parents=True, exist_ok=True)
    else:
        raise FixtureGapError(f"unknown os family: {os_family}")


def _dropbox_dir(base: Path, os_family: str) -> Path:
    if os_family == "windows-vista7":
        return base / "AppData" / "Roaming" / "Dropbox"
    if os_family == "windows-xp":
        return base / "Application Data" / "Dropbox"
    return base / ".dropbox"


def _evernote_dir(base: Path, os_family: str) -> Path:
    if os_family == "windows-vista7":
        return base / "AppData" / "Local" / "Evernote" / "Evernote"
    return base / "Local Settings" / "Application Data" / "Evernote" / "Evernote"


def _tif_dir(base: Path, os_family: str, bucket_dir: str) -> Path:
    if os_family == "windows-vista7":
        return (base / "AppData" / "Local" / "Microsoft" / "Windows"
                / "Temporary Internet Files" / "Content.IE5" / bucket_dir)
    return (base / "Local Settings" / "Temporary Internet Files"
            / "Content.IE5" / bucket_dir)


# ------------------------------------------------------- service planters

def plant_dropbox(tree: Path, os_family: str, user: str, params: dict,
                  rng: random.Random) -> list[dict]:
    base = _profile_base(tree, os_family, user)
    planted: list[dict] = []

    if os_family in ("windows-vista7", "windows-xp", "mac"):
        email = params.get("email", "foryou7187@yahoo.co.kr")
        if os_family == "mac":
            default_path = f"/Users/{user}/Dropbox"
        else:
            default_path = "%UserProfile%\\AppData\\Roaming\\Dropbox"
        dropbox_path = params.get("dropbox_path", default_path)
        recent = [tuple(e) for e in params.get("recent", [
            ("41248546", "/paper101.doc"),
            ("41248546", "/Digital Forensic of Cloud.pdf"),
            ("41248546", "/Lecture1.pdf"),
            ("41248546", "/Hello.ppt"),
            ("41248546", "/snort.pdf"),
        ])]
        config = _dropbox_dir(base, os_family) / "config.db"
        _write_sqlite(config, {"config": (["key TEXT", "value TEXT"], [
            ("dropbox_path", dropbox_path),
            ("email", email),
            ("recently_changed3", recent_list_blob(recent)),
        ])})
        planted.append({
            "service": "dropbox", "role": "dropbox-config",
            "path": config.relative_to(tree).as_posix(),
            "values": {"email": email, "dropbox_path": dropbox_path,
                       "recent": [[sid, p] for sid, p in recent]},
        })
        rows = [tuple(r) for r in params.get("filecache_rows", [
            ("37288970./Hello", "Hello", 1307405626, 1302685077),
        ])]
        filecache = _dropbox_dir(base, os_family) / "filecache.db"
        _write_sqlite(filecache, {"files": (
            ["server_path TEXT", "local_filename TEXT",
             "local_mtime INTEGER", "local_ctime INTEGER"], rows)})
        planted.append({
            "service": "dropbox", "role": "dropbox-filecache",
            "path": filecache.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in rows]},
        })
        for name, content in params.get("sync_folder_files", []):
            target = base / "Dropbox" / name
            _write_bytes(target, content.encode() if isinstance(content, str) else content)
            planted.append({
                "service": "dropbox", "role": "dropbox-sync-folder",
                "path": target.relative_to(tree).as_posix(),
                "values": {"name": name},
            })

    elif os_family == "ios-app-sandbox":
        email = params.get("email", "foryou7187@yahoo.co.kr")
        first_login = params.get("first_login", "2011-06-03T06:44:17Z")
        plist_path = tree / "Library" / "Preferences" / "com.getdropbox.Dropbox.plist"
        plist_path.parent.mkdir(parents=True, exist_ok=True)
        stamp = datetime.strptime(first_login, "%Y-%m-%dT%H:%M:%SZ")
        with open(plist_path, "wb") as fh:
            plistlib.dump({"AnalyticsLastUploaded": stamp,
                           "Dropbox Username": email},
                          fh, fmt=plistlib.FMT_BINARY)
        planted.append({
            "service": "dropbox", "role": "dropbox-ios-plist",
            "path": plist_path.relative_to(tree).as_posix(),
            "values": {"email": email, "first_login": first_login},
        })
        viewed = [tuple(r) for r in params.get("viewed_rows", [
            ("/folder/Hello.pdf", 329200951.190889),
        ])]
        uploads = [tuple(r) for r in params.get("upload_rows", [
            ("/folder/Photo 11.6.5 PM 9 02 50.png", 329198703.081349),
        ])]
        viewed_db = tree / "Documents" / "Dropbox.sqlite"
        _write_sqlite(viewed_db, {"ZCACHEDFILE": (
            ["Z_PK INTEGER PRIMARY KEY", "ZPATH TEXT", "ZLASTVIEWDDATE REAL"],
            [(i + 1, p, t) for i, (p, t) in enumerate(viewed)])})
        uploads_db = tree / "Documents" / "Uploads.sqlite"
        _write_sqlite(uploads_db, {"ZUPLOAD": (
            ["Z_PK INTEGER PRIMARY KEY", "ZPATH TEXT", "ZDATEUPLOADED REAL"],
            [(i + 1, p, t) for i, (p, t) in enumerate(uploads)])})
        planted.append({
            "service": "dropbox", "role": "dropbox-ios-viewed",
            "path": viewed_db.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in viewed]},
        })
        planted.append({
            "service": "dropbox", "role": "dropbox-ios-uploads",
            "path": uploads_db.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in uploads]},
        })

    elif os_family == "android-data":
        email = params.get("email", "foryou7187@yahoo.co.kr")
        display_name = params.get("display_name", "Hyunji Chung")
        country = params.get("country", "KR")
        app = tree / "data" / "data" / "com.dropbox.android"
        prefs = app / "database" / "prefs.db"
        _write_sqlite(prefs, {"prefs": (["pref_name TEXT", "pref_value TEXT"], [
            ("DISPLAY_NAME", display_name),
            ("COUNTRY", country),
            ("EMAIL", email),
        ])})
        planted.append({
            "service": "dropbox", "role": "dropbox-android-prefs",
            "path": prefs.relative_to(tree).as_posix(),
            "values": {"display_name": display_name, "country": country,
                       "email": email},
        })
        files = [tuple(r) for r in params.get("file_rows", [
            ("Thu, 17 Mar 2011 00:42:24 +0000", "Forensics.pdf", "47.9KB"),
        ])]
        db = app / "database" / "db.db"
        _write_sqlite(db, {"files": (
            ["modified TEXT", "_display_name TEXT", "size TEXT"], files)})
        planted.append({
            "service": "dropbox", "role": "dropbox-android-db",
            "path": db.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in files]},
        })
        log_lines = params.get("log_lines", [
            "1307430069151 com.dropbox.android.DropboxApplication Not authenticated, so authenticating",
            "1307430069376 com.dropbox.android.activity.DropboxBrowser DropboxBrowser starting up",
            "1307516652794 com.dropbox.android.service.DropboxService Dropbox service has been started",
            "1307516652872 com.dropbox.android.service.ServiceBinderDelegate Service is connected",
            "1307516666904 com.dropbox.android.util.FileWatcher Trying to ignore: /mnt/sdcard/dropbox/Photo 3.jpg",
            "1307532391331 com.dropbox.android.activity.lock.LockReceiver LockReceiver received onPause()",
            "1307535230918 com.dropbox.android.activity.lock.LockReceiver Received action: android.intent.action.SCREEN_OFF",
        ])
        log = app / "files" / "log.txt"
        _write_text(log, "\n".join(log_lines) + "\n")
        planted.append({
            "service": "dropbox", "role": "dropbox-android-log",
            "path": log.relative_to(tree).as_posix(),
            "values": {"lines": list(log_lines)},
        })
        for name, content in params.get("sdcard_files", [("Photo 3.jpg", b"\xff\xd8jpegdata")]):
            target = tree / "sdcard" / "dropbox" / name
            _write_bytes(target, content.encode() if isinstance(content, str) else content)
            planted.append({
                "service": "dropbox", "role": "dropbox-sdcard",
                "path": target.relative_to(tree).as_posix(),
                "values": {"name": name},
            })
    else:
        raise FixtureGapError(f"dropbox has no artifact writers for {os_family}")
    return planted


_FIG4_APPLOG = """Log opened on 2011/06/01 10:24:21 (UTC+9:00)

10:24:21 [4900] Client info: Evernote Windows/131509; Windows/6.1.7601 Service Pack 1;
10:24:21 [4900] * link: "C:\\Users\\dodochung\\AppData\\Roaming\\Microsoft\\Windows\\SendTo\\Evernote.Ink"
10:24:53 [3036] 0% Authenticating user "hjhjhjhj"
10:24:55 [3036] 0% Session terminated abnormally, elapsed time: 2s
10:24:57 [3036] 0% Authenticating user "dodochung"
10:25:02 [4900] Opened database: C:\\Users\\dodochung\\AppData\\Local\\Evernote\\Evernote\\Databases\\dodochung.exb (1.6MB Fixed)
10:27:01 [5764] AutoUpdate: selected update with revision 144118
"""

_FIG7_APPLOG = """2011-06-03 16:07:04.658 [lvl=2] -[ENAppController _setupSharedLogger]
2011-06-03 16:07:05.343 [lvl=2] -[ENSyncEngine syncIgnoringNetworkPreference:forcingAuthRefresh:]reachability currentReachabilityStatus=WiFi
2011-06-03 16:07:05.349 [lvl=2] -[ENSyncEngine _syncStarted] Sync started.
2011-06-03 16:07:05.432 [lvl=2] -[ENSyncEngine _backgroundSync] Contacting Evernote server...
2011-06-03 16:07:08.467 [lvl=2] -[ENSyncEngine(Notebooks) syncNotebooks:] Syncing 2 notebooks...
2011-06-03 16:07:08.661 [lvl=2] -[ENSyncEngine(Notes) updateServerNoteFromLocalNote:] Syncing note 'hallo' [9b79d7a2-3134-453e-a575-ab88a03f8efa]
2011-06-03 16:07:09.462 [lvl=2] -[ENSyncEngine _syncFinished] Sync complete.
"""


def plant_evernote(tree: Path, os_family: str, user: str, params: dict,
                   rng: random.Random) -> list[dict]:
    base = _profile_base(tree, os_family, user)
    planted: list[dict] = []

    note_columns = ["title TEXT", "date_created REAL", "date_updated REAL",
                    "is_deleted INTEGER", "source TEXT", "latitude REAL",
                    "longitude REAL"]
    default_notes = [
        ("Evernote test", 733700.339618056, 733700.349456019, 1,
         "Mobile.android", 37.321429, -122.015791),
    ]

    if os_family in ("windows-vista7", "windows-xp"):
        account = params.get("account", "dodochung")
        notes = [tuple(r) for r in params.get("notes", default_notes)]
        store = _evernote_dir(base, os_family) / "Databases" / f"{account}.exb"
        _write_sqlite(store, {"notes": (note_columns, notes)})
        planted.append({
            "service": "evernote", "role": "evernote-notestore",
            "path": store.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in notes]},
        })
        png_count = int(params.get("thumbnail_count", 2))
        pngs = [make_png(4 + i, 4, (40 * i % 256, 100, 150)) for i in range(png_count)]
        container = make_thumbnail_container(pngs)
        thumbs = store.with_name(store.name + ".thumbnails")
        _write_bytes(thumbs, container)
        planted.append({
            "service": "evernote", "role": "evernote-thumbnails",
            "path": thumbs.relative_to(tree).as_posix(),
            "values": {"count": png_count},
        })
        applog = _evernote_dir(base, os_family) / "Logs" / "AppLog_2011.06.01.txt"
        _write_text(applog, params.get("applog_text", _FIG4_APPLOG))
        planted.append({
            "service": "evernote", "role": "evernote-applog",
            "path": applog.relative_to(tree).as_posix(),
            "values": {"auth_accounts": ["hjhjhjhj", "dodochung"]},
        })
        enclipper = _evernote_dir(base, os_family) / "Logs" / "enclipper_2011.06.01.txt"
        _write_text(enclipper, "Log opened on 2011/06/01 10:24:23 (UTC+9:00)\n")
        planted.append({
            "service": "evernote", "role": "evernote-enclipper",
            "path": enclipper.relative_to(tree).as_posix(),
            "values": {},
        })

    elif os_family == "mac":
        notes = [tuple(r) for r in params.get("notes", default_notes)]
        store = base / "Library" / "Application Support" / "Evernote" / "data" / "Evernote.sql"
        _write_sqlite(store, {"notes": (note_columns, notes)})
        planted.append({
            "service": "evernote", "role": "evernote-notestore",
            "path": store.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in notes]},
        })
        contents = store.parent / "Contents"
        for name in ("fullscreenThumbnail.png", "thumbnail.png"):
            _write_bytes(contents / name, make_png(6, 6, (10, 200, 10)))
            planted.append({
                "service": "evernote",
                "role": "evernote-fullthumb" if "full" in name else "evernote-thumb",
                "path": (contents / name).relative_to(tree).as_posix(),
                "values": {},
            })
        log = base / "Library" / "Application Support" / "Evernote" / "logs" / "Evernote.log"
        _write_text(log, params.get("applog_text", _FIG4_APPLOG))
        planted.append({
            "service": "evernote", "role": "evernote-applog",
            "path": log.relative_to(tree).as_posix(),
            "values": {"auth_accounts": ["hjhjhjhj", "dodochung"]},
        })

    elif os_family == "ios-app-sandbox":
        account = params.get("account", "dodochung")
        user_dir = tree / "Documents" / "www.evernote.com" / "User"
        applog = user_dir / "applog.txt"
        _write_text(applog, params.get("applog_text", _FIG7_APPLOG))
        planted.append({
            "service": "evernote", "role": "evernote-ios-applog",
            "path": applog.relative_to(tree).as_posix(),
            "values": {"synced_note": "hallo"},
        })
        plist_path = tree / "Library" / "Preferences" / "com.evernote.iPhone.Evernote.plist"
        plist_path.parent.mkdir(parents=True, exist_ok=True)
        with open(plist_path, "wb") as fh:
            plistlib.dump({"username": account}, fh, fmt=plistlib.FMT_BINARY)
        planted.append({
            "service": "evernote", "role": "evernote-ios-plist",
            "path": plist_path.relative_to(tree).as_posix(),
            "values": {"username": account},
        })
        # note index 2 is deliberately absent: a sequence gap marks a
        # deleted note and the scan should infer it
        entity_rows = [tuple(r) for r in params.get("entity_rows", [
            (1, "Note1", 329119401, 329119401, 329205827.777706,
             37.321429, -122.015791, "mobile.android", "Photo test.jpg", None),
            (3, "Note2", 329206645, 329206158, 329217190,
             37.590239, 127.026470, "mobile.iphone", "Hello.pdf", None),
        ])]
        local_rows = [tuple(r) for r in params.get("local_rows", [
            (1, "Hello.pdf", 329205822.2601, "Tue, 07 Jun 2011 06:03:21 GMT"),
        ])]
        store = user_dir / "Evernote2.sqlite"
        _write_sqlite(store, {
            "ZENSERVICEENTITY": (
                ["Z_PK INTEGER", "ZTITLE TEXT", "ZDATEUPDATED REAL",
                 "ZDATECREATED REAL", "ZDATEDELETED REAL", "ZALTITUDE REAL",
                 "ZLONGITUDE REAL", "ZSOURCE TEXT", "ZFILENAME TEXT",
                 "ZSEARCHCONTENT TEXT"], entity_rows),
            "ZENLOCALFILE": (
                ["Z_PK INTEGER", "ZFILENAME TEXT", "ZLASTACCESSED REAL",
                 "ZLASTMODIFIED TEXT"], local_rows),
        })
        planted.append({
            "service": "evernote", "role": "evernote-ios-store",
            "path": store.relative_to(tree).as_posix(),
            "values": {"entity_rows": [list(r) for r in entity_rows],
                       "local_rows": [list(r) for r in local_rows]},
        })
        last_sync = params.get("last_sync", "2011-06-03T07:11:14Z")
        md = user_dir / "Evernote2.sqlite.md"
        md.parent.mkdir(parents=True, exist_ok=True)
        with open(md, "wb") as fh:
            plistlib.dump({"lastSyncTime": datetime.strptime(
                last_sync, "%Y-%m-%dT%H:%M:%SZ")}, fh, fmt=plistlib.FMT_XML)
        planted.append({
            "service": "evernote", "role": "evernote-ios-md",
            "path": md.relative_to(tree).as_posix(),
            "values": {"last_sync": last_sync},
        })

    elif os_family == "android-data":
        rows = [tuple(r) for r in params.get("notes", [
            ("Note Test", "South Korea", 1307084962000, 1307426703000, 0, 1,
             37.5902, 127.026, "mobile.iphone"),
        ])]
        db = tree / "data" / "data" / "com.evernote" / "databases" / "Evernote.db"
        _write_sqlite(db, {"notes": (
            ["title TEXT", "country TEXT", "created INTEGER", "updated INTEGER",
             "deleted INTEGER", "is_active INTEGER", "latitude REAL",
             "longitude REAL", "source TEXT"], rows)})
        planted.append({
            "service": "evernote", "role": "evernote-android-db",
            "path": db.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in rows]},
        })
        enml = tree / "sdcard" / "Evernote" / "notes" / "content.enml"
        _write_text(enml, "<?xml version=\"1.0\"?><en-note>note body</en-note>\n")
        planted.append({
            "service": "evernote", "role": "evernote-android-content",
            "path": enml.relative_to(tree).as_posix(),
            "values": {},
        })
        thumb = tree / "sdcard" / "Evernote" / "notethumbs" / "note1.png"
        _write_bytes(thumb, make_png(5, 5, (250, 250, 20)))
        planted.append({
            "service": "evernote", "role": "evernote-android-thumbs",
            "path": thumb.relative_to(tree).as_posix(),
            "values": {},
        })
    else:
        raise FixtureGapError(f"evernote has no artifact writers for {os_family}")
    return planted


_FIG2_LOG_LINE = (
    "79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be "
    "examplebucket [06/Jan/2012:08:42:20 +0000] 10.186.158.41 "
    "79a59df900b949e55d96a1e698fbacedfd6e09d98eacf8f8d5218e7cd47ef2be "
    "F9ECC0485160EBC5 REST.DELETE.OBJECT paper101.doc "
    "\"DELETE /examplebucket/paper101.doc HTTP/1.1\" 204 - - 42277 21 - "
    "\"-\" \"S3Console/0.4\""
)


def plant_s3(tree: Path, os_family: str, user: str, params: dict,
             rng: random.Random) -> list[dict]:
    base = _profile_base(tree, os_family, user)
    planted: list[dict] = []

    if os_family in ("windows-vista7", "windows-xp"):
        downloads = params.get("lnk_downloads", ["report.docx", "budget.xls"])
        if os_family == "windows-vista7":
            recent = base / "AppData" / "Roaming" / "Microsoft" / "Office" / "Recent"
        else:
            recent = base / "Application Data" / "Microsoft" / "Office" / "Recent"
        for name in downloads:
            _write_bytes(recent / f"{name} on s3.amazonaws.com.lnk", make_lnk_bytes())
        _write_bytes(recent / "local-only.docx.lnk", make_lnk_bytes())
        planted.append({
            "service": "amazon-s3", "role": "s3-office-lnk",
            "path": recent.relative_to(tree).as_posix(),
            "values": {"downloads": list(downloads)},
        })
        lines = params.get("bucket_log_lines", [_FIG2_LOG_LINE])
        log = _tif_dir(base, os_family, "A1B2C3D4") / "access_log[1].txt"
        _write_text(log, "\n".join(lines) + "\n")
        planted.append({
            "service": "amazon-s3", "role": "s3-bucket-log",
            "path": log.relative_to(tree).as_posix(),
            "values": {"lines": list(lines)},
        })

    elif os_family == "ios-app-sandbox":
        accounts = [tuple(a) for a in params.get("accounts", [
            ("HyunjiChung", "AKIAJEXAMPLEKEYID999", "wJalrEXAMPLESECRETKEY1234567", "NO"),
        ])]
        plist_path = tree / "Library" / "Preferences" / "com.moninnovations.iAwsManager.plist"
        plist_path.parent.mkdir(parents=True, exist_ok=True)
        strings = ["<$$$>".join(a) for a in accounts]
        with open(plist_path, "wb") as fh:
            plistlib.dump({"ACCOUNTS": strings}, fh, fmt=plistlib.FMT_XML)
        planted.append({
            "service": "amazon-s3", "role": "s3-iaws-plist",
            "path": plist_path.relative_to(tree).as_posix(),
            "values": {"accounts": [list(a) for a in accounts]},
        })
        rows = [tuple(r) for r in params.get("downloads", [
            ("Library/downloads/d41d8cd98f00b204e9800998ecf8427e.pdf",
             "Forensic.pdf", "Hyunjistorage", 8704, "01/05/12 02:21 PM"),
        ])]
        db = tree / "Document" / "iAwsManager" / "iAwsManager.3.0.db"
        _write_sqlite(db, {"DOWNLOADS": (
            ["FILENAME TEXT", "S3KEY TEXT", "S3BUCKET TEXT",
             "FILE_SIZE INTEGER", "DOWNLOAD_DATE TEXT"], rows)})
        planted.append({
            "service": "amazon-s3", "role": "s3-iaws-db",
            "path": db.relative_to(tree).as_posix(),
            "values": {"rows": [list(r) for r in rows]},
        })

    elif os_family == "android-data":
        buckets = params.get("buckets", [{
            "bucket": "evidence",
            "remotedir": "Folder on Amazon S3",
            "keyid": "AKIAJANDROIDKEYID000",
            "key": "androidSecretAccessKey42",
            "sync.last.date": "1307516666",
            "sync.localdir": "/mnt/sdcard/s3",
        }])
        lines = ["<?xml version='1.0' encoding='utf-8' standalone='yes' ?>", "<map>"]
        for bucket in buckets:
            name = bucket["bucket"]
            for field in ("remotedir", "keyid", "key", "sync.last.date", "sync.localdir"):
                if field in bucket:
                    encoded = base64.b64encode(bucket[field].encode()).decode()
                    lines.append(f'    <string name="s3.{field}[{name}]">{encoded}</string>')
        lines.append("</map>")
        xml = tree / "data" / "data" / "s3anywherepro" / "shared_prefs" / "s3anywhere.xml"
        _write_text(xml, "\n".join(lines) + "\n")
        planted.append({
            "service": "amazon-s3", "role": "s3-anywhere-xml",
            "path": xml.relative_to(tree).as_posix(),
            "values": {"buckets": buckets},
        })
    else:
        raise FixtureGapError(f"amazon-s3 has no artifact writers for {os_family}")
    return planted


def plant_gdocs(tree: Path, os_family: str, user: str, params: dict,
                rng: random.Random) -> list[dict]:
    base = _profile_base(tree, os_family, user)
    planted: list[dict] = []

    if os_family in ("windows-vista7", "windows-xp"):
        cache = _tif_dir(base, os_family, "E5F6G7H8")
        doc_text = params.get("document_text", "quarterly plan")
        listing = params.get("listing", ["Hello", "Test"])
        anchors = "".join(f'<a href="#">{name}</a>' for name in listing)
        _write_text(cache / "docs_google_com[1].htm",
                    _gdocs_marked_html(anchors))
        _write_text(cache / "edit[1].htm", _gdocs_marked_html(doc_text))
        _write_text(cache / "ccc[1].htm",
                    _gdocs_marked_html(params.get("sheet_text", "cells 1 2 3")))
        _write_bytes(cache / "viewer[1].png", make_png(8, 8, (0, 0, 240)))
        _write_text(cache / "Viewer[1].txt", "pdf metadata and contents\n")
        _write_text(cache / "viewer[1].xml",
                    "<?xml version=\"1.0\"?><pdftext>page text</pdftext>\n")
        planted.append({
            "service": "google-docs", "role": "gdocs-temp-files",
            "path": cache.relative_to(tree).as_posix(),
            "values": {"document_text": doc_text, "listing": listing},
        })

    elif os_family == "mac":
        cache = (base / "Library" / "Caches" / "Firefox" / "Profiles"
                 / "ab12cd34.default" / "Cache")
        doc_text = params.get("document_text", "quarterly plan")
        _write_text(cache / "0F3A2E10d01", _gdocs_marked_html(doc_text))
        _write_bytes(cache / "0F3A2E11d01", make_png(8, 8, (240, 240, 0)))
        planted.append({
            "service": "google-docs", "role": "gdocs-mac-cache",
            "path": cache.relative_to(tree).as_posix(),
            "values": {"document_text": doc_text},
        })

    elif os_family == "ios-app-sandbox":
        username = params.get("username", "localchung@gmail.com")
        password = params.get("password", "googledocspassword")
        rememberme = bool(params.get("rememberme", True))
        plist_path = tree / "Library" / "Preferences" / "com.jade.iGoogDocs.plist"
        plist_path.parent.mkdir(parents=True, exist_ok=True)
        payload: dict = {"rememberme": rememberme, "username": username}
        if rememberme:
            payload["password"] = password
        with open(plist_path, "wb") as fh:
            plistlib.dump(payload, fh, fmt=plistlib.FMT_XML)
        planted.append({
            "service": "google-docs", "role": "gdocs-ios-plist",
            "path": plist_path.relative_to(tree).as_posix(),
            "values": {"username": username, "rememberme": rememberme,
                       "password": password if rememberme else None},
        })
        title = params.get("local_title", "note")
        text = params.get("local_text", "ios test")
        local = tree / "Documents" / f"{title}.txt"
        _write_text(local, "<html><body><font id='iGoogDocs-Formatted' "
                           f"face='HelveticaNeueUI' size='17'>{text}</font>"
                           "</br></body></html>")
        planted.append({
            "service": "google-docs", "role": "gdocs-ios-localfile",
            "path": local.relative_to(tree).as_posix(),
            "values": {"title": title, "text": text},
        })

    elif os_family == "android-data":
        accounts = params.get("doclist", [
            {"email": "localchung@gmail.com", "last_sync": 1310618312848,
             "documents": [("Hello", "presentation", 1310618984190, 1310618984190)]},
            {"email": "abc123@gmail.com", "last_sync": 1310619132115,
             "documents": [("Test", "spreadsheet", 1310603654097, 1310613867434)]},
        ])
        account_rows = []
        document_rows = []
        for index, account in enumerate(accounts, start=1):
            account_rows.append((index, account["email"], account["last_sync"]))
            for title, kind, created, modified in account["documents"]:
                document_rows.append((len(document_rows) + 1, index, title,
                                      kind, created, modified))
        app = tree / "data" / "data" / "com.google.android.apps.docs"
        db = app / "databases" / "DocList.db"
        _write_sqlite(db, {
            "accounts": (["_id INTEGER PRIMARY KEY", "accountHolderName TEXT",
                          "lastSyncTime INTEGER"], account_rows),
            "documents": (["_id INTEGER PRIMARY KEY", "accountId INTEGER",
                           "title TEXT", "kind TEXT", "creationTime INTEGER",
                           "lastModifiedTime INTEGER"], document_rows),
        })
        planted.append({
            "service": "google-docs", "role": "gdocs-doclist-db",
            "path": db.relative_to(tree).as_posix(),
            "values": {"accounts": accounts},
        })
        admin = params.get("admin_email", "localchung@gmail.com")
        latest = params.get("latest_email", "abc123@gmail.com")
        drive = app / "shared_prefs" / "GoogleDriveSharedPreferences.xml"
        _write_text(drive, "<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n"
                           f"<map>\n    <string name=\"accountName\">{admin}</string>\n</map>\n")
        webview = app / "shared_prefs" / "webview.xml"
        _write_text(webview, "<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n"
                             f"<map>\n    <string name=\"last_account\">{latest}</string>\n</map>\n")
        planted.append({
            "service": "google-docs", "role": "gdocs-drive-prefs",
            "path": drive.relative_to(tree).as_posix(),
            "values": {"admin_email": admin},
        })
        planted.append({
            "service": "google-docs", "role": "gdocs-webview-prefs",
            "path": webview.relative_to(tree).as_posix(),
            "values": {"latest_email": latest},
        })
    else:
        raise FixtureGapError(f"google-docs has no artifact writers for {os_family}")
    return planted


def plant_browser(tree: Path, os_family: str, user: str, params: dict,
                  rng: random.Random) -> list[dict]:
    base = _profile_base(tree, os_family, user)
    planted: list[dict] = []

    if os_family in ("windows-vista7", "windows-xp"):
        urls = params.get("urls", [
            ("URL", "https://www.dropbox.com/login", 1307430000),
            ("URL", "https://docs.google.com/document/d/1", 1310618000),
            ("URL", "https://www.unrelated.example/page", 1307430100),
        ])
        if os_family == "windows-vista7":
            cache_index = (base / "AppData" / "Local" / "Microsoft" / "Windows"
                           / "Temporary Internet Files" / "Content.IE5" / "index.dat")
            cookie_index = (base / "AppData" / "Roaming" / "Microsoft" / "Windows"
                            / "Cookies" / "index.dat")
        else:
            cache_index = (base / "Local Settings" / "Temporary Internet Files"
                           / "Content.IE5" / "index.dat")
            cookie_index = base / "Cookies" / "index.dat"
        _write_bytes(cache_index, make_index_dat([tuple(u) for u in urls]))
        planted.append({
            "service": "browser", "role": "browser-cache-index",
            "path": cache_index.relative_to(tree).as_posix(),
            "values": {"urls": [list(u) for u in urls]},
        })
        cookie_urls = params.get("cookie_urls",
                                 [("URL", "https://www.evernote.com/", 1307084000)])
        _write_bytes(cookie_index, make_index_dat([tuple(u) for u in cookie_urls]))
        planted.append({
            "service": "browser", "role": "browser-cookie-index",
            "path": cookie_index.relative_to(tree).as_posix(),
            "values": {"urls": [list(u) for u in cookie_urls]},
        })

    elif os_family == "mac":
        profile_dir = (base / "Library" / "Application Support" / "Firefox"
                       / "Profiles" / "ab12cd34.default")
        visits = params.get("visits", [
            ("https://docs.google.com/", "Google Docs", 1310618312000000),
            ("https://www.dropbox.com/home", "Dropbox", 1307430069000000),
            ("https://irrelevant.example/", "Nothing", 1307430070000000),
        ])
        place_rows = [(i + 1, url, title) for i, (url, title, _) in enumerate(visits)]
        visit_rows = [(i + 1, i + 1, stamp) for i, (_, _, stamp) in enumerate(visits)]
        places = profile_dir / "places.sqlite"
        _write_sqlite(places, {
            "moz_places": (["id INTEGER PRIMARY KEY", "url TEXT", "title TEXT"],
                           place_rows),
            "moz_historyvisits": (["id INTEGER PRIMARY KEY", "place_id INTEGER",
                                   "visit_date INTEGER"], visit_rows),
        })
        planted.append({
            "service": "browser", "role": "browser-places",
            "path": places.relative_to(tree).as_posix(),
            "values": {"visits": [list(v) for v in visits]},
        })
        cookie_rows = params.get("cookies", [
            (".dropbox.com", "lid", "abc", 1307430069000000, 1307430069000000),
            (".tracking.example", "t", "x", 1307430069000000, 1307430069000000),
        ])
        cookies = profile_dir / "cookies.sqlite"
        _write_sqlite(cookies, {
            "moz_cookies": (["id INTEGER PRIMARY KEY", "host TEXT", "name TEXT",
                             "value TEXT", "creationTime INTEGER",
                             "lastAccessed INTEGER"],
                            [(i + 1, *row) for i, row in enumerate(cookie_rows)]),
        })
        planted.append({
            "service": "browser", "role": "browser-cookies",
            "path": cookies.relative_to(tree).as_posix(),
            "values": {"cookies": [list(c) for c in cookie_rows]},
        })
        _write_text(profile_dir / "sessionstore.js", "{\"windows\":[]}\n")
        planted.append({
            "service": "browser", "role": "browser-session",
            "path": (profile_dir / "sessionstore.js").relative_to(tree).as_posix(),
            "values": {},
        })
    else:
        raise FixtureGapError(f"browser has no artifact writers for {os_family}")
    return planted


_PLANTERS = {
    "dropbox": plant_dropbox,
    "evernote": plant_evernote,
    "amazon-s3": plant_s3,
    "google-docs": plant_gdocs,
    "browser": plant_browser,
}


# ---------------------------------------------------------- spec handling

def generate_tree(tree_root: str | Path, os_family: str,
                  services: dict[str, dict], user: str = "user1",
                  seed: int = 7) -> list[dict]:
    """Write one device tree; returns the planted-artifact manifest rows."""
    tree = Path(tree_root)
    tree.mkdir(parents=True, exist_ok=True)
    make_skeleton(tree, os_family, user)
    rng = random.Random(seed)
    planted: list[dict] = []
    for service in sorted(services):
        planter = _PLANTERS.get(service)
        if planter is None:
            raise FixtureGapError(f"unknown service: {service}")
        if os_family not in SUPPORTED_PAIRS.get(service, ()):
            raise FixtureGapError(
                f"{service} has no artifact writers for {os_family}")
        planted.extend(planter(tree, os_family, user, services[service] or {}, rng))
    return planted


def generate_corpus(spec: dict, out_dir: str | Path) -> dict:
    """Generate every tree in a fixture spec; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "schema_version": 1,
        "name": spec.get("name", "fixture"),
        "trees": [],
    }
    for tree_spec in spec["trees"]:
        name = tree_spec["name"]
        os_family = tree_spec["os_family"]
        services = tree_spec.get("services", {})
        if isinstance(services, list):
            services = {s: {} for s in services}
        planted = generate_tree(out / name, os_family, services,
                                user=tree_spec.get("user", "user1"),
                                seed=int(spec.get("seed", 7)))
        manifest["trees"].append({
            "name": name,
            "os_family": os_family,
            "user": tree_spec.get("user", "user1"),
            "planted": planted,
        })
    if "expect" in spec:
        manifest["expect"] = spec["expect"]
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n",
                             encoding="utf-8")
    return manifest


def _random_pdf_names(rng: random.Random, count: int) -> list[str]:
    names = []
    for _ in range(count):
        stem = "".join(rng.choice(string.ascii_lowercase + string.digits)
                       for _ in range(6))
        names.append(f"/{stem}.pdf")
    return names


def case_study_spec(seed: int = 11) -> dict:
    """The leaked-document scenario: one PC, one phone, one renamed file."""
    rng = random.Random(seed)
    recents = [["41248546", name] for name in _random_pdf_names(rng, 4)]
    recents.insert(1, ["41248546", "/abc.pdf"])
    secret = SECRET_DOCUMENT_BYTES.decode("latin-1")
    return {
        "name": "case-study",
        "seed": seed,
        "trees": [
            {
                "name": "pc",
                "os_family": "windows-vista7",
                "user": "mrk",
                "services": {
                    "dropbox": {
                        "email": "mr.k@example.com",
                        "dropbox_path": "%UserProfile%\\Dropbox",
                        "recent": recents,
                        "filecache_rows": [
                            ["41248546./abc.pdf", "abc.pdf", 1307516666, 1307430069],
                        ],
                        "sync_folder_files": [["abc.pdf", secret]],
                    },
                },
            },
            {
                "name": "android",
                "os_family": "android-data",
                "user": "mrk",
                "services": {
                    "dropbox": {
                        "email": "mr.k@example.com",
                        "display_name": "Mr K",
                        "country": "KR",
                        "file_rows": [
                            ["Thu, 09 Jun 2011 02:31:06 +0000", "abc.pdf", "4.7KB"],
                        ],
                        "log_lines": [
                            "1307430069151 com.dropbox.android.DropboxApplication Not authenticated, so authenticating",
                            "1307516652794 com.dropbox.android.service.DropboxService Dropbox service has been started",
                            "1307516666904 com.dropbox.android.util.FileWatcher Trying to ignore: /mnt/sdcard/dropbox/abc.pdf",
                        ],
                        "sdcard_files": [["abc.pdf", secret]],
                    },
                },
            },
        ],
        "expect": {
            "secret_file": "abc.pdf",
            "correlation_filename": "abc.pdf",
        },
    }


def paper_values_spec() -> dict:
    """Default corpus: one tree per OS family, every supported service."""
    return {
        "name": "paper-values",
        "seed": 7,
        "trees": [
            {"name": "pc", "os_family": "windows-vista7", "user": "dodochung",
             "services": {"dropbox": {}, "evernote": {}, "amazon-s3": {},
                          "google-docs": {}, "browser": {}}},
            {"name": "mac", "os_family": "mac", "user": "dodochung",
             "services": {"dropbox": {}, "evernote": {}, "google-docs": {},
                          "browser": {}}},
            {"name": "iphone", "os_family": "ios-app-sandbox",
             "services": {"dropbox": {}, "evernote": {}, "amazon-s3": {},
                          "google-docs": {}}},
            {"name": "android", "os_family": "android-data",
             "services": {"dropbox": {}, "evernote": {}, "amazon-s3": {},
                          "google-docs": {}}},
        ],
    }


PRESETS = {
    "case-study": case_study_spec,
    "paper-values": paper_values_spec,
}


def load_spec(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
