"""Path catalog of known cloud-storage artifacts, per OS family.

Each service-catalog entry describes one artifact location left by one
of the four supported services (Amazon S3, Dropbox, Evernote, Google
Docs) on Windows XP / Vista-7, Mac, iOS app sandboxes, or Android data
directories. Browser-log locations (IE index.dat, Firefox profile
stores) are cataloged separately under the pseudo-service "browser".

Path templates keep their placeholder spellings; expand_catalog turns
them into concrete glob patterns for a detected device profile.
"""

from __future__ import annotations

from dataclasses import dataclass

from .layout import DeviceProfile

WINDOWS_FAMILIES = ("windows-xp", "windows-vista7")

# Row count of the service catalog, fixed by a manual audit of the
# artifact tables it encodes: Windows 14, Mac 8, iOS 11, Android 11.
SERVICE_CATALOG_ROW_COUNT = 44

GROUP_SERVICE = "service-artifact"
GROUP_BROWSER = "browser-log"


@dataclass(frozen=True)
class CatalogEntry:
    """One cataloged artifact location.

    Windows rows carry two template variants (the XP profile layout
    differs from Vista/7); every other family uses path_template alone.
    role is the stable token parser dispatch keys on.
    """

    group: str
    service: str
    os_family: str
    role: str
    path_template: str
    file_kind: str
    details: str
    xp_path_template: str | None = None

    def families(self) -> tuple[str, ...]:
        if self.os_family == "windows":
            return WINDOWS_FAMILIES
        return (self.os_family,)

    def template_for(self, family: str) -> str:
        if family == "windows-xp" and self.xp_path_template is not None:
            return self.xp_path_template
        return self.path_template


def _win(group, service, role, xp, vista7, kind, details):
    return CatalogEntry(group, service, "windows", role, vista7, kind,
                        details, xp_path_template=xp)


_XP_TIF = "%UserProfile%\\Local Settings\\Temporary Internet Files\\Content.IE5"
_V7_TIF = "%UserProfile%\\AppData\\Local\\Microsoft\\Windows\\Temporary Internet Files\\Content.IE5"
_XP_EVERNOTE = "%UserProfile%\\Local Settings\\Application Data\\Evernote\\Evernote"
_V7_EVERNOTE = "%UserProfile%\\AppData\\Local\\Evernote\\Evernote"


def _svc_win(service, role, xp, vista7, kind, details):
    return _win(GROUP_SERVICE, service, role, xp, vista7, kind, details)


SERVICE_CATALOG: list[CatalogEntry] = [
    # --- Windows ---
    _svc_win("amazon-s3", "s3-office-lnk",
             "%UserProfile%\\Application Data\\Microsoft\\Office\\Recent\\*.lnk",
             "%UserProfile%\\AppData\\Roaming\\Microsoft\\Office\\Recent\\*.lnk",
             "lnk",
             "MS Office files that are downloaded and opened"),
    _svc_win("amazon-s3", "s3-bucket-log",
             _XP_TIF + "\\<Random>\\*.txt",
             _V7_TIF + "\\<Random>\\*.txt",
             "text",
             "API that user requests - Time at which user requests API - "
             "Name of bucket that accessed Windows system - User's canonical ID"),
    _svc_win("dropbox", "dropbox-config",
             "%UserProfile%\\Application Data\\Dropbox\\config.db",
             "%UserProfile%\\AppData\\Roaming\\Dropbox\\config.db",
             "sqlite3",
             "E-mail address for login - Files that has been accessed most "
             "recently (at most five)"),
    _svc_win("dropbox", "dropbox-filecache",
             "%UserProfile%\\Application Data\\Dropbox\\filecache.db",
             "%UserProfile%\\AppData\\Roaming\\Dropbox\\filecache.db",
             "sqlite3",
             "Synced file name and path of cloud server - Creation time - "
             "Modification time"),
    _svc_win("evernote", "evernote-notestore",
             _XP_EVERNOTE + "\\Databases\\[userID].exb",
             _V7_EVERNOTE + "\\Databases\\[userID].exb",
             "sqlite3",
             "Location that user created note - Flag that represents deletion "
             "of note - Type of smartphone operating system - Creation time - "
             "Modification time - Information about attached file"),
    _svc_win("evernote", "evernote-thumbnails",
             _XP_EVERNOTE + "\\Databases\\[userID].exb.thumbnails",
             _V7_EVERNOTE + "\\Databases\\[userID].exb.thumbnails",
             "ent0",
             "Combination of PNG files that take a snapshot of note"),
    _svc_win("evernote", "evernote-applog",
             _XP_EVERNOTE + "\\Logs\\AppLog_[Date].txt",
             _V7_EVERNOTE + "\\Logs\\AppLog_[Date].txt",
             "text",
             "Authentication information - Account ID - History of user's behavior"),
    _svc_win("evernote", "evernote-enclipper",
             _XP_EVERNOTE + "\\Logs\\enclipper_[Date].txt",
             _V7_EVERNOTE + "\\Logs\\enclipper_[Date].txt",
             "text",
             "Time at which Evernote started"),
    _svc_win("google-docs", "gdocs-doclist-page",
             _XP_TIF + "\\<Random>\\docs_google_com[n].htm",
             _V7_TIF + "\\<Random>\\docs_google_com[n].htm",
             "html",
             "List of files in Google Docs"),
    _svc_win("google-docs", "gdocs-edit-page",
             _XP_TIF + "\\<Random>\\edit[n].htm",
             _V7_TIF + "\\<Random>\\edit[n].htm",
             "html",
             "Contents of MS document and presentation when browsing it - "
             "The first page of MS document, .ppt, .txt when editing it"),
    _svc_win("google-docs", "gdocs-ccc-page",
             _XP_TIF + "\\<Random>\\ccc[n].htm",
             _V7_TIF + "\\<Random>\\ccc[n].htm",
             "html",
             "Contents of MS spreadsheet when browsing it - Contents of MS "
             "spreadsheet when editing it"),
    _svc_win("google-docs", "gdocs-viewer-xml",
             _XP_TIF + "\\<Random>\\viewer[n].xml",
             _V7_TIF + "\\<Random>\\viewer[n].xml",
             "xml",
             "Text of PDF"),
    _svc_win("google-docs", "gdocs-viewer-png",
             _XP_TIF + "\\<Random>\\viewer[n].png",
             _V7_TIF + "\\<Random>\\viewer[n].png",
             "png",
             "Each page of PDF in image"),
    _svc_win("google-docs", "gdocs-viewer-txt",
             _XP_TIF + "\\<Random>\\Viewer[n].txt",
             _V7_TIF + "\\<Random>\\Viewer[n].txt",
             "text",
             "The metadata and contents of PDF"),
    # --- Mac ---
    CatalogEntry(GROUP_SERVICE, "dropbox", "mac", "dropbox-config",
                 "/Users/[user name]/.dropbox/config.db", "sqlite3",
                 "E-mail address for login - Files that has been accessed "
                 "most recently (at most five)"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "mac", "dropbox-filecache",
                 "/Users/[user name]/.dropbox/filecache.db", "sqlite3",
                 "Synced file name and path of cloud server - Creation time "
                 "- Modification time"),
    CatalogEntry(GROUP_SERVICE, "evernote", "mac", "evernote-notestore",
                 "/Users/[user name]/Library/Application Support/Evernote/data/Evernote.sql",
                 "sqlite3",
                 "Location that user created note - Flag that represents "
                 "deletion of note - Type of smartphone operating system - "
                 "Creation time - Modification time - Information about "
                 "attached file"),
    CatalogEntry(GROUP_SERVICE, "evernote", "mac", "evernote-fullthumb",
                 "/Users/[user name]/Library/Application Support/Evernote/data/Contents/fullscreenThumbnail.png",
                 "png", "Full screenshot of note"),
    CatalogEntry(GROUP_SERVICE, "evernote", "mac", "evernote-thumb",
                 "/Users/[user name]/Library/Application Support/Evernote/data/Contents/thumbnail.png",
                 "png", "Snapshot of content in note"),
    CatalogEntry(GROUP_SERVICE, "evernote", "mac", "evernote-applog",
                 "/Users/[user name]/Library/Application Support/Evernote/logs/Evernote.log",
                 "text",
                 "Authentication information - Account ID - History of "
                 "user's behavior"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "mac", "gdocs-cache-png",
                 "/Users/[user name]/Library/Caches/Firefox/Profiles/[random 8 digits].default/Cache/*",
                 "png",
                 "Each page of uploaded file (ppt, pptx, doc, docx, pdf) in "
                 "image - Each page of edited file (doc) in image"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "mac", "gdocs-cache-html",
                 "/Users/[user name]/Library/Caches/Firefox/Profiles/[random 8 digits].default/Cache/*",
                 "html",
                 "Part of contents of doc when browsing it - Part of "
                 "contents of ppt, pptx when editing it"),
    # --- iOS app sandboxes ---
    CatalogEntry(GROUP_SERVICE, "amazon-s3", "ios-app-sandbox", "s3-iaws-plist",
                 "Library/Preferences/com.moninnovations.iAwsManager.plist",
                 "plist",
                 "User's name - User's access key ID - User's secret access key"),
    CatalogEntry(GROUP_SERVICE, "amazon-s3", "ios-app-sandbox", "s3-iaws-db",
                 "Document/iAwsManager/iAwsManager.3.0.db", "sqlite3",
                 "Path, eTag, name and size of downloaded file - Name of "
                 "bucket that accessed iPhone - Time at which file was "
                 "downloaded"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "ios-app-sandbox", "dropbox-ios-plist",
                 "Library/Preferences/com.getdropbox.Dropbox.plist", "plist",
                 "E-mail address for login - The first login time"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "ios-app-sandbox", "dropbox-ios-viewed",
                 "Documents/Dropbox.sqlite", "sqlite3",
                 "Time at which user browsed folder or file - Name and path "
                 "of file that user browsed"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "ios-app-sandbox", "dropbox-ios-uploads",
                 "Documents/Uploads.sqlite", "sqlite3",
                 "Time at which file was uploaded - Name and path of "
                 "uploaded file"),
    CatalogEntry(GROUP_SERVICE, "evernote", "ios-app-sandbox", "evernote-ios-applog",
                 "Documents/www.evernote.com/User/applog.txt", "text",
                 "Beginning and end of service access - Beginning and end of "
                 "synchronization time - Connection status (Wi-Fi, 3G)"),
    CatalogEntry(GROUP_SERVICE, "evernote", "ios-app-sandbox", "evernote-ios-plist",
                 "Library/Preferences/com.evernote.iPhone.Evernote.plist",
                 "plist", "Account ID"),
    CatalogEntry(GROUP_SERVICE, "evernote", "ios-app-sandbox", "evernote-ios-store",
                 "Documents/www.evernote.com/User/Evernote2.sqlite", "sqlite3",
                 "Time at which user created and modified note - Location "
                 "that user created note - Flag that represents deletion of "
                 "note - Type of smartphone operating system - Information "
                 "about attached file - Title and contents of note"),
    CatalogEntry(GROUP_SERVICE, "evernote", "ios-app-sandbox", "evernote-ios-md",
                 "Documents/www.evernote.com/User/Evernote2.sqlite.md", "xml",
                 "The latest synchronization time"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "ios-app-sandbox", "gdocs-ios-plist",
                 "Library/Preferences/com.jade.iGoogDocs.plist", "plist",
                 "Value for auto login that can be true or false - User's "
                 "Google Docs ID - User's Google Docs password (when auto "
                 "login is true)"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "ios-app-sandbox", "gdocs-ios-localfile",
                 "Documents/[Title of Document].txt", "html",
                 "Contents of created text file"),
    # --- Android data directories ---
    CatalogEntry(GROUP_SERVICE, "amazon-s3", "android-data", "s3-anywhere-xml",
                 "data/data/s3anywherepro/shared_prefs/s3anywhere.xml", "xml",
                 "Bucket name that accessed Android smartphone - Folder's "
                 "name on Amazon S3 - User's access key ID - User's secret "
                 "access key - The last synchronization time - Path of local "
                 "directory"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "android-data", "dropbox-android-prefs",
                 "data/data/com.dropbox.android/database/prefs.db", "sqlite3",
                 "User's name - E-mail address for login"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "android-data", "dropbox-android-db",
                 "data/data/com.dropbox.android/database/db.db", "sqlite3",
                 "Name, size, and time of modification of uploaded file"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "android-data", "dropbox-android-log",
                 "data/data/com.dropbox.android/files/log.txt", "text",
                 "Success or failure of login attempts - Beginning and end "
                 "of the service - File synchronization time"),
    CatalogEntry(GROUP_SERVICE, "dropbox", "android-data", "dropbox-sdcard",
                 "sdcard/dropbox/*", "any",
                 "Existence of file that user downloaded"),
    CatalogEntry(GROUP_SERVICE, "evernote", "android-data", "evernote-android-db",
                 "data/data/com.evernote/databases/Evernote.db", "sqlite3",
                 "Location that user created note - Flag that represents "
                 "deletion of note - Flag that represents availability of "
                 "note - Type of smartphone operating system - Creation time "
                 "- Modification time - Time at which note moved to bin"),
    CatalogEntry(GROUP_SERVICE, "evernote", "android-data", "evernote-android-content",
                 "sdcard/Evernote/notes/content.enml", "any",
                 "Contents of note"),
    CatalogEntry(GROUP_SERVICE, "evernote", "android-data", "evernote-android-thumbs",
                 "sdcard/Evernote/notethumbs/*", "any",
                 "Image file that take a snapshot of note"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "android-data", "gdocs-doclist-db",
                 "data/data/com.google.android.apps.docs/databases/DocList.db",
                 "sqlite3",
                 "Email address of the account that accessed smartphone and "
                 "the last synchronization time - Title of file - Type of "
                 "file - Time of the first upload and the last modification"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "android-data", "gdocs-drive-prefs",
                 "data/data/com.google.android.apps.docs/shared_prefs/GoogleDriveSharedPreferences.xml",
                 "xml", "Email address that the administrator has used"),
    CatalogEntry(GROUP_SERVICE, "google-docs", "android-data", "gdocs-webview-prefs",
                 "data/data/com.google.android.apps.docs/shared_prefs/webview.xml",
                 "xml",
                 "The latest email address that has connected to Google Docs"),
]

_XP_LOCAL = "%UserProfile%\\Local Settings"
_V7_LOCAL = "%UserProfile%\\AppData\\Local\\Microsoft\\Windows"
_FF_PROFILE = "/Users/[user name]/Library/Application Support/Firefox/Profiles/[random 8 digits].default"


def _brw_win(role, xp, vista7, kind, details):
    return _win(GROUP_BROWSER, "browser", role, xp, vista7, kind, details)


BROWSER_CATALOG: list[CatalogEntry] = [
    _brw_win("browser-cache-index",
             _XP_LOCAL + "\\Temporary Internet Files\\Content.IE5\\index.dat",
             _V7_LOCAL + "\\Temporary Internet Files\\Content.IE5\\index.dat",
             "index-dat", "Browser cache index"),
    _brw_win("browser-cache-files",
             _XP_LOCAL + "\\Temporary Internet Files\\Content.IE5\\<Random>\\<All of the files>",
             _V7_LOCAL + "\\Temporary Internet Files\\Content.IE5\\<Random>\\<All of the files>",
             "any", "Browser cache contents"),
    _brw_win("browser-history-index",
             _XP_LOCAL + "\\History\\History.IE5\\index.dat",
             _V7_LOCAL + "\\History\\History.IE5\\index.dat",
             "index-dat", "Browser history index"),
    _brw_win("browser-cookie-index",
             "%UserProfile%\\Cookies\\index.dat",
             "%UserProfile%\\AppData\\Roaming\\Microsoft\\Windows\\Cookies\\index.dat",
             "index-dat", "Browser cookie index"),
    _brw_win("browser-cookie-files",
             "%UserProfile%\\Cookies\\<All of the text file>",
             "%UserProfile%\\AppData\\Roaming\\Microsoft\\Windows\\Cookies\\<All of the files>",
             "text", "Browser cookie files"),
    CatalogEntry(GROUP_BROWSER, "browser", "windows-vista7", "browser-download-index",
                 "%UserProfile%\\AppData\\Roaming\\Microsoft\\Windows\\IEDownloadHistory\\index.dat",
                 "index-dat", "Browser download history index (IE 9 on Windows 7)"),
    CatalogEntry(GROUP_BROWSER, "browser", "mac", "browser-cache-map",
                 "/Users/[user name]/Library/Caches/Firefox/Profiles/[random 8 digits].default/Cache/_CACHE_MAP",
                 "any", "Browser cache map"),
    CatalogEntry(GROUP_BROWSER, "browser", "mac", "browser-places",
                 _FF_PROFILE + "/places.sqlite", "sqlite3", "Browser history store"),
    CatalogEntry(GROUP_BROWSER, "browser", "mac", "browser-cookies",
                 _FF_PROFILE + "/cookies.sqlite", "sqlite3", "Browser cookie store"),
    CatalogEntry(GROUP_BROWSER, "browser", "mac", "browser-session",
                 _FF_PROFILE + "/sessionstore.js", "text", "Browser session snapshot"),
]

FULL_CATALOG: list[CatalogEntry] = SERVICE_CATALOG + BROWSER_CATALOG

# Placeholders that stand for one unknown path component (or file set).
_WILDCARD_PLACEHOLDERS = (
    "[random 8 digits].default",
    "<Random>",
    "<All of the files>",
    "<All of the text file>",
    "[Bucket name]",
    "[userID]",
    "[Date]",
    "[n]",
    "[Title of Document]",
)


def _expand_template(template: str, roots: list[str]) -> list[str]:
    t = template.replace("\\", "/")
    if t.startswith(("%UserProfile%", "%Profile%")):
        prefix = "%UserProfile%" if t.startswith("%UserProfile%") else "%Profile%"
        stems = [root.rstrip("/") + t[len(prefix):] for root in roots]
    elif t.startswith("/Users/[user name]"):
        stems = [root.rstrip("/") + t[len("/Users/[user name]"):] for root in roots]
    else:
        stems = [t.lstrip("/")]
    patterns = []
    for stem in stems:
        for placeholder in _WILDCARD_PLACEHOLDERS:
            if placeholder == "[random 8 digits].default":
                stem = stem.replace(placeholder, "*.default")
            else:
                stem = stem.replace(placeholder, "*")
        patterns.append(stem)
    return patterns


def expand_catalog(profile: DeviceProfile,
                   entries: list[CatalogEntry] | None = None
                   ) -> list[tuple[str, CatalogEntry]]:
    """Expand catalog templates into (glob pattern, entry) pairs.

    Only entries applicable to the profile's OS family are emitted;
    profile placeholders are substituted per discovered profile root and
    the remaining unknowns become single wildcards.
    """
    if entries is None:
        entries = FULL_CATALOG
    out: list[tuple[str, CatalogEntry]] = []
    for entry in entries:
        if profile.os_family not in entry.families():
            continue
        template = entry.template_for(profile.os_family)
        for pattern in _expand_template(template, profile.profile_roots):
            out.append((pattern, entry))
    return out


def catalog_as_dicts(service: str | None = None,
                     os_family: str | None = None) -> list[dict]:
    """Catalog entries as plain dicts for the JSON export."""
    rows = []
    for entry in FULL_CATALOG:
        if service and entry.service != service:
            continue
        if os_family and os_family not in entry.families():
            continue
        row = {
            "group": entry.group,
            "service": entry.service,
            "os_family": entry.os_family,
            "role": entry.role,
            "path_template": entry.path_template,
            "file_kind": entry.file_kind,
            "details": entry.details,
        }
        if entry.xp_path_template is not None:
            row["xp_path_template"] = entry.xp_path_template
        rows.append(row)
    return rows
