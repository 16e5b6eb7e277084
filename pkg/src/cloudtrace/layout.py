"""Device-layout detection for extracted filesystem trees."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import UnrecognizedLayoutError

OS_FAMILIES = (
    "windows-xp",
    "windows-vista7",
    "mac",
    "ios-app-sandbox",
    "android-data",
)

# When several markers coexist the most specific layout wins.
_PRIORITY = ("android-data", "ios-app-sandbox", "mac", "windows-vista7", "windows-xp")


@dataclass
class DeviceProfile:
    """OS family plus the user-profile roots found under one tree root."""

    os_family: str
    profile_roots: list[str]
    evidence: list[str] = field(default_factory=list)
    root: Path | None = None
    label: str = ""

    @property
    def device_id(self) -> str:
        name = self.label or (self.root.name if self.root else "tree")
        return f"{self.os_family}:{name}"

    @property
    def is_windows(self) -> bool:
        return self.os_family.startswith("windows")


def _windows_roots(base: Path, dirname: str, marker_sub: str) -> tuple[list[str], list[str]]:
    roots, evidence = [], []
    container = base / dirname
    if not container.is_dir():
        return roots, evidence
    for child in sorted(container.iterdir()):
        if child.is_dir() and (child / marker_sub).is_dir():
            roots.append(f"{dirname}/{child.name}")
            evidence.append(f"{dirname}/{child.name}/{marker_sub}")
    return roots, evidence


def detect_device_layout(tree_root: str | Path, os_hint: str | None = None,
                         label: str = "") -> DeviceProfile:
    """Classify a tree as one OS family by its marker directories.

    Markers: data/data (Android app data), Library/Preferences or
    Documents+Library at the root (iOS app sandbox), Users/*/Library
    (Mac), Users/*/AppData (Vista/7), Documents and Settings/* (XP).
    All markers found are kept as evidence; ties resolve to the most
    specific family. Raises UnrecognizedLayoutError when nothing matches.
    """
    base = Path(tree_root)
    if not base.is_dir():
        raise UnrecognizedLayoutError(f"not a readable directory: {base}")

    found: dict[str, tuple[list[str], list[str]]] = {}

    if (base / "data" / "data").is_dir():
        found["android-data"] = (["."], ["data/data"])

    ios_evidence = []
    if (base / "Library" / "Preferences").is_dir():
        ios_evidence.append("Library/Preferences")
    elif (base / "Documents").is_dir() and (base / "Library").is_dir():
        ios_evidence.extend(["Documents", "Library"])
    if ios_evidence:
        found["ios-app-sandbox"] = (["."], ios_evidence)

    mac_roots, mac_evidence = _windows_roots(base, "Users", "Library")
    if mac_roots:
        found["mac"] = (mac_roots, mac_evidence)

    v7_roots, v7_evidence = _windows_roots(base, "Users", "AppData")
    if v7_roots:
        found["windows-vista7"] = (v7_roots, v7_evidence)

    xp_container = base / "Documents and Settings"
    if xp_container.is_dir():
        xp_roots = [f"Documents and Settings/{c.name}"
                    for c in sorted(xp_container.iterdir()) if c.is_dir()]
        if xp_roots:
            found["windows-xp"] = (xp_roots, list(xp_roots))

    all_evidence = [marker for _, (_, markers) in sorted(found.items())
                    for marker in markers]

    if os_hint is not None:
        if os_hint not in OS_FAMILIES:
            raise UnrecognizedLayoutError(f"unknown os hint: {os_hint}")
        roots = found.get(os_hint, (None, None))[0]
        if roots is None:
            if os_hint in ("android-data", "ios-app-sandbox"):
                roots = ["."]
            else:
                raise UnrecognizedLayoutError(
                    f"os hint {os_hint} given but no matching profile roots found")
        return DeviceProfile(os_hint, roots, all_evidence, base, label)

    for family in _PRIORITY:
        if family in found:
            roots, _ = found[family]
            return DeviceProfile(family, roots, all_evidence, base, label)

    raise UnrecognizedLayoutError(f"unrecognized device layout under {base}")


def detect_case_layout(case_root: str | Path,
                       os_hint: str | None = None) -> list[DeviceProfile]:
    """Detect device trees under a case root.

    A root that is itself a device tree yields one profile. Otherwise
    each immediate subdirectory is tried as a device tree (the seized-
    devices-side-by-side layout); at least one must be recognizable.
    """
    base = Path(case_root)
    try:
        return [detect_device_layout(base, os_hint, label=base.name)]
    except UnrecognizedLayoutError:
        if os_hint is not None:
            raise
    profiles = []
    if base.is_dir():
        for child in sorted(base.iterdir()):
            if not child.is_dir():
                continue
            try:
                profiles.append(detect_device_layout(child, label=child.name))
            except UnrecognizedLayoutError:
                continue
    if not profiles:
        raise UnrecognizedLayoutError(f"unrecognized device layout under {base}")
    return profiles
