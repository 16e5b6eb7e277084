"""Tree traversal: match files against the expanded catalog."""

from __future__ import annotations

import fnmatch
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .catalog import CatalogEntry, expand_catalog
from .containers import identify_container
from .layout import DeviceProfile


@dataclass
class CandidateFile:
    """A file matched by a catalog entry, with its identified container."""

    path: Path
    relative_path: str
    entry: CatalogEntry
    container: str


@dataclass
class ScanResult:
    candidates: list[CandidateFile]
    skipped: list[str]


def _glob_match(path: str, pattern: str) -> bool:
    """Glob semantics per path segment: '*' never crosses '/'."""
    path_parts = path.split("/")
    pattern_parts = pattern.split("/")
    if len(path_parts) != len(pattern_parts):
        return False
    return all(fnmatch.fnmatchcase(part, pat)
               for part, pat in zip(path_parts, pattern_parts))


def _walk_files(root: Path) -> list[str]:
    # Symlinks are not followed: evidence trees must be self-contained.
    out = []
    stack = [root]
    while stack:
        current = stack.pop()
        try:
            children = list(current.iterdir())
        except OSError:
            continue
        for child in children:
            if child.is_symlink():
                continue
            if child.is_dir():
                stack.append(child)
            elif child.is_file():
                out.append(child.relative_to(root).as_posix())
    return sorted(out)


def scan(tree_root: str | Path, profile: DeviceProfile) -> ScanResult:
    """Scan a device tree for cataloged artifact locations.

    Output order is deterministic: lexicographic by relative path, then
    by catalog role. A file matching several catalog entries yields one
    candidate per entry. Unreadable files become skipped-file
    diagnostics; the scan always completes.
    """
    root = Path(tree_root)
    patterns = expand_catalog(profile)
    if profile.is_windows:
        matchers = [(p.lower(), e) for p, e in patterns]
    else:
        matchers = list(patterns)

    matched: list[tuple[str, CatalogEntry]] = []
    for rel in _walk_files(root):
        probe = rel.lower() if profile.is_windows else rel
        for pattern, entry in matchers:
            if _glob_match(probe, pattern):
                matched.append((rel, entry))

    matched.sort(key=lambda pair: (pair[0], pair[1].role))

    skipped: list[str] = []

    def identify(pair: tuple[str, CatalogEntry]) -> CandidateFile | None:
        rel, entry = pair
        path = root / rel
        try:
            with open(path, "rb") as fh:
                head = fh.read(4096)
        except OSError as exc:
            skipped.append(f"{rel}: {exc.__class__.__name__}: {exc}")
            return None
        return CandidateFile(path, rel, entry, identify_container(head))

    if matched:
        with ThreadPoolExecutor(max_workers=min(8, len(matched))) as pool:
            results = list(pool.map(identify, matched))
    else:
        results = []

    candidates = [c for c in results if c is not None]
    return ScanResult(candidates, sorted(set(skipped)))
