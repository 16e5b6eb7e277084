"""cloudtrace: scanner for cloud-storage-service artifacts in extracted
device trees (Windows, Mac, iOS, Android)."""

__version__ = "0.1.0"

from .layout import DeviceProfile, detect_case_layout, detect_device_layout
from .pipeline import ScanOutcome, run_scan
from .records import ArtifactRecord, CredentialFinding
from .timestamps import (
    NormalizedTimestamp,
    normalize_apple_absolute,
    normalize_day_ordinal,
    normalize_unix,
    parse_date_text,
)

__all__ = [
    "ArtifactRecord",
    "CredentialFinding",
    "DeviceProfile",
    "NormalizedTimestamp",
    "ScanOutcome",
    "detect_case_layout",
    "detect_device_layout",
    "normalize_apple_absolute",
    "normalize_day_ordinal",
    "normalize_unix",
    "parse_date_text",
    "run_scan",
]
