"""Shared record types every parser emits."""

from __future__ import annotations

from dataclasses import dataclass, field

from .timestamps import NormalizedTimestamp

SERVICES = ("amazon-s3", "dropbox", "evernote", "google-docs", "browser")

SECRET_NONE = "none"
SECRET_PASSWORD = "password"
SECRET_KEY_PAIR = "access-key-pair"
SECRET_SESSION_FILE = "portable-session-file"
SECRET_KINDS = (SECRET_NONE, SECRET_PASSWORD, SECRET_KEY_PAIR, SECRET_SESSION_FILE)

# Secret kinds that by themselves let an investigator into the account.
REMOTE_CAPABLE_SECRETS = (SECRET_PASSWORD, SECRET_KEY_PAIR, SECRET_SESSION_FILE)


@dataclass
class ArtifactRecord:
    """One normalized fact pulled from one source file.

    timestamps is an ordered list of (label, NormalizedTimestamp) pairs;
    the timeline fans a record out into one event per pair. attributes
    preserves format-specific fields under parser-documented keys.
    """

    service: str
    device: str
    source_path: str
    kind: str
    subject: str | None = None
    timestamps: list[tuple[str, NormalizedTimestamp]] = field(default_factory=list)
    attributes: dict[str, str] = field(default_factory=dict)
    geo: tuple[float, float] | None = None


@dataclass
class CredentialFinding:
    """Account identifier and secret material recovered from an artifact.

    A portable-session-file finding means possession of the source file
    alone grants storage access, so it always enables remote access.
    """

    service: str
    account_id: str | None
    secret_kind: str
    source_path: str
    secret_value: str | None = None
    enables_remote_access: bool = False

    def __post_init__(self):
        if self.secret_kind not in SECRET_KINDS:
            raise ValueError(f"unknown secret kind: {self.secret_kind}")
        if self.secret_kind == SECRET_NONE:
            self.secret_value = None
        if self.secret_kind == SECRET_SESSION_FILE:
            self.enables_remote_access = True
