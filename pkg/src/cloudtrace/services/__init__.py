"""Per-service artifact parsers and their pipeline harvesters."""

from . import browser, dropbox, evernote, gdocs, s3  # noqa: F401
