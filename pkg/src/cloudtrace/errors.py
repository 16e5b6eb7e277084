"""Exception types shared across the scanner."""

from __future__ import annotations


class CloudTraceError(Exception):
    """Base class for scanner errors."""


class UnrecognizedLayoutError(CloudTraceError):
    """No known device-layout marker was found under the given root."""


class ContainerError(CloudTraceError):
    """A container file could not be read in its expected format."""


class MissingTableError(ContainerError):
    """A required table is absent from an embedded database."""

    def __init__(self, table: str, available: list[str]):
        super().__init__(
            f"table {table!r} not found; available tables: {', '.join(available) or '(none)'}"
        )
        self.table = table
        self.available = available


class MissingColumnError(ContainerError):
    """A required column is absent from a database table."""

    def __init__(self, column: str, table: str):
        super().__init__(f"column {column!r} missing from table {table!r}")
        self.column = column
        self.table = table


class MalformedLineError(CloudTraceError):
    """A log line could not be split into its minimum field set."""

    def __init__(self, message: str, line: str):
        super().__init__(f"{message}: {line!r}")
        self.line = line


class ElementNotFoundError(CloudTraceError):
    """An expected markup element is absent from a document."""


class MissingJurisdictionError(CloudTraceError):
    """Identifier-only findings need the jurisdiction input to branch."""


class FixtureGapError(CloudTraceError):
    """The requested service/OS pair has no artifact writers."""
