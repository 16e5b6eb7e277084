"""Timestamp normalization for every encoding the supported services emit.

Cloud storage clients stamp their records in wildly different ways:
unix seconds (Dropbox desktop), unix milliseconds (Android stores),
seconds since 2001-01-01 (iOS Core Data stores), fractional day ordinals
(Evernote desktop), plus several text dialects (S3 bucket logs, RFC 1123
headers, US-style short dates, ISO 8601 plist dates).

Every converter returns a NormalizedTimestamp that keeps the raw source
value verbatim next to the UTC instant, so a report can always be traced
back to the bytes it came from. Instants are truncated (never rounded)
to whole seconds; sub-second precision survives only in the raw value.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from email.utils import parsedate_to_datetime

UNIX_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
APPLE_EPOCH = datetime(2001, 1, 1, tzinfo=timezone.utc)
RANGE_MIN = datetime(1970, 1, 1, tzinfo=timezone.utc)
RANGE_MAX = datetime(2100, 1, 1, tzinfo=timezone.utc)

ENCODINGS = (
    "unix-seconds",
    "unix-milliseconds",
    "apple-absolute-seconds",
    "day-ordinal-fraction",
    "apache-log-date",
    "rfc1123-date",
    "us-short-date",
    "iso8601",
)

CONFIDENCE_EXACT = "exact"
CONFIDENCE_AMBIGUOUS_TZ = "ambiguous-timezone"
CONFIDENCE_AMBIGUOUS_FORMAT = "ambiguous-format"


class DialectParseError(ValueError):
    """A date string did not match the grammar of the named dialect."""

    def __init__(self, dialect: str, text: str):
        super().__init__(f"text does not match {dialect} dialect: {text!r}")
        self.dialect = dialect
        self.text = text


@dataclass(frozen=True)
class NormalizedTimestamp:
    """A UTC instant plus the verbatim source value it was derived from.

    utc_instant is timezone-aware UTC at whole-second resolution. For
    ambiguous-timezone values the instant is the source's wall-clock time
    carried over unchanged; the confidence flag records that caveat.
    """

    utc_instant: datetime
    raw_value: str | int | float
    encoding: str
    confidence: str = CONFIDENCE_EXACT

    def render_raw(self) -> str:
        """Source value as text, byte-identical to its textual form."""
        if isinstance(self.raw_value, float):
            return repr(self.raw_value)
        return str(self.raw_value)

    def iso(self) -> str:
        """ISO rendering; the Z suffix is reserved for exact instants."""
        t = self.utc_instant
        base = (f"{t.year:04d}-{t.month:02d}-{t.day:02d}"
                f"T{t.hour:02d}:{t.minute:02d}:{t.second:02d}")
        return base + "Z" if self.confidence == CONFIDENCE_EXACT else base

    def sort_key(self) -> datetime:
        return self.utc_instant


def _apply_range_flag(instant: datetime, confidence: str) -> str:
    """Out-of-range instants are evidence problems, not crashes."""
    if instant < RANGE_MIN or instant >= RANGE_MAX:
        return CONFIDENCE_AMBIGUOUS_FORMAT
    return confidence


def normalize_unix(value: int, unit: str = "seconds") -> NormalizedTimestamp:
    """Normalize a non-negative unix timestamp in seconds or milliseconds.

    Milliseconds are truncated to whole seconds. Values landing at or
    beyond 2100-01-01 come back flagged ambiguous-format instead of
    raising, so a scan never dies on a corrupt counter.
    """
    if unit not in ("seconds", "milliseconds"):
        raise ValueError(f"unsupported unix unit: {unit}")
    if value < 0:
        raise ValueError(f"unix timestamp must be non-negative: {value}")
    seconds = value // 1000 if unit == "milliseconds" else value
    try:
        instant = UNIX_EPOCH + timedelta(seconds=seconds)
        confidence = _apply_range_flag(instant, CONFIDENCE_EXACT)
    except OverflowError:
        instant = datetime(9999, 12, 31, 23, 59, 59, tzinfo=timezone.utc)
        confidence = CONFIDENCE_AMBIGUOUS_FORMAT
    encoding = "unix-milliseconds" if unit == "milliseconds" else "unix-seconds"
    return NormalizedTimestamp(instant, value, encoding, confidence)


def normalize_apple_absolute(value: float) -> NormalizedTimestamp:
    """Normalize seconds since 2001-01-01T00:00:00Z (iOS stores).

    Negative counters are normalized anyway but flagged ambiguous-format.
    """
    whole = math.floor(value)
    try:
        instant = APPLE_EPOCH + timedelta(seconds=whole)
        confidence = _apply_range_flag(instant, CONFIDENCE_EXACT)
    except OverflowError:
        instant = datetime(9999, 12, 31, 23, 59, 59, tzinfo=timezone.utc)
        confidence = CONFIDENCE_AMBIGUOUS_FORMAT
    if value < 0:
        confidence = CONFIDENCE_AMBIGUOUS_FORMAT
    return NormalizedTimestamp(instant, value, "apple-absolute-seconds", confidence)


def normalize_day_ordinal(value: float) -> NormalizedTimestamp:
    """Normalize a fractional day count (Evernote desktop stores).

    Convention: proleptic-Gregorian ordinal with day 1 = 0001-01-01 and
    the fraction as time of day. The source format does not state its
    epoch, so the result is always flagged -- ambiguous-timezone when the
    instant is plausible, ambiguous-format when it falls outside
    [1970, 2100).
    """
    if value < 1:
        raise ValueError(f"day ordinal before year 1: {value}")
    whole = int(value)
    tod_seconds = int((value - whole) * 86400)
    day = datetime.fromordinal(whole).replace(tzinfo=timezone.utc)
    instant = day + timedelta(seconds=tod_seconds)
    confidence = _apply_range_flag(instant, CONFIDENCE_AMBIGUOUS_TZ)
    return NormalizedTimestamp(instant, value, "day-ordinal-fraction", confidence)


_MONTHS = {
    "Jan": 1, "Feb": 2, "Mar": 3, "Apr": 4, "May": 5, "Jun": 6,
    "Jul": 7, "Aug": 8, "Sep": 9, "Oct": 10, "Nov": 11, "Dec": 12,
}

_APACHE_RE = re.compile(
    r"^(\d{2})/([A-Z][a-z]{2})/(\d{4}):(\d{2}):(\d{2}):(\d{2}) ([+-])(\d{2})(\d{2})$"
)
_US_SHORT_RE = re.compile(
    r"^(\d{1,2})/(\d{1,2})/(\d{2}) (\d{1,2}):(\d{2}) (AM|PM)$"
)
_ISO_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2})(?:\.\d+)?"
    r"(Z|[+-]\d{2}:?\d{2})?$"
)


def parse_date_text(text: str, dialect: str) -> NormalizedTimestamp:
    """Parse one of the text date dialects the artifact formats use.

    apache-log   06/Jan/2012:08:42:20 +0000   (S3 bucket logs)
    rfc1123      Thu, 17 Mar 2011 00:42:24 +0000 / ... GMT
    us-short     01/05/12 02:21 PM            (MM/DD/YY, device-local)

    Dialects carrying an explicit offset yield exact instants; us-short
    has no zone, so it is taken as device-local wall time and flagged
    ambiguous-timezone.
    """
    if not text:
        raise DialectParseError(dialect, text)
    if dialect == "apache-log":
        m = _APACHE_RE.match(text)
        if not m:
            raise DialectParseError(dialect, text)
        day, mon, year, hh, mm, ss, sign, oh, om = m.groups()
        if mon not in _MONTHS:
            raise DialectParseError(dialect, text)
        local = datetime(int(year), _MONTHS[mon], int(day), int(hh), int(mm), int(ss),
                         tzinfo=timezone.utc)
        offset = timedelta(hours=int(oh), minutes=int(om))
        instant = local - offset if sign == "+" else local + offset
        confidence = _apply_range_flag(instant, CONFIDENCE_EXACT)
        return NormalizedTimestamp(instant, text, "apache-log-date", confidence)
    if dialect == "rfc1123":
        try:
            parsed = parsedate_to_datetime(text)
        except (ValueError, TypeError) as exc:
            raise DialectParseError(dialect, text) from exc
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=timezone.utc)
        instant = parsed.astimezone(timezone.utc).replace(microsecond=0)
        confidence = _apply_range_flag(instant, CONFIDENCE_EXACT)
        return NormalizedTimestamp(instant, text, "rfc1123-date", confidence)
    if dialect == "us-short":
        m = _US_SHORT_RE.match(text)
        if not m:
            raise DialectParseError(dialect, text)
        mon, day, yy, hh, mm, half = m.groups()
        hour = int(hh) % 12
        if half == "PM":
            hour += 12
        try:
            instant = datetime(2000 + int(yy), int(mon), int(day), hour, int(mm),
                               tzinfo=timezone.utc)
        except ValueError as exc:
            raise DialectParseError(dialect, text) from exc
        confidence = _apply_range_flag(instant, CONFIDENCE_AMBIGUOUS_TZ)
        return NormalizedTimestamp(instant, text, "us-short-date", confidence)
    raise ValueError(f"unknown dialect: {dialect}")


def normalize_iso8601(text: str) -> NormalizedTimestamp:
    """Parse an ISO-8601-ish datetime (plist dates, application logs).

    A trailing zone designator makes the instant exact; without one the
    value is device-local wall time, flagged ambiguous-timezone.
    Fractional seconds are truncated into the instant but preserved in
    the raw value.
    """
    m = _ISO_RE.match(text.strip())
    if not m:
        raise DialectParseError("iso8601", text)
    y, mo, d, hh, mm, ss, zone = m.groups()
    instant = datetime(int(y), int(mo), int(d), int(hh), int(mm), int(ss),
                       tzinfo=timezone.utc)
    if zone is None:
        confidence = CONFIDENCE_AMBIGUOUS_TZ
    else:
        confidence = CONFIDENCE_EXACT
        if zone not in ("Z",):
            sign = 1 if zone[0] == "+" else -1
            hours = int(zone[1:3])
            minutes = int(zone.replace(":", "")[3:5])
            instant -= sign * timedelta(hours=hours, minutes=minutes)
    confidence = _apply_range_flag(instant, confidence)
    return NormalizedTimestamp(instant, text, "iso8601", confidence)


def from_datetime(instant: datetime, raw: str, encoding: str = "iso8601",
                  confidence: str = CONFIDENCE_EXACT) -> NormalizedTimestamp:
    """Wrap an already-decoded datetime, e.g. from a plist <date>."""
    if instant.tzinfo is None:
        instant = instant.replace(tzinfo=timezone.utc)
    instant = instant.astimezone(timezone.utc).replace(microsecond=0)
    return NormalizedTimestamp(instant, raw, encoding,
                               _apply_range_flag(instant, confidence))


_OFFSET_RE = re.compile(r"^(?:UTC|GMT)?([+-])(\d{1,2})(?::?(\d{2}))?$")


def parse_utc_offset(text: str) -> timedelta:
    """Parse offsets like 'UTC+9:00', '+0900', '-5:30', 'Z', 'UTC'."""
    text = text.strip()
    if text in ("Z", "UTC", "GMT", ""):
        return timedelta(0)
    m = _OFFSET_RE.match(text)
    if not m:
        raise ValueError(f"unrecognized UTC offset: {text!r}")
    sign, hours, minutes = m.groups()
    delta = timedelta(hours=int(hours), minutes=int(minutes or 0))
    return delta if sign == "+" else -delta


def apply_assumed_offset(ts: NormalizedTimestamp,
                         offset: timedelta) -> NormalizedTimestamp:
    """Shift an ambiguous-timezone instant to UTC under an assumed offset.

    The confidence flag stays ambiguous-timezone: the offset is operator
    input, not evidence. Exact and ambiguous-format values pass through.
    """
    if ts.confidence != CONFIDENCE_AMBIGUOUS_TZ:
        return ts
    return replace(ts, utc_instant=ts.utc_instant - offset)
