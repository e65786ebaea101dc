"""Timeline and activity ingestion: parsing, cleaning, deduplication, ordering.

The on-disk corpus is a UTF-8 CSV with header ``user_id,timestamp,bio,text``
and one row per document.  Activity streams (likes, retweets, quotes) arrive
as JSON Lines.  Both parsers are tolerant of malformed rows: bad rows are
dropped and counted, never repaired.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import BinaryIO, Iterable

TIMELINE_HEADER = ("user_id", "timestamp", "bio", "text")
ACTIVITY_KEYS = frozenset({"user_id", "timestamp", "kind", "text"})
TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"


class CorpusFormatError(Exception):
    """The stream as a whole violates the corpus wire format."""


class ActivityKind(str, Enum):
    LIKE = "like"
    RETWEET = "retweet"
    QUOTE = "quote"


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 UTC instant such as ``2024-03-01T12:00:00Z``.

    Returns a timezone-aware UTC datetime truncated to second precision.
    Offsets other than Z are accepted and converted to UTC; naive
    timestamps raise ValueError.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    """Render a UTC datetime in the canonical ``...Z`` form."""
    if ts.tzinfo is None:
        raise ValueError("timestamp must be timezone-aware")
    return ts.astimezone(timezone.utc).strftime(TIMESTAMP_FMT)


def epoch_seconds(ts: datetime) -> int:
    return int(ts.timestamp())


@dataclass(frozen=True)
class TimelineEvent:
    """One authored document on a user timeline."""

    user_id: str
    timestamp: datetime
    bio: str
    text: str

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ValueError("user_id must be non-empty")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware UTC")
        if not self.text.strip():
            raise ValueError("text must be non-empty after stripping")


@dataclass(frozen=True)
class ActivityRecord:
    """One like, retweet, or quote by a user."""

    user_id: str
    timestamp: datetime
    kind: ActivityKind
    text: str

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ValueError("user_id must be non-empty")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware UTC")
        if not isinstance(self.kind, ActivityKind):
            raise ValueError(f"kind must be an ActivityKind, got {self.kind!r}")
        if not self.text.strip():
            raise ValueError("text must be non-empty after stripping")


@dataclass(frozen=True)
class UserTimeline:
    """All events of one user, ascending by (timestamp, text), no duplicates."""

    user_id: str
    events: tuple[TimelineEvent, ...]

    def __post_init__(self) -> None:
        keys = []
        for event in self.events:
            if event.user_id != self.user_id:
                raise ValueError(
                    f"event user {event.user_id!r} does not match timeline "
                    f"user {self.user_id!r}"
                )
            keys.append((event.timestamp, event.text))
        if keys != sorted(keys):
            raise ValueError("events must be sorted ascending by (timestamp, text)")
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (timestamp, text) events in timeline")

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class ParseReport:
    """How a parse went: rows kept and malformed rows dropped."""

    n_rows: int
    n_skipped: int


def _text_stream(stream: BinaryIO | io.TextIOBase) -> io.TextIOBase:
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8", newline="")


def parse_timeline_csv(
    stream: BinaryIO | io.TextIOBase,
) -> tuple[list[TimelineEvent], ParseReport]:
    """Parse a timeline CSV into events, dropping malformed rows.

    A row is malformed if it does not have exactly four fields, its
    timestamp does not parse, its user_id is empty, or its text is empty
    after stripping.  A missing or wrong header is a format error for the
    whole stream.
    """
    reader = csv.reader(_text_stream(stream))
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusFormatError("empty stream, expected a header row") from None
    if tuple(header) != TIMELINE_HEADER:
        raise CorpusFormatError(
            f"bad header {header!r}, expected {list(TIMELINE_HEADER)!r}"
        )
    events: list[TimelineEvent] = []
    skipped = 0
    for row in reader:
        if len(row) != 4:
            skipped += 1
            continue
        user_id, raw_ts, bio, text = (field.strip() for field in row)
        try:
            event = TimelineEvent(user_id, parse_timestamp(raw_ts), bio, text)
        except ValueError:
            skipped += 1
            continue
        events.append(event)
    return events, ParseReport(n_rows=len(events), n_skipped=skipped)


def parse_activity_jsonl(
    stream: BinaryIO | io.TextIOBase,
) -> tuple[list[ActivityRecord], ParseReport]:
    """Parse an activity JSONL stream, dropping malformed lines.

    Each line must be a JSON object whose keys are exactly
    ``{user_id, timestamp, kind, text}`` with string values and a kind in
    {like, retweet, quote}.  Blank lines are ignored without counting.
    """
    records: list[ActivityRecord] = []
    skipped = 0
    for line in _text_stream(stream):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            skipped += 1
            continue
        if not isinstance(obj, dict) or set(obj) != ACTIVITY_KEYS:
            skipped += 1
            continue
        if not all(isinstance(v, str) for v in obj.values()):
            skipped += 1
            continue
        try:
            record = ActivityRecord(
                obj["user_id"].strip(),
                parse_timestamp(obj["timestamp"]),
                ActivityKind(obj["kind"]),
                obj["text"].strip(),
            )
        except ValueError:
            skipped += 1
            continue
        records.append(record)
    return records, ParseReport(n_rows=len(records), n_skipped=skipped)


def dedupe_and_sort(events: Iterable[TimelineEvent]) -> dict[str, UserTimeline]:
    """Group events by user, drop exact (timestamp, text) duplicates, sort.

    The first occurrence of a duplicate wins, so its bio is the one kept.
    Returned dict keys are in ascending user_id order.
    """
    buckets: dict[str, dict[tuple[datetime, str], TimelineEvent]] = {}
    for event in events:
        bucket = buckets.setdefault(event.user_id, {})
        bucket.setdefault((event.timestamp, event.text), event)
    timelines: dict[str, UserTimeline] = {}
    for user_id in sorted(buckets):
        ordered = sorted(
            buckets[user_id].values(), key=lambda e: (e.timestamp, e.text)
        )
        timelines[user_id] = UserTimeline(user_id, tuple(ordered))
    return timelines


def build_document_text(event: TimelineEvent) -> str:
    """Join bio and text with a single space; empty bio yields text alone."""
    if event.bio:
        return event.bio + " " + event.text
    return event.text


def serialize_corpus(timelines: dict[str, UserTimeline]) -> bytes:
    """Render the canonical corpus CSV: RFC 4180, CRLF, sorted rows.

    Rows are ordered by (user_id, timestamp, text), which matches the
    canonical embedding row order used everywhere else.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(TIMELINE_HEADER)
    for user_id in sorted(timelines):
        for event in timelines[user_id].events:
            writer.writerow(
                (user_id, format_timestamp(event.timestamp), event.bio, event.text)
            )
    return out.getvalue().encode("utf-8")


def write_corpus_csv(timelines: dict[str, UserTimeline], path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_corpus(timelines))


def read_timeline_csv(path) -> tuple[list[TimelineEvent], ParseReport]:
    with open(path, "rb") as fh:
        return parse_timeline_csv(fh)


def read_activity_jsonl(path) -> tuple[list[ActivityRecord], ParseReport]:
    with open(path, "rb") as fh:
        return parse_activity_jsonl(fh)


def serialize_activity(records: Iterable[ActivityRecord]) -> bytes:
    """Render activity records as JSONL in the given order."""
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "user_id": rec.user_id,
                    "timestamp": format_timestamp(rec.timestamp),
                    "kind": rec.kind.value,
                    "text": rec.text,
                },
                sort_keys=True,
            )
        )
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def write_activity_jsonl(records: Iterable[ActivityRecord], path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_activity(records))
