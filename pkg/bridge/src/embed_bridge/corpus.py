"""Strict reader for the canonical corpus CSV, plus document construction.

The corpus format is shared with the profiling pipeline: UTF-8 CSV with
header ``user_id,timestamp,bio,text``, one row per document, rows already
in canonical order.  The ingestion side over there skips and counts
malformed rows; this reader refuses them instead.  An exporter's whole
contract is that output row i encodes corpus row i, and a silently
dropped row would shift every embedding after it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime

CORPUS_HEADER = ("user_id", "timestamp", "bio", "text")


class CorpusError(Exception):
    """The corpus file does not conform to the canonical CSV format."""


@dataclass(frozen=True)
class CorpusRow:
    """One corpus row in file order, fields stripped."""

    user_id: str
    timestamp: str
    bio: str
    text: str


def document_text(bio: str, text: str) -> str:
    """Encoder input for one row: bio and text joined by one ASCII space.

    An empty bio yields the text alone.  Must stay byte-identical to the
    profiling pipeline's document construction; the shared golden file
    pins both sides.
    """
    if bio:
        return bio + " " + text
    return text


def _check_timestamp(value: str, row: int) -> None:
    text = value
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise CorpusError(f"row {row}: bad timestamp {value!r}") from None
    if parsed.tzinfo is None:
        raise CorpusError(f"row {row}: timestamp {value!r} has no UTC offset")


def read_corpus_csv(path) -> list[CorpusRow]:
    """Read every data row of a canonical corpus CSV, in file order.

    Raises CorpusError on a missing or wrong header, a row without
    exactly four fields, an empty user_id, an unparseable or naive
    timestamp, or text that is empty after stripping.  Row numbers in
    error messages are 1-based over data rows.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusError("empty stream, expected a header row") from None
        if tuple(header) != CORPUS_HEADER:
            raise CorpusError(
                f"bad header {header!r}, expected {list(CORPUS_HEADER)!r}"
            )
        rows: list[CorpusRow] = []
        for number, row in enumerate(reader, start=1):
            if len(row) != 4:
                raise CorpusError(f"row {number}: expected 4 fields, got {len(row)}")
            user_id, raw_ts, bio, text = (field.strip() for field in row)
            if not user_id:
                raise CorpusError(f"row {number}: empty user_id")
            _check_timestamp(raw_ts, number)
            if not text:
                raise CorpusError(f"row {number}: empty text")
            rows.append(CorpusRow(user_id, raw_ts, bio, text))
    return rows
