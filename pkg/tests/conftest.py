"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from temporal_profiler.corpus import TimelineEvent, UserTimeline

T0 = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_event(
    user_id: str = "u1",
    offset_s: int = 0,
    bio: str = "",
    text: str = "hello world",
) -> TimelineEvent:
    return TimelineEvent(
        user_id=user_id,
        timestamp=T0 + timedelta(seconds=offset_s),
        bio=bio,
        text=text,
    )


def make_timeline(
    user_id: str = "u1",
    n: int = 3,
    gap_s: int = 3600,
    texts: list[str] | None = None,
) -> UserTimeline:
    events = tuple(
        make_event(
            user_id,
            offset_s=i * gap_s,
            text=texts[i] if texts else f"post {i}",
        )
        for i in range(n)
    )
    return UserTimeline(user_id, events)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
