"""Similarity and diversity metrics over embeddings and profile sets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import UserTimeline, epoch_seconds

DEGENERATE_NORM = 1e-12
EXACT_DIVERSITY_LIMIT = 20_000
DIVERSITY_SAMPLE_PAIRS = 1_000_000


class DtMode(str, Enum):
    RAW = "raw"
    MEDIAN = "median"


@dataclass
class ConsecutiveSimilarities:
    """Cosine similarity of each chronologically consecutive event pair."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"values must be 1-D, got shape {arr.shape}")
        self.values = arr

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class TimeDeltas:
    """Per-gap time differences, raw seconds plus the values actually used."""

    values: np.ndarray
    raw_seconds: np.ndarray
    mode: DtMode

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.raw_seconds = np.asarray(self.raw_seconds, dtype=np.int64)
        self.mode = DtMode(self.mode)

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class DiversityResult:
    """Pairwise diversity of a profile set and how it was computed."""

    diversity: float
    n_profiles: int
    exact: bool
    n_pairs: int


def cosine_similarity(x, y) -> float:
    """Cosine similarity in float64, clamped to [-1, 1].

    Vectors with norm below 1e-12 are treated as directionless and
    contribute similarity 0.
    """
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"expected equal-length 1-D vectors, got {a.shape} and {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < DEGENERATE_NORM or nb < DEGENERATE_NORM:
        return 0.0
    return float(min(1.0, max(-1.0, float(a.dot(b)) / (na * nb))))


def consecutive_similarities(rows) -> ConsecutiveSimilarities:
    """Cosine similarities of rows i and i+1 for a user's event embeddings."""
    arr = np.asarray(getattr(rows, "data", rows), dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"rows must be 2-D, got shape {arr.shape}")
    n = arr.shape[0]
    if n <= 1:
        return ConsecutiveSimilarities(np.empty(0, dtype=np.float64))
    norms = np.linalg.norm(arr, axis=1)
    dots = np.einsum("ij,ij->i", arr[:-1], arr[1:])
    ok = (norms[:-1] >= DEGENERATE_NORM) & (norms[1:] >= DEGENERATE_NORM)
    sims = np.zeros(n - 1, dtype=np.float64)
    sims[ok] = dots[ok] / (norms[:-1][ok] * norms[1:][ok])
    return ConsecutiveSimilarities(np.clip(sims, -1.0, 1.0))


def time_differences(
    timeline: UserTimeline, mode: DtMode | str = DtMode.MEDIAN
) -> TimeDeltas:
    """Per-gap time deltas for a timeline in ascending timestamp order.

    raw mode keeps seconds.  median mode divides by the median positive gap
    so one unit means a typical posting interval; if every gap is zero the
    normalized values are all zero.
    """
    mode = DtMode(mode)
    stamps = np.array(
        [epoch_seconds(e.timestamp) for e in timeline.events], dtype=np.int64
    )
    raw = np.diff(stamps) if stamps.size > 1 else np.empty(0, dtype=np.int64)
    if (raw < 0).any():
        raise ValueError("timeline timestamps must be ascending")
    if mode is DtMode.RAW:
        values = raw.astype(np.float64)
    else:
        positive = raw[raw > 0]
        if positive.size:
            values = raw.astype(np.float64) / float(np.median(positive))
        else:
            values = np.zeros(raw.shape, dtype=np.float64)
    return TimeDeltas(values=values, raw_seconds=raw, mode=mode)


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms < DEGENERATE_NORM, 1.0, norms)
    unit = vectors / safe[:, None]
    unit[norms < DEGENERATE_NORM] = 0.0
    return unit


def pairwise_diversity(
    profiles,
    *,
    exact_limit: int = EXACT_DIVERSITY_LIMIT,
    sample_pairs: int = DIVERSITY_SAMPLE_PAIRS,
    seed: int = 0,
) -> DiversityResult:
    """Diversity = 1 - mean pairwise cosine over unordered distinct pairs.

    Up to exact_limit profiles every pair is visited; above it, a seeded
    uniform subsample of sample_pairs distinct-index pairs estimates the
    mean.  Accepts a ProfileSet or a 2-D array of profile vectors.
    Result lies in [0, 2]: identical directions give 0, orthogonal 1,
    opposite 2.
    """
    to_matrix = getattr(profiles, "to_matrix", None)
    vectors = to_matrix() if callable(to_matrix) else np.asarray(profiles)
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError(f"profiles must form a 2-D matrix, got shape {vectors.shape}")
    n = vectors.shape[0]
    if n < 2:
        raise ValueError(f"diversity needs at least 2 profiles, got {n}")
    unit = _unit_rows(vectors)
    if n <= exact_limit:
        gram = unit @ unit.T
        total = float(gram.sum())
        trace = float(np.trace(gram))
        n_pairs = n * (n - 1) // 2
        mean_sim = (total - trace) / 2.0 / n_pairs
        return DiversityResult(
            diversity=float(1.0 - min(1.0, max(-1.0, mean_sim))),
            n_profiles=n,
            exact=True,
            n_pairs=n_pairs,
        )
    rng = np.random.default_rng(seed)
    need = sample_pairs
    sims_sum = 0.0
    drawn = 0
    while drawn < need:
        batch = need - drawn
        i = rng.integers(0, n, batch)
        j = rng.integers(0, n, batch)
        keep = i != j
        i, j = i[keep], j[keep]
        if i.size == 0:
            continue
        sims = np.einsum("ij,ij->i", unit[i], unit[j])
        sims_sum += float(np.clip(sims, -1.0, 1.0).sum())
        drawn += i.size
    mean_sim = sims_sum / drawn
    return DiversityResult(
        diversity=float(1.0 - min(1.0, max(-1.0, mean_sim))),
        n_profiles=n,
        exact=False,
        n_pairs=drawn,
    )
