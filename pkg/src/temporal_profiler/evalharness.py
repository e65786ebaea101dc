"""Evaluation of profile sets against held-out activity embeddings.

Two metrics over (user profile, liked post) pairs: the mean sigmoid of the
cosine similarity, and retrieval accuracy where the liked post must outrank
a sampled pool of other users' activity.  Ties are scored conservatively:
a distractor with exactly the true post's similarity ranks above it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._fmt import fmt_float
from .corpus import ActivityRecord
from .metrics import DEGENERATE_NORM
from .profiles import ProfileSet


def sigmoid(x: float) -> float:
    """Logistic function 1 / (1 + exp(-x))."""
    return 1.0 / (1.0 + math.exp(-x))


@dataclass
class ActivityPair:
    """One evaluation case: a user, their liked post row, a distractor pool."""

    user_id: str
    row: int
    pool_rows: np.ndarray

    def __post_init__(self) -> None:
        self.pool_rows = np.asarray(self.pool_rows, dtype=np.int64)


@dataclass
class ActivityPairing:
    """Evaluation pairs over a shared activity embedding matrix."""

    pairs: list[ActivityPair]
    activity: np.ndarray
    pool_size: int
    seed: int

    def __post_init__(self) -> None:
        self.activity = np.asarray(self.activity, dtype=np.float64)
        if self.activity.ndim != 2:
            raise ValueError(
                f"activity matrix must be 2-D, got shape {self.activity.shape}"
            )
        n = self.activity.shape[0]
        for pair in self.pairs:
            if not 0 <= pair.row < n:
                raise ValueError(f"pair row {pair.row} outside activity matrix")
            if pair.pool_rows.size and (
                pair.pool_rows.min() < 0 or pair.pool_rows.max() >= n
            ):
                raise ValueError("pool rows outside activity matrix")


def build_pairing(
    profiles: ProfileSet,
    records: Sequence[ActivityRecord],
    activity,
    *,
    pool_size: int = 99,
    seed: int = 0,
    kinds: tuple[str, ...] = ("like",),
) -> ActivityPairing:
    """Pair each matching activity record with a sampled distractor pool.

    records and the activity matrix rows correspond one to one in file
    order.  A record participates when its kind is in kinds and its user
    has a profile.  Distractors for a pair are drawn uniformly without
    replacement from all rows of other users, capped at what is available.
    """
    arr = np.asarray(getattr(activity, "data", activity), dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"activity matrix must be 2-D, got shape {arr.shape}")
    if len(records) != arr.shape[0]:
        raise ValueError(
            f"have {len(records)} activity records but {arr.shape[0]} embedding rows"
        )
    if pool_size < 0:
        raise ValueError(f"pool_size must be >= 0, got {pool_size}")
    wanted = {str(k) for k in kinds}
    owners = np.array([rec.user_id for rec in records])
    rng = np.random.default_rng(seed)
    pairs: list[ActivityPair] = []
    all_rows = np.arange(len(records))
    for i, rec in enumerate(records):
        if rec.kind.value not in wanted or rec.user_id not in profiles:
            continue
        candidates = all_rows[owners != rec.user_id]
        take = min(pool_size, candidates.size)
        chosen = (
            np.sort(rng.choice(candidates, size=take, replace=False))
            if take
            else np.empty(0, dtype=np.int64)
        )
        pairs.append(ActivityPair(user_id=rec.user_id, row=i, pool_rows=chosen))
    return ActivityPairing(pairs=pairs, activity=arr, pool_size=pool_size, seed=seed)


def _cosine_to_rows(profile_vec: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Cosine of one profile against many rows, degenerate rows scoring 0."""
    p = np.asarray(profile_vec, dtype=np.float64)
    p_norm = float(np.linalg.norm(p))
    norms = np.linalg.norm(rows, axis=1)
    sims = np.zeros(rows.shape[0], dtype=np.float64)
    if p_norm < DEGENERATE_NORM:
        return sims
    ok = norms >= DEGENERATE_NORM
    # einsum keeps the reduction single-threaded and run-to-run stable
    sims[ok] = np.einsum("ij,j->i", rows[ok], p) / (norms[ok] * p_norm)
    return np.clip(sims, -1.0, 1.0)


def pair_score(profile, post) -> float:
    """Sigmoid of the cosine similarity between a profile and one post."""
    vec = np.asarray(getattr(profile, "vector", profile), dtype=np.float64)
    sims = _cosine_to_rows(vec, np.asarray(post, dtype=np.float64).reshape(1, -1))
    return sigmoid(float(sims[0]))


def _check_dims(profiles: ProfileSet, pairing: ActivityPairing) -> None:
    if len(profiles) and profiles.dim != pairing.activity.shape[1]:
        raise ValueError(
            f"profile dimension {profiles.dim} does not match activity "
            f"dimension {pairing.activity.shape[1]}"
        )


def mean_activity_score(profiles: ProfileSet, pairing: ActivityPairing) -> float:
    """Mean sigmoid-cosine score over all pairs in the pairing."""
    if not pairing.pairs:
        raise ValueError("pairing has no pairs to score")
    _check_dims(profiles, pairing)
    scores = np.empty(len(pairing.pairs), dtype=np.float64)
    for i, pair in enumerate(pairing.pairs):
        profile = profiles[pair.user_id]
        scores[i] = pair_score(profile, pairing.activity[pair.row])
    return float(scores.mean())


def retrieval_accuracy(
    profiles: ProfileSet, pairing: ActivityPairing, *, top_k: int = 1
) -> float:
    """Fraction of pairs whose true post ranks in the top_k by cosine.

    The candidate list is the true post plus the pair's distractor pool,
    sorted by similarity descending.  Equal-similarity distractors rank
    above the true post, so reported accuracy never benefits from ties.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    if not pairing.pairs:
        raise ValueError("pairing has no pairs to score")
    _check_dims(profiles, pairing)
    if top_k > 1 and all(p.pool_rows.size == 0 for p in pairing.pairs):
        raise ValueError("top_k > 1 is meaningless with an empty distractor pool")
    hits = 0
    for pair in pairing.pairs:
        vec = profiles[pair.user_id].vector
        true_sim = _cosine_to_rows(vec, pairing.activity[pair.row : pair.row + 1])[0]
        pool_sims = _cosine_to_rows(vec, pairing.activity[pair.pool_rows])
        rank = 1 + int((pool_sims > true_sim).sum()) + int((pool_sims == true_sim).sum())
        if rank <= top_k:
            hits += 1
    return hits / len(pairing.pairs)


@dataclass(frozen=True)
class EvalRun:
    """One scored configuration: model tag, decay label, metric, score."""

    model: str
    decay: str
    metric: str
    score: float


@dataclass
class EvalMatrix:
    """A cross-model, cross-decay score table."""

    runs: list[EvalRun]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\r\n")
        writer.writerow(("model", "decay", "metric", "score"))
        for run in self.runs:
            writer.writerow((run.model, run.decay, run.metric, fmt_float(run.score)))
        return out.getvalue()


def assemble_matrix(runs: Iterable[EvalRun | tuple]) -> EvalMatrix:
    """Collect runs into a matrix, sorted by (model, decay, metric).

    Two runs with the same (model, decay, metric) key are a conflict and
    raise ValueError rather than silently overwriting a score.
    """
    normalized: list[EvalRun] = []
    for run in runs:
        if not isinstance(run, EvalRun):
            model, decay, metric, score = run
            run = EvalRun(str(model), str(decay), str(metric), float(score))
        normalized.append(run)
    seen: set[tuple[str, str, str]] = set()
    for run in normalized:
        key = (run.model, run.decay, run.metric)
        if key in seen:
            raise ValueError(f"duplicate run for model={key[0]} decay={key[1]} metric={key[2]}")
        seen.add(key)
    normalized.sort(key=lambda r: (r.model, r.decay, r.metric))
    return EvalMatrix(runs=normalized)
