"""Synthetic corpora with drifting interests, plus a hashing embedder.

The generator gives every user a latent unit interest vector that random
walks on the hypersphere: before each event it is slerped a fixed fraction
toward a fresh uniform random direction.  Event embeddings are the current
interest plus isotropic noise, renormalized.  Likes are drawn around the
final interest, so recency-aware profiles have an edge a static mean
cannot have.  Everything is reproducible from (seed, user index).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from .corpus import ActivityKind, ActivityRecord, TimelineEvent, UserTimeline
from .decay import AgeOrder, DecaySpec
from .evalharness import build_pairing, mean_activity_score, retrieval_accuracy
from .metrics import DtMode, pairwise_diversity
from .profiles import STATIC, profile_all_users
from .tensorio import EmbeddingMatrix, align

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_BASE_TIME = datetime(2024, 1, 1, tzinfo=timezone.utc)


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def hash_embed(text: str, dim: int) -> np.ndarray:
    """Order-free hashing embedder: tokens to signed buckets, unit norm.

    Each whitespace token is hashed with 64-bit FNV-1a; the hash picks a
    bucket (hash mod dim) and a sign (top bit).  The summed vector is
    L2-normalized.  Empty text, or contributions cancelling to zero,
    yields the first basis vector so the result is always unit norm.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for token in text.split():
        h = _fnv1a64(token.encode("utf-8"))
        sign = -1.0 if h >> 63 else 1.0
        vec[h % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        basis = np.zeros(dim, dtype=np.float64)
        basis[0] = 1.0
        return basis
    return vec / norm


@dataclass(frozen=True)
class DriftParams:
    """Knobs for the drifting-interest generator."""

    n_users: int = 200
    events_per_user: int = 50
    dim: int = 64
    drift_rate: float = 0.15
    noise: float = 0.1
    likes_per_user: int = 5
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.events_per_user < 1:
            raise ValueError(f"events_per_user must be >= 1, got {self.events_per_user}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 0.0 <= self.drift_rate <= 1.0:
            raise ValueError(f"drift_rate must be in [0, 1], got {self.drift_rate}")
        if self.noise < 0.0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if self.likes_per_user < 0:
            raise ValueError(f"likes_per_user must be >= 0, got {self.likes_per_user}")


@dataclass
class DriftCorpus:
    """Generator output: corpus, aligned embeddings, and latent interests."""

    params: DriftParams
    timelines: dict[str, UserTimeline]
    timeline_matrix: EmbeddingMatrix
    records: list[ActivityRecord]
    activity_matrix: EmbeddingMatrix
    trajectories: dict[str, np.ndarray] = field(repr=False)


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / norm


def _slerp(u: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """Spherical interpolation from unit u toward unit v by fraction t."""
    if t == 0.0:
        return u.copy()
    if t == 1.0:
        return v.copy()
    dot = float(np.clip(u.dot(v), -1.0, 1.0))
    omega = float(np.arccos(dot))
    sin_omega = float(np.sin(omega))
    if sin_omega < 1e-12:
        # parallel or antiparallel targets give no usable arc
        return u.copy()
    w = (np.sin((1.0 - t) * omega) * u + np.sin(t * omega) * v) / sin_omega
    return _unit(w)


def _token_text(rng: np.random.Generator, n_tokens: int = 6) -> str:
    draws = rng.integers(0, 65536, size=n_tokens)
    return " ".join(f"w{int(d):05d}" for d in draws)


def generate_drifting_corpus(params: DriftParams) -> DriftCorpus:
    """Generate timelines, likes, and their embeddings for all users.

    Every event embedding is unit norm.  Events are hourly; the likes of a
    user follow the final event.  Each user's random stream is seeded with
    (params.seed, user index), so any subset of users is reproducible.
    """
    width = max(4, len(str(params.n_users - 1)))
    timelines: dict[str, UserTimeline] = {}
    trajectories: dict[str, np.ndarray] = {}
    timeline_rows: list[np.ndarray] = []
    records: list[ActivityRecord] = []
    activity_rows: list[np.ndarray] = []
    for index in range(params.n_users):
        user_id = f"u{index:0{width}d}"
        rng = np.random.default_rng(np.random.SeedSequence((params.seed, index)))
        interest = _unit(rng.standard_normal(params.dim))
        events: list[TimelineEvent] = []
        traj = np.empty((params.events_per_user, params.dim), dtype=np.float64)
        bio = f"synthetic user {user_id}"
        for t in range(params.events_per_user):
            if t > 0:
                target = _unit(rng.standard_normal(params.dim))
                interest = _slerp(interest, target, params.drift_rate)
            traj[t] = interest
            emb = interest + params.noise * rng.standard_normal(params.dim)
            timeline_rows.append(_unit(emb))
            events.append(
                TimelineEvent(
                    user_id=user_id,
                    timestamp=_BASE_TIME + timedelta(hours=t),
                    bio=bio,
                    text=_token_text(rng),
                )
            )
        timelines[user_id] = UserTimeline(user_id, tuple(events))
        trajectories[user_id] = traj
        final_interest = interest
        for j in range(params.likes_per_user):
            emb = final_interest + params.noise * rng.standard_normal(params.dim)
            activity_rows.append(_unit(emb))
            records.append(
                ActivityRecord(
                    user_id=user_id,
                    timestamp=_BASE_TIME
                    + timedelta(hours=params.events_per_user + j),
                    kind=ActivityKind.LIKE,
                    text=_token_text(rng),
                )
            )
    timeline_matrix = EmbeddingMatrix(np.stack(timeline_rows))
    if activity_rows:
        activity_matrix = EmbeddingMatrix(np.stack(activity_rows))
    else:
        activity_matrix = EmbeddingMatrix(np.empty((0, params.dim), dtype=np.float64))
    return DriftCorpus(
        params=params,
        timelines=timelines,
        timeline_matrix=timeline_matrix,
        records=records,
        activity_matrix=activity_matrix,
        trajectories=trajectories,
    )


@dataclass
class DriftRow:
    """Scores for one profile configuration on the synthetic benchmark."""

    decay: str
    accuracy: float
    diversity: float
    mean_sigmoid: float


@dataclass
class DriftReport:
    """Drift experiment scores for the static baseline and each decay."""

    params: DriftParams
    pool_size: int
    top_k: int
    eval_seed: int
    static: DriftRow
    dynamic: list[DriftRow]

    def to_dict(self) -> dict:
        def row(r: DriftRow) -> dict:
            return {
                "decay": r.decay,
                "accuracy": r.accuracy,
                "diversity": r.diversity,
                "mean_sigmoid": r.mean_sigmoid,
                "accuracy_delta": r.accuracy - self.static.accuracy,
            }

        return {
            "params": asdict(self.params),
            "pool_size": self.pool_size,
            "top_k": self.top_k,
            "eval_seed": self.eval_seed,
            "static": row(self.static),
            "dynamic": [row(r) for r in self.dynamic],
        }


def run_drift_experiment(
    params: DriftParams,
    specs: list[DecaySpec],
    *,
    pool_size: int = 99,
    top_k: int = 1,
    eval_seed: int | None = None,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
    dt_mode: DtMode | str = DtMode.MEDIAN,
) -> DriftReport:
    """Score static and dynamic profiles on one generated corpus.

    All profile sets are evaluated against the same pairing (same pools,
    same seed), so score differences come only from the profiles.
    """
    if eval_seed is None:
        eval_seed = params.seed
    corpus = generate_drifting_corpus(params)
    aligned = align(corpus.timelines, corpus.timeline_matrix)
    static_set = profile_all_users(
        aligned, STATIC, model="synthetic", age_order=age_order, dt_mode=dt_mode
    )
    pairing = build_pairing(
        static_set,
        corpus.records,
        corpus.activity_matrix,
        pool_size=pool_size,
        seed=eval_seed,
    )

    def score(profile_set, label: str) -> DriftRow:
        return DriftRow(
            decay=label,
            accuracy=retrieval_accuracy(profile_set, pairing, top_k=top_k),
            diversity=pairwise_diversity(profile_set.to_matrix()).diversity,
            mean_sigmoid=mean_activity_score(profile_set, pairing),
        )

    static_row = score(static_set, STATIC)
    dynamic_rows = []
    for spec in specs:
        dyn = profile_all_users(
            aligned, spec, model="synthetic", age_order=age_order, dt_mode=dt_mode
        )
        dynamic_rows.append(score(dyn, spec.label()))
    return DriftReport(
        params=params,
        pool_size=pool_size,
        top_k=top_k,
        eval_seed=eval_seed,
        static=static_row,
        dynamic=dynamic_rows,
    )
