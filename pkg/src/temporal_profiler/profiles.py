"""User profile embeddings: decay-weighted dynamic and static mean baseline.

A dynamic profile is the weighted sum of a user's event embeddings under a
decay schedule.  The static baseline is the plain mean of the same rows, so
with rate k = 0 under the basic variant every weight is 1 and the dynamic
profile equals the static profile scaled by the event count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics
from ._fmt import canonical_json
from .corpus import UserTimeline
from .decay import AgeOrder, DecaySpec, schedule_for
from .metrics import DtMode
from .tensorio import AlignedCorpus, EmbeddingMatrix, read_matrix, write_matrix

STATIC = "static"
_DTYPES = {"f32": np.float32, "f64": np.float64}


@dataclass
class ProfileEmbedding:
    """One user's profile vector plus how it was built."""

    user_id: str
    vector: np.ndarray
    decay: DecaySpec | str
    n_events: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.vector, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"vector must be 1-D and non-empty, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("vector values must be finite")
        if isinstance(self.decay, str) and self.decay != STATIC:
            raise ValueError(f"decay must be a DecaySpec or {STATIC!r}, got {self.decay!r}")
        if self.n_events < 1:
            raise ValueError(f"n_events must be >= 1, got {self.n_events}")
        self.vector = arr

    @property
    def dim(self) -> int:
        return self.vector.size


@dataclass
class ProfileSet:
    """Profiles keyed by user, all built the same way at the same width."""

    profiles: dict[str, ProfileEmbedding]
    model: str
    decay: DecaySpec | str

    def __post_init__(self) -> None:
        dims = {p.dim for p in self.profiles.values()}
        if len(dims) > 1:
            raise ValueError(f"profiles have mixed dimensions {sorted(dims)}")
        for user_id, profile in self.profiles.items():
            if profile.user_id != user_id:
                raise ValueError(
                    f"key {user_id!r} does not match profile user {profile.user_id!r}"
                )

    def __len__(self) -> int:
        return len(self.profiles)

    def __getitem__(self, user_id: str) -> ProfileEmbedding:
        return self.profiles[user_id]

    def __contains__(self, user_id: str) -> bool:
        return user_id in self.profiles

    @property
    def dim(self) -> int:
        for profile in self.profiles.values():
            return profile.dim
        return 0

    def user_ids(self) -> list[str]:
        return sorted(self.profiles)

    def to_matrix(self) -> np.ndarray:
        """Stack profile vectors in ascending user_id order, float64."""
        if not self.profiles:
            raise ValueError("profile set is empty")
        return np.stack([self.profiles[u].vector for u in self.user_ids()])

    def save(self, path, *, dtype: str = "f32") -> None:
        """Write vectors as an npy matrix plus a `<path>.json` sidecar."""
        if dtype not in _DTYPES:
            raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {dtype!r}")
        matrix = EmbeddingMatrix(self.to_matrix().astype(_DTYPES[dtype]))
        write_matrix(matrix, path)
        if isinstance(self.decay, DecaySpec):
            meta = {
                "kind": self.decay.kind.value,
                "variant": self.decay.variant.value,
                "k": self.decay.k,
                "sim_floor": self.decay.sim_floor,
            }
        else:
            meta = {"kind": STATIC, "variant": None, "k": None, "sim_floor": None}
        sidecar = {"users": self.user_ids(), "model": self.model, **meta}
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            fh.write(canonical_json(sidecar) + "\n")

    @classmethod
    def load(cls, path) -> "ProfileSet":
        """Read a matrix and its sidecar back into a profile set."""
        matrix = read_matrix(path)
        with open(str(path) + ".json", "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        users = sidecar["users"]
        if len(users) != matrix.rows:
            raise ValueError(
                f"sidecar lists {len(users)} users but matrix has {matrix.rows} rows"
            )
        if sidecar["kind"] == STATIC:
            decay: DecaySpec | str = STATIC
        else:
            decay = DecaySpec(
                kind=sidecar["kind"],
                variant=sidecar["variant"],
                k=float(sidecar["k"]),
                sim_floor=float(sidecar["sim_floor"]),
            )
        profiles = {
            user: ProfileEmbedding(
                user_id=user,
                vector=matrix.data[i].astype(np.float64),
                decay=decay,
                n_events=1,
            )
            for i, user in enumerate(users)
        }
        return cls(profiles=profiles, model=sidecar["model"], decay=decay)


def dynamic_profile(
    timeline: UserTimeline,
    rows,
    spec: DecaySpec,
    *,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
    dt_mode: DtMode | str = DtMode.MEDIAN,
) -> ProfileEmbedding:
    """Weighted sum of a user's event embeddings under a decay spec.

    rows must hold one embedding per timeline event in timeline order.
    The cosine and cos_time variants derive consecutive similarities and
    time deltas from the same rows and timeline.
    """
    arr = np.asarray(getattr(rows, "data", rows), dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"rows must be 2-D, got shape {arr.shape}")
    n = len(timeline)
    if n == 0:
        raise ValueError(f"user {timeline.user_id!r} has an empty timeline")
    if arr.shape[0] != n:
        raise ValueError(
            f"user {timeline.user_id!r} has {n} events but {arr.shape[0]} rows"
        )
    sims = metrics.consecutive_similarities(arr)
    deltas = metrics.time_differences(timeline, dt_mode)
    schedule = schedule_for(spec, n, sims, deltas, age_order=age_order)
    # multiply-then-sum keeps the reduction order identical to rows.sum(0),
    # so k=0 basic weights reproduce the static sum bit for bit
    vector = (schedule.weights[:, None] * arr).sum(axis=0)
    return ProfileEmbedding(
        user_id=timeline.user_id, vector=vector, decay=spec, n_events=n
    )


def static_profile(rows, *, user_id: str = "") -> ProfileEmbedding:
    """Mean of the event embeddings, the order-free baseline."""
    arr = np.asarray(getattr(rows, "data", rows), dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"rows must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("static profile needs at least one row")
    vector = arr.sum(axis=0) / arr.shape[0]
    return ProfileEmbedding(
        user_id=user_id, vector=vector, decay=STATIC, n_events=arr.shape[0]
    )


def normalize(profile: ProfileEmbedding) -> ProfileEmbedding:
    """Scale to unit norm, preserving direction.

    Cosine metrics downstream are unaffected by this, so it is never
    applied implicitly.  A vector with norm below 1e-12 has no direction
    to preserve and is an error.
    """
    norm = float(np.linalg.norm(profile.vector))
    if norm < metrics.DEGENERATE_NORM:
        raise ValueError(f"cannot normalize degenerate profile for user {profile.user_id!r}")
    return ProfileEmbedding(
        user_id=profile.user_id,
        vector=profile.vector / norm,
        decay=profile.decay,
        n_events=profile.n_events,
    )


def _profile_one(
    aligned: AlignedCorpus,
    user_id: str,
    decay: DecaySpec | str,
    age_order: AgeOrder | str,
    dt_mode: DtMode | str,
) -> ProfileEmbedding:
    rows = aligned.rows_for(user_id)
    if isinstance(decay, DecaySpec):
        return dynamic_profile(
            aligned.timelines[user_id], rows, decay, age_order=age_order, dt_mode=dt_mode
        )
    return static_profile(rows, user_id=user_id)


def default_max_workers() -> int | None:
    """Read the TEMPORAL_PROFILER_THREADS cap; unset or empty means serial."""
    raw = os.environ.get("TEMPORAL_PROFILER_THREADS", "").strip()
    if not raw:
        return None
    workers = int(raw)
    if workers < 0:
        raise ValueError(f"TEMPORAL_PROFILER_THREADS must be >= 0, got {workers}")
    return workers or (os.cpu_count() or 1)


def profile_all_users(
    aligned: AlignedCorpus,
    decay: DecaySpec | str,
    *,
    model: str = "unspecified",
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
    dt_mode: DtMode | str = DtMode.MEDIAN,
    max_workers: int | None = None,
) -> ProfileSet:
    """Profile every user in the corpus, in canonical user order.

    decay is a DecaySpec for dynamic profiles or the string "static" for
    the baseline.  Results are identical whatever max_workers is; threads
    only speed up the loop.
    """
    if isinstance(decay, str) and decay != STATIC:
        raise ValueError(f"decay must be a DecaySpec or {STATIC!r}, got {decay!r}")
    users = sorted(aligned.timelines)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(
                pool.map(
                    lambda u: _profile_one(aligned, u, decay, age_order, dt_mode),
                    users,
                )
            )
    else:
        results = [_profile_one(aligned, u, decay, age_order, dt_mode) for u in users]
    return ProfileSet(
        profiles={p.user_id: p for p in results}, model=model, decay=decay
    )
