"""Per-event weight schedules: six decay families in three variants.

Ages are positional.  For a timeline of n events in ascending timestamp
order, the default orientation assigns age a=1 to the most recent event and
a=n to the oldest, so recent documents always carry the largest weight.
The six families map an age a and rate k >= 0 to a weight:

    exponential          exp(-k * a)
    inverse_linear       1 / (1 + k * a)
    inverse_square_root  1 / sqrt(1 + k * a)
    hyperbolic           1 / (1 + k * a^2)
    logarithmic          1 / ln(1 + k * a + 1)
    gaussian             exp(-k * a^2)

Variants reweight the same family.  "cosine" multiplies each weight from
the second chronological event onward by the clamped cosine similarity to
the previous event.  "cos_time" substitutes a per-event rate
k' = k * dt / clamp(dv) built from the gap in time and the similarity to
the previous event; the first chronological event keeps the plain rate.
All weights are computed in float64 and floored at the smallest positive
normal float64, so schedules stay strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

MIN_WEIGHT = float(np.finfo(np.float64).tiny)
DEFAULT_SIM_FLOOR = 1e-6


class DecayKind(str, Enum):
    EXPONENTIAL = "exponential"
    INVERSE_LINEAR = "inverse_linear"
    INVERSE_SQUARE_ROOT = "inverse_square_root"
    HYPERBOLIC = "hyperbolic"
    LOGARITHMIC = "logarithmic"
    GAUSSIAN = "gaussian"


class DecayVariant(str, Enum):
    BASIC = "basic"
    COSINE = "cosine"
    COS_TIME = "cos_time"


class AgeOrder(str, Enum):
    NEWEST_FIRST = "newest-first"
    OLDEST_FIRST = "oldest-first"


@dataclass(frozen=True)
class DecaySpec:
    """A fully specified decay configuration."""

    kind: DecayKind
    variant: DecayVariant
    k: float
    sim_floor: float = DEFAULT_SIM_FLOOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DecayKind(self.kind))
        object.__setattr__(self, "variant", DecayVariant(self.variant))
        if not np.isfinite(self.k) or self.k < 0:
            raise ValueError(f"k must be finite and >= 0, got {self.k}")
        if not 0 < self.sim_floor <= 1:
            raise ValueError(f"sim_floor must be in (0, 1], got {self.sim_floor}")

    def label(self) -> str:
        return f"{self.kind.value}/{self.variant.value}/k={self.k:g}"


@dataclass
class WeightSchedule:
    """Positive finite per-event weights, one per timeline event."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.weights, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"weights must be 1-D, got shape {arr.shape}")
        if arr.size and (not np.isfinite(arr).all() or (arr <= 0).any()):
            raise ValueError("weights must be finite and strictly positive")
        self.weights = arr

    def __len__(self) -> int:
        return len(self.weights)


def age_indices(n: int, age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST) -> np.ndarray:
    """Ages for n events in ascending timestamp order.

    newest-first yields [n, n-1, ..., 1] so the latest event has age 1;
    oldest-first yields [1, 2, ..., n].
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if AgeOrder(age_order) is AgeOrder.NEWEST_FIRST:
        return np.arange(n, 0, -1, dtype=np.int64)
    return np.arange(1, n + 1, dtype=np.int64)


def _evaluate(kind: DecayKind, k, ages: np.ndarray) -> np.ndarray:
    """Evaluate one decay family at the given ages.

    k may be a scalar or a per-age array; both run through the same
    expressions so rate substitution cannot drift from the plain form.
    Results below the smallest positive normal float64 are floored to it.
    """
    a = np.asarray(ages, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if kind is DecayKind.EXPONENTIAL:
        out = np.exp(-(k * a))
    elif kind is DecayKind.INVERSE_LINEAR:
        out = 1.0 / (1.0 + k * a)
    elif kind is DecayKind.INVERSE_SQUARE_ROOT:
        out = 1.0 / np.sqrt(1.0 + k * a)
    elif kind is DecayKind.HYPERBOLIC:
        out = 1.0 / (1.0 + k * (a * a))
    elif kind is DecayKind.LOGARITHMIC:
        out = 1.0 / np.log(1.0 + k * a + 1.0)
    elif kind is DecayKind.GAUSSIAN:
        out = np.exp(-(k * (a * a)))
    else:
        raise ValueError(f"unknown decay kind {kind!r}")
    return np.maximum(out, MIN_WEIGHT)


def _clamped(values, floor: float) -> np.ndarray:
    return np.maximum(np.asarray(values, dtype=np.float64), floor)


def _as_values(obj) -> np.ndarray:
    return np.asarray(getattr(obj, "values", obj), dtype=np.float64)


def basic_weights(
    kind: DecayKind | str,
    k: float,
    n: int,
    *,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
) -> WeightSchedule:
    """Weights w_i = f(a_i) for a timeline of n events."""
    kind = DecayKind(kind)
    if not np.isfinite(k) or k < 0:
        raise ValueError(f"k must be finite and >= 0, got {k}")
    ages = age_indices(n, age_order)
    return WeightSchedule(_evaluate(kind, k, ages))


def cosine_weights(
    kind: DecayKind | str,
    k: float,
    sims,
    *,
    sim_floor: float = DEFAULT_SIM_FLOOR,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
) -> WeightSchedule:
    """Basic weights scaled by clamped similarity to the previous event.

    sims holds the n-1 cosine similarities of chronologically consecutive
    events.  The first chronological event has no predecessor and keeps its
    basic weight.
    """
    kind = DecayKind(kind)
    if not np.isfinite(k) or k < 0:
        raise ValueError(f"k must be finite and >= 0, got {k}")
    sims_arr = _as_values(sims)
    n = sims_arr.size + 1
    base = _evaluate(kind, k, age_indices(n, age_order))
    weights = base.copy()
    if n > 1:
        weights[1:] = np.maximum(base[1:] * _clamped(sims_arr, sim_floor), MIN_WEIGHT)
    return WeightSchedule(weights)


def cos_time_weights(
    kind: DecayKind | str,
    k: float,
    sims,
    deltas,
    *,
    sim_floor: float = DEFAULT_SIM_FLOOR,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
) -> WeightSchedule:
    """Weights with the per-event rate k' = k * dt / clamp(dv).

    sims and deltas both describe consecutive event pairs and must have the
    same length n-1.  The first chronological event keeps the plain rate k.
    Negative time deltas are rejected; a zero delta collapses the rate to 0
    for that event, which the weight floor keeps strictly positive.
    """
    kind = DecayKind(kind)
    if not np.isfinite(k) or k < 0:
        raise ValueError(f"k must be finite and >= 0, got {k}")
    sims_arr = _as_values(sims)
    dt_arr = _as_values(deltas)
    if sims_arr.shape != dt_arr.shape:
        raise ValueError(
            f"sims and deltas must have equal length, got {sims_arr.size} "
            f"and {dt_arr.size}"
        )
    if dt_arr.size and (dt_arr < 0).any():
        raise ValueError("time deltas must be >= 0")
    n = sims_arr.size + 1
    k_prime = np.empty(n, dtype=np.float64)
    k_prime[0] = k
    if n > 1:
        k_prime[1:] = k * dt_arr / _clamped(sims_arr, sim_floor)
    return WeightSchedule(_evaluate(kind, k_prime, age_indices(n, age_order)))


def schedule_for(
    spec: DecaySpec,
    n: int,
    sims=None,
    deltas=None,
    *,
    age_order: AgeOrder | str = AgeOrder.NEWEST_FIRST,
) -> WeightSchedule:
    """Dispatch to the variant named by spec for a timeline of n events."""
    if spec.variant is DecayVariant.BASIC:
        return basic_weights(spec.kind, spec.k, n, age_order=age_order)
    if sims is None:
        raise ValueError(f"variant {spec.variant.value} needs consecutive similarities")
    sims_arr = _as_values(sims)
    if sims_arr.size != n - 1:
        raise ValueError(
            f"expected {n - 1} consecutive similarities for {n} events, "
            f"got {sims_arr.size}"
        )
    if spec.variant is DecayVariant.COSINE:
        return cosine_weights(
            spec.kind, spec.k, sims_arr, sim_floor=spec.sim_floor, age_order=age_order
        )
    if deltas is None:
        raise ValueError("variant cos_time needs time deltas")
    return cos_time_weights(
        spec.kind,
        spec.k,
        sims_arr,
        deltas,
        sim_floor=spec.sim_floor,
        age_order=age_order,
    )


def decay_curve(
    kind: DecayKind | str, k: float, steps: int
) -> list[tuple[int, float]]:
    """Tabulate f(t) for t = 1..steps, the shape of one decay family."""
    kind = DecayKind(kind)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if not np.isfinite(k) or k < 0:
        raise ValueError(f"k must be finite and >= 0, got {k}")
    ts = np.arange(1, steps + 1, dtype=np.int64)
    values = _evaluate(kind, k, ts)
    return [(int(t), float(v)) for t, v in zip(ts, values)]
