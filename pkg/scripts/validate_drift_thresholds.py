"""Brute-force validation of the drift experiment thresholds.

Recomputes the static vs dynamic comparison with naive scalar loops: no
vectorized profile math, no shared ranking code.  The printed margins are
the source of the pinned thresholds in tests/test_acceptance.py and the
README.  Run from the repository root:

    python3 scripts/validate_drift_thresholds.py
"""

from __future__ import annotations

import math

import numpy as np

from temporal_profiler.decay import DecaySpec
from temporal_profiler.evalharness import build_pairing
from temporal_profiler.profiles import STATIC, profile_all_users
from temporal_profiler.synth import DriftParams, generate_drifting_corpus
from temporal_profiler.tensorio import align

POOL_SIZE = 99
TOP_K = 1
SPEC = DecaySpec(kind="gaussian", variant="basic", k=0.1)


def naive_weights(kind: str, k: float, n: int) -> list[float]:
    tiny = 2.2250738585072014e-308
    out = []
    for pos in range(n):
        age = n - pos
        if kind == "gaussian":
            w = math.exp(-k * age * age)
        elif kind == "exponential":
            w = math.exp(-k * age)
        else:
            raise ValueError(kind)
        out.append(max(w, tiny))
    return out


def naive_profiles(corpus, kind: str | None, k: float) -> dict[str, list[float]]:
    """Scalar-loop profiles. kind None means the static mean."""
    profiles: dict[str, list[float]] = {}
    cursor = 0
    for user_id in sorted(corpus.timelines):
        n = len(corpus.timelines[user_id])
        rows = corpus.timeline_matrix.data[cursor : cursor + n]
        cursor += n
        dim = rows.shape[1]
        acc = [0.0] * dim
        weights = [1.0 / n] * n if kind is None else naive_weights(kind, k, n)
        for i in range(n):
            for j in range(dim):
                acc[j] += weights[i] * float(rows[i][j])
        profiles[user_id] = acc
    return profiles


def naive_cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return max(-1.0, min(1.0, dot / (na * nb)))


def naive_accuracy(profiles, pairing, top_k: int) -> float:
    hits = 0
    for pair in pairing.pairs:
        p = profiles[pair.user_id]
        true_sim = naive_cosine(p, pairing.activity[pair.row].tolist())
        ranked_above = 0
        for row in pair.pool_rows:
            sim = naive_cosine(p, pairing.activity[int(row)].tolist())
            if sim >= true_sim:
                ranked_above += 1
        if 1 + ranked_above <= top_k:
            hits += 1
    return hits / len(pairing.pairs)


def naive_diversity(profiles) -> float:
    users = sorted(profiles)
    unit = []
    for u in users:
        v = profiles[u]
        norm = math.sqrt(sum(x * x for x in v))
        unit.append([x / norm for x in v])
    total = 0.0
    count = 0
    for i in range(len(unit)):
        for j in range(i + 1, len(unit)):
            total += sum(a * b for a, b in zip(unit[i], unit[j]))
            count += 1
    return 1.0 - total / count


def run(drift_rate: float) -> dict:
    params = DriftParams(
        n_users=200,
        events_per_user=50,
        dim=64,
        drift_rate=drift_rate,
        noise=0.1,
        likes_per_user=5,
        seed=42,
    )
    corpus = generate_drifting_corpus(params)
    aligned = align(corpus.timelines, corpus.timeline_matrix)
    static_set = profile_all_users(aligned, STATIC)
    pairing = build_pairing(
        static_set,
        corpus.records,
        corpus.activity_matrix,
        pool_size=POOL_SIZE,
        seed=params.seed,
    )
    static = naive_profiles(corpus, None, 0.0)
    dynamic = naive_profiles(corpus, SPEC.kind.value, SPEC.k)
    return {
        "acc_static": naive_accuracy(static, pairing, TOP_K),
        "acc_dynamic": naive_accuracy(dynamic, pairing, TOP_K),
        "div_static": naive_diversity(static),
        "div_dynamic": naive_diversity(dynamic),
    }


def main() -> None:
    drifted = run(0.15)
    print("drift_rate=0.15 (seed 42, gaussian/basic/k=0.1, pool 99, top-1)")
    print("  accuracy  static=%.6f dynamic=%.6f margin=%+.6f"
          % (drifted["acc_static"], drifted["acc_dynamic"],
             drifted["acc_dynamic"] - drifted["acc_static"]))
    print("  diversity static=%.9f dynamic=%.9f delta=%+.9f"
          % (drifted["div_static"], drifted["div_dynamic"],
             drifted["div_dynamic"] - drifted["div_static"]))
    control = run(0.0)
    print("drift_rate=0 control")
    print("  accuracy  static=%.6f dynamic=%.6f |delta|=%.6f"
          % (control["acc_static"], control["acc_dynamic"],
             abs(control["acc_dynamic"] - control["acc_static"])))
    print()
    margin = drifted["acc_dynamic"] - drifted["acc_static"]
    div_delta = drifted["div_dynamic"] - drifted["div_static"]
    print("pinned accuracy threshold (margin * 0.8): %.6f" % (margin * 0.8))
    print("pinned diversity delta bound (delta * 1.2): %.9f" % (div_delta * 1.2))


if __name__ == "__main__":
    main()
