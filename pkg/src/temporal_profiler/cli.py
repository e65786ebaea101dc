"""Command line interface.

Every command prints one JSON report to stdout that embeds the effective
configuration, so a run can be reproduced from its own output.  All float
text is fixed at 12 significant digits; repeated runs with equal inputs
produce byte-identical files and stdout.

Exit codes: 0 success, 2 usage or data format errors, 1 internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import product

from ._fmt import canonical_json, fmt_float
from .corpus import (
    CorpusFormatError,
    dedupe_and_sort,
    read_activity_jsonl,
    read_timeline_csv,
    write_activity_jsonl,
    write_corpus_csv,
)
from .decay import (
    DEFAULT_SIM_FLOOR,
    AgeOrder,
    DecayKind,
    DecaySpec,
    DecayVariant,
    decay_curve,
)
from .evalharness import assemble_matrix, build_pairing, mean_activity_score, retrieval_accuracy
from .metrics import DtMode, pairwise_diversity
from .profiles import STATIC, ProfileSet, default_max_workers, profile_all_users
from .synth import DriftParams, generate_drifting_corpus, run_drift_experiment
from .tensorio import TensorFormatError, align, read_matrix, write_matrix

_ALL_KINDS = [k.value for k in DecayKind]
_ALL_VARIANTS = [v.value for v in DecayVariant]


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _parse_list(raw: str, allowed: list[str], what: str) -> list[str]:
    if raw == "all":
        return list(allowed)
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ValueError(f"no {what} given in {raw!r}")
    for item in items:
        if item not in allowed:
            raise ValueError(f"unknown {what} {item!r}, expected one of {allowed}")
    return items


def _parse_floats(raw: str, what: str) -> list[float]:
    try:
        values = [float(item) for item in raw.split(",") if item.strip()]
    except ValueError:
        raise ValueError(f"bad {what} list {raw!r}") from None
    if not values:
        raise ValueError(f"no {what} given in {raw!r}")
    return values


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit(report: dict, out_path=None) -> dict:
    if out_path:
        _write_text(out_path, canonical_json(report) + "\n")
    return report


def _cmd_ingest(args: argparse.Namespace) -> dict:
    events = []
    skipped = 0
    for path in args.timeline:
        parsed, report = read_timeline_csv(path)
        events.extend(parsed)
        skipped += report.n_skipped
    timelines = dedupe_and_sort(events)
    kept = sum(len(t) for t in timelines.values())
    write_corpus_csv(timelines, args.out)
    return {
        "command": "ingest",
        "config": _config(args),
        "n_users": len(timelines),
        "n_events": kept,
        "n_skipped": skipped,
        "n_duplicates_removed": len(events) - kept,
    }


def _decay_from_args(args: argparse.Namespace) -> DecaySpec | str:
    if args.kind == STATIC:
        return STATIC
    return DecaySpec(
        kind=args.kind, variant=args.variant, k=args.k, sim_floor=args.sim_floor
    )


def _cmd_profiles(args: argparse.Namespace) -> dict:
    events, parse_report = read_timeline_csv(args.corpus)
    timelines = dedupe_and_sort(events)
    matrix = read_matrix(args.embeddings)
    aligned = align(timelines, matrix)
    decay = _decay_from_args(args)
    profile_set = profile_all_users(
        aligned,
        decay,
        model=args.model,
        age_order=args.age_order,
        dt_mode=args.dt_units,
        max_workers=default_max_workers(),
    )
    profile_set.save(args.out, dtype=args.dtype)
    return {
        "command": "profiles",
        "config": _config(args),
        "n_users": len(profile_set),
        "n_events": sum(len(t) for t in timelines.values()),
        "n_skipped": parse_report.n_skipped,
        "dim": profile_set.dim,
        "sidecar": str(args.out) + ".json",
    }


def _cmd_decay_table(args: argparse.Namespace) -> dict:
    kinds = _parse_list(args.kind, _ALL_KINDS, "decay kind")
    ks = _parse_floats(args.k, "k")
    for k in ks:
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
    curves = {
        kind: [decay_curve(kind, k, args.steps) for k in ks] for kind in kinds
    }
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    weight_cols = ["weight"] if len(ks) == 1 else [f"weight_k{k:g}" for k in ks]
    header = (["kind"] if len(kinds) > 1 else []) + ["t"] + weight_cols
    writer.writerow(header)
    for kind in kinds:
        for i in range(args.steps):
            t = curves[kind][0][i][0]
            weights = [fmt_float(curve[i][1]) for curve in curves[kind]]
            row = ([kind] if len(kinds) > 1 else []) + [t] + weights
            writer.writerow(row)
    _write_text(args.out, out.getvalue())
    return {
        "command": "decay-table",
        "config": _config(args),
        "kinds": kinds,
        "k_values": ks,
        "steps": args.steps,
    }


def _cmd_diversity(args: argparse.Namespace) -> dict:
    matrix = read_matrix(args.profiles)
    result = pairwise_diversity(matrix.data, seed=args.seed)
    report = {
        "command": "diversity",
        "config": _config(args),
        "definition": "1 - mean pairwise cosine over unordered distinct pairs",
        "n_profiles": result.n_profiles,
        "n_pairs": result.n_pairs,
        "diversity": result.diversity,
        "exact": result.exact,
    }
    return _emit(report, args.out)


def _cmd_evaluate(args: argparse.Namespace) -> dict:
    profile_set = ProfileSet.load(args.profiles)
    records, parse_report = read_activity_jsonl(args.activity)
    matrix = read_matrix(args.activity_embeddings)
    pairing = build_pairing(
        profile_set,
        records,
        matrix.data,
        pool_size=args.pool,
        seed=args.seed,
        kinds=tuple(args.kinds.split(",")),
    )
    if args.metric == "sigmoid":
        metric = "mean_sigmoid_cos"
        score = mean_activity_score(profile_set, pairing)
    else:
        metric = f"retrieval@{args.top_k}"
        score = retrieval_accuracy(profile_set, pairing, top_k=args.top_k)
    report = {
        "command": "evaluate",
        "config": _config(args),
        "metric": metric,
        "score": score,
        "n_pairs": len(pairing.pairs),
        "n_records": len(records),
        "n_skipped": parse_report.n_skipped,
        "pool_size": args.pool,
        "seed": args.seed,
    }
    return _emit(report, args.out)


def _cmd_matrix(args: argparse.Namespace) -> dict:
    with open(args.runs, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError("runs manifest must be a JSON list of run objects")
    runs = [
        (entry["model"], entry["decay"], entry["metric"], entry["score"])
        for entry in raw
    ]
    table = assemble_matrix(runs)
    _write_text(args.out, table.to_csv())
    return {
        "command": "matrix",
        "config": _config(args),
        "n_runs": len(table.runs),
    }


def _cmd_synth_generate(args: argparse.Namespace) -> dict:
    import os

    params = DriftParams(
        n_users=args.users,
        events_per_user=args.events,
        dim=args.dim,
        drift_rate=args.drift_rate,
        noise=args.noise,
        likes_per_user=args.likes,
        seed=args.seed,
    )
    corpus = generate_drifting_corpus(params)
    os.makedirs(args.out_dir, exist_ok=True)
    paths = {
        "corpus": os.path.join(args.out_dir, "corpus.csv"),
        "timeline_embeddings": os.path.join(args.out_dir, "timeline_embeddings.npy"),
        "activity": os.path.join(args.out_dir, "activity.jsonl"),
        "activity_embeddings": os.path.join(args.out_dir, "activity_embeddings.npy"),
        "manifest": os.path.join(args.out_dir, "manifest.json"),
    }
    write_corpus_csv(corpus.timelines, paths["corpus"])
    write_matrix(corpus.timeline_matrix, paths["timeline_embeddings"])
    write_activity_jsonl(corpus.records, paths["activity"])
    write_matrix(corpus.activity_matrix, paths["activity_embeddings"])
    report = {
        "command": "synth-generate",
        "config": _config(args),
        "files": paths,
        "n_users": params.n_users,
        "n_events": corpus.timeline_matrix.rows,
        "n_likes": corpus.activity_matrix.rows,
        "dim": params.dim,
    }
    _write_text(paths["manifest"], canonical_json(report) + "\n")
    return report


def _cmd_drift_experiment(args: argparse.Namespace) -> dict:
    params = DriftParams(
        n_users=args.users,
        events_per_user=args.events,
        dim=args.dim,
        drift_rate=args.drift_rate,
        noise=args.noise,
        likes_per_user=args.likes,
        seed=args.seed,
    )
    kinds = _parse_list(args.kind, _ALL_KINDS, "decay kind")
    variants = _parse_list(args.variant, _ALL_VARIANTS, "variant")
    ks = _parse_floats(args.k, "k")
    specs = [
        DecaySpec(kind=kind, variant=variant, k=k, sim_floor=args.sim_floor)
        for kind, variant, k in product(kinds, variants, ks)
    ]
    result = run_drift_experiment(
        params,
        specs,
        pool_size=args.pool,
        top_k=args.top_k,
        eval_seed=args.eval_seed,
        age_order=args.age_order,
        dt_mode=args.dt_units,
    )
    report = {
        "command": "drift-experiment",
        "config": _config(args),
        **result.to_dict(),
    }
    return _emit(report, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="temporal-profiler",
        description="Time-decay weighted user profile embeddings and their evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="merge raw timeline CSVs into a canonical corpus")
    p.add_argument("--timeline", nargs="+", required=True, help="raw timeline CSV paths")
    p.add_argument("--out", required=True, help="canonical corpus CSV to write")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("profiles", help="build profile embeddings from a corpus")
    p.add_argument("--corpus", required=True, help="canonical corpus CSV")
    p.add_argument("--embeddings", required=True, help="event embedding matrix (npy)")
    p.add_argument(
        "--kind",
        required=True,
        choices=_ALL_KINDS + [STATIC],
        help="decay kind, or static for the mean baseline",
    )
    p.add_argument("--variant", default="basic", choices=_ALL_VARIANTS)
    p.add_argument("--k", type=float, default=0.1, help="decay rate, >= 0")
    p.add_argument("--sim-floor", type=float, default=DEFAULT_SIM_FLOOR)
    p.add_argument(
        "--age-order",
        default=AgeOrder.NEWEST_FIRST.value,
        choices=[o.value for o in AgeOrder],
        help="which end of the timeline gets age 1",
    )
    p.add_argument(
        "--dt-units",
        default=DtMode.MEDIAN.value,
        choices=[m.value for m in DtMode],
        help="cos_time time deltas: raw seconds or median-normalized",
    )
    p.add_argument("--model", default="unspecified", help="embedding model tag for the sidecar")
    p.add_argument("--dtype", default="f32", choices=["f32", "f64"])
    p.add_argument("--out", required=True, help="profile matrix (npy) to write")
    p.set_defaults(func=_cmd_profiles)

    p = sub.add_parser("decay-table", help="tabulate decay curves as CSV")
    p.add_argument("--kind", default="all", help="decay kind, comma list, or all")
    p.add_argument("--k", default="0.1", help="decay rate or comma list")
    p.add_argument("--steps", type=int, default=100, help="tabulate t = 1..steps")
    p.add_argument("--out", required=True, help="CSV path to write")
    p.set_defaults(func=_cmd_decay_table)

    p = sub.add_parser("diversity", help="pairwise diversity of a profile matrix")
    p.add_argument("--profiles", required=True, help="profile matrix (npy)")
    p.add_argument("--seed", type=int, default=0, help="seed for the subsampled path")
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("evaluate", help="score profiles against activity embeddings")
    p.add_argument("--profiles", required=True, help="profile matrix (npy) with sidecar")
    p.add_argument("--activity", required=True, help="activity JSONL")
    p.add_argument("--activity-embeddings", required=True, help="activity matrix (npy)")
    p.add_argument("--metric", default="retrieval", choices=["sigmoid", "retrieval"])
    p.add_argument("--k", "--top-k", dest="top_k", type=int, default=1, help="retrieval cutoff")
    p.add_argument("--pool", type=int, default=99, help="distractors sampled per pair")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kinds", default="like", help="activity kinds to evaluate, comma list")
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("matrix", help="assemble scored runs into a CSV table")
    p.add_argument("--runs", required=True, help="JSON list of model/decay/metric/score")
    p.add_argument("--out", required=True, help="CSV path to write")
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("synth-generate", help="write a synthetic drifting corpus")
    _add_drift_params(p)
    p.add_argument("--out-dir", required=True, help="directory for the generated files")
    p.set_defaults(func=_cmd_synth_generate)

    p = sub.add_parser("drift-experiment", help="static vs dynamic on synthetic drift")
    _add_drift_params(p)
    p.add_argument("--kind", default="gaussian", help="decay kind, comma list, or all")
    p.add_argument("--variant", default="basic", help="variant, comma list, or all")
    p.add_argument("--k", default="0.1", help="decay rate or comma list")
    p.add_argument("--sim-floor", type=float, default=DEFAULT_SIM_FLOOR)
    p.add_argument("--pool", type=int, default=99)
    p.add_argument("--top-k", type=int, default=1)
    p.add_argument("--eval-seed", type=int, default=None, help="pool sampling seed")
    p.add_argument(
        "--age-order",
        default=AgeOrder.NEWEST_FIRST.value,
        choices=[o.value for o in AgeOrder],
    )
    p.add_argument(
        "--dt-units", default=DtMode.MEDIAN.value, choices=[m.value for m in DtMode]
    )
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.set_defaults(func=_cmd_drift_experiment)

    for sub_parser in sub.choices.values():
        sub_parser.add_argument(
            "--config",
            default=None,
            help="JSON file of flag defaults; explicit flags win",
        )

    return parser


def _add_drift_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--events", type=int, default=50)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--drift-rate", type=float, default=0.15)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--likes", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)


def _apply_config_defaults(argv: list[str]) -> list[str]:
    """Inject defaults from a --config JSON file; explicit flags win.

    The config file is a flat object of flag names (without dashes) to
    values.  A flag already present in argv is never overridden.
    """
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("config file must hold a JSON object of flag defaults")
    injected: list[str] = []
    for key, value in config.items():
        flag = "--" + str(key).replace("_", "-").lstrip("-")
        if flag == "--config":
            continue
        if any(tok == flag or tok.startswith(flag + "=") for tok in argv):
            continue
        if isinstance(value, list):
            injected.append(flag)
            injected.extend(str(v) for v in value)
        else:
            injected.extend([flag, str(value)])
    return argv[:1] + injected + argv[1:]


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _apply_config_defaults(list(argv))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except (CorpusFormatError, TensorFormatError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    print(canonical_json(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
