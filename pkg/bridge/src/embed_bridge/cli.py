"""Command line entry point for the embedding exporter."""

from __future__ import annotations

import argparse
import json
import sys

from .corpus import CorpusError
from .export import (
    DEFAULT_BATCH,
    FIELDS,
    MODELS,
    EncoderUnavailableError,
    export_embeddings,
    load_encoder,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export-embeddings",
        description="Encode a corpus CSV with a sentence encoder into an npy matrix",
    )
    parser.add_argument("--corpus", required=True, help="canonical corpus CSV")
    parser.add_argument(
        "--model", required=True, choices=sorted(MODELS), help="encoder to use"
    )
    parser.add_argument(
        "--out", required=True, help="npy matrix to write; manifest lands at <out>.json"
    )
    parser.add_argument(
        "--batch", type=int, default=DEFAULT_BATCH, help="encoder batch size"
    )
    parser.add_argument(
        "--field",
        default="document",
        choices=list(FIELDS),
        help="encoder input: document = bio joined with text, text = bare text",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        encoder = load_encoder(args.model)
        manifest = export_embeddings(
            args.corpus,
            encoder,
            args.out,
            model=MODELS[args.model].tag,
            batch_size=args.batch,
            field=args.field,
        )
    except (CorpusError, EncoderUnavailableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # encoder misbehavior, row-count mismatch included
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    print(json.dumps(manifest.to_dict(), sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
