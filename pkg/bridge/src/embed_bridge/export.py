"""Encode corpus documents with a sentence encoder and write the matrix.

The output is an npy v1.0 file of little-endian float32 rows, row i being
the embedding of corpus row i, with a JSON manifest beside it.  numpy's
own writer emits the format, pinned to version 1.0; the profiling
pipeline reads the file back unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .corpus import document_text, read_corpus_csv

DEFAULT_BATCH = 256
FIELDS = ("document", "text")


class EncoderUnavailableError(Exception):
    """The requested encoder cannot be loaded in this environment."""


class EncoderOutputError(RuntimeError):
    """The encoder returned something other than one finite row per text."""


class Encoder(Protocol):
    """Anything that maps a batch of texts to one float row per text."""

    dim: int

    def encode(self, texts: Sequence[str], batch_size: int) -> np.ndarray: ...


@dataclass(frozen=True)
class ModelSpec:
    """One supported sentence encoder and its native output width."""

    tag: str
    hf_name: str
    dim: int
    trust_remote_code: bool = False


MODELS = {
    "minilm": ModelSpec("MiniLM", "sentence-transformers/all-MiniLM-L6-v2", 384),
    "distiluse": ModelSpec(
        "DistilUSE-multilingual",
        "sentence-transformers/distiluse-base-multilingual-cased-v2",
        512,
    ),
    "mpnet": ModelSpec("MPNet", "sentence-transformers/all-mpnet-base-v2", 768),
    "jina": ModelSpec(
        "Jina-v2-en",
        "jinaai/jina-embeddings-v2-base-en",
        768,
        trust_remote_code=True,
    ),
}


@dataclass(frozen=True)
class BridgeManifest:
    """What was exported; written as JSON beside the output matrix."""

    corpus: str
    model: str
    out: str
    batch_size: int
    rows: int

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.rows < 0:
            raise ValueError("rows must be >= 0")

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus,
            "model": self.model,
            "out": self.out,
            "batch_size": self.batch_size,
            "rows": self.rows,
        }


class SentenceTransformerEncoder:
    """Wrap a sentence-transformers model behind the Encoder protocol."""

    def __init__(self, model, dim: int):
        self.model = model
        self.dim = int(dim)

    def encode(self, texts: Sequence[str], batch_size: int) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float32)
        out = self.model.encode(
            list(texts),
            batch_size=batch_size,
            convert_to_numpy=True,
            show_progress_bar=False,
        )
        return np.asarray(out, dtype=np.float32)


def load_encoder(model: str) -> SentenceTransformerEncoder:
    """Load a supported encoder by its CLI name.

    Raises EncoderUnavailableError when the encoder toolchain is not
    installed or the weights cannot be retrieved, and ValueError for a
    name outside the registry.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}, expected one of {sorted(MODELS)}")
    spec = MODELS[model]
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise EncoderUnavailableError(
            f"model {spec.hf_name!r} needs the sentence-transformers package: {exc}"
        ) from exc
    try:
        loaded = SentenceTransformer(
            spec.hf_name, trust_remote_code=spec.trust_remote_code
        )
    except Exception as exc:
        raise EncoderUnavailableError(
            f"could not load model {spec.hf_name!r}: {exc}"
        ) from exc
    dim = loaded.get_sentence_embedding_dimension() or spec.dim
    return SentenceTransformerEncoder(loaded, dim)


def _encode_texts(encoder: Encoder, texts: list[str], batch_size: int) -> np.ndarray:
    matrix = np.asarray(encoder.encode(texts, batch_size), dtype=np.float32)
    if matrix.ndim != 2:
        raise EncoderOutputError(
            f"encoder returned a rank-{matrix.ndim} array, expected 2"
        )
    if matrix.shape[0] != len(texts):
        raise EncoderOutputError(
            f"encoder returned {matrix.shape[0]} rows for {len(texts)} texts"
        )
    if matrix.shape[1] < 1:
        raise EncoderOutputError("encoder returned zero-width rows")
    if not np.isfinite(matrix).all():
        raise EncoderOutputError("encoder output contains non-finite values")
    return np.ascontiguousarray(matrix)


def export_embeddings(
    corpus,
    encoder: Encoder,
    out,
    *,
    model: str = "custom",
    batch_size: int = DEFAULT_BATCH,
    field: str = "document",
) -> BridgeManifest:
    """Encode every corpus row in file order and write the f32 matrix.

    field selects the encoder input per row: "document" joins bio and
    text (the timeline convention), "text" encodes the bare text column
    (the activity convention).  The manifest is written beside the matrix
    as <out>.json and returned; its row count always equals the corpus
    row count, an empty corpus yielding a 0 x encoder.dim matrix.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}, expected one of {list(FIELDS)}")
    rows = read_corpus_csv(corpus)
    if field == "document":
        texts = [document_text(row.bio, row.text) for row in rows]
    else:
        texts = [row.text for row in rows]
    if texts:
        matrix = _encode_texts(encoder, texts, batch_size)
    else:
        matrix = np.zeros((0, int(encoder.dim)), dtype=np.float32)
    out_path = Path(out)
    with open(out_path, "wb") as fh:
        np.lib.format.write_array(fh, matrix, version=(1, 0))
    manifest = BridgeManifest(
        corpus=str(corpus),
        model=model,
        out=str(out_path),
        batch_size=batch_size,
        rows=int(matrix.shape[0]),
    )
    manifest_path = Path(str(out_path) + ".json")
    manifest_path.write_text(
        json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return manifest
