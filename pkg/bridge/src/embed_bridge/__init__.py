"""Export sentence-encoder embeddings for a corpus CSV as an aligned matrix.

Reads the canonical corpus CSV, encodes one document per row with a
pretrained sentence encoder, and writes an npy float32 matrix whose row i
is the embedding of corpus row i, plus a JSON manifest.  The profiling
pipeline consumes the file directly; nothing here imports it.
"""

from .corpus import (
    CORPUS_HEADER,
    CorpusError,
    CorpusRow,
    document_text,
    read_corpus_csv,
)
from .export import (
    DEFAULT_BATCH,
    FIELDS,
    MODELS,
    BridgeManifest,
    Encoder,
    EncoderOutputError,
    EncoderUnavailableError,
    ModelSpec,
    SentenceTransformerEncoder,
    export_embeddings,
    load_encoder,
)

__version__ = "0.1.0"
