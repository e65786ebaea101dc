"""Embedder-agnostic matrix I/O in the npy v1.0 wire format.

The format is written by hand rather than through numpy's own save/load so
that the bytes on disk are pinned by this module, not by whichever numpy
version happens to be installed.  Files written by third-party exporters in
the same format load unchanged.
"""

from __future__ import annotations

import ast
import struct
from dataclasses import dataclass

import numpy as np

from .corpus import UserTimeline

MAGIC = b"\x93NUMPY"
HEADER_ALIGN = 64
_DESCRS = {"<f4": np.float32, "<f8": np.float64}


class TensorFormatError(Exception):
    """The byte stream is not a well-formed embedding matrix file."""


@dataclass
class EmbeddingMatrix:
    """A 2-D float matrix of row embeddings, C-ordered and finite."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {arr.shape}")
        if arr.dtype not in (np.float32, np.float64):
            raise ValueError(f"matrix dtype must be float32 or float64, got {arr.dtype}")
        if arr.shape[1] < 1:
            raise ValueError("matrix must have at least one column")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("matrix values must be finite")
        self.data = np.ascontiguousarray(arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def _build_header(descr: str, shape: tuple[int, int]) -> bytes:
    body = "{'descr': '%s', 'fortran_order': False, 'shape': (%d, %d), }" % (
        descr,
        shape[0],
        shape[1],
    )
    raw = body.encode("ascii")
    # magic(6) + version(2) + hlen(2) + header must be a multiple of 64
    unpadded = len(MAGIC) + 2 + 2 + len(raw) + 1
    total = ((unpadded + HEADER_ALIGN - 1) // HEADER_ALIGN) * HEADER_ALIGN
    pad = total - unpadded
    return raw + b" " * pad + b"\n"


def matrix_to_bytes(matrix: EmbeddingMatrix) -> bytes:
    """Serialize a matrix to npy v1.0 bytes. Same matrix, same bytes."""
    descr = "<f4" if matrix.data.dtype == np.float32 else "<f8"
    header = _build_header(descr, matrix.data.shape)
    out = bytearray()
    out += MAGIC
    out += b"\x01\x00"
    out += struct.pack("<H", len(header))
    out += header
    out += matrix.data.astype(descr, copy=False).tobytes("C")
    return bytes(out)


def write_matrix(matrix: EmbeddingMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(matrix_to_bytes(matrix))


def matrix_from_bytes(blob: bytes) -> EmbeddingMatrix:
    """Parse npy v1.0 bytes into a matrix.

    Accepts little-endian f4 and f8 payloads, C order only.  A 1-D file of
    length L is promoted to shape (1, L).  Errors name the offending field.
    """
    if len(blob) < 10:
        raise TensorFormatError("truncated file, shorter than the fixed preamble")
    if blob[:6] != MAGIC:
        raise TensorFormatError(f"bad magic {blob[:6]!r}, expected {MAGIC!r}")
    major, minor = blob[6], blob[7]
    if (major, minor) != (1, 0):
        raise TensorFormatError(f"unsupported version {major}.{minor}, expected 1.0")
    (hlen,) = struct.unpack("<H", blob[8:10])
    if len(blob) < 10 + hlen:
        raise TensorFormatError("truncated header")
    header_raw = blob[10 : 10 + hlen]
    try:
        header = ast.literal_eval(header_raw.decode("ascii").strip())
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise TensorFormatError(f"unparseable header: {exc}") from None
    if not isinstance(header, dict):
        raise TensorFormatError("header is not a dict literal")
    for key in ("descr", "fortran_order", "shape"):
        if key not in header:
            raise TensorFormatError(f"header missing field {key!r}")
    descr = header["descr"]
    if descr not in _DESCRS:
        raise TensorFormatError(
            f"descr {descr!r} is not a supported little-endian float dtype"
        )
    if header["fortran_order"] is not False:
        raise TensorFormatError("fortran_order must be False, C order only")
    shape = header["shape"]
    if not (
        isinstance(shape, tuple)
        and all(isinstance(s, int) and s >= 0 for s in shape)
    ):
        raise TensorFormatError(f"shape {shape!r} is not a tuple of sizes")
    if len(shape) > 2:
        raise TensorFormatError(f"shape {shape!r} has rank {len(shape)}, max is 2")
    if len(shape) == 0:
        raise TensorFormatError("shape () is scalar, expected rows of embeddings")
    if len(shape) == 1:
        shape = (1, shape[0])
    dtype = np.dtype(descr)
    expected = shape[0] * shape[1] * dtype.itemsize
    payload = blob[10 + hlen :]
    if len(payload) != expected:
        raise TensorFormatError(
            f"payload is {len(payload)} bytes, shape {shape} with descr "
            f"{descr!r} requires {expected}"
        )
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape).copy()
    return EmbeddingMatrix(arr)


def read_matrix(path) -> EmbeddingMatrix:
    with open(path, "rb") as fh:
        return matrix_from_bytes(fh.read())


@dataclass
class AlignedCorpus:
    """Timelines zipped with their embedding rows in canonical order.

    Canonical order is ascending user_id, events in timeline order, which
    is exactly the row order of the canonical corpus CSV.
    """

    timelines: dict[str, UserTimeline]
    matrix: EmbeddingMatrix
    row_index: dict[tuple[str, int], int]
    user_spans: dict[str, tuple[int, int]]

    def rows_for(self, user_id: str) -> np.ndarray:
        start, stop = self.user_spans[user_id]
        return self.matrix.data[start:stop]


def align(
    timelines: dict[str, UserTimeline], matrix: EmbeddingMatrix
) -> AlignedCorpus:
    """Pair each timeline event with its embedding row.

    Raises ValueError naming both counts when the matrix row count does not
    match the corpus event count.
    """
    total = sum(len(t) for t in timelines.values())
    if matrix.rows != total:
        raise ValueError(
            f"row count mismatch: corpus has {total} events, matrix has "
            f"{matrix.rows} rows"
        )
    row_index: dict[tuple[str, int], int] = {}
    user_spans: dict[str, tuple[int, int]] = {}
    cursor = 0
    for user_id in sorted(timelines):
        start = cursor
        for ordinal in range(len(timelines[user_id])):
            row_index[(user_id, ordinal)] = cursor
            cursor += 1
        user_spans[user_id] = (start, cursor)
    return AlignedCorpus(
        timelines=dict(sorted(timelines.items())),
        matrix=matrix,
        row_index=row_index,
        user_spans=user_spans,
    )
