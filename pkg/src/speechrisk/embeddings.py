"""Ingestion of precomputed deep embeddings.

Embeddings arrive from external encoders, one file per segment under
``<embeddings_dir>/<model_id>/<segment_id>.csv``. A file carries comment
lines declaring model, segment and width, then one or more rows of
values; multiple rows are frame-level outputs and are averaged into a
single segment vector. The framed binary container is accepted as an
alternative carrier for the same payload.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    MissingFileError,
    NonFiniteValueError,
    SchemaViolationError,
)
from .featio import format_float, read_framed, write_framed


@dataclass(frozen=True)
class EmbeddingVector:
    """One segment's embedding under one model."""

    model_id: str
    segment_id: str
    values: np.ndarray

    def __post_init__(self):
        if not self.model_id:
            raise SchemaViolationError("embedding model_id must be non-empty")
        if not self.segment_id:
            raise SchemaViolationError("embedding segment_id must be non-empty")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or len(values) == 0:
            raise DimensionMismatchError(
                f"embedding must be a non-empty 1-D vector, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteValueError(
                f"embedding {self.model_id}/{self.segment_id} has non-finite values"
            )
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return len(self.values)


def average_frames(frames: np.ndarray) -> np.ndarray:
    """Collapse frame-level rows to one vector by the arithmetic mean."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim == 1:
        return frames
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise EmptyMatrixError(f"cannot average shape {frames.shape}")
    return frames.mean(axis=0)


def write_embedding_csv(path, emb: EmbeddingVector) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# model_id={emb.model_id}",
        f"# segment_id={emb.segment_id}",
        f"# dim={emb.dim}",
        ",".join(format_float(v) for v in emb.values),
    ]
    path.write_text("\n".join(lines) + "\n")


def _parse_comments(lines: list[str], path: Path) -> dict[str, str]:
    meta = {}
    for ln in lines:
        body = ln[1:].strip()
        if "=" not in body:
            raise SchemaViolationError(f"{path}: malformed comment line {ln!r}")
        key, value = body.split("=", 1)
        meta[key.strip()] = value.strip()
    for key in ("model_id", "segment_id", "dim"):
        if key not in meta:
            raise SchemaViolationError(f"{path}: missing '# {key}=' comment")
    return meta


def read_embedding_csv(path) -> EmbeddingVector:
    """Read one embedding file; multi-row payloads are frame-averaged."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such embedding file: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    comments = [ln for ln in lines if ln.startswith("#")]
    rows = [ln for ln in lines if not ln.startswith("#")]
    meta = _parse_comments(comments, path)
    try:
        declared_dim = int(meta["dim"])
    except ValueError as exc:
        raise SchemaViolationError(f"{path}: dim must be an integer") from exc
    if not rows:
        raise SchemaViolationError(f"{path}: no value rows")
    parsed = []
    for row in rows:
        try:
            parsed.append([float(tok) for tok in row.split(",")])
        except ValueError as exc:
            raise SchemaViolationError(f"{path}: non-numeric value ({exc})") from exc
        if len(parsed[-1]) != declared_dim:
            raise DimensionMismatchError(
                f"{path}: declared dim={declared_dim} but a row has {len(parsed[-1])} values"
            )
    values = average_frames(np.asarray(parsed))
    return EmbeddingVector(model_id=meta["model_id"], segment_id=meta["segment_id"],
                           values=values)


def write_embedding_framed(path, emb: EmbeddingVector) -> None:
    write_framed(path, emb.values,
                 {"type": "vector", "model_id": emb.model_id,
                  "segment_id": emb.segment_id})


def read_embedding_framed(path) -> EmbeddingVector:
    header, data = read_framed(path)
    for key in ("model_id", "segment_id"):
        if key not in header:
            raise SchemaViolationError(f"{path}: framed header lacks {key!r}")
    return EmbeddingVector(model_id=str(header["model_id"]),
                           segment_id=str(header["segment_id"]),
                           values=average_frames(data))


def embedding_path(embeddings_dir, model_id: str, segment_id: str) -> Path:
    return Path(embeddings_dir) / model_id / f"{segment_id}.csv"


def embedding_feature_names(model_id: str, dim: int) -> tuple[str, ...]:
    return tuple(f"{model_id}_{i:04d}" for i in range(dim))


def load_embedding_table(embeddings_dir, model_id: str,
                         segment_ids: list[str]) -> tuple[tuple[str, ...], np.ndarray]:
    """Stack one model's embeddings for the given segments, in order.

    Every segment must have a file and every file must agree on width and
    identity metadata.
    """
    if not segment_ids:
        raise EmptyMatrixError("no segments to load embeddings for")
    rows = []
    dim = None
    for segment_id in segment_ids:
        path = embedding_path(embeddings_dir, model_id, segment_id)
        emb = read_embedding_csv(path)
        if emb.model_id != model_id:
            raise SchemaViolationError(
                f"{path}: file declares model_id={emb.model_id!r}, expected {model_id!r}"
            )
        if emb.segment_id != segment_id:
            raise SchemaViolationError(
                f"{path}: file declares segment_id={emb.segment_id!r}, expected {segment_id!r}"
            )
        if dim is None:
            dim = emb.dim
        elif emb.dim != dim:
            raise DimensionMismatchError(
                f"{path}: width {emb.dim} disagrees with earlier width {dim}"
            )
        rows.append(emb.values)
    return embedding_feature_names(model_id, dim), np.vstack(rows)
