"""On-disk formats for feature vectors and matrices.

Two interchange forms exist side by side:

* feature CSV: a header row of names and a single row of values, floats
  rendered by repr so a read-write cycle is byte-identical
* framed binary: magic ``SRKB``, a little-endian uint16 version and
  uint32 header length, a JSON header, then float64 row-major data

An extraction run lays files out as
``<features_dir>/<subject_id>/<segment_id>/<source>.csv`` next to a
``segments_index.json`` describing every segment.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    MalformedHeaderError,
    MissingFileError,
    SchemaViolationError,
)
from .featvec import FeatureVector

MAGIC = b"SRKB"
FORMAT_VERSION = 1


def format_float(v: float) -> str:
    """Shortest decimal text that round-trips to the same float64."""
    return repr(float(v))


def write_feature_csv(path, vector: FeatureVector) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        ",".join(vector.names),
        ",".join(format_float(v) for v in vector.values),
    ]
    path.write_text("\n".join(lines) + "\n")


def read_feature_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such feature file: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    if len(lines) != 2:
        raise SchemaViolationError(
            f"{path}: expected a name row and a value row, found {len(lines)} rows"
        )
    names = tuple(lines[0].split(","))
    try:
        values = np.asarray([float(tok) for tok in lines[1].split(",")])
    except ValueError as exc:
        raise SchemaViolationError(f"{path}: non-numeric value row ({exc})") from exc
    if len(names) != len(values):
        raise DimensionMismatchError(
            f"{path}: {len(names)} names but {len(values)} values"
        )
    return names, values


def write_framed(path, array: np.ndarray, header: dict) -> None:
    """Framed binary writer; adds rows/cols to the caller's header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    array = np.ascontiguousarray(array, dtype="<f8")
    if array.ndim == 1:
        rows, cols = 1, array.shape[0]
    elif array.ndim == 2:
        rows, cols = array.shape
    else:
        raise DimensionMismatchError(f"framed data must be 1-D or 2-D, got {array.ndim}-D")
    doc = dict(header)
    doc["rows"] = rows
    doc["cols"] = cols
    blob = json.dumps(doc, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HI", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(array.tobytes())


def read_framed(path) -> tuple[dict, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such framed file: {path}")
    raw = path.read_bytes()
    if len(raw) < 10 or raw[:4] != MAGIC:
        raise MalformedHeaderError(f"{path}: missing {MAGIC!r} magic")
    version, header_len = struct.unpack_from("<HI", raw, 4)
    if version != FORMAT_VERSION:
        raise MalformedHeaderError(f"{path}: unsupported format version {version}")
    start = 10
    if len(raw) < start + header_len:
        raise MalformedHeaderError(f"{path}: truncated header")
    try:
        header = json.loads(raw[start : start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedHeaderError(f"{path}: unreadable header ({exc})") from exc
    rows, cols = header.get("rows"), header.get("cols")
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise MalformedHeaderError(f"{path}: header lacks valid rows/cols")
    body = raw[start + header_len :]
    expected = rows * cols * 8
    if len(body) != expected:
        raise MalformedHeaderError(
            f"{path}: expected {expected} data bytes, found {len(body)}"
        )
    data = np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)
    return header, data


@dataclass(frozen=True)
class SegmentRecord:
    """One extracted segment as listed in segments_index.json."""

    segment_id: str
    subject_id: str
    recording_id: str
    kind: str
    start_s: float
    end_s: float
    vowel_label: Optional[str] = None


def segment_feature_path(features_dir, subject_id: str, segment_id: str,
                         source: str) -> Path:
    return Path(features_dir) / subject_id / segment_id / f"{source}.csv"


def write_segments_index(features_dir, records: list[SegmentRecord]) -> None:
    path = Path(features_dir) / "segments_index.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    docs = []
    for r in sorted(records, key=lambda r: r.segment_id):
        doc = {
            "segment_id": r.segment_id,
            "subject_id": r.subject_id,
            "recording_id": r.recording_id,
            "kind": r.kind,
            "start_s": r.start_s,
            "end_s": r.end_s,
        }
        if r.vowel_label is not None:
            doc["vowel_label"] = r.vowel_label
        docs.append(doc)
    path.write_text(json.dumps(docs, indent=2, sort_keys=True) + "\n")


def read_segments_index(features_dir) -> list[SegmentRecord]:
    path = Path(features_dir) / "segments_index.json"
    if not path.is_file():
        raise MissingFileError(f"no segments_index.json under {features_dir}")
    try:
        docs = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(docs, list):
        raise SchemaViolationError(f"{path}: index must be a JSON array")
    records = []
    for i, doc in enumerate(docs):
        if not isinstance(doc, dict):
            raise SchemaViolationError(f"{path}: entry {i} must be an object")
        try:
            records.append(SegmentRecord(
                segment_id=str(doc["segment_id"]),
                subject_id=str(doc["subject_id"]),
                recording_id=str(doc["recording_id"]),
                kind=str(doc["kind"]),
                start_s=float(doc["start_s"]),
                end_s=float(doc["end_s"]),
                vowel_label=doc.get("vowel_label"),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolationError(f"{path}: entry {i} is malformed ({exc})") from exc
    return records


def load_feature_table(features_dir, source: str,
                       records: list[SegmentRecord]) -> tuple[tuple[str, ...], np.ndarray]:
    """Stack one source's vectors for the given segments into a matrix.

    Row order follows the record order; every file must agree on names.
    """
    if not records:
        raise EmptyMatrixError("no segments to load features for")
    names: Optional[tuple[str, ...]] = None
    rows = []
    for r in records:
        path = segment_feature_path(features_dir, r.subject_id, r.segment_id, source)
        file_names, values = read_feature_csv(path)
        if names is None:
            names = file_names
        elif file_names != names:
            raise DimensionMismatchError(
                f"{path}: feature names disagree with earlier segments"
            )
        rows.append(values)
    return names, np.vstack(rows)
