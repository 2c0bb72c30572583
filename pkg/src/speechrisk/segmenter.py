"""Per-utterance segmentation: manifest ingestion, energy VAD fallback,
slicing and duration statistics.

A segment manifest is the integration point for any external aligner: one
JSON document per recording with fields ``recording_id``, ``subject_id``
and ``spans`` (each span: ``start_s``, ``end_s``, ``kind``, optional
``text`` and ``vowel_label``). When no manifest exists, :func:`energy_vad`
provides a deterministic fallback.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .audio_io import AudioBuffer
from .errors import (
    BufferTooShortError,
    OverlappingSpansError,
    SchemaViolationError,
    SpanOutOfRangeError,
)

SEGMENT_KINDS = ("picture_description", "neutral_text", "vowel")
VOWEL_LABELS = ("a", "e", "i", "o", "u")


@dataclass(frozen=True)
class SegmentSpan:
    """A typed time interval within one recording."""

    start_s: float
    end_s: float
    kind: str
    text: Optional[str] = None
    vowel_label: Optional[str] = None

    def __post_init__(self):
        if self.start_s < 0:
            raise SchemaViolationError(f"span start_s must be >= 0, got {self.start_s}")
        if self.end_s <= self.start_s:
            raise SchemaViolationError(
                f"span end_s must exceed start_s, got [{self.start_s}, {self.end_s}]"
            )
        if self.kind not in SEGMENT_KINDS:
            raise SchemaViolationError(f"unknown span kind {self.kind!r}")
        if self.kind == "vowel":
            if self.vowel_label not in VOWEL_LABELS:
                raise SchemaViolationError(
                    f"vowel span requires vowel_label in {VOWEL_LABELS}, got {self.vowel_label!r}"
                )
        elif self.vowel_label is not None:
            raise SchemaViolationError(
                f"vowel_label only allowed on vowel spans, got kind {self.kind!r}"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SegmentManifest:
    """Validated, sorted, non-overlapping spans of one recording."""

    recording_id: str
    subject_id: str
    spans: tuple[SegmentSpan, ...]

    def __post_init__(self):
        if not self.recording_id:
            raise SchemaViolationError("manifest recording_id must be non-empty")
        if not self.subject_id:
            raise SchemaViolationError("manifest subject_id must be non-empty")
        spans = tuple(sorted(self.spans, key=lambda s: s.start_s))
        for prev, cur in zip(spans, spans[1:]):
            if cur.start_s < prev.end_s:
                raise OverlappingSpansError(
                    f"{self.recording_id}: span [{cur.start_s}, {cur.end_s}] overlaps "
                    f"[{prev.start_s}, {prev.end_s}]"
                )
        object.__setattr__(self, "spans", spans)


@dataclass(frozen=True)
class SegmentStats:
    """Duration statistics of one span group (one stats-table row)."""

    label: str
    count: int
    mean_s: Optional[float]
    std_s: Optional[float]
    min_s: Optional[float]
    max_s: Optional[float]
    total_min: float


def _require(doc: dict, key: str, typ, where: str):
    if key not in doc:
        raise SchemaViolationError(f"{where}: missing required field {key!r}")
    value = doc[key]
    if typ is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaViolationError(f"{where}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, typ):
        raise SchemaViolationError(f"{where}: field {key!r} must be {typ.__name__}")
    return value


def manifest_from_dict(doc: dict, where: str = "manifest") -> SegmentManifest:
    recording_id = _require(doc, "recording_id", str, where)
    subject_id = _require(doc, "subject_id", str, where)
    raw_spans = _require(doc, "spans", list, where)
    spans = []
    for i, raw in enumerate(raw_spans):
        span_where = f"{where}: spans[{i}]"
        if not isinstance(raw, dict):
            raise SchemaViolationError(f"{span_where}: span must be an object")
        extra = set(raw) - {"start_s", "end_s", "kind", "text", "vowel_label"}
        if extra:
            raise SchemaViolationError(f"{span_where}: unknown fields {sorted(extra)}")
        text = raw.get("text")
        if text is not None and not isinstance(text, str):
            raise SchemaViolationError(f"{span_where}: field 'text' must be a string")
        vowel_label = raw.get("vowel_label")
        if vowel_label is not None and not isinstance(vowel_label, str):
            raise SchemaViolationError(f"{span_where}: field 'vowel_label' must be a string")
        spans.append(
            SegmentSpan(
                start_s=_require(raw, "start_s", float, span_where),
                end_s=_require(raw, "end_s", float, span_where),
                kind=_require(raw, "kind", str, span_where),
                text=text,
                vowel_label=vowel_label,
            )
        )
    return SegmentManifest(recording_id=recording_id, subject_id=subject_id, spans=tuple(spans))


def ingest_manifest(path) -> SegmentManifest:
    """Load and validate a segment manifest JSON file."""
    path = Path(path)
    if not path.is_file():
        raise SchemaViolationError(f"no such manifest: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaViolationError(f"{path}: manifest must be a JSON object")
    return manifest_from_dict(doc, where=str(path))


def write_manifest(path, manifest: SegmentManifest) -> None:
    """Serialize a manifest back to its JSON file form (deterministic bytes)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    spans = []
    for s in manifest.spans:
        span = {"start_s": s.start_s, "end_s": s.end_s, "kind": s.kind}
        if s.text is not None:
            span["text"] = s.text
        if s.vowel_label is not None:
            span["vowel_label"] = s.vowel_label
        spans.append(span)
    doc = {
        "recording_id": manifest.recording_id,
        "subject_id": manifest.subject_id,
        "spans": spans,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def validate_manifest_against(manifest: SegmentManifest, buffer: AudioBuffer) -> None:
    """Reject spans extending past the recording's duration."""
    duration = buffer.duration_s
    for s in manifest.spans:
        if s.end_s > duration + 1e-9:
            raise SpanOutOfRangeError(
                f"{manifest.recording_id}: span ends at {s.end_s}s but recording "
                f"lasts {duration:.6f}s"
            )


def energy_vad(
    buffer: AudioBuffer,
    frame_ms: float = 25.0,
    hop_ms: float = 10.0,
    threshold_db: float = -35.0,
    min_seg_ms: float = 200.0,
    min_gap_ms: float = 300.0,
    kind: str = "picture_description",
) -> list[SegmentSpan]:
    """Energy-based voice activity detection fallback.

    Frames whose RMS exceeds (max frame RMS in dB + threshold_db) are
    active; contiguous runs become spans. Gaps shorter than min_gap_ms are
    merged first, then spans shorter than min_seg_ms are dropped. A silent
    buffer yields no spans. The produced spans carry the caller's kind.
    """
    sr = buffer.sample_rate_hz
    frame_len = int(round(frame_ms * sr / 1000.0))
    hop_len = int(round(hop_ms * sr / 1000.0))
    if frame_len < 1 or hop_len < 1:
        raise ValueError("frame_ms and hop_ms must each cover at least one sample")
    if len(buffer) < frame_len:
        raise BufferTooShortError(
            f"buffer of {len(buffer)} samples is shorter than one {frame_len}-sample frame"
        )

    x = buffer.samples
    n_frames = (len(x) - frame_len) // hop_len + 1
    idx = np.arange(frame_len)[None, :] + hop_len * np.arange(n_frames)[:, None]
    rms = np.sqrt(np.mean(x[idx] ** 2, axis=1))

    peak_rms = float(rms.max())
    if peak_rms <= 0.0:
        return []
    level_db = 20.0 * np.log10(np.maximum(rms, 1e-12) / peak_rms)
    active = level_db > threshold_db

    # active frame runs -> [start_frame, end_frame) pairs
    runs = []
    start = None
    for i, a in enumerate(active):
        if a and start is None:
            start = i
        elif not a and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, n_frames))

    def to_seconds(run):
        # an active frame only proves overlap with speech somewhere inside
        # it, so the onset estimate is the end of the last silent frame and
        # the offset estimate the start of the first silent frame; this
        # keeps boundaries within one hop of a clean transition
        s, e = run
        start = 0.0 if s == 0 else ((s - 1) * hop_len + frame_len) / sr
        end = buffer.duration_s if e == n_frames else e * hop_len / sr
        return start, min(end, buffer.duration_s)

    merged = []
    for run in runs:
        if merged:
            _, prev_end = to_seconds(merged[-1])
            cur_start, _ = to_seconds(run)
            if (cur_start - prev_end) * 1000.0 < min_gap_ms:
                merged[-1] = (merged[-1][0], run[1])
                continue
        merged.append(run)

    spans = []
    for run in merged:
        start_s, end_s = to_seconds(run)
        if end_s <= start_s:  # runs of 1-2 frames have no usable interior
            continue
        if (end_s - start_s) * 1000.0 >= min_seg_ms:
            spans.append(SegmentSpan(start_s=start_s, end_s=end_s, kind=kind))
    return spans


def slice_buffer(buffer: AudioBuffer, span: SegmentSpan) -> AudioBuffer:
    """Cut the samples covered by a span out of a recording.

    Sample values are copied exactly; output duration matches the span
    within one sample period.
    """
    sr = buffer.sample_rate_hz
    start = int(round(span.start_s * sr))
    end = int(round(span.end_s * sr))
    if end > len(buffer) or start < 0:
        raise SpanOutOfRangeError(
            f"span [{span.start_s}, {span.end_s}]s exceeds recording of "
            f"{buffer.duration_s:.6f}s"
        )
    return AudioBuffer(
        samples=buffer.samples[start:end].copy(),
        sample_rate_hz=sr,
        source_id=buffer.source_id,
    )


_KIND_LABELS = {
    "picture_description": "Pic. Desc.",
    "neutral_text": "Neut. Texts",
    "vowel": "Vowels",
}


def _stats_row(label: str, durations: list[float]) -> SegmentStats:
    if not durations:
        return SegmentStats(label=label, count=0, mean_s=None, std_s=None,
                            min_s=None, max_s=None, total_min=0.0)
    d = np.asarray(durations, dtype=np.float64)
    return SegmentStats(
        label=label,
        count=len(d),
        mean_s=float(d.mean()),
        std_s=float(d.std()),  # population std
        min_s=float(d.min()),
        max_s=float(d.max()),
        total_min=float(d.sum() / 60.0),
    )


def segment_stats(spans: list[SegmentSpan], group_by_kind: bool = True) -> list[SegmentStats]:
    """Duration statistics per span kind plus a Total row.

    Column semantics mirror the standard dataset-statistics layout:
    utterance count, mean, population std, min, max, total minutes.
    """
    rows = []
    if group_by_kind:
        for kind in SEGMENT_KINDS:
            durations = [s.duration_s for s in spans if s.kind == kind]
            rows.append(_stats_row(_KIND_LABELS[kind], durations))
    rows.append(_stats_row("Total", [s.duration_s for s in spans]))
    return rows
