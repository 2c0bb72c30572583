"""End-to-end orchestration: recordings to manifests to feature files.

Audio lives under ``<audio_dir>/<subject_id>/<recording_id>.wav`` and is
matched to manifests by recording id. Every buffer is brought to the
canonical 16 kHz mono form and peak-normalized before slicing, so
features never depend on the source file's rate or level.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .audio_io import (
    CANONICAL_RATE_HZ,
    AudioBuffer,
    load_wav,
    normalize_peak,
    resample,
    write_wav,
)
from .errors import MissingFileError, SpeechRiskError
from .featio import (
    SegmentRecord,
    segment_feature_path,
    write_feature_csv,
    write_segments_index,
)
from .features.lld import LldConfig
from .featvec import FEATURE_SOURCES, extract_segment_features
from .segmenter import (
    SegmentManifest,
    SegmentStats,
    energy_vad,
    ingest_manifest,
    segment_stats,
    slice_buffer,
    validate_manifest_against,
    write_manifest,
)

log = logging.getLogger(__name__)


def canonicalize(buffer: AudioBuffer) -> AudioBuffer:
    """Resample to 16 kHz and normalize the peak to the house target."""
    return normalize_peak(resample(buffer, CANONICAL_RATE_HZ))


def segment_id_for(recording_id: str, span_index: int) -> str:
    return f"{recording_id}-{span_index:03d}"


def _find_audio(audio_dir: Path, recording_id: str) -> Path:
    direct = sorted(audio_dir.rglob(f"{recording_id}.wav"))
    if not direct:
        raise MissingFileError(
            f"no {recording_id}.wav anywhere under {audio_dir}"
        )
    if len(direct) > 1:
        log.warning("recording %s matched %d files; using %s",
                    recording_id, len(direct), direct[0])
    return direct[0]


def list_manifests(manifests_dir) -> list[Path]:
    manifests_dir = Path(manifests_dir)
    if not manifests_dir.is_dir():
        raise MissingFileError(f"no such manifests directory: {manifests_dir}")
    return sorted(manifests_dir.glob("*.json"))


@dataclass(frozen=True)
class ExtractionSummary:
    features_dir: Path
    sources: tuple[str, ...]
    n_recordings: int
    n_segments: int
    n_files: int


def extract_features(audio_dir, manifests_dir, features_dir,
                     sources: tuple[str, ...] = FEATURE_SOURCES,
                     jobs: int = 1,
                     lld_config: LldConfig = LldConfig()) -> ExtractionSummary:
    """Slice every manifest span and write one CSV per segment and source.

    Recordings are processed independently (optionally in parallel); the
    resulting index is sorted by segment id so output bytes do not depend
    on scheduling.
    """
    audio_dir = Path(audio_dir)
    features_dir = Path(features_dir)
    unknown = set(sources) - set(FEATURE_SOURCES)
    if unknown:
        raise ValueError(f"unknown feature sources {sorted(unknown)}")
    manifest_paths = list_manifests(manifests_dir)
    if not manifest_paths:
        raise MissingFileError(f"no manifest JSON files under {manifests_dir}")

    def process(path: Path) -> list[SegmentRecord]:
        manifest = ingest_manifest(path)
        buffer = canonicalize(load_wav(_find_audio(audio_dir, manifest.recording_id)))
        validate_manifest_against(manifest, buffer)
        records = []
        for i, span in enumerate(manifest.spans):
            segment_id = segment_id_for(manifest.recording_id, i)
            piece = slice_buffer(buffer, span)
            vectors = extract_segment_features(piece, sources, lld_config)
            for source, vector in vectors.items():
                write_feature_csv(
                    segment_feature_path(features_dir, manifest.subject_id,
                                         segment_id, source),
                    vector,
                )
            records.append(SegmentRecord(
                segment_id=segment_id,
                subject_id=manifest.subject_id,
                recording_id=manifest.recording_id,
                kind=span.kind,
                start_s=span.start_s,
                end_s=span.end_s,
                vowel_label=span.vowel_label,
            ))
        return records

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_recording = list(pool.map(process, manifest_paths))
    else:
        per_recording = [process(p) for p in manifest_paths]

    records = [r for recs in per_recording for r in recs]
    write_segments_index(features_dir, records)
    return ExtractionSummary(
        features_dir=features_dir,
        sources=tuple(sources),
        n_recordings=len(manifest_paths),
        n_segments=len(records),
        n_files=len(records) * len(sources),
    )


@dataclass(frozen=True)
class SegmentationSummary:
    manifests_dir: Path
    n_recordings: int
    n_spans: int
    n_segment_files: int = 0
    errors: tuple[tuple[str, str], ...] = ()


def segment_audio(audio_dir, manifests_dir, kind: str = "picture_description",
                  manifests_in=None, segments_dir=None,
                  frame_ms: float = 25.0, hop_ms: float = 10.0,
                  threshold_db: float = -35.0, min_seg_ms: float = 200.0,
                  min_gap_ms: float = 300.0) -> SegmentationSummary:
    """Segment recordings into spans and write manifests plus sliced WAVs.

    Scans ``<audio_dir>/<subject_id>/<recording_id>.wav``. A recording
    with a matching manifest under manifests_in keeps those hand-labeled
    spans; the rest go through voice-activity detection. Recordings that
    are entirely silent still get a manifest, with no spans, so the gap
    is visible downstream. Per-file failures are collected, not raised,
    so one corrupt file cannot sink a batch run.
    """
    audio_dir = Path(audio_dir)
    if audio_dir.is_file():
        paths = [audio_dir]
    else:
        if not audio_dir.is_dir():
            raise MissingFileError(f"no such audio path: {audio_dir}")
        paths = sorted(audio_dir.rglob("*.wav"))
        if not paths:
            raise MissingFileError(f"no .wav files under {audio_dir}")
    manifests_dir = Path(manifests_dir)
    n_spans = 0
    n_segment_files = 0
    errors: list[tuple[str, str]] = []
    for path in paths:
        try:
            buffer = canonicalize(load_wav(path))
            given = Path(manifests_in) / f"{path.stem}.json" if manifests_in else None
            if given is not None and given.is_file():
                manifest = ingest_manifest(given)
                validate_manifest_against(manifest, buffer)
            else:
                spans = energy_vad(buffer, frame_ms=frame_ms, hop_ms=hop_ms,
                                   threshold_db=threshold_db, min_seg_ms=min_seg_ms,
                                   min_gap_ms=min_gap_ms, kind=kind)
                subject_id = path.parent.name or "unknown"
                manifest = SegmentManifest(recording_id=path.stem,
                                           subject_id=subject_id,
                                           spans=tuple(spans))
            write_manifest(manifests_dir / f"{path.stem}.json", manifest)
            if segments_dir is not None:
                for i, span in enumerate(manifest.spans):
                    piece = slice_buffer(buffer, span)
                    name = f"{segment_id_for(manifest.recording_id, i)}.wav"
                    write_wav(Path(segments_dir) / manifest.subject_id / name, piece)
                    n_segment_files += 1
            n_spans += len(manifest.spans)
            if not manifest.spans:
                log.warning("no speech detected in %s", path)
        except SpeechRiskError as exc:
            log.error("segmentation failed for %s: %s", path, exc)
            errors.append((str(path), f"{type(exc).__name__}: {exc}"))
    return SegmentationSummary(manifests_dir=manifests_dir,
                               n_recordings=len(paths), n_spans=n_spans,
                               n_segment_files=n_segment_files,
                               errors=tuple(errors))


def collect_stats(manifests_dir) -> list[SegmentStats]:
    """Pool every manifest's spans into the duration-statistics table."""
    spans = []
    for path in list_manifests(manifests_dir):
        spans.extend(ingest_manifest(path).spans)
    return segment_stats(spans)
