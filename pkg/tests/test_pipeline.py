"""Orchestration: extraction runs, detection-based segmentation, stats."""

import numpy as np
import pytest

from speechrisk.audio_io import AudioBuffer
from speechrisk.errors import MissingFileError
from speechrisk.featio import read_segments_index, segment_feature_path
from speechrisk.pipeline import (
    canonicalize,
    collect_stats,
    extract_features,
    segment_audio,
    segment_id_for,
)
from speechrisk.segmenter import SegmentManifest, SegmentSpan, ingest_manifest, write_manifest

from .helpers import make_tone, tree_sha256, write_wav_pcm16


def _speech_like(path, spans_s=((0.2, 1.2), (1.7, 2.7)), total_s=3.0):
    """Tone bursts at the given spans inside silence."""
    sr = 16_000
    x = np.zeros(int(total_s * sr))
    for start, end in spans_s:
        seg = make_tone(150.0, end - start, sr, amplitude=0.5)
        x[int(start * sr):int(start * sr) + len(seg)] = seg
    write_wav_pcm16(path, x, sr)
    return path


class TestExtractFeatures:
    def test_index_covers_every_span(self, tiny_cohort):
        assert len(tiny_cohort.records) == tiny_cohort.layout.n_spans
        for record in tiny_cohort.records:
            path = segment_feature_path(
                tiny_cohort.features_dir, record.subject_id,
                record.segment_id, "compact")
            assert path.is_file()

    def test_rerun_is_bitwise_identical(self, tiny_cohort, tmp_path):
        again = tmp_path / "features"
        extract_features(tiny_cohort.layout.audio_dir,
                         tiny_cohort.layout.manifests_dir,
                         again, sources=("compact",))
        assert tree_sha256(again) == tree_sha256(tiny_cohort.features_dir)

    def test_jobs_do_not_change_bytes(self, tiny_cohort, tmp_path):
        again = tmp_path / "features"
        extract_features(tiny_cohort.layout.audio_dir,
                         tiny_cohort.layout.manifests_dir,
                         again, sources=("compact",), jobs=4)
        assert tree_sha256(again) == tree_sha256(tiny_cohort.features_dir)

    def test_unknown_source_rejected(self, tiny_cohort, tmp_path):
        with pytest.raises(ValueError):
            extract_features(tiny_cohort.layout.audio_dir,
                             tiny_cohort.layout.manifests_dir,
                             tmp_path, sources=("compact", "wav2vec"))

    def test_missing_manifests_dir(self, tiny_cohort, tmp_path):
        with pytest.raises(MissingFileError):
            extract_features(tiny_cohort.layout.audio_dir,
                             tmp_path / "nowhere", tmp_path / "out")

    def test_missing_audio_file(self, tmp_path):
        manifest = SegmentManifest(
            recording_id="rec-x", subject_id="s1",
            spans=(SegmentSpan(start_s=0.0, end_s=1.0, kind="vowel",
                               vowel_label="a"),))
        write_manifest(tmp_path / "manifests" / "rec-x.json", manifest)
        (tmp_path / "audio").mkdir()
        with pytest.raises(MissingFileError):
            extract_features(tmp_path / "audio", tmp_path / "manifests",
                             tmp_path / "features")

    def test_segment_index_round_trip(self, tiny_cohort):
        records = read_segments_index(tiny_cohort.features_dir)
        assert list(records) == sorted(records, key=lambda r: r.segment_id)
        kinds = {r.kind for r in records}
        assert kinds == {"vowel", "neutral_text", "picture_description"}


class TestSegmentAudio:
    def test_detection_writes_manifest(self, tmp_path):
        _speech_like(tmp_path / "audio" / "s1" / "rec-a.wav")
        summary = segment_audio(tmp_path / "audio", tmp_path / "manifests")
        assert summary.n_recordings == 1
        assert summary.n_spans == 2
        assert summary.errors == ()
        manifest = ingest_manifest(tmp_path / "manifests" / "rec-a.json")
        assert manifest.subject_id == "s1"
        assert [s.kind for s in manifest.spans] == ["picture_description"] * 2

    def test_kind_flag_applies(self, tmp_path):
        _speech_like(tmp_path / "audio" / "s1" / "rec-a.wav")
        segment_audio(tmp_path / "audio", tmp_path / "manifests",
                      kind="neutral_text")
        manifest = ingest_manifest(tmp_path / "manifests" / "rec-a.json")
        assert all(s.kind == "neutral_text" for s in manifest.spans)

    def test_hand_manifest_wins_over_detection(self, tmp_path):
        _speech_like(tmp_path / "audio" / "s1" / "rec-a.wav")
        given = SegmentManifest(
            recording_id="rec-a", subject_id="s1",
            spans=(SegmentSpan(start_s=0.25, end_s=1.0, kind="vowel",
                               vowel_label="e"),))
        write_manifest(tmp_path / "given" / "rec-a.json", given)
        summary = segment_audio(tmp_path / "audio", tmp_path / "manifests",
                                manifests_in=tmp_path / "given")
        assert summary.n_spans == 1
        manifest = ingest_manifest(tmp_path / "manifests" / "rec-a.json")
        assert manifest.spans == given.spans

    def test_silent_recording_keeps_empty_manifest(self, tmp_path):
        write_wav_pcm16(tmp_path / "audio" / "s1" / "quiet.wav",
                        np.zeros(16_000), 16_000)
        summary = segment_audio(tmp_path / "audio", tmp_path / "manifests")
        assert summary.n_spans == 0
        assert summary.errors == ()
        manifest = ingest_manifest(tmp_path / "manifests" / "quiet.json")
        assert manifest.spans == ()

    def test_bad_file_collected_not_raised(self, tmp_path):
        _speech_like(tmp_path / "audio" / "s1" / "rec-good.wav")
        (tmp_path / "audio" / "s1" / "rec-bad.wav").write_bytes(b"not audio")
        summary = segment_audio(tmp_path / "audio", tmp_path / "manifests")
        assert summary.n_recordings == 2
        assert summary.n_spans == 2
        assert len(summary.errors) == 1
        path, message = summary.errors[0]
        assert "rec-bad.wav" in path
        assert "MalformedHeaderError" in message
        assert (tmp_path / "manifests" / "rec-good.json").is_file()

    def test_segments_dir_writes_slices(self, tmp_path):
        _speech_like(tmp_path / "audio" / "s1" / "rec-a.wav")
        summary = segment_audio(tmp_path / "audio", tmp_path / "manifests",
                                segments_dir=tmp_path / "segments")
        assert summary.n_segment_files == 2
        names = sorted(p.name for p in (tmp_path / "segments" / "s1").glob("*.wav"))
        assert names == ["rec-a-000.wav", "rec-a-001.wav"]

    def test_single_file_input(self, tmp_path):
        wav = _speech_like(tmp_path / "audio" / "s9" / "solo.wav")
        summary = segment_audio(wav, tmp_path / "manifests")
        assert summary.n_recordings == 1
        assert ingest_manifest(tmp_path / "manifests" / "solo.json").subject_id == "s9"

    def test_no_audio_rejected(self, tmp_path):
        (tmp_path / "audio").mkdir()
        with pytest.raises(MissingFileError):
            segment_audio(tmp_path / "audio", tmp_path / "manifests")
        with pytest.raises(MissingFileError):
            segment_audio(tmp_path / "missing", tmp_path / "manifests")


class TestCanonicalize:
    def test_rate_and_peak(self):
        x = make_tone(200.0, 0.5, 48_000, amplitude=0.2)
        out = canonicalize(AudioBuffer(samples=x, sample_rate_hz=48_000,
                                       source_id="t"))
        assert out.sample_rate_hz == 16_000
        assert abs(float(np.max(np.abs(out.samples))) - 0.95) < 1e-6

    def test_segment_id_format(self):
        assert segment_id_for("rec-a", 0) == "rec-a-000"
        assert segment_id_for("rec-a", 12) == "rec-a-012"


def test_collect_stats_totals(tiny_cohort):
    rows = collect_stats(tiny_cohort.layout.manifests_dir)
    assert [r.label for r in rows] == [
        "Pic. Desc.", "Neut. Texts", "Vowels", "Total"]
    total = rows[-1]
    assert total.count == tiny_cohort.layout.n_spans
    vowels = rows[2]
    assert vowels.count == 4 * 5
    assert 0.5 <= vowels.min_s and vowels.max_s <= 0.9
