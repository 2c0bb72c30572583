"""Synthetic cohort generation: voiced audio with controllable class
effects, matching manifests, and a metadata table.

Audio is source-filter synthesis: a glottal pulse train with adjustable
per-period timing and amplitude perturbation, shaped by second-order
formant resonators. Class separation is injected through explicit knobs
(pitch shift, perturbation increments, boolean answer probabilities), so
evaluations on the output have known expected behavior: all knobs at
zero means no class signal anywhere.

Determinism: subject i is generated by ``default_rng([seed, i])``, so
output bytes depend only on the config.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .audio_io import AudioBuffer, write_wav
from .cohort import GENDERS, SubjectRecord, write_metadata_csv
from .errors import InvalidSpecError
from .segmenter import SegmentManifest, SegmentSpan, write_manifest

VOWEL_FORMANTS = {
    "a": (800.0, 1200.0),
    "e": (450.0, 2200.0),
    "i": (300.0, 2600.0),
    "o": (450.0, 800.0),
    "u": (325.0, 700.0),
}

FORMANT_BANDWIDTH_HZ = 80.0
PULSE_MS = 3.0
LEAD_SILENCE_S = 0.05


@dataclass(frozen=True)
class SynthConfig:
    """Cohort size, class effects, and metadata answer probabilities.

    metadata_determinism maps a boolean metadata field to the probability
    of a 'yes' answer given (high risk, low risk); 0.3/0.3 carries no
    signal.
    """

    n_subjects: int = 20
    class_ratio: float = 0.5
    seed: int = 0
    sample_rate_hz: int = 16_000
    f0_low_range_hz: tuple[float, float] = (110.0, 140.0)
    f0_shift_hz: float = 0.0
    jitter_base: float = 0.005
    jitter_shift: float = 0.0
    shimmer_base: float = 0.02
    shimmer_shift: float = 0.0
    bdi_shift: float = 0.0
    missing_rate: float = 0.0
    n_text_recordings: int = 2
    n_picdesc_recordings: int = 2
    metadata_determinism: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_subjects < 4:
            raise InvalidSpecError("a cohort needs at least 4 subjects")
        if not 0.0 < self.class_ratio < 1.0:
            raise InvalidSpecError("class_ratio must lie strictly in (0, 1)")
        n_high = round(self.class_ratio * self.n_subjects)
        if n_high < 2 or self.n_subjects - n_high < 2:
            raise InvalidSpecError(
                f"class_ratio {self.class_ratio} leaves fewer than 2 subjects "
                "in one class"
            )
        if not 0.0 <= self.missing_rate < 1.0:
            raise InvalidSpecError("missing_rate must lie in [0, 1)")
        if self.n_text_recordings < 0 or self.n_picdesc_recordings < 0:
            raise InvalidSpecError("recording counts cannot be negative")

    def answer_probs(self, fld: str) -> tuple[float, float]:
        return tuple(self.metadata_determinism.get(fld, (0.3, 0.3)))

    def is_high_risk(self, subject_index: int) -> bool:
        # spread the high-risk class evenly over the index range so any
        # prefix of subjects stays close to the configured ratio
        n_high = round(self.class_ratio * self.n_subjects)
        lo = subject_index * n_high // self.n_subjects
        hi = (subject_index + 1) * n_high // self.n_subjects
        return hi > lo


@dataclass(frozen=True)
class CohortLayout:
    """Where a generated cohort landed on disk."""

    out_dir: Path
    audio_dir: Path
    manifests_dir: Path
    metadata_path: Path
    subject_ids: tuple[str, ...]
    n_recordings: int
    n_spans: int


def _resonator_coeffs(f_hz: float, bw_hz: float, sr: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.exp(-np.pi * bw_hz / sr)
    theta = 2.0 * np.pi * f_hz / sr
    a = np.array([1.0, -2.0 * r * np.cos(theta), r * r])
    return np.array([1.0 - r]), a


def _pulse_train(duration_s: float, f0_hz: float, jitter: float, shimmer: float,
                 sr: int, rng: np.random.Generator) -> np.ndarray:
    """Glottal excitation: raised-cosine pulses with perturbed timing and height."""
    n = int(round(duration_s * sr))
    out = np.zeros(n)
    pulse_len = max(4, int(round(PULSE_MS * sr / 1000.0)))
    pulse = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(pulse_len) / (pulse_len - 1))
    period = sr / f0_hz
    t = 0.0
    while t < n - pulse_len:
        k = int(round(t))
        height = 1.0 + shimmer * float(np.clip(rng.standard_normal(), -2.0, 2.0))
        out[k : k + pulse_len] += max(height, 0.05) * pulse
        t += period * (1.0 + jitter * float(np.clip(rng.standard_normal(), -2.0, 2.0)))
    return out


def _voiced_sound(duration_s: float, f0_hz: float, formants: tuple[float, float],
                  jitter: float, shimmer: float, sr: int,
                  rng: np.random.Generator) -> np.ndarray:
    excitation = _pulse_train(duration_s, f0_hz, jitter, shimmer, sr, rng)
    y = excitation
    for f in formants:
        b, a = _resonator_coeffs(f, FORMANT_BANDWIDTH_HZ, sr)
        y = lfilter(b, a, y)
    peak = float(np.max(np.abs(y)))
    if peak > 0:
        y = 0.3 * y / peak
    return y


def _pad(x: np.ndarray, before_s: float, after_s: float, sr: int) -> np.ndarray:
    return np.concatenate([
        np.zeros(int(round(before_s * sr))), x, np.zeros(int(round(after_s * sr)))
    ])


@dataclass(frozen=True)
class _SubjectTraits:
    f0_hz: float
    jitter: float
    shimmer: float
    is_high: bool


def _subject_traits(cfg: SynthConfig, rng: np.random.Generator,
                    is_high: bool) -> _SubjectTraits:
    lo, hi = cfg.f0_low_range_hz
    f0 = float(rng.uniform(lo, hi))
    jitter = cfg.jitter_base
    shimmer = cfg.shimmer_base
    if is_high:
        f0 += cfg.f0_shift_hz
        jitter += cfg.jitter_shift
        shimmer += cfg.shimmer_shift
    return _SubjectTraits(f0_hz=f0, jitter=jitter, shimmer=shimmer, is_high=is_high)


def _vowel_recording(subject_id: str, vowel: str, traits: _SubjectTraits,
                     cfg: SynthConfig, rng: np.random.Generator):
    sr = cfg.sample_rate_hz
    duration = float(rng.uniform(0.5, 0.9))
    sound = _voiced_sound(duration, traits.f0_hz, VOWEL_FORMANTS[vowel],
                          traits.jitter, traits.shimmer, sr, rng)
    samples = _pad(sound, LEAD_SILENCE_S, LEAD_SILENCE_S, sr)
    recording_id = f"{subject_id}-vowel-{vowel}"
    span = SegmentSpan(start_s=LEAD_SILENCE_S, end_s=LEAD_SILENCE_S + duration,
                       kind="vowel", vowel_label=vowel)
    manifest = SegmentManifest(recording_id=recording_id, subject_id=subject_id,
                               spans=(span,))
    return AudioBuffer(samples=samples, sample_rate_hz=sr, source_id=recording_id), manifest


def _speech_recording(subject_id: str, recording_id: str, kind: str,
                      traits: _SubjectTraits, cfg: SynthConfig,
                      rng: np.random.Generator):
    """Sentence-like stretches of syllables separated by clear pauses."""
    sr = cfg.sample_rate_hz
    vowels = sorted(VOWEL_FORMANTS)
    pieces = [np.zeros(int(round(LEAD_SILENCE_S * sr)))]
    spans = []
    cursor = LEAD_SILENCE_S
    n_sentences = int(rng.integers(3, 5))
    for _ in range(n_sentences):
        sentence_start = cursor
        n_syllables = int(rng.integers(4, 9))
        for s in range(n_syllables):
            dur = float(rng.uniform(0.12, 0.25))
            vowel = vowels[int(rng.integers(0, len(vowels)))]
            # mild declination over the sentence keeps contours non-flat
            f0 = traits.f0_hz * (1.0 + 0.08 * float(rng.uniform(-1.0, 1.0)) - 0.03 * s / n_syllables)
            sound = _voiced_sound(dur, f0, VOWEL_FORMANTS[vowel],
                                  traits.jitter, traits.shimmer, sr, rng)
            pieces.append(sound)
            cursor += dur
            if s < n_syllables - 1:
                gap = float(rng.uniform(0.03, 0.08))
                pieces.append(np.zeros(int(round(gap * sr))))
                cursor += gap
        spans.append(SegmentSpan(start_s=sentence_start, end_s=cursor, kind=kind))
        pause = float(rng.uniform(0.45, 0.7))
        pieces.append(np.zeros(int(round(pause * sr))))
        cursor += pause
    samples = np.concatenate(pieces)
    manifest = SegmentManifest(recording_id=recording_id, subject_id=subject_id,
                               spans=tuple(spans))
    return AudioBuffer(samples=samples, sample_rate_hz=sr, source_id=recording_id), manifest


def _maybe_missing(value, rng: np.random.Generator, rate: float):
    if rate > 0.0 and rng.uniform() < rate:
        return None
    return value


def _subject_metadata(subject_id: str, index: int, traits: _SubjectTraits,
                      cfg: SynthConfig, rng: np.random.Generator) -> SubjectRecord:
    rating = int(rng.integers(5, 7)) if traits.is_high else int(rng.integers(1, 5))
    booleans = {}
    for fld in ("suicide_attempt_history", "firearm_or_lethal_medication_access",
                "sexual_abuse_trauma", "stress_situation", "substance_abuse",
                "mania", "nssi"):
        p_high, p_low = cfg.answer_probs(fld)
        p = p_high if traits.is_high else p_low
        booleans[fld] = _maybe_missing(bool(rng.uniform() < p), rng, cfg.missing_rate)
    bdi = float(np.round(rng.uniform(0.0, 30.0), 1))
    if traits.is_high:
        bdi = min(bdi + cfg.bdi_shift, 63.0)
    return SubjectRecord(
        subject_id=subject_id,
        clinician_rating=rating,
        age=_maybe_missing(float(rng.integers(18, 66)), rng, cfg.missing_rate),
        gender=_maybe_missing(GENDERS[int(rng.integers(0, 3))], rng, cfg.missing_rate),
        height_cm=_maybe_missing(float(rng.integers(150, 196)), rng, cfg.missing_rate),
        weight_kg=_maybe_missing(float(rng.integers(45, 111)), rng, cfg.missing_rate),
        hopelessness=_maybe_missing(int(rng.integers(0, 5)), rng, cfg.missing_rate),
        bdi_score=_maybe_missing(bdi, rng, cfg.missing_rate),
        **booleans,
    )


def generate_cohort(out_dir, config: SynthConfig = SynthConfig()) -> CohortLayout:
    """Write a full synthetic cohort under out_dir.

    Layout: audio/<subject>/<recording>.wav, manifests/<recording>.json,
    metadata.csv. High-risk subjects are spread evenly over the index
    range at the configured class ratio.
    """
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    manifests_dir = out_dir / "manifests"
    subject_ids = []
    records = []
    n_recordings = 0
    n_spans = 0
    for i in range(config.n_subjects):
        rng = np.random.default_rng([config.seed, i])
        subject_id = f"subj-{i:03d}"
        subject_ids.append(subject_id)
        is_high = config.is_high_risk(i)
        traits = _subject_traits(config, rng, is_high)

        outputs = []
        for vowel in sorted(VOWEL_FORMANTS):
            outputs.append(_vowel_recording(subject_id, vowel, traits, config, rng))
        for t in range(config.n_text_recordings):
            outputs.append(_speech_recording(
                subject_id, f"{subject_id}-text-{t}", "neutral_text",
                traits, config, rng))
        for p in range(config.n_picdesc_recordings):
            outputs.append(_speech_recording(
                subject_id, f"{subject_id}-picdesc-{p}", "picture_description",
                traits, config, rng))

        for buffer, manifest in outputs:
            write_wav(audio_dir / subject_id / f"{manifest.recording_id}.wav", buffer)
            write_manifest(manifests_dir / f"{manifest.recording_id}.json", manifest)
            n_recordings += 1
            n_spans += len(manifest.spans)

        records.append(_subject_metadata(subject_id, i, traits, config, rng))

    metadata_path = out_dir / "metadata.csv"
    write_metadata_csv(metadata_path, records)
    return CohortLayout(
        out_dir=out_dir,
        audio_dir=audio_dir,
        manifests_dir=manifests_dir,
        metadata_path=metadata_path,
        subject_ids=tuple(subject_ids),
        n_recordings=n_recordings,
        n_spans=n_spans,
    )
