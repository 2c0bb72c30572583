"""Assembly of the low-level descriptor matrix: one row per 10 ms hop,
one column per descriptor, plus the per-frame voicing mask.

Pitch-dependent columns hold 0.0 on unvoiced frames; the mask records
which frames carry real values so functionals can exclude placeholders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..audio_io import AudioBuffer
from ..errors import EmptyLldError, NonFiniteValueError
from .framing import frame_count, frame_lengths, frame_signal, pad_to_one_frame
from .pitch import PitchConfig, pitch_track, semitones_from_hz
from .spectral import (
    mfcc,
    power_spectrogram,
    spectral_centroid_hz,
    spectral_flux,
    spectral_rolloff_hz,
    spectral_slope_db_per_hz,
)
from .voice_quality import voice_quality_track

ENERGY_FLOOR_DB = -120.0
SPECTRAL_FFT_SIZE = 512

LLD_NAMES = (
    "f0_semitone",
    "f0_hz",
    "voicing_prob",
    "jitter_local",
    "shimmer_local",
    "hnr_db",
    "energy_db",
    "zcr",
    "spectral_centroid_hz",
    "spectral_slope_0_500",
    "spectral_slope_500_1500",
    "spectral_flux",
    "spectral_rolloff85_hz",
) + tuple(f"mfcc_{i:02d}" for i in range(13))

VOICED_ONLY = frozenset(
    {"f0_semitone", "f0_hz", "jitter_local", "shimmer_local", "hnr_db"}
)


@dataclass(frozen=True)
class LldConfig:
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    pitch: PitchConfig = field(default_factory=PitchConfig)


@dataclass(frozen=True)
class LldMatrix:
    """Descriptor contours of one segment: values is (n_frames, n_names)."""

    names: tuple[str, ...]
    values: np.ndarray
    voiced: np.ndarray
    frame_ms: float
    hop_ms: float

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise EmptyLldError(
                f"values shape {self.values.shape} does not match {len(self.names)} names"
            )
        if len(self.voiced) != len(self.values):
            raise EmptyLldError("voicing mask length does not match frame count")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteValueError("descriptor matrix contains non-finite values")

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    @property
    def n_frames(self) -> int:
        return len(self.values)


def compute_lld(buffer: AudioBuffer, config: LldConfig = LldConfig()) -> LldMatrix:
    """Extract all low-level descriptor contours from one segment.

    A segment shorter than one frame is zero-padded to a single frame so
    every non-empty segment yields at least one row.
    """
    if len(buffer) == 0:
        raise EmptyLldError("cannot extract descriptors from an empty segment")
    sr = buffer.sample_rate_hz
    frame_len, hop_len = frame_lengths(sr, config.frame_ms, config.hop_ms)
    x = pad_to_one_frame(buffer.samples, frame_len)
    n_frames = frame_count(len(x), frame_len, hop_len)

    track = pitch_track(x, sr, config.pitch)
    jit, shim, hnr = voice_quality_track(x, sr, track, frame_len, hop_len,
                                         fmin_hz=config.pitch.fmin_hz)

    frames = frame_signal(x, frame_len, hop_len)
    rms = np.sqrt(np.mean(frames**2, axis=1))
    energy_db = 20.0 * np.log10(np.maximum(rms, 10.0 ** (ENERGY_FLOOR_DB / 20.0)))
    nonneg = frames >= 0.0
    zcr = np.count_nonzero(nonneg[:, 1:] != nonneg[:, :-1], axis=1) / (frame_len - 1)

    power = power_spectrogram(x, sr, SPECTRAL_FFT_SIZE, config.frame_ms, config.hop_ms)
    bin_hz = np.arange(power.shape[1]) * sr / SPECTRAL_FFT_SIZE
    centroid = spectral_centroid_hz(power, bin_hz)
    slope_lo = spectral_slope_db_per_hz(power, bin_hz, 0.0, 500.0)
    slope_hi = spectral_slope_db_per_hz(power, bin_hz, 500.0, 1500.0)
    flux = spectral_flux(power)
    rolloff = spectral_rolloff_hz(power, bin_hz)
    ceps = mfcc(x, sr, frame_ms=config.frame_ms, hop_ms=config.hop_ms)

    values = np.zeros((n_frames, len(LLD_NAMES)))
    cols = {name: j for j, name in enumerate(LLD_NAMES)}
    values[:, cols["f0_semitone"]] = semitones_from_hz(track.f0_hz)
    values[:, cols["f0_hz"]] = track.f0_hz
    values[:, cols["voicing_prob"]] = track.voicing_prob
    values[:, cols["jitter_local"]] = jit
    values[:, cols["shimmer_local"]] = shim
    values[:, cols["hnr_db"]] = hnr
    values[:, cols["energy_db"]] = energy_db
    values[:, cols["zcr"]] = zcr
    values[:, cols["spectral_centroid_hz"]] = centroid
    values[:, cols["spectral_slope_0_500"]] = slope_lo
    values[:, cols["spectral_slope_500_1500"]] = slope_hi
    values[:, cols["spectral_flux"]] = flux
    values[:, cols["spectral_rolloff85_hz"]] = rolloff
    for i in range(13):
        values[:, cols[f"mfcc_{i:02d}"]] = ceps[:, i]

    return LldMatrix(names=LLD_NAMES, values=values, voiced=track.voiced,
                     frame_ms=config.frame_ms, hop_ms=config.hop_ms)
