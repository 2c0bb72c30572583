"""Low-level descriptor extraction: framing, pitch, voice quality,
spectral shape, and the functionals that summarize contours."""

from .framing import analysis_window, frame_lengths, frame_signal
from .functionals import COMPACT_FUNCTIONALS, EXTENDED_FUNCTIONALS, apply_functionals
from .lld import LLD_NAMES, VOICED_ONLY, LldConfig, LldMatrix, compute_lld
from .pitch import PitchConfig, PitchTrack, pitch_track, semitones_from_hz
from .spectral import MelSpecConfig, mel_filterbank, mel_spectrogram, mfcc
from .voice_quality import (
    harmonic_correlation,
    hnr_from_correlation,
    jitter_local,
    pick_pulses,
    shimmer_local,
)

__all__ = [
    "COMPACT_FUNCTIONALS",
    "EXTENDED_FUNCTIONALS",
    "LLD_NAMES",
    "VOICED_ONLY",
    "LldConfig",
    "LldMatrix",
    "MelSpecConfig",
    "PitchConfig",
    "PitchTrack",
    "analysis_window",
    "apply_functionals",
    "compute_lld",
    "frame_lengths",
    "frame_signal",
    "harmonic_correlation",
    "hnr_from_correlation",
    "jitter_local",
    "mel_filterbank",
    "mel_spectrogram",
    "mfcc",
    "pick_pulses",
    "pitch_track",
    "semitones_from_hz",
    "shimmer_local",
]
