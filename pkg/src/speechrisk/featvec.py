"""Fixed-length segment feature vectors built from descriptor contours.

Three handcrafted sources are produced per segment:

* compact: 11 contours x 8 functionals + voiced fraction = 89 dims
* extended: 26 contours x 2 (raw, delta) x 20 functionals + voiced
  fraction = 1041 dims
* melspec_summary: per-band mean and std of the 128-band log-mel
  spectrogram = 256 dims

Voiced-only contours are reduced over voiced frames only; a segment with
no voiced frames gets zeros there, and voiced_fraction records absence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import DuplicateFeatureNameError, NonFiniteValueError
from .features.functionals import (
    COMPACT_FUNCTIONALS,
    EXTENDED_FUNCTIONALS,
    apply_functionals,
    contour_delta,
)
from .features.lld import LLD_NAMES, VOICED_ONLY, LldConfig, LldMatrix, compute_lld
from .features.spectral import MelSpecConfig, mel_spectrogram

FEATURE_SOURCES = ("compact", "extended", "melspec_summary")

COMPACT_DESCRIPTORS = (
    "f0_semitone",
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
)

COMPACT_DIM = len(COMPACT_DESCRIPTORS) * len(COMPACT_FUNCTIONALS) + 1
EXTENDED_DIM = len(LLD_NAMES) * 2 * len(EXTENDED_FUNCTIONALS) + 1
MELSPEC_SUMMARY_DIM = 256


@dataclass(frozen=True)
class FeatureVector:
    """Named fixed-length vector for one segment and one source."""

    source: str
    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise NonFiniteValueError(
                f"{len(self.names)} names but {len(self.values)} values"
            )
        if len(set(self.names)) != len(self.names):
            seen, dup = set(), None
            for n in self.names:
                if n in seen:
                    dup = n
                    break
                seen.add(n)
            raise DuplicateFeatureNameError(f"duplicate feature name {dup!r}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteValueError("feature vector contains non-finite values")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.values)


def _masked(lld: LldMatrix, name: str) -> np.ndarray:
    col = lld.column(name)
    return col[lld.voiced] if name in VOICED_ONLY else col


def compact_names() -> tuple[str, ...]:
    names = [f"{d}_{f}" for d in COMPACT_DESCRIPTORS for f in COMPACT_FUNCTIONALS]
    names.append("voiced_fraction")
    return tuple(names)


def extended_names() -> tuple[str, ...]:
    names = [f"{d}_{f}" for d in LLD_NAMES for f in EXTENDED_FUNCTIONALS]
    names += [f"{d}_delta_{f}" for d in LLD_NAMES for f in EXTENDED_FUNCTIONALS]
    names.append("voiced_fraction")
    return tuple(names)


def melspec_summary_names() -> tuple[str, ...]:
    return tuple(f"mel_mean_{i:03d}" for i in range(128)) + tuple(
        f"mel_std_{i:03d}" for i in range(128)
    )


def compact_vector(lld: LldMatrix) -> FeatureVector:
    hop_s = lld.hop_ms / 1000.0
    parts = [
        apply_functionals(_masked(lld, d), hop_s, COMPACT_FUNCTIONALS)
        for d in COMPACT_DESCRIPTORS
    ]
    voiced_fraction = float(np.count_nonzero(lld.voiced)) / max(lld.n_frames, 1)
    values = np.concatenate(parts + [[voiced_fraction]])
    return FeatureVector(source="compact", names=compact_names(), values=values)


def extended_vector(lld: LldMatrix) -> FeatureVector:
    hop_s = lld.hop_ms / 1000.0
    raw = [
        apply_functionals(_masked(lld, d), hop_s, EXTENDED_FUNCTIONALS)
        for d in LLD_NAMES
    ]
    # deltas of voiced-only contours are differences between consecutive
    # voiced frames, not across unvoiced gaps
    delta = [
        apply_functionals(contour_delta(_masked(lld, d)), hop_s, EXTENDED_FUNCTIONALS)
        for d in LLD_NAMES
    ]
    voiced_fraction = float(np.count_nonzero(lld.voiced)) / max(lld.n_frames, 1)
    values = np.concatenate(raw + delta + [[voiced_fraction]])
    return FeatureVector(source="extended", names=extended_names(), values=values)


def melspec_summary_vector(buffer: AudioBuffer,
                           config: MelSpecConfig = MelSpecConfig()) -> FeatureVector:
    spec = mel_spectrogram(buffer.samples, buffer.sample_rate_hz, config)
    values = np.concatenate([spec.mean(axis=0), spec.std(axis=0)])
    return FeatureVector(source="melspec_summary",
                         names=melspec_summary_names(), values=values)


def fuse(speech: FeatureVector, meta: FeatureVector) -> FeatureVector:
    """Concatenate a speech vector with a metadata vector, speech first.

    Name collisions raise, which is why metadata encoders use their own
    naming scheme. Fusing with an empty vector returns the speech vector
    unchanged.
    """
    if len(meta) == 0:
        return speech
    return FeatureVector(
        source=f"{speech.source}+{meta.source}",
        names=speech.names + meta.names,
        values=np.concatenate([speech.values, meta.values]),
    )


def extract_segment_features(buffer: AudioBuffer, sources: tuple[str, ...],
                             lld_config: LldConfig = LldConfig()) -> dict[str, FeatureVector]:
    """Compute the requested feature sources for one segment buffer."""
    unknown = set(sources) - set(FEATURE_SOURCES)
    if unknown:
        raise ValueError(f"unknown feature sources {sorted(unknown)}")
    out: dict[str, FeatureVector] = {}
    lld = None
    if "compact" in sources or "extended" in sources:
        lld = compute_lld(buffer, lld_config)
    if "compact" in sources:
        out["compact"] = compact_vector(lld)
    if "extended" in sources:
        out["extended"] = extended_vector(lld)
    if "melspec_summary" in sources:
        out["melspec_summary"] = melspec_summary_vector(buffer)
    return out
