"""Fundamental frequency tracking via the cumulative mean normalized
difference function, with parabolic lag refinement.

The difference function is evaluated with FFT cross-correlation plus
sliding energies, so cost per frame is O(n log n) in the analysis window
length rather than O(n * tau_max).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .framing import frame_count, frame_lengths

DEFAULT_F0_MIN_HZ = 60.0
DEFAULT_F0_MAX_HZ = 500.0
DEFAULT_VOICING_THRESHOLD = 0.45


@dataclass(frozen=True)
class PitchConfig:
    fmin_hz: float = DEFAULT_F0_MIN_HZ
    fmax_hz: float = DEFAULT_F0_MAX_HZ
    threshold: float = DEFAULT_VOICING_THRESHOLD
    frame_ms: float = 25.0
    hop_ms: float = 10.0

    def __post_init__(self):
        if not 0.0 < self.fmin_hz < self.fmax_hz:
            raise ValueError(f"need 0 < fmin < fmax, got [{self.fmin_hz}, {self.fmax_hz}]")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"voicing threshold must lie in (0, 1), got {self.threshold}")


@dataclass(frozen=True)
class PitchTrack:
    """Per-frame pitch estimates. f0_hz is 0.0 on unvoiced frames."""

    f0_hz: np.ndarray
    voiced: np.ndarray
    voicing_prob: np.ndarray

    def __len__(self) -> int:
        return len(self.f0_hz)


def _difference_function(window: np.ndarray, width: int, tau_max: int) -> np.ndarray:
    """d(tau) for tau in [0, tau_max], comparing window[0:width] against
    window[tau:tau+width]."""
    sq = np.concatenate(([0.0], np.cumsum(window * window)))
    e0 = sq[width]
    e_tau = sq[width : width + tau_max + 1] - sq[: tau_max + 1]
    n = next_fast_len(len(window) + width)
    spec = np.fft.rfft(window, n)
    ref = np.fft.rfft(window[:width], n)
    corr = np.fft.irfft(np.conj(ref) * spec, n)[: tau_max + 1]
    d = e0 + e_tau - 2.0 * corr
    return np.maximum(d, 0.0)  # guard fp noise; d is a sum of squares


def _cmndf(d: np.ndarray) -> np.ndarray:
    out = np.ones_like(d)
    running = np.cumsum(d[1:])
    valid = running > 0.0
    taus = np.arange(1, len(d), dtype=np.float64)
    out[1:][valid] = d[1:][valid] * taus[valid] / running[valid]
    return out


def _pick_lag(cmndf: np.ndarray, tau_min: int, threshold: float) -> int:
    below = np.nonzero(cmndf[tau_min:] < threshold)[0]
    if len(below):
        tau = tau_min + int(below[0])
        while tau + 1 < len(cmndf) and cmndf[tau + 1] < cmndf[tau]:
            tau += 1
        return tau
    return tau_min + int(np.argmin(cmndf[tau_min:]))


def _refine_lag(d: np.ndarray, tau: int) -> float:
    """Parabolic vertex through the raw difference values around tau.

    The raw function is used because the cumulative normalization tilts
    the dip and would bias the vertex.
    """
    if tau <= 0 or tau >= len(d) - 1:
        return float(tau)
    left, mid, right = d[tau - 1], d[tau], d[tau + 1]
    denom = left - 2.0 * mid + right
    if denom <= 0.0:
        return float(tau)
    offset = 0.5 * (left - right) / denom
    return tau + float(np.clip(offset, -1.0, 1.0))


def pitch_track(x: np.ndarray, sample_rate_hz: int,
                config: PitchConfig = PitchConfig()) -> PitchTrack:
    """Track f0 over 25 ms frames at a 10 ms hop.

    Each frame's analysis window spans two maximum periods around the frame
    center; signal edges are zero-padded. Frames whose normalized
    difference minimum exceeds the threshold are unvoiced.
    """
    if sample_rate_hz < 2.0 * config.fmax_hz:
        raise ValueError(
            f"sample rate {sample_rate_hz} cannot represent f0 up to {config.fmax_hz} Hz"
        )
    x = np.asarray(x, dtype=np.float64)
    frame_len, hop_len = frame_lengths(sample_rate_hz, config.frame_ms, config.hop_ms)
    n_frames = frame_count(len(x), frame_len, hop_len)

    tau_min = max(1, int(np.floor(sample_rate_hz / config.fmax_hz)))
    tau_max = int(np.ceil(sample_rate_hz / config.fmin_hz))
    padded = np.concatenate([np.zeros(tau_max), x, np.zeros(2 * tau_max)])

    f0 = np.zeros(n_frames)
    voiced = np.zeros(n_frames, dtype=bool)
    prob = np.zeros(n_frames)
    for i in range(n_frames):
        center = i * hop_len + frame_len // 2
        window = padded[center : center + 2 * tau_max]  # centered: padding shifts by tau_max
        d = _difference_function(window, tau_max, tau_max)
        cm = _cmndf(d)
        tau = _pick_lag(cm, tau_min, config.threshold)
        prob[i] = float(np.clip(1.0 - cm[tau], 0.0, 1.0))
        if cm[tau] <= config.threshold:
            lag = _refine_lag(d, tau)
            if lag > 0:
                voiced[i] = True
                f0[i] = sample_rate_hz / lag
    return PitchTrack(f0_hz=f0, voiced=voiced, voicing_prob=prob)


def semitones_from_hz(f0_hz: np.ndarray, ref_hz: float = 27.5) -> np.ndarray:
    """Logarithmic pitch scale relative to 27.5 Hz; zeros pass through."""
    f0_hz = np.asarray(f0_hz, dtype=np.float64)
    out = np.zeros_like(f0_hz)
    pos = f0_hz > 0
    out[pos] = 12.0 * np.log2(f0_hz[pos] / ref_hz)
    return out
