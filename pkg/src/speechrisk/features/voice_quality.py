"""Cycle-to-cycle perturbation measures (jitter, shimmer) and harmonicity.

Pulse positions are picked on positive peaks guided by the frame's f0
estimate; period and amplitude sequences then feed the local perturbation
quotients. Harmonicity comes straight from the normalized autocorrelation
at the period lag.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonPositiveAmplitudeError, TooFewPeriodsError, UnvoicedFrameError
from .pitch import PitchTrack

HNR_MIN_DB = -20.0
HNR_MAX_DB = 40.0


def jitter_local(periods_s: np.ndarray) -> float:
    """Mean absolute consecutive period difference over mean period."""
    periods_s = np.asarray(periods_s, dtype=np.float64)
    if len(periods_s) < 2:
        raise TooFewPeriodsError(f"jitter needs >= 2 periods, got {len(periods_s)}")
    return float(np.mean(np.abs(np.diff(periods_s))) / np.mean(periods_s))


def shimmer_local(amplitudes: np.ndarray) -> float:
    """Mean absolute consecutive amplitude difference over mean amplitude."""
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    if len(amplitudes) < 2:
        raise TooFewPeriodsError(f"shimmer needs >= 2 amplitudes, got {len(amplitudes)}")
    if np.min(amplitudes) <= 0.0:
        raise NonPositiveAmplitudeError(
            f"shimmer amplitudes must be positive, min is {np.min(amplitudes)}"
        )
    return float(np.mean(np.abs(np.diff(amplitudes))) / np.mean(amplitudes))


def pick_pulses(x: np.ndarray, period_samples: float) -> np.ndarray:
    """Positive-peak pulse marks at roughly one per period.

    The first mark is the maximum over the first 1.5 periods; each next
    mark is the maximum within 0.7..1.3 periods after the previous one.
    """
    x = np.asarray(x, dtype=np.float64)
    if period_samples <= 0 or len(x) == 0:
        return np.zeros(0, dtype=np.intp)
    first_end = min(len(x), max(1, int(round(1.5 * period_samples))))
    if np.max(x[:first_end]) <= 0.0:
        return np.zeros(0, dtype=np.intp)
    peaks = [int(np.argmax(x[:first_end]))]
    while True:
        lo = peaks[-1] + max(1, int(round(0.7 * period_samples)))
        hi = peaks[-1] + int(round(1.3 * period_samples)) + 1
        # a truncated search interval risks marking a cut pulse, which
        # would fake a short period, so stop at the last complete one
        if hi > len(x):
            break
        seg = x[lo:hi]
        if np.max(seg) <= 0.0:
            break
        peaks.append(lo + int(np.argmax(seg)))
    return np.asarray(peaks, dtype=np.intp)


def hnr_from_correlation(r: float) -> float:
    """Map normalized harmonic correlation to dB, clamped to [-20, 40].

    r = 0.5 maps to exactly 0 dB (harmonic and noise power equal).
    """
    if r <= 0.0:
        return HNR_MIN_DB
    if r >= 1.0:
        return HNR_MAX_DB
    return float(np.clip(10.0 * np.log10(r / (1.0 - r)), HNR_MIN_DB, HNR_MAX_DB))


def harmonic_correlation(window: np.ndarray, sample_rate_hz: int, f0_hz: float) -> float:
    """Peak normalized autocorrelation near the period lag.

    Searched lags span floor(period)-1 .. ceil(period)+1 so a slightly off
    f0 estimate still lands on the true peak. The window mean is removed
    first; a window too short for the lag yields r = 0.
    """
    if f0_hz <= 0.0:
        raise UnvoicedFrameError(f"harmonicity needs f0 > 0, got {f0_hz}")
    window = np.asarray(window, dtype=np.float64)
    window = window - window.mean()
    period = sample_rate_hz / f0_hz
    lo = max(1, int(np.floor(period)) - 1)
    hi = int(np.ceil(period)) + 1
    best = 0.0
    for lag in range(lo, hi + 1):
        if lag >= len(window):
            break
        a, b = window[:-lag], window[lag:]
        denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
        if denom > 0.0:
            best = max(best, float(np.dot(a, b) / denom))
    return best


def _vq_window(x: np.ndarray, center: int, vq_len: int) -> np.ndarray:
    """Real samples around a frame center, shifted inward at signal edges."""
    start = max(0, center - vq_len // 2)
    end = min(len(x), start + vq_len)
    start = max(0, end - vq_len)
    return x[start:end]


def voice_quality_track(
    x: np.ndarray,
    sample_rate_hz: int,
    track: PitchTrack,
    frame_len: int,
    hop_len: int,
    fmin_hz: float = 55.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-frame jitter, shimmer and HNR aligned with a pitch track.

    Unvoiced frames hold 0.0 placeholders; so do voiced frames where pulse
    picking finds too few cycles or non-positive peaks (short or clipped
    windows), which keeps the matrix finite for downstream masking.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(track)
    jit = np.zeros(n)
    shim = np.zeros(n)
    hnr = np.zeros(n)
    vq_len = max(frame_len, 2 * int(np.ceil(sample_rate_hz / fmin_hz)))
    for i in range(n):
        if not track.voiced[i]:
            continue
        f0 = float(track.f0_hz[i])
        center = i * hop_len + frame_len // 2
        window = _vq_window(x, center, vq_len)
        hnr[i] = hnr_from_correlation(harmonic_correlation(window, sample_rate_hz, f0))
        peaks = pick_pulses(window, sample_rate_hz / f0)
        if len(peaks) >= 3:
            periods = np.diff(peaks) / sample_rate_hz
            jit[i] = jitter_local(periods)
        amps = window[peaks] if len(peaks) else np.zeros(0)
        if len(amps) >= 2 and np.min(amps) > 0.0:
            shim[i] = shimmer_local(amps)
    return jit, shim, hnr
