"""Short-time spectral descriptors, the 128-band log-mel spectrogram and
mel-frequency cepstral coefficients.

Mel warping follows 2595 * log10(1 + f / 700); triangular filters peak at
1 so a pure tone's energy lands in the band whose center is nearest the
tone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.fft import dct

from ..errors import EmptyBufferError
from .framing import analysis_window, frame_lengths, frame_signal, pad_to_one_frame

MEL_BANDS_DEFAULT = 128
LOG_FLOOR_DB = -80.0


def hz_to_mel(f_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, fft_size: int, sample_rate_hz: int,
                   fmin_hz: float = 0.0, fmax_hz: Optional[float] = None) -> np.ndarray:
    """Triangular mel filters over rfft bins, shape (n_mels, fft_size//2+1)."""
    if fmax_hz is None:
        fmax_hz = sample_rate_hz / 2.0
    if not 0.0 <= fmin_hz < fmax_hz <= sample_rate_hz / 2.0:
        raise ValueError(f"need 0 <= fmin < fmax <= nyquist, got [{fmin_hz}, {fmax_hz}]")
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), n_mels + 2))
    bin_hz = np.arange(fft_size // 2 + 1) * sample_rate_hz / fft_size
    fb = np.zeros((n_mels, len(bin_hz)))
    for m in range(n_mels):
        left, center, right = edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]
        up = (bin_hz - left) / max(center - left, 1e-12)
        down = (right - bin_hz) / max(right - center, 1e-12)
        fb[m] = np.clip(np.minimum(up, down), 0.0, 1.0)
    return fb


@dataclass(frozen=True)
class MelSpecConfig:
    n_mels: int = MEL_BANDS_DEFAULT
    fft_size: int = 1024
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    window: str = "hann"
    fmin_hz: float = 0.0
    fmax_hz: Optional[float] = None
    log_floor_db: float = LOG_FLOOR_DB


def power_spectrogram(x: np.ndarray, sample_rate_hz: int, fft_size: int,
                      frame_ms: float = 25.0, hop_ms: float = 10.0,
                      window: str = "hann") -> np.ndarray:
    """|rfft|^2 of windowed frames, shape (n_frames, fft_size//2+1)."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) == 0:
        raise EmptyBufferError("cannot analyze an empty signal")
    frame_len, hop_len = frame_lengths(sample_rate_hz, frame_ms, hop_ms)
    x = pad_to_one_frame(x, frame_len)
    frames = frame_signal(x, frame_len, hop_len) * analysis_window(frame_len, window)
    # frames longer than fft_size are truncated by rfft; the pipeline's
    # canonical 16 kHz rate keeps 25 ms frames under both fft sizes used
    spec = np.fft.rfft(frames, n=fft_size, axis=1)
    return np.abs(spec) ** 2


def mel_spectrogram(x: np.ndarray, sample_rate_hz: int,
                    config: MelSpecConfig = MelSpecConfig()) -> np.ndarray:
    """Log-power mel spectrogram, shape (n_frames, n_mels).

    Values are 10*log10 of mel-filtered power, clamped below at the
    configured floor; silent frames sit exactly on the floor.
    """
    power = power_spectrogram(x, sample_rate_hz, config.fft_size,
                              config.frame_ms, config.hop_ms, config.window)
    fb = mel_filterbank(config.n_mels, config.fft_size, sample_rate_hz,
                        config.fmin_hz, config.fmax_hz)
    mel_power = power @ fb.T
    floor = 10.0 ** (config.log_floor_db / 10.0)
    return 10.0 * np.log10(np.maximum(mel_power, floor))


def mfcc(x: np.ndarray, sample_rate_hz: int, n_coeffs: int = 13,
         n_bands: int = 26, fft_size: int = 512,
         frame_ms: float = 25.0, hop_ms: float = 10.0) -> np.ndarray:
    """Cepstral coefficients from a 26-band log mel spectrum, DCT-II ortho."""
    power = power_spectrogram(x, sample_rate_hz, fft_size, frame_ms, hop_ms, "hamming")
    fb = mel_filterbank(n_bands, fft_size, sample_rate_hz)
    log_mel = np.log(np.maximum(power @ fb.T, 1e-10))
    return dct(log_mel, type=2, norm="ortho", axis=1)[:, :n_coeffs]


def spectral_centroid_hz(power: np.ndarray, bin_hz: np.ndarray) -> np.ndarray:
    """Power-weighted mean frequency per frame; 0 on silent frames."""
    total = power.sum(axis=1)
    out = np.zeros(len(power))
    active = total > 0.0
    out[active] = (power[active] @ bin_hz) / total[active]
    return out


def spectral_slope_db_per_hz(power: np.ndarray, bin_hz: np.ndarray,
                             lo_hz: float, hi_hz: float,
                             floor_db: float = LOG_FLOOR_DB) -> np.ndarray:
    """Least-squares slope of the dB spectrum against Hz inside a band."""
    sel = (bin_hz >= lo_hz) & (bin_hz <= hi_hz)
    if np.count_nonzero(sel) < 2:
        return np.zeros(len(power))
    f = bin_hz[sel]
    level_db = 10.0 * np.log10(np.maximum(power[:, sel], 10.0 ** (floor_db / 10.0)))
    f_c = f - f.mean()
    denom = float(np.dot(f_c, f_c))
    return (level_db - level_db.mean(axis=1, keepdims=True)) @ f_c / denom


def spectral_flux(power: np.ndarray) -> np.ndarray:
    """Mean squared magnitude change between successive frames; first is 0."""
    mag = np.sqrt(power)
    out = np.zeros(len(power))
    if len(power) > 1:
        out[1:] = np.mean((mag[1:] - mag[:-1]) ** 2, axis=1)
    return out


def spectral_rolloff_hz(power: np.ndarray, bin_hz: np.ndarray,
                        fraction: float = 0.85) -> np.ndarray:
    """Lowest frequency below which the given fraction of power lies."""
    total = power.sum(axis=1)
    out = np.zeros(len(power))
    active = total > 0.0
    if np.any(active):
        cum = np.cumsum(power[active], axis=1)
        idx = np.argmax(cum >= fraction * total[active, None], axis=1)
        out[active] = bin_hz[idx]
    return out
