"""Frame slicing and analysis windows shared by every contour extractor."""

from __future__ import annotations

import numpy as np

from ..errors import BufferTooShortError

DEFAULT_FRAME_MS = 25.0
DEFAULT_HOP_MS = 10.0

_WINDOWS = ("hann", "hamming", "gauss", "rect")


def frame_lengths(sample_rate_hz: int, frame_ms: float = DEFAULT_FRAME_MS,
                  hop_ms: float = DEFAULT_HOP_MS) -> tuple[int, int]:
    frame_len = int(round(frame_ms * sample_rate_hz / 1000.0))
    hop_len = int(round(hop_ms * sample_rate_hz / 1000.0))
    if frame_len < 1 or hop_len < 1:
        raise ValueError("frame_ms and hop_ms must each cover at least one sample")
    return frame_len, hop_len


def frame_count(n_samples: int, frame_len: int, hop_len: int) -> int:
    if n_samples < frame_len:
        return 0
    return (n_samples - frame_len) // hop_len + 1


def frame_signal(x: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    """Slice a 1-D signal into overlapping frames, shape (n_frames, frame_len).

    The tail shorter than one frame is discarded. A signal shorter than one
    frame cannot be framed at all.
    """
    x = np.asarray(x, dtype=np.float64)
    n = frame_count(len(x), frame_len, hop_len)
    if n == 0:
        raise BufferTooShortError(
            f"signal of {len(x)} samples is shorter than one {frame_len}-sample frame"
        )
    idx = np.arange(frame_len)[None, :] + hop_len * np.arange(n)[:, None]
    return x[idx]


def frame_centers_s(n_frames: int, frame_len: int, hop_len: int,
                    sample_rate_hz: int) -> np.ndarray:
    """Center time of each frame in seconds."""
    starts = hop_len * np.arange(n_frames)
    return (starts + frame_len / 2.0) / sample_rate_hz


def analysis_window(frame_len: int, kind: str = "hann") -> np.ndarray:
    """Periodic analysis windows. gauss uses sigma = 0.4 half-widths."""
    if kind not in _WINDOWS:
        raise ValueError(f"unknown window kind {kind!r}, expected one of {_WINDOWS}")
    n = np.arange(frame_len, dtype=np.float64)
    if kind == "rect":
        return np.ones(frame_len)
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / frame_len)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / frame_len)
    half = (frame_len - 1) / 2.0
    return np.exp(-0.5 * ((n - half) / (0.4 * half)) ** 2)


def pad_to_one_frame(x: np.ndarray, frame_len: int) -> np.ndarray:
    """Zero-pad a non-empty signal up to a single frame length."""
    if len(x) >= frame_len:
        return x
    out = np.zeros(frame_len, dtype=np.float64)
    out[: len(x)] = x
    return out
