"""Test-side signal builders and an independent WAV writer.

The WAV writer here uses the stdlib wave module plus manual struct
packing so file-format tests do not depend on the package's own
audio_io.write_wav being correct.
"""

from __future__ import annotations

import hashlib
import struct
import wave
from pathlib import Path

import numpy as np


def make_tone(freq_hz: float, duration_s: float, sample_rate_hz: int = 16000,
              amplitude: float = 0.5, phase: float = 0.0) -> np.ndarray:
    t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
    return (amplitude * np.sin(2.0 * np.pi * freq_hz * t + phase)).astype(np.float64)


def make_pulse_train(period_s: float, duration_s: float,
                     sample_rate_hz: int = 16000, amplitude: float = 0.8,
                     period_jitter: np.ndarray | None = None,
                     amp_pattern: np.ndarray | None = None) -> np.ndarray:
    """Impulse train with optional per-period perturbations.

    period_jitter holds additive offsets in seconds applied to successive
    inter-pulse intervals; amp_pattern cycles over pulse amplitudes.
    """
    n = int(round(duration_s * sample_rate_hz))
    x = np.zeros(n)
    pos = 0.0
    i = 0
    while int(round(pos)) < n:
        amp = amplitude if amp_pattern is None else amp_pattern[i % len(amp_pattern)]
        x[int(round(pos))] = amp
        step = period_s
        if period_jitter is not None:
            step += period_jitter[i % len(period_jitter)]
        pos += step * sample_rate_hz
        i += 1
    return x


def write_wav_pcm16(path, samples: np.ndarray, sample_rate_hz: int = 16000,
                    channels: int = 1) -> None:
    """Reference PCM16 writer via stdlib wave."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1 and channels > 1:
        samples = np.tile(samples[:, None], (1, channels))
    if samples.ndim == 1:
        samples = samples[:, None]
    ints = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as w:
        w.setnchannels(samples.shape[1])
        w.setsampwidth(2)
        w.setframerate(sample_rate_hz)
        w.writeframes(ints.tobytes())


def write_wav_raw_int16(path, ints: np.ndarray, sample_rate_hz: int = 16000) -> None:
    """Write already-quantized int16 samples without any scaling."""
    ints = np.asarray(ints, dtype="<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate_hz)
        w.writeframes(ints.tobytes())


def write_wav_float32(path, samples: np.ndarray, sample_rate_hz: int = 16000) -> None:
    """Hand-built RIFF file with IEEE float samples (format code 3)."""
    samples = np.asarray(samples, dtype="<f4")
    data = samples.tobytes()
    byte_rate = sample_rate_hz * 4
    fmt = struct.pack("<HHIIHH", 3, 1, sample_rate_hz, byte_rate, 4, 32)
    body = b"WAVE"
    body += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"fact" + struct.pack("<II", 4, len(samples))
    body += b"data" + struct.pack("<I", len(data)) + data
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def write_wav_pcm24(path, samples: np.ndarray, sample_rate_hz: int = 16000) -> None:
    """Hand-built RIFF file with 24-bit PCM samples."""
    samples = np.asarray(samples, dtype=np.float64)
    scale = float(2 ** 23 - 1)
    ints = np.clip(np.round(samples * scale), -(2 ** 23), 2 ** 23 - 1).astype(np.int64)
    raw = bytearray()
    for v in ints:
        raw += int(v & 0xFFFFFF).to_bytes(3, "little")
    data = bytes(raw)
    byte_rate = sample_rate_hz * 3
    fmt = struct.pack("<HHIIHH", 1, 1, sample_rate_hz, byte_rate, 3, 24)
    body = b"WAVE"
    body += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(data)) + data
    if len(data) % 2:
        body += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def tree_sha256(root) -> dict[str, str]:
    """Relative path -> content hash for every file under root."""
    root = Path(root)
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = file_sha256(p)
    return out
