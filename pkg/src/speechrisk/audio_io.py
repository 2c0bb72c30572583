"""Loading, writing, mixdown, resampling and peak normalization of audio.

All downstream DSP consumes :class:`AudioBuffer`: a mono float64 signal in
[-1, 1] plus its sample rate. WAV support is limited to the encodings the
pipeline actually meets (PCM 16-bit, PCM 24-bit, IEEE float32); write
support mirrors read support so test fixtures can round-trip.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly

from .errors import (
    EmptyBufferError,
    MalformedHeaderError,
    MissingFileError,
    UnsupportedEncodingError,
    ZeroTargetRateError,
)

# Canonical internal rate: every DSP stage assumes ingestion resampled to this.
CANONICAL_RATE_HZ = 16_000

# Default peak target for volume normalization; < 1.0 to leave clip headroom.
DEFAULT_TARGET_PEAK = 0.95

# Kaiser-window beta for the windowed-sinc (polyphase) resampler.
KAISER_BETA = 8.555

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

_FORMAT_NAMES = {
    0x0002: "ADPCM",
    0x0006: "A-law",
    0x0007: "mu-law",
    0x0050: "MPEG",
    0x0055: "MP3",
}


@dataclass(frozen=True)
class AudioBuffer:
    """Mono floating-point signal plus its sample rate.

    samples are float64 in [-1, 1] after ingestion/normalization;
    sample_rate_hz > 0. source_id is an opaque recording identifier.
    """

    samples: np.ndarray
    sample_rate_hz: int
    source_id: str = ""

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"AudioBuffer requires a mono 1-D signal, got shape {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("AudioBuffer samples must all be finite")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def __len__(self) -> int:
        return len(self.samples)


def _read_exact(fh, n: int, path: Path, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise MalformedHeaderError(f"{path}: truncated while reading {what}")
    return data


def load_wav(path) -> AudioBuffer:
    """Load a RIFF/WAVE file into a mono AudioBuffer.

    Multi-channel input is mixed down by per-sample arithmetic mean.
    Integer PCM is scaled to [-1, 1] by the type's maximum magnitude
    (32768 for 16-bit, 2**23 for 24-bit).

    Raises MissingFileError, MalformedHeaderError or
    UnsupportedEncodingError with the offending detail.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such audio file: {path}")

    with open(path, "rb") as fh:
        riff = _read_exact(fh, 12, path, "RIFF header")
        if riff[0:4] != b"RIFF" or riff[8:12] != b"WAVE":
            raise MalformedHeaderError(f"{path}: not a RIFF/WAVE container")

        fmt = None
        data = None
        while True:
            chunk_hdr = fh.read(8)
            if len(chunk_hdr) == 0:
                break
            if len(chunk_hdr) < 8:
                raise MalformedHeaderError(f"{path}: truncated chunk header")
            chunk_id, chunk_size = struct.unpack("<4sI", chunk_hdr)
            if chunk_id == b"fmt ":
                fmt = _read_exact(fh, chunk_size, path, "fmt chunk")
            elif chunk_id == b"data":
                data = _read_exact(fh, chunk_size, path, "data chunk")
            else:
                fh.seek(chunk_size + (chunk_size & 1), 1)
            if chunk_size & 1 and chunk_id in (b"fmt ", b"data"):
                fh.seek(1, 1)  # chunks are word-aligned
            if fmt is not None and data is not None:
                break

    if fmt is None or len(fmt) < 16:
        raise MalformedHeaderError(f"{path}: missing or short fmt chunk")
    if data is None:
        raise MalformedHeaderError(f"{path}: missing data chunk")

    (format_tag, n_channels, sample_rate, _byte_rate, _block_align,
     bits_per_sample) = struct.unpack("<HHIIHH", fmt[:16])

    if format_tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise MalformedHeaderError(f"{path}: WAVE_FORMAT_EXTENSIBLE fmt chunk too short")
        format_tag = struct.unpack("<H", fmt[24:26])[0]

    if n_channels < 1:
        raise MalformedHeaderError(f"{path}: channel count {n_channels}")
    if sample_rate <= 0:
        raise MalformedHeaderError(f"{path}: sample rate {sample_rate}")

    if format_tag == _WAVE_FORMAT_PCM and bits_per_sample == 16:
        raw = np.frombuffer(data, dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif format_tag == _WAVE_FORMAT_PCM and bits_per_sample == 24:
        b = np.frombuffer(data, dtype=np.uint8)
        b = b[: (len(b) // 3) * 3].reshape(-1, 3)
        raw = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        raw = np.where(raw >= 1 << 23, raw - (1 << 24), raw)
        samples = raw.astype(np.float64) / float(1 << 23)
    elif format_tag == _WAVE_FORMAT_IEEE_FLOAT and bits_per_sample == 32:
        samples = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        name = _FORMAT_NAMES.get(format_tag, f"format_tag=0x{format_tag:04x}")
        raise UnsupportedEncodingError(
            f"{path}: unsupported encoding {name} at {bits_per_sample} bit"
        )

    if n_channels > 1:
        samples = samples[: (len(samples) // n_channels) * n_channels]
        samples = samples.reshape(-1, n_channels).mean(axis=1)

    return AudioBuffer(samples=samples, sample_rate_hz=int(sample_rate), source_id=path.stem)


def write_wav(path, buffer: AudioBuffer, encoding: str = "pcm16") -> None:
    """Write a mono AudioBuffer as RIFF/WAVE (pcm16, pcm24 or float32)."""
    path = Path(path)
    x = np.clip(buffer.samples, -1.0, 1.0)

    if encoding == "pcm16":
        raw = np.clip(np.round(x * 32767.0), -32768, 32767).astype("<i2").tobytes()
        bits, format_tag = 16, _WAVE_FORMAT_PCM
    elif encoding == "pcm24":
        ints = np.clip(np.round(x * float((1 << 23) - 1)), -(1 << 23), (1 << 23) - 1).astype(np.int64)
        ints = np.where(ints < 0, ints + (1 << 24), ints).astype(np.uint32)
        b = np.empty((len(ints), 3), dtype=np.uint8)
        b[:, 0] = ints & 0xFF
        b[:, 1] = (ints >> 8) & 0xFF
        b[:, 2] = (ints >> 16) & 0xFF
        raw = b.tobytes()
        bits, format_tag = 24, _WAVE_FORMAT_PCM
    elif encoding == "float32":
        raw = buffer.samples.astype("<f4").tobytes()
        bits, format_tag = 32, _WAVE_FORMAT_IEEE_FLOAT
    else:
        raise UnsupportedEncodingError(f"unsupported write encoding: {encoding!r}")

    block_align = bits // 8
    byte_rate = buffer.sample_rate_hz * block_align
    fmt = struct.pack("<HHIIHH", format_tag, 1, buffer.sample_rate_hz, byte_rate,
                      block_align, bits)
    payload = (
        b"WAVE"
        + b"fmt " + struct.pack("<I", len(fmt)) + fmt
        + b"data" + struct.pack("<I", len(raw)) + raw
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", len(payload)) + payload)


def normalize_peak(buffer: AudioBuffer, target_peak: float = DEFAULT_TARGET_PEAK) -> AudioBuffer:
    """Scale the signal with a single gain so max |sample| == target_peak.

    An all-zero buffer is returned unchanged (no gain exists that could
    reach the target). Idempotent: applying twice equals applying once.
    """
    if len(buffer) == 0:
        raise EmptyBufferError("cannot normalize an empty buffer")
    if not 0.0 < target_peak <= 1.0:
        raise ValueError(f"target_peak must be in (0, 1], got {target_peak}")
    peak = float(np.max(np.abs(buffer.samples)))
    if peak == 0.0:
        return buffer
    gain = target_peak / peak
    if gain == 1.0:
        return buffer
    return AudioBuffer(
        samples=buffer.samples * gain,
        sample_rate_hz=buffer.sample_rate_hz,
        source_id=buffer.source_id,
    )


def resample(buffer: AudioBuffer, target_rate_hz: int) -> AudioBuffer:
    """Resample to target_rate_hz by polyphase windowed-sinc interpolation.

    The anti-aliasing filter is a Kaiser-windowed sinc with beta
    KAISER_BETA. Identity when the rates already match. Output length is
    ceil(n * target / source), so total duration is preserved within one
    output sample period.
    """
    if len(buffer) == 0:
        raise EmptyBufferError("cannot resample an empty buffer")
    target_rate_hz = int(target_rate_hz)
    if target_rate_hz <= 0:
        raise ZeroTargetRateError(f"target rate must be positive, got {target_rate_hz}")
    if target_rate_hz == buffer.sample_rate_hz:
        return buffer

    g = math.gcd(buffer.sample_rate_hz, target_rate_hz)
    up = target_rate_hz // g
    down = buffer.sample_rate_hz // g
    out = resample_poly(buffer.samples, up, down, window=("kaiser", KAISER_BETA))
    return AudioBuffer(samples=out, sample_rate_hz=target_rate_hz, source_id=buffer.source_id)
