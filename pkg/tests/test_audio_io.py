"""WAV ingestion, normalization and resampling."""

import numpy as np
import pytest

from speechrisk.audio_io import (
    CANONICAL_RATE_HZ,
    DEFAULT_TARGET_PEAK,
    AudioBuffer,
    load_wav,
    normalize_peak,
    resample,
    write_wav,
)
from speechrisk.errors import (
    MalformedHeaderError,
    MissingFileError,
    UnsupportedEncodingError,
)

from .helpers import (
    make_tone,
    write_wav_float32,
    write_wav_pcm16,
    write_wav_pcm24,
    write_wav_raw_int16,
)


def test_pcm16_scaling(tmp_path):
    path = tmp_path / "scale.wav"
    write_wav_raw_int16(path, np.array([0, 16384, -32768]))
    buf = load_wav(path)
    assert buf.sample_rate_hz == 16000
    np.testing.assert_allclose(buf.samples, [0.0, 0.5, -1.0], atol=0)


def test_stereo_mixdown(tmp_path):
    path = tmp_path / "stereo.wav"
    samples = np.array([[1.0, 0.0], [0.5, 0.5], [-1.0, 0.0]])
    write_wav_pcm16(path, samples, channels=2)
    buf = load_wav(path)
    np.testing.assert_allclose(buf.samples, [0.5, 0.5, -0.5], atol=2 / 32767)


def test_sample_count(tmp_path):
    path = tmp_path / "three.wav"
    write_wav_pcm16(path, make_tone(100.0, 3.0, 16000))
    buf = load_wav(path)
    assert len(buf) == 48000
    assert buf.duration_s == pytest.approx(3.0)


def test_pcm24_roundtrip_scale(tmp_path):
    path = tmp_path / "deep.wav"
    ref = np.array([0.0, 0.25, -0.5, 0.999])
    write_wav_pcm24(path, ref, sample_rate_hz=22050)
    buf = load_wav(path)
    assert buf.sample_rate_hz == 22050
    np.testing.assert_allclose(buf.samples, ref, atol=2 / 2**23)


def test_float32_ingest(tmp_path):
    path = tmp_path / "f32.wav"
    ref = np.array([0.0, 0.123456, -0.75, 1.0], dtype=np.float32)
    write_wav_float32(path, ref, sample_rate_hz=8000)
    buf = load_wav(path)
    assert buf.sample_rate_hz == 8000
    np.testing.assert_allclose(buf.samples, ref.astype(np.float64), atol=1e-7)


def test_missing_file():
    with pytest.raises(MissingFileError):
        load_wav("/nonexistent/audio.wav")


def test_not_riff(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"OggS" + b"\x00" * 40)
    with pytest.raises(MalformedHeaderError):
        load_wav(path)


def test_truncated_file(tmp_path):
    path = tmp_path / "short.wav"
    good = tmp_path / "good.wav"
    write_wav_pcm16(good, make_tone(100.0, 0.1))
    path.write_bytes(good.read_bytes()[:30])
    with pytest.raises(MalformedHeaderError):
        load_wav(path)


def test_unsupported_encoding(tmp_path):
    import struct

    path = tmp_path / "ulaw.wav"
    fmt = struct.pack("<HHIIHH", 7, 1, 8000, 8000, 1, 8)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", 4) + b"\x00\x00\x00\x00"
    path.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    with pytest.raises(UnsupportedEncodingError):
        load_wav(path)


def test_write_read_roundtrip_one_lsb(tmp_path):
    # file -> buffer -> file must keep every 16-bit sample within 1 LSB
    src = tmp_path / "src.wav"
    out = tmp_path / "out.wav"
    rng = np.random.default_rng(3)
    ints = rng.integers(-32768, 32768, size=4000).astype(np.int16)
    write_wav_raw_int16(src, ints)
    write_wav(out, load_wav(src))
    import wave

    with wave.open(str(out), "rb") as w:
        back = np.frombuffer(w.readframes(w.getnframes()), dtype="<i2")
    assert np.max(np.abs(back.astype(np.int32) - ints.astype(np.int32))) <= 1


def test_normalize_peak_target():
    buf = AudioBuffer(samples=np.array([0.1, -0.2, 0.05]), sample_rate_hz=16000)
    out = normalize_peak(buf)
    assert np.max(np.abs(out.samples)) == pytest.approx(DEFAULT_TARGET_PEAK)


def test_normalize_idempotent():
    buf = AudioBuffer(samples=make_tone(200.0, 0.1, amplitude=0.3),
                      sample_rate_hz=16000)
    once = normalize_peak(buf)
    twice = normalize_peak(once)
    np.testing.assert_array_equal(once.samples, twice.samples)


def test_normalize_silence_passthrough():
    buf = AudioBuffer(samples=np.zeros(100), sample_rate_hz=16000)
    out = normalize_peak(buf)
    np.testing.assert_array_equal(out.samples, np.zeros(100))


def test_resample_preserves_tone():
    sr_in = 48000
    buf = AudioBuffer(samples=make_tone(440.0, 1.0, sr_in), sample_rate_hz=sr_in)
    out = resample(buf, CANONICAL_RATE_HZ)
    assert out.sample_rate_hz == CANONICAL_RATE_HZ
    assert len(out) == CANONICAL_RATE_HZ
    spectrum = np.abs(np.fft.rfft(out.samples * np.hanning(len(out.samples))))
    freqs = np.fft.rfftfreq(len(out.samples), 1.0 / CANONICAL_RATE_HZ)
    peak_hz = freqs[int(np.argmax(spectrum))]
    assert abs(peak_hz - 440.0) <= 2.0


def test_resample_identity():
    buf = AudioBuffer(samples=make_tone(100.0, 0.1), sample_rate_hz=16000)
    out = resample(buf, 16000)
    np.testing.assert_array_equal(out.samples, buf.samples)


def test_buffer_rejects_stereo_and_nan():
    with pytest.raises(ValueError):
        AudioBuffer(samples=np.zeros((4, 2)), sample_rate_hz=16000)
    with pytest.raises(ValueError):
        AudioBuffer(samples=np.array([0.0, np.nan]), sample_rate_hz=16000)
    with pytest.raises(ValueError):
        AudioBuffer(samples=np.zeros(4), sample_rate_hz=0)
