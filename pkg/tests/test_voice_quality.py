"""Jitter, shimmer and harmonics-to-noise ratio."""

import numpy as np
import pytest

from speechrisk.errors import (
    NonPositiveAmplitudeError,
    TooFewPeriodsError,
    UnvoicedFrameError,
)
from speechrisk.features.pitch import pitch_track
from speechrisk.features.voice_quality import (
    harmonic_correlation,
    hnr_from_correlation,
    jitter_local,
    pick_pulses,
    shimmer_local,
    voice_quality_track,
)

from .helpers import make_pulse_train, make_tone


def test_jitter_example():
    # alternating 5 ms / 6 ms periods: mean |dT| = 1 ms over mean T = 5.5 ms
    periods = np.array([5.0, 6.0, 5.0, 6.0]) * 1e-3
    assert jitter_local(periods) == pytest.approx((1 + 1 + 1) / 3 / 5.5)


def test_jitter_constant_zero():
    assert jitter_local(np.full(10, 0.005)) == 0.0


def test_jitter_too_few():
    with pytest.raises(TooFewPeriodsError):
        jitter_local(np.array([0.005]))


def test_shimmer_example():
    assert shimmer_local(np.array([1.0, 0.8, 1.0])) == pytest.approx(0.2142857142857143)


def test_shimmer_constant_zero():
    assert shimmer_local(np.full(6, 0.5)) == 0.0


def test_shimmer_errors():
    with pytest.raises(TooFewPeriodsError):
        shimmer_local(np.array([1.0]))
    with pytest.raises(NonPositiveAmplitudeError):
        shimmer_local(np.array([1.0, 0.0, 1.0]))


def test_hnr_mapping():
    assert hnr_from_correlation(0.5) == 0.0
    assert hnr_from_correlation(0.0) == -20.0
    assert hnr_from_correlation(-0.3) == -20.0
    assert hnr_from_correlation(1.0) == 40.0
    assert hnr_from_correlation(0.9) == pytest.approx(10.0 * np.log10(9.0))


def test_harmonic_correlation_requires_voicing():
    with pytest.raises(UnvoicedFrameError):
        harmonic_correlation(np.zeros(400), 16000, 0.0)


def test_hnr_clean_tone_high():
    x = make_tone(200.0, 0.1, 16000, amplitude=0.8)
    r = harmonic_correlation(x, 16000, 200.0)
    assert hnr_from_correlation(r) >= 30.0


def test_hnr_equal_noise_near_zero():
    rng = np.random.default_rng(5)
    tone = make_tone(200.0, 0.5, 16000, amplitude=0.5)
    noise = rng.standard_normal(len(tone))
    noise *= np.sqrt(np.mean(tone**2) / np.mean(noise**2))
    x = tone + noise
    r = harmonic_correlation(x, 16000, 200.0)
    assert abs(hnr_from_correlation(r)) <= 1.5


def test_pick_pulses_spacing():
    sr = 16000
    x = make_pulse_train(0.005, 0.1, sr)
    peaks = pick_pulses(x, 0.005 * sr)
    assert len(peaks) >= 15
    np.testing.assert_array_equal(np.diff(peaks), 80)


def test_pick_pulses_stops_at_truncated_window():
    sr = 16000
    x = make_pulse_train(0.005, 0.021, sr)
    peaks = pick_pulses(x, 0.005 * sr)
    # intervals at the signal edge that cannot hold a full search window
    # are dropped rather than guessed
    assert len(peaks) >= 2
    assert peaks[-1] <= len(x)


def test_track_zero_on_exact_pulse_train():
    sr = 16000
    x = make_pulse_train(0.005, 1.0, sr)  # exactly 200 Hz
    track = pitch_track(x, sr)
    frame_len, hop_len = 400, 160
    jit, shim, hnr = voice_quality_track(x, sr, track, frame_len, hop_len)
    voiced = track.voiced
    assert np.sum(voiced) > 50
    np.testing.assert_array_equal(jit[voiced], 0.0)
    np.testing.assert_array_equal(shim[voiced], 0.0)


def test_track_monotone_under_perturbation():
    # jitter and shimmer estimates must order five increasing perturbation
    # levels correctly
    sr = 16000
    period = 0.005
    jitters = []
    shimmers = []
    # one frozen perturbation shape, scaled by level; scaling the same
    # shape keeps the comparison across levels clean
    shape = np.random.default_rng(17).uniform(-1.0, 1.0, size=512)
    for level in [0.0, 0.005, 0.01, 0.015, 0.02]:
        period_jitter = level * period * shape
        amp_pattern = 0.8 * (1.0 + level * shape)
        x = make_pulse_train(period, 1.0, sr,
                             period_jitter=period_jitter,
                             amp_pattern=amp_pattern)
        track = pitch_track(x, sr)
        jit, shim, _ = voice_quality_track(x, sr, track, 400, 160)
        voiced = track.voiced
        jitters.append(float(np.mean(jit[voiced])))
        shimmers.append(float(np.mean(shim[voiced])))
    assert all(b > a for a, b in zip(jitters, jitters[1:]))
    assert all(b > a for a, b in zip(shimmers, shimmers[1:]))


def test_unvoiced_frames_hold_zero():
    sr = 16000
    x = np.concatenate([np.zeros(sr // 2), make_tone(200.0, 0.5, sr)])
    track = pitch_track(x, sr)
    jit, shim, hnr = voice_quality_track(x, sr, track, 400, 160)
    assert np.all(jit[~track.voiced] == 0.0)
    assert np.all(shim[~track.voiced] == 0.0)
    assert np.all(hnr[~track.voiced] == 0.0)
