"""Low-level descriptor matrix and contour functionals."""

import numpy as np
import pytest

from speechrisk.audio_io import AudioBuffer
from speechrisk.errors import EmptyLldError
from speechrisk.features.functionals import (
    COMPACT_FUNCTIONALS,
    EXTENDED_FUNCTIONALS,
    apply_functionals,
    contour_delta,
)
from speechrisk.features.lld import (
    ENERGY_FLOOR_DB,
    LLD_NAMES,
    VOICED_ONLY,
    compute_lld,
)

from .helpers import make_tone


def _buf(samples, sr=16000):
    return AudioBuffer(samples=np.asarray(samples, dtype=np.float64),
                       sample_rate_hz=sr)


def test_lld_layout():
    assert len(LLD_NAMES) == 26
    assert LLD_NAMES[0] == "f0_semitone"
    assert sum(1 for n in LLD_NAMES if n.startswith("mfcc_")) == 13
    assert VOICED_ONLY <= set(LLD_NAMES)


def test_lld_tone_frame_count_and_f0():
    mat = compute_lld(_buf(make_tone(220.0, 1.0)))
    assert mat.n_frames == 98
    assert mat.values.shape == (98, 26)
    voiced = mat.voiced
    assert np.all(voiced)
    f0 = mat.column("f0_hz")
    assert np.max(np.abs(f0[voiced] - 220.0)) <= 1.0
    semis = mat.column("f0_semitone")
    np.testing.assert_allclose(semis[voiced],
                               12.0 * np.log2(f0[voiced] / 27.5))


def test_lld_zcr_tracks_tone():
    mat = compute_lld(_buf(make_tone(220.0, 1.0)))
    zcr = mat.column("zcr")
    assert float(np.median(zcr)) == pytest.approx(2.0 * 220.0 / 16000.0, rel=0.1)


def test_lld_silence_floor_and_masking():
    mat = compute_lld(_buf(np.zeros(16000)))
    assert not np.any(mat.voiced)
    np.testing.assert_array_equal(mat.column("energy_db"), ENERGY_FLOOR_DB)
    for name in VOICED_ONLY:
        np.testing.assert_array_equal(mat.column(name), 0.0)


def test_lld_empty_segment_rejected():
    with pytest.raises(EmptyLldError):
        compute_lld(_buf(np.zeros(0)))


def test_lld_short_segment_padded():
    mat = compute_lld(_buf(make_tone(300.0, 0.02)))  # 0.02 s < one frame
    assert mat.n_frames == 1


def test_lld_all_finite_on_noise():
    rng = np.random.default_rng(1)
    mat = compute_lld(_buf(rng.standard_normal(8000) * 0.2))
    assert np.all(np.isfinite(mat.values))


def test_functional_inventories():
    assert len(COMPACT_FUNCTIONALS) == 8
    assert len(EXTENDED_FUNCTIONALS) == 20
    assert set(COMPACT_FUNCTIONALS) < set(EXTENDED_FUNCTIONALS)


def test_functionals_linear_ramp():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    hop_s = 1.0  # slopes per frame
    out = dict(zip(COMPACT_FUNCTIONALS, apply_functionals(x, hop_s)))
    assert out["mean"] == 3.0
    assert out["p50"] == 3.0
    assert out["mean_rising_slope"] == 1.0
    assert out["mean_falling_slope"] == 0.0
    assert out["p80"] - out["p20"] == pytest.approx(out["range_p20_p80"])
    assert out["cov"] == pytest.approx(np.std(x) / 3.0)


def test_functionals_constant_contour():
    x = np.full(50, 7.0)
    out = dict(zip(EXTENDED_FUNCTIONALS, apply_functionals(x, 0.01,
                                                           EXTENDED_FUNCTIONALS)))
    assert out["mean"] == 7.0
    assert out["cov"] == 0.0
    assert out["range_p20_p80"] == 0.0
    assert out["mean_rising_slope"] == 0.0
    assert out["mean_falling_slope"] == 0.0
    assert out["min"] == 7.0 and out["max"] == 7.0
    assert out["skewness"] == 0.0 and out["kurtosis"] == 0.0
    assert out["linreg_slope"] == 0.0
    assert out["linreg_offset"] == pytest.approx(7.0)
    assert out["upcross50_rate"] == 0.0


def test_functionals_empty_contour_zero():
    np.testing.assert_array_equal(apply_functionals(np.zeros(0), 0.01),
                                  np.zeros(8))
    np.testing.assert_array_equal(
        apply_functionals(np.zeros(0), 0.01, EXTENDED_FUNCTIONALS), np.zeros(20))


def test_functionals_extended_regressions():
    t = np.arange(100) * 0.01
    x = 2.0 * t + 1.0
    out = dict(zip(EXTENDED_FUNCTIONALS,
                   apply_functionals(x, 0.01, EXTENDED_FUNCTIONALS)))
    assert out["linreg_slope"] == pytest.approx(2.0)
    assert out["linreg_offset"] == pytest.approx(1.0)
    assert out["quadreg_a"] == pytest.approx(0.0, abs=1e-8)
    assert out["quadreg_b"] == pytest.approx(2.0)
    assert out["quadreg_c"] == pytest.approx(1.0)


def test_functionals_upcross_rate():
    # one full sine cycle per second crosses its median upward once per s
    t = np.arange(0, 4.0, 0.01)
    x = np.sin(2 * np.pi * t)
    out = dict(zip(EXTENDED_FUNCTIONALS,
                   apply_functionals(x, 0.01, EXTENDED_FUNCTIONALS)))
    assert out["upcross50_rate"] == pytest.approx(1.0, rel=0.05)


def test_contour_delta():
    np.testing.assert_array_equal(contour_delta(np.array([1.0, 3.0, 6.0])),
                                  [0.0, 2.0, 3.0])
    np.testing.assert_array_equal(contour_delta(np.array([5.0])), [0.0])
    assert len(contour_delta(np.zeros(0))) == 0
