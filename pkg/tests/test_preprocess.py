"""Filtering, release detection, segmentation, and scaling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motionguide.motion import (
    FRAME_DT_S,
    NUM_FRAMES,
    NUM_JOINTS,
    RELEASE_FRAME,
    STD_FLOOR,
    JointId,
    MotionSequence,
    RawCapture,
)
from motionguide.preprocess import (
    DEFAULT_CUTOFF_HZ,
    detect_release,
    destandardize,
    fit_scaler,
    lowpass_filter,
    mirror_left_handed,
    resolve_cutoff,
    segment_and_normalize,
    standardize,
)
from motionguide.synth import make_raw_capture


def _capture_from_flat(flat: np.ndarray, fs: float = 360.0, **kw) -> RawCapture:
    frames = np.asarray(flat, dtype=float).reshape(len(flat), NUM_JOINTS, 3)
    return RawCapture(frames=frames, sample_rate_hz=fs, athlete_id="A",
                      trial_id="T", **kw)


def _constant_capture(n: int, value: float = 5.0, fs: float = 360.0) -> RawCapture:
    return _capture_from_flat(np.full((n, NUM_JOINTS * 3), value), fs)


class TestLowpassFilter:
    def test_constant_series_unchanged(self):
        cap = _constant_capture(200)
        out = lowpass_filter(cap, cutoff=13.4)
        np.testing.assert_allclose(out.frames, cap.frames, atol=1e-9)

    def test_passband_sinusoid_amplitude_retained(self):
        # 0.1x the cutoff: amplitude must survive within 1%
        fs, fc = 360.0, 13.4
        t = np.arange(2000) / fs
        sine = 10.0 * np.sin(2 * np.pi * (0.1 * fc) * t)
        frames = np.zeros((len(t), NUM_JOINTS, 3))
        frames[:, 0, 0] = sine
        cap = RawCapture(frames=frames, sample_rate_hz=fs, athlete_id="A",
                         trial_id="T")
        out = lowpass_filter(cap, cutoff=fc).frames[:, 0, 0]
        mid = slice(200, -200)  # avoid edge effects
        assert np.max(np.abs(out[mid])) == pytest.approx(10.0, rel=0.01)

    def test_stopband_sinusoid_crushed(self):
        # 10x the cutoff: below 1% of the input amplitude
        fs, fc = 1000.0, 13.4
        t = np.arange(4000) / fs
        sine = 10.0 * np.sin(2 * np.pi * (10 * fc) * t)
        frames = np.zeros((len(t), NUM_JOINTS, 3))
        frames[:, 3, 1] = sine
        cap = RawCapture(frames=frames, sample_rate_hz=fs, athlete_id="A",
                         trial_id="T")
        out = lowpass_filter(cap, cutoff=fc).frames[:, 3, 1]
        assert np.max(np.abs(out[500:-500])) < 0.1

    def test_cutoff_at_nyquist_rejected(self):
        cap = _constant_capture(100, fs=100.0)
        with pytest.raises(ValueError, match="Nyquist|must lie"):
            lowpass_filter(cap, cutoff=50.0)

    def test_too_short_capture_rejected(self):
        cap = _constant_capture(10)
        with pytest.raises(ValueError, match="at least"):
            lowpass_filter(cap, cutoff=13.4)

    def test_metadata_preserved(self):
        cap = RawCapture(
            frames=np.random.default_rng(0).normal(size=(120, NUM_JOINTS, 3)),
            sample_rate_hz=360.0, athlete_id="X9", trial_id="t42",
            throwing_side="right", ball_velocity_mph=88.5,
        )
        out = lowpass_filter(cap, cutoff=10.0)
        assert (out.athlete_id, out.trial_id, out.throwing_side,
                out.ball_velocity_mph) == ("X9", "t42", "right", 88.5)


class TestAutoCutoff:
    def test_noisy_smooth_signal_lands_near_signal_band(self):
        fs = 360.0
        rng = np.random.default_rng(4)
        t = np.arange(1500) / fs
        frames = np.zeros((len(t), NUM_JOINTS, 3))
        for j in range(NUM_JOINTS):
            for c in range(3):
                clean = 50 * np.sin(2 * np.pi * 3.0 * t + j + c)
                frames[:, j, c] = clean + rng.normal(0, 2.0, len(t))
        cap = RawCapture(frames=frames, sample_rate_hz=fs, athlete_id="A",
                         trial_id="T")
        fc = resolve_cutoff(cap, "auto", residual_analysis=True)
        assert 3.0 <= fc <= 40.0

    def test_disabled_residual_analysis_uses_default(self):
        cap = _constant_capture(100)
        assert resolve_cutoff(cap, "auto", residual_analysis=False) == DEFAULT_CUTOFF_HZ

    def test_numeric_cutoff_passthrough(self):
        cap = _constant_capture(100)
        assert resolve_cutoff(cap, 8.25) == 8.25


class TestDetectRelease:
    def _wrist_speed_capture(self, speeds):
        # build wrist x-positions whose per-gap speeds are `speeds`
        wrist = JointId.WRIST_R
        n = len(speeds) + 1
        frames = np.zeros((n, NUM_JOINTS, 3))
        frames[:, wrist, 0] = np.concatenate([[0.0], np.cumsum(speeds)])
        return RawCapture(frames=frames, sample_rate_hz=360.0,
                          athlete_id="A", trial_id="T")

    def test_unique_argmax(self):
        assert detect_release(self._wrist_speed_capture([1, 5, 2])) == 1

    def test_tie_takes_earliest(self):
        assert detect_release(self._wrist_speed_capture([3, 3, 1])) == 0

    def test_constant_wrist_errors(self):
        cap = _constant_capture(50)
        with pytest.raises(ValueError, match="no release"):
            detect_release(cap)

    def test_translation_invariance(self):
        cap, _ = make_raw_capture(seed=5)
        shifted = RawCapture(
            frames=cap.frames + np.array([123.0, -7.5, 40.0]),
            sample_rate_hz=cap.sample_rate_hz, athlete_id=cap.athlete_id,
            trial_id=cap.trial_id, throwing_side=cap.throwing_side,
        )
        assert detect_release(cap) == detect_release(shifted)

    def test_synthetic_capture_within_one_frame(self):
        for seed in range(8):
            cap, planted = make_raw_capture(seed=seed)
            filtered = lowpass_filter(cap, cutoff=13.4)
            assert abs(detect_release(filtered) - planted) <= 1


class TestSegmentAndNormalize:
    def test_shape_and_release_frame(self):
        # 640 frames at 500 Hz leaves the 1.2 s window inside the capture
        rng = np.random.default_rng(1)
        cap = _capture_from_flat(rng.normal(size=(640, NUM_JOINTS * 3)), fs=500.0)
        seq = segment_and_normalize(cap, release_index=520)
        assert seq.frames.shape == (NUM_FRAMES, NUM_JOINTS, 3)
        assert seq.release_frame == RELEASE_FRAME

    def test_linear_trajectory_resampled_exactly(self):
        fs = 500.0
        n = 640
        t = np.arange(n) / fs
        slopes = np.arange(NUM_JOINTS * 3, dtype=float) - 20.0
        flat = np.outer(t, slopes) + 3.0
        cap = _capture_from_flat(flat, fs=fs)
        release = 520
        seq = segment_and_normalize(cap, release)
        t0 = release / fs - 1.0
        t_norm = t0 + np.arange(NUM_FRAMES) * FRAME_DT_S
        expected = (np.outer(t_norm, slopes) + 3.0).reshape(NUM_FRAMES, NUM_JOINTS, 3)
        np.testing.assert_allclose(seq.frames, expected, atol=1e-9)

    def test_two_sample_rates_agree(self):
        # the same analytic motion captured at 240 and 500 Hz
        def build(fs):
            n = int(round(1.6 * fs)) + 1
            t = np.arange(n) / fs
            frames = np.zeros((n, NUM_JOINTS, 3))
            for j in range(NUM_JOINTS):
                frames[:, j, 0] = 400 * np.sin(2 * np.pi * 1.1 * t + 0.3 * j)
                frames[:, j, 1] = 900 + 80 * np.cos(2 * np.pi * 0.7 * t + j)
                frames[:, j, 2] = 60 * np.sin(2 * np.pi * 0.9 * t)
            return RawCapture(frames=frames, sample_rate_hz=fs,
                              athlete_id="A", trial_id="T")

        release_s = 1.25
        seq_a = segment_and_normalize(build(240.0), int(round(release_s * 240)))
        seq_b = segment_and_normalize(build(500.0), int(round(release_s * 500)))
        assert np.max(np.abs(seq_a.frames - seq_b.frames)) < 0.1

    def test_window_out_of_bounds_reports_padding(self):
        cap = _constant_capture(300, fs=500.0)  # 0.6 s long
        with pytest.raises(ValueError) as err:
            segment_and_normalize(cap, release_index=100)
        msg = str(err.value)
        assert "more before" in msg and "more after" in msg

    def test_metadata_relabel_commutes(self):
        rng = np.random.default_rng(2)
        flat = rng.normal(size=(640, NUM_JOINTS * 3))
        cap1 = _capture_from_flat(flat, fs=500.0)
        cap2 = RawCapture(frames=cap1.frames, sample_rate_hz=500.0,
                          athlete_id="other", trial_id="name")
        s1 = segment_and_normalize(cap1, 520)
        s2 = segment_and_normalize(cap2, 520)
        np.testing.assert_array_equal(s1.frames, s2.frames)
        assert s2.athlete_id == "other"


class TestMirroring:
    def test_right_handed_passthrough(self):
        cap, _ = make_raw_capture(seed=0)
        assert mirror_left_handed(cap) is cap

    def test_mirror_swaps_sides_and_flips_z(self):
        cap, _ = make_raw_capture(seed=0)
        lefty = RawCapture(frames=cap.frames, sample_rate_hz=cap.sample_rate_hz,
                           athlete_id="L", trial_id="T", throwing_side="left")
        out = mirror_left_handed(lefty)
        assert out.throwing_side == "right"
        np.testing.assert_array_equal(
            out.frames[:, JointId.SHOULDER_R, 0], cap.frames[:, JointId.SHOULDER_L, 0]
        )
        np.testing.assert_array_equal(
            out.frames[:, JointId.HEAD, 2], -cap.frames[:, JointId.HEAD, 2]
        )

    def test_mirror_twice_is_identity_on_frames(self):
        cap, _ = make_raw_capture(seed=1)
        lefty = RawCapture(frames=cap.frames.copy(), sample_rate_hz=cap.sample_rate_hz,
                           athlete_id="L", trial_id="T", throwing_side="left")
        once = mirror_left_handed(lefty)
        again = RawCapture(frames=once.frames, sample_rate_hz=once.sample_rate_hz,
                           athlete_id="L", trial_id="T", throwing_side="left")
        twice = mirror_left_handed(again)
        np.testing.assert_array_equal(twice.frames, cap.frames)


class TestScaler:
    def test_constant_sequence_hits_std_floor(self):
        frames = np.full((NUM_FRAMES, NUM_JOINTS, 3), 7.0)
        seq = MotionSequence(frames=frames, athlete_id="A", trial_id="T")
        scaler = fit_scaler([seq])
        np.testing.assert_array_equal(scaler.mean, frames[0])
        np.testing.assert_array_equal(scaler.std, np.full((NUM_JOINTS, 3), STD_FLOOR))

    def test_two_value_population_convention(self):
        f0 = np.zeros((NUM_FRAMES, NUM_JOINTS, 3))
        f2 = np.full((NUM_FRAMES, NUM_JOINTS, 3), 2.0)
        s0 = MotionSequence(frames=f0, athlete_id="A", trial_id="1")
        s2 = MotionSequence(frames=f2, athlete_id="A", trial_id="2")
        scaler = fit_scaler([s0, s2])
        np.testing.assert_allclose(scaler.mean, 1.0)
        np.testing.assert_allclose(scaler.std, 1.0)

    def test_transform_re_stats(self, small_cohort):
        seqs = small_cohort.all_sequences()
        scaler = fit_scaler(seqs)
        stacked = np.concatenate([standardize(s, scaler).frames for s in seqs])
        np.testing.assert_allclose(stacked.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(stacked.std(axis=0), 1.0, atol=1e-9)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            fit_scaler([])

    def test_mean_maps_to_zeros_and_mean_plus_std_to_ones(self, small_cohort):
        seqs = small_cohort.all_sequences()
        scaler = fit_scaler(seqs)
        at_mean = MotionSequence(
            frames=np.broadcast_to(scaler.mean, (NUM_FRAMES, NUM_JOINTS, 3)).copy(),
            athlete_id="A", trial_id="T",
        )
        np.testing.assert_allclose(standardize(at_mean, scaler).frames, 0.0, atol=1e-12)
        plus = at_mean.with_frames(at_mean.frames + scaler.std)
        np.testing.assert_allclose(standardize(plus, scaler).frames, 1.0, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        frames = rng.normal(scale=500.0, size=(NUM_FRAMES, NUM_JOINTS, 3))
        seq = MotionSequence(frames=frames, athlete_id="A", trial_id="T")
        scaler = fit_scaler([seq])
        back = destandardize(standardize(seq, scaler), scaler)
        np.testing.assert_allclose(back.frames, frames, rtol=1e-9, atol=1e-9)
