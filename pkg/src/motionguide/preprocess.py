"""Capture preprocessing: filtering, release detection, time normalization.

The pipeline for one trial is

    raw -> mirror_left_handed -> lowpass_filter -> detect_release
        -> segment_and_normalize -> (fit_scaler once per corpus)
        -> standardize

Filtering is a zero-phase 4th-order Butterworth low-pass applied per
joint coordinate.  The cutoff can be a fixed frequency in Hz or "auto",
in which case a residual-analysis sweep picks the knee of the
residual-vs-cutoff curve per coordinate and the median over coordinates
is used.  With residual analysis disabled, "auto" falls back to
DEFAULT_CUTOFF_HZ.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import signal

from .motion import (
    FRAME_DT_S,
    MIRROR_PAIRS,
    NUM_FRAMES,
    NUM_JOINTS,
    POST_RELEASE_S,
    PRE_RELEASE_S,
    RELEASE_FRAME,
    STD_FLOOR,
    MotionSequence,
    RawCapture,
    Scaler,
    throwing_joints,
)

logger = logging.getLogger(__name__)

FILTER_ORDER = 4
DEFAULT_CUTOFF_HZ = 13.4

# filtfilt needs this many samples for its default edge padding.
_MIN_FILTER_FRAMES = 3 * (FILTER_ORDER * 2 + 1) + 1


def mirror_left_handed(capture: RawCapture) -> RawCapture:
    """Return a right-handed view of a capture.

    Left-handed athletes are reflected across the x-y plane (z negated)
    and left/right joint labels are swapped, after which every formula
    downstream can assume a right-handed thrower.  Right-handed captures
    pass through unchanged.
    """
    if capture.throwing_side == "right":
        return capture
    frames = capture.frames.copy()
    frames[:, :, 2] *= -1.0
    for a, b in MIRROR_PAIRS:
        frames[:, [a, b]] = frames[:, [b, a]]
    return RawCapture(
        frames=frames,
        sample_rate_hz=capture.sample_rate_hz,
        athlete_id=capture.athlete_id,
        trial_id=capture.trial_id,
        throwing_side="right",
        ball_velocity_mph=capture.ball_velocity_mph,
    )


def select_cutoff_residual(series: np.ndarray, sample_rate_hz: float) -> float:
    """Pick a low-pass cutoff for one series by residual analysis.

    Filters the series at a sweep of candidate cutoffs, computes the RMS
    residual against the raw series at each, fits a line to the
    high-frequency tail of the residual curve (where only noise is being
    removed), and returns the lowest candidate whose residual drops to
    the line's zero-frequency intercept, i.e. the knee of the curve.
    """
    nyq = 0.5 * sample_rate_hz
    candidates = np.arange(2.0, 0.9 * nyq, 0.5)
    if len(candidates) < 8:
        raise ValueError("sample rate too low for residual analysis")
    residuals = np.empty(len(candidates))
    for i, fc in enumerate(candidates):
        b, a = signal.butter(FILTER_ORDER, fc / nyq, btype="low")
        smoothed = signal.filtfilt(b, a, series)
        residuals[i] = np.sqrt(np.mean((series - smoothed) ** 2))
    # Tail = top quarter of the sweep, assumed pure noise removal.
    tail = len(candidates) * 3 // 4
    slope, intercept = np.polyfit(candidates[tail:], residuals[tail:], 1)
    below = np.nonzero(residuals <= max(intercept, 0.0))[0]
    if len(below) == 0:
        return float(candidates[-1])
    return float(candidates[below[0]])


def resolve_cutoff(
    capture: RawCapture,
    cutoff: float | str = "auto",
    residual_analysis: bool = True,
) -> float:
    """Resolve a cutoff spec ("auto" or Hz) to a frequency in Hz."""
    if cutoff != "auto":
        return float(cutoff)
    if not residual_analysis:
        return DEFAULT_CUTOFF_HZ
    flat = capture.frames.reshape(capture.n_frames, -1)
    per_series = [
        select_cutoff_residual(flat[:, c], capture.sample_rate_hz)
        for c in range(flat.shape[1])
    ]
    chosen = float(np.median(per_series))
    logger.info("auto cutoff for %s: %.1f Hz", capture.trial_id, chosen)
    return chosen


def lowpass_filter(
    capture: RawCapture,
    cutoff: float | str = "auto",
    residual_analysis: bool = True,
) -> RawCapture:
    """Zero-phase Butterworth low-pass over every joint coordinate.

    Args:
        capture: raw capture to smooth.
        cutoff: cutoff frequency in Hz, or "auto" for residual analysis.
        residual_analysis: when False, "auto" means DEFAULT_CUTOFF_HZ.

    Raises:
        ValueError: if the cutoff is not below the Nyquist frequency or
            the capture is too short for the filter's edge padding.
    """
    if capture.n_frames < _MIN_FILTER_FRAMES:
        raise ValueError(
            f"capture has {capture.n_frames} frames; zero-phase filtering "
            f"needs at least {_MIN_FILTER_FRAMES}"
        )
    fc = resolve_cutoff(capture, cutoff, residual_analysis)
    nyq = 0.5 * capture.sample_rate_hz
    if not 0.0 < fc < nyq:
        raise ValueError(
            f"cutoff {fc} Hz must lie in (0, {nyq}) Hz for sample rate "
            f"{capture.sample_rate_hz} Hz"
        )
    b, a = signal.butter(FILTER_ORDER, fc / nyq, btype="low")
    flat = capture.frames.reshape(capture.n_frames, -1)
    smoothed = signal.filtfilt(b, a, flat, axis=0)
    return RawCapture(
        frames=smoothed.reshape(capture.frames.shape),
        sample_rate_hz=capture.sample_rate_hz,
        athlete_id=capture.athlete_id,
        trial_id=capture.trial_id,
        throwing_side=capture.throwing_side,
        ball_velocity_mph=capture.ball_velocity_mph,
    )


def detect_release(capture: RawCapture) -> int:
    """Index of peak throwing-wrist speed, the ball-release proxy.

    Speed is the forward finite-difference velocity magnitude, so the
    returned index addresses the gap starting at that frame; ties take
    the earliest index.
    """
    wrist = throwing_joints(capture.throwing_side)["wrist"]
    vel = np.diff(capture.frames[:, wrist, :], axis=0)
    speed = np.linalg.norm(vel, axis=1)
    if np.max(speed) == 0.0:
        raise ValueError("wrist never moves; no release detectable")
    return int(np.argmax(speed))


def segment_and_normalize(capture: RawCapture, release_index: int) -> MotionSequence:
    """Cut the release window and resample it to the normalized grid.

    The window runs from PRE_RELEASE_S before release to POST_RELEASE_S
    after it and is linearly resampled to NUM_FRAMES frames, which puts
    release on frame RELEASE_FRAME.

    Raises:
        ValueError: if the window extends past the capture, reporting
            how much padding would be required on each side.
    """
    if not 0 <= release_index < capture.n_frames:
        raise ValueError(f"release index {release_index} outside capture")
    t_release = release_index / capture.sample_rate_hz
    t_start = t_release - PRE_RELEASE_S
    t_end = t_release + POST_RELEASE_S
    short_before = max(0.0, -t_start)
    short_after = max(0.0, t_end - capture.duration_s)
    if short_before > 0 or short_after > 0:
        raise ValueError(
            "segment window exceeds capture: needs "
            f"{short_before:.3f} s more before and {short_after:.3f} s "
            "more after the capture"
        )
    t_raw = np.arange(capture.n_frames) / capture.sample_rate_hz
    t_norm = t_start + np.arange(NUM_FRAMES) * FRAME_DT_S
    flat = capture.frames.reshape(capture.n_frames, -1)
    out = np.empty((NUM_FRAMES, flat.shape[1]))
    for c in range(flat.shape[1]):
        out[:, c] = np.interp(t_norm, t_raw, flat[:, c])
    return MotionSequence(
        frames=out.reshape(NUM_FRAMES, NUM_JOINTS, 3),
        athlete_id=capture.athlete_id,
        trial_id=capture.trial_id,
        throwing_side=capture.throwing_side,
        ball_velocity_mph=capture.ball_velocity_mph,
    )


def fit_scaler(sequences: list[MotionSequence]) -> Scaler:
    """Fit the per-(joint, axis) scaler over all frames of a corpus.

    Uses the population standard deviation and floors it at STD_FLOOR so
    constant coordinates stay harmless.
    """
    if not sequences:
        raise ValueError("cannot fit scaler on empty corpus")
    stacked = np.concatenate([s.frames for s in sequences], axis=0)
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    return Scaler(mean=mean, std=np.maximum(std, STD_FLOOR))


def standardize(seq: MotionSequence, scaler: Scaler) -> MotionSequence:
    return seq.with_frames(scaler.transform(seq.frames))


def destandardize(seq: MotionSequence, scaler: Scaler) -> MotionSequence:
    return seq.with_frames(scaler.inverse(seq.frames))
