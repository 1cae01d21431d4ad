"""Core motion types and conventions.

Coordinate frame (after ingestion): x points from the mound toward the
target, y points up, z points toward the thrower's glove-free side, i.e.
the throwing-arm side of a right-handed athlete.  All positions are in
millimetres.  Left-handed athletes are mirrored across the x-y plane at
ingestion (z negated, left/right joint labels swapped), so every sequence
downstream of preprocessing can be treated as right-handed.

A normalized sequence has exactly NUM_FRAMES frames spanning the window
from 1.0 s before ball release to 0.2 s after it, so one frame step is
12 ms and release falls on frame RELEASE_FRAME.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

NUM_FRAMES = 101
NUM_JOINTS = 15
NUM_COORDS = NUM_JOINTS * 3

PRE_RELEASE_S = 1.0
POST_RELEASE_S = 0.2
WINDOW_S = PRE_RELEASE_S + POST_RELEASE_S
FRAME_DT_S = WINDOW_S / (NUM_FRAMES - 1)  # 12 ms
FRAME_DT_MS = FRAME_DT_S * 1000.0
RELEASE_FRAME = int(round((NUM_FRAMES - 1) * PRE_RELEASE_S / WINDOW_S))  # 83

STD_FLOOR = 1e-6


class JointId(IntEnum):
    """Canonical joint ordering for the 15-marker skeleton."""

    HEAD = 0
    SHOULDER_L = 1
    SHOULDER_R = 2
    ELBOW_L = 3
    ELBOW_R = 4
    WRIST_L = 5
    WRIST_R = 6
    HIP_L = 7
    HIP_R = 8
    KNEE_L = 9
    KNEE_R = 10
    HEEL_L = 11
    HEEL_R = 12
    TOE_L = 13
    TOE_R = 14


JOINT_NAMES = [j.name.lower() for j in JointId]

# Left/right partners swapped when mirroring a left-handed athlete.
MIRROR_PAIRS = [
    (JointId.SHOULDER_L, JointId.SHOULDER_R),
    (JointId.ELBOW_L, JointId.ELBOW_R),
    (JointId.WRIST_L, JointId.WRIST_R),
    (JointId.HIP_L, JointId.HIP_R),
    (JointId.KNEE_L, JointId.KNEE_R),
    (JointId.HEEL_L, JointId.HEEL_R),
    (JointId.TOE_L, JointId.TOE_R),
]


def throwing_joints(throwing_side: str) -> dict:
    """Map functional roles to joint ids for a given throwing side.

    The stride leg is contralateral to the throwing arm, the pivot leg
    ipsilateral.
    """
    if throwing_side == "right":
        return {
            "shoulder": JointId.SHOULDER_R,
            "other_shoulder": JointId.SHOULDER_L,
            "elbow": JointId.ELBOW_R,
            "wrist": JointId.WRIST_R,
            "hip": JointId.HIP_R,
            "stride_hip": JointId.HIP_L,
            "stride_knee": JointId.KNEE_L,
            "stride_heel": JointId.HEEL_L,
            "pivot_heel": JointId.HEEL_R,
        }
    if throwing_side == "left":
        return {
            "shoulder": JointId.SHOULDER_L,
            "other_shoulder": JointId.SHOULDER_R,
            "elbow": JointId.ELBOW_L,
            "wrist": JointId.WRIST_L,
            "hip": JointId.HIP_L,
            "stride_hip": JointId.HIP_R,
            "stride_knee": JointId.KNEE_R,
            "stride_heel": JointId.HEEL_R,
            "pivot_heel": JointId.HEEL_L,
        }
    raise ValueError(f"throwing_side must be 'left' or 'right', got {throwing_side!r}")


@dataclass
class RawCapture:
    """An unprocessed capture at the device sample rate.

    frames: (F, 15, 3) float array in mm, canonical joint order.
    """

    frames: np.ndarray
    sample_rate_hz: float
    athlete_id: str
    trial_id: str
    throwing_side: str = "right"
    ball_velocity_mph: float = float("nan")

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 3 or self.frames.shape[1:] != (NUM_JOINTS, 3):
            raise ValueError(
                f"frames must have shape (F, {NUM_JOINTS}, 3), got {self.frames.shape}"
            )
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.throwing_side not in ("left", "right"):
            raise ValueError(f"bad throwing_side {self.throwing_side!r}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("frames contain non-finite values")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def duration_s(self) -> float:
        return (self.n_frames - 1) / self.sample_rate_hz


@dataclass
class MotionSequence:
    """A time-normalized pitching motion.

    frames: (101, 15, 3) float array; release always at RELEASE_FRAME.
    Physical sequences are in mm; standardized sequences hold z-scores
    with the same layout.
    """

    frames: np.ndarray
    athlete_id: str
    trial_id: str
    throwing_side: str = "right"
    ball_velocity_mph: float = float("nan")
    release_frame: int = RELEASE_FRAME

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.shape != (NUM_FRAMES, NUM_JOINTS, 3):
            raise ValueError(
                f"frames must have shape ({NUM_FRAMES}, {NUM_JOINTS}, 3), "
                f"got {self.frames.shape}"
            )
        if self.release_frame != RELEASE_FRAME:
            raise ValueError(f"release_frame must be {RELEASE_FRAME}")
        if self.throwing_side not in ("left", "right"):
            raise ValueError(f"bad throwing_side {self.throwing_side!r}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("frames contain non-finite values")

    def flat(self) -> np.ndarray:
        """Frames reshaped to (101, 45)."""
        return self.frames.reshape(NUM_FRAMES, NUM_COORDS)

    def with_frames(self, frames: np.ndarray) -> "MotionSequence":
        return replace(self, frames=frames)


@dataclass
class Scaler:
    """Per-(joint, axis) z-score scaler fit on a training population.

    mean, std: (15, 3) arrays in mm.  std entries are floored at
    STD_FLOOR at fit time so degenerate coordinates never divide by zero.
    """

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.mean.shape != (NUM_JOINTS, 3) or self.std.shape != (NUM_JOINTS, 3):
            raise ValueError("scaler mean/std must have shape (15, 3)")
        if np.any(self.std < STD_FLOOR):
            raise ValueError(f"scaler std below floor {STD_FLOOR}")

    def transform(self, frames: np.ndarray) -> np.ndarray:
        return (frames - self.mean) / self.std

    def inverse(self, frames: np.ndarray) -> np.ndarray:
        return frames * self.std + self.mean
