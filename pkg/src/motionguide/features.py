"""Discrete biomechanical features of a pitching motion.

Eight scalars are read off each normalized sequence around ball release
(frame index r, window length W = 10 frames = 120 ms):

    shoulder_path_mm        path length of the non-throwing shoulder
                            over frames [r-W, r]
    shoulder_abduction_deg  mean angle (shoulder->hip, shoulder->elbow)
                            on the throwing side over frames [r-W, r)
    trunk_tilt_deg          angle between the ground plane and the
                            hips-midpoint -> shoulders-midpoint vector
                            at r (90 = upright, smaller = more forward)
    lateral_tilt_deg        deviation from vertical of stride-heel ->
                            head in the frontal z-y plane at r, positive
                            toward the non-throwing side
    hip_rotation_speed_deg_s  max |d/dt| of the hip-line horizontal
                            heading over the whole sequence
    hip_shoulder_delay_ms   (peak shoulder-line speed frame - peak
                            hip-line speed frame) * 12 ms
    knee_extension_deg      angle at the stride knee (knee->hip vs
                            knee->heel) at r; 180 = fully extended
    stride_length_mm        distance from the pivot heel at frame 0 to
                            the stride heel at r

Line headings use the literal hip_L->hip_R and shoulder_L->shoulder_R
vectors projected on the horizontal x-z plane, with the angle series
unwrapped before differencing.  All inputs must be in physical units
(mm); sequences coming out of the decoder must be destandardized first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .motion import FRAME_DT_MS, FRAME_DT_S, JointId, MotionSequence, throwing_joints

RELEASE_WINDOW = 10

FEATURE_KEYS = (
    "shoulder_path_mm",
    "shoulder_abduction_deg",
    "trunk_tilt_deg",
    "lateral_tilt_deg",
    "hip_rotation_speed_deg_s",
    "hip_shoulder_delay_ms",
    "knee_extension_deg",
    "stride_length_mm",
)

# Normalization kind per feature when turning raw differences into
# comparable deltas: scale-free features divide by the original
# magnitude, angles by pi (in radians), the timing feature by the
# release-window duration.
FEATURE_KINDS = (
    "relative",
    "angular",
    "angular",
    "angular",
    "relative",
    "timing",
    "angular",
    "relative",
)


@dataclass
class FeatureVector:
    shoulder_path_mm: float
    shoulder_abduction_deg: float
    trunk_tilt_deg: float
    lateral_tilt_deg: float
    hip_rotation_speed_deg_s: float
    hip_shoulder_delay_ms: float
    knee_extension_deg: float
    stride_length_mm: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in FEATURE_KEYS], dtype=np.float64)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "FeatureVector":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(FEATURE_KEYS),):
            raise ValueError(f"expected {len(FEATURE_KEYS)} values, got {values.shape}")
        return cls(*[float(v) for v in values])

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in FEATURE_KEYS}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureVector":
        return cls(**{k: float(d[k]) for k in FEATURE_KEYS})


def _angle_deg(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angle between vectors along the last axis, in degrees."""
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.degrees(np.arctan2(cross, dot))


def _line_heading(frames: np.ndarray, left: JointId, right: JointId) -> np.ndarray:
    """Unwrapped horizontal heading of the left->right joint line.

    frames: (B, T, 15, 3); returns (B, T) radians.
    """
    v = frames[:, :, right, :] - frames[:, :, left, :]
    theta = np.arctan2(v[:, :, 2], v[:, :, 0])
    return np.unwrap(theta, axis=1)


def extract_features_batch(
    frames: np.ndarray, throwing_side: str, release_frame: int
) -> np.ndarray:
    """Feature matrix (B, 8) for a batch of physical-unit frame arrays."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 4:
        raise ValueError("expected frames of shape (B, T, 15, 3)")
    tj = throwing_joints(throwing_side)
    r = release_frame
    w0 = r - RELEASE_WINDOW

    # Path of the non-throwing shoulder, frames [r-W, r] inclusive.
    path = frames[:, w0 : r + 1, tj["other_shoulder"], :]
    f1 = np.linalg.norm(np.diff(path, axis=1), axis=2).sum(axis=1)

    # Mean throwing-arm abduction over [r-W, r).
    sho = frames[:, w0:r, tj["shoulder"], :]
    a = frames[:, w0:r, tj["hip"], :] - sho
    b = frames[:, w0:r, tj["elbow"], :] - sho
    f2 = _angle_deg(a, b).mean(axis=1)

    # Trunk tilt from the ground plane at release.
    mid_sho = 0.5 * (frames[:, r, JointId.SHOULDER_L, :] + frames[:, r, JointId.SHOULDER_R, :])
    mid_hip = 0.5 * (frames[:, r, JointId.HIP_L, :] + frames[:, r, JointId.HIP_R, :])
    trunk = mid_sho - mid_hip
    sin_tilt = trunk[:, 1] / np.linalg.norm(trunk, axis=1)
    f3 = np.degrees(np.arcsin(np.clip(sin_tilt, -1.0, 1.0)))

    # Lateral lean of stride-heel -> head in the frontal plane, positive
    # toward the glove side.
    lean = frames[:, r, JointId.HEAD, :] - frames[:, r, tj["stride_heel"], :]
    glove_z = -1.0 if throwing_side == "right" else 1.0
    f4 = np.degrees(np.arctan2(glove_z * lean[:, 2], lean[:, 1]))

    # Peak hip-line speed and hip->shoulder peak delay.
    hip_heading = _line_heading(frames, JointId.HIP_L, JointId.HIP_R)
    sho_heading = _line_heading(frames, JointId.SHOULDER_L, JointId.SHOULDER_R)
    hip_speed = np.abs(np.diff(hip_heading, axis=1)) / FRAME_DT_S
    sho_speed = np.abs(np.diff(sho_heading, axis=1)) / FRAME_DT_S
    f5 = np.degrees(hip_speed.max(axis=1))
    f6 = (sho_speed.argmax(axis=1) - hip_speed.argmax(axis=1)) * FRAME_DT_MS

    # Stride-knee extension at release.
    knee = frames[:, r, tj["stride_knee"], :]
    f7 = _angle_deg(
        frames[:, r, tj["stride_hip"], :] - knee,
        frames[:, r, tj["stride_heel"], :] - knee,
    )

    # Stride length: pivot heel at the first frame to stride heel at release.
    f8 = np.linalg.norm(
        frames[:, 0, tj["pivot_heel"], :] - frames[:, r, tj["stride_heel"], :], axis=1
    )

    return np.stack([f1, f2, f3, f4, f5, f6, f7, f8], axis=1)


def extract_features(seq: MotionSequence) -> FeatureVector:
    """Extract the eight release features from one physical sequence."""
    row = extract_features_batch(
        seq.frames[None], seq.throwing_side, seq.release_frame
    )[0]
    return FeatureVector.from_array(row)


@dataclass
class DeltaNormalization:
    """Denominators that make per-feature changes comparable.

    Scale-free features (paths, speeds, lengths) are divided by the
    magnitude of the original value plus a small epsilon; angular
    features are converted to radians and divided by pi; the timing
    feature is divided by the release-window duration in ms.
    """

    relative_eps: float = 1e-6
    timing_denom_ms: float = RELEASE_WINDOW * FRAME_DT_MS

    def denominators(self, original: np.ndarray) -> np.ndarray:
        denom = np.empty(len(FEATURE_KEYS))
        for i, kind in enumerate(FEATURE_KINDS):
            if kind == "relative":
                denom[i] = abs(original[i]) + self.relative_eps
            elif kind == "angular":
                denom[i] = 180.0  # degrees scaled so diff/180 == radians/pi
            else:
                denom[i] = self.timing_denom_ms
        return denom


def feature_delta(
    original: FeatureVector,
    shifted: FeatureVector,
    norm: DeltaNormalization | None = None,
) -> np.ndarray:
    """Normalized change vector (8,) from original to shifted features."""
    norm = norm or DeltaNormalization()
    ori = original.as_array()
    diff = shifted.as_array() - ori
    return diff / norm.denominators(ori)


_KIND_RELATIVE = np.array([k == "relative" for k in FEATURE_KINDS])
_KIND_ANGULAR = np.array([k == "angular" for k in FEATURE_KINDS])


def feature_delta_batch(
    original: np.ndarray,
    shifted: np.ndarray,
    norm: DeltaNormalization | None = None,
) -> np.ndarray:
    """Normalized change matrix for (B, 8) original/shifted feature rows."""
    norm = norm or DeltaNormalization()
    original = np.asarray(original, dtype=np.float64)
    shifted = np.asarray(shifted, dtype=np.float64)
    denom = np.where(
        _KIND_RELATIVE,
        np.abs(original) + norm.relative_eps,
        np.where(_KIND_ANGULAR, 180.0, norm.timing_denom_ms),
    )
    return (shifted - original) / denom
