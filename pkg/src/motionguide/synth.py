"""Synthetic pitching cohort with analytically known feature values.

Every trial is built from an explicit parameter set: a keyframed
kinematic skeleton is driven so that each release feature comes out at a
value the construction controls exactly.

    stride length    stride heel is planted at a point whose distance to
                     the pivot heel's first-frame position is the target
    knee extension   the stride knee is placed by a leg-triangle solve
                     that closes at exactly the target angle
    trunk tilt       the hips->shoulders direction reaches the target
                     elevation before release and holds through it
    lateral tilt     the head's frontal-plane position is solved against
                     the planted stride heel
    abduction        the throwing elbow is placed at exactly the target
                     angle from the shoulder->hip axis in a window
                     around release
    hip speed/delay  hip and shoulder line headings integrate discrete
                     angular-speed bumps with unique, known peak gaps

Trial-to-trial variation comes from (a) small perturbations of the
parameters themselves and (b) a constant-in-time position offset per
joint (sigma JITTER_MM).  The offsets are constant so that angular-speed
features stay exact; their effect on the position-based features is
folded into the recorded ground truth in closed form.  The hip and
shoulder joints are left offset-free because they define the heading
lines.  Ball velocity is affine in stride length, knee extension, trunk
tilt, and peak hip speed, plus Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf

from .features import FeatureVector
from .motion import (
    FRAME_DT_MS,
    FRAME_DT_S,
    MIRROR_PAIRS,
    NUM_FRAMES,
    NUM_JOINTS,
    RELEASE_FRAME,
    JointId,
    MotionSequence,
    RawCapture,
)

JITTER_MM = 5.0

# Joints that receive the constant position offset; the trunk-line
# joints (shoulders, hips) are excluded to keep heading series exact.
_JITTERED_JOINTS = [
    JointId.HEAD,
    JointId.ELBOW_L,
    JointId.ELBOW_R,
    JointId.WRIST_L,
    JointId.WRIST_R,
    JointId.KNEE_L,
    JointId.KNEE_R,
    JointId.HEEL_L,
    JointId.HEEL_R,
    JointId.TOE_L,
    JointId.TOE_R,
]

# Admissible per-athlete target ranges.  The shoulder-path entry is a
# soft knob: it scales trunk-drive shape, and the recorded ground truth
# is the path length the construction actually produces.
TARGET_RANGES = {
    "shoulder_path_mm": (110.0, 260.0),
    "shoulder_abduction_deg": (82.0, 108.0),
    "trunk_tilt_deg": (62.0, 85.0),
    "lateral_tilt_deg": (8.0, 30.0),
    "hip_rotation_speed_deg_s": (420.0, 640.0),
    "hip_shoulder_delay_frames": (2, 6),
    "knee_extension_deg": (140.0, 172.0),
    "stride_length_mm": (1250.0, 1700.0),
}

# Ball-velocity model: mph = base + sum coef * (value - center) + noise.
VELOCITY_BASE_MPH = 79.5
VELOCITY_NOISE_MPH = 0.8
VELOCITY_TERMS = {
    "stride_length_mm": (1475.0, 3.0 / 130.0),
    "knee_extension_deg": (156.0, 1.8 / 9.2),
    "trunk_tilt_deg": (73.5, 1.2 / 6.6),
    "hip_rotation_speed_deg_s": (530.0, 1.6 / 63.0),
}

_PIVOT_HEEL0 = np.array([0.0, 28.0, 140.0])
_STRIDE_LAND_Z = -160.0
_PLANT_FRAME = 65
_HIP_PEAK_GAP = 70
_TOTAL_HIP_ROTATION_DEG = 95.0
_TOTAL_SHOULDER_ROTATION_DEG = 103.0


@dataclass
class AthleteStyle:
    """Per-athlete body proportions and feature targets."""

    athlete_id: str
    throwing_side: str
    pelvis_width: float
    shoulder_width: float
    torso_length: float
    upper_arm: float
    forearm: float
    head_height: float
    foot_length: float
    leg_ratio: float  # thigh / shank
    arm_slot_deg: float
    targets: dict = field(default_factory=dict)


@dataclass
class SynthTrial:
    """One generated trial and the analytic values of its features."""

    sequence: MotionSequence
    ground_truth: FeatureVector


@dataclass
class SynthCohort:
    styles: list
    trials: dict  # athlete_id -> list[SynthTrial]
    master_seed: int

    def all_sequences(self) -> list:
        return [t.sequence for aid in sorted(self.trials) for t in self.trials[aid]]

    def all_trials(self) -> list:
        return [t for aid in sorted(self.trials) for t in self.trials[aid]]


def _smooth(p):
    """Smootherstep ramp clamped to [0, 1]; C2 at both ends."""
    p = np.clip(p, 0.0, 1.0)
    return p * p * p * (p * (6.0 * p - 15.0) + 10.0)


def _heading_series(theta0_deg: float, peak_deg_s: float, center_gap: int,
                    total_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a Gaussian angular-speed bump into a heading series.

    The per-gap speeds have a strict maximum of peak_deg_s at
    center_gap, and the heading decreases (rotation toward the target).
    Returns (theta_rad[NUM_FRAMES], speeds_rad_s[NUM_FRAMES-1]).
    """
    peak = np.radians(peak_deg_s)
    width = np.radians(total_deg) / (peak * FRAME_DT_S * np.sqrt(np.pi))
    gaps = np.arange(NUM_FRAMES - 1)
    speeds = peak * np.exp(-(((gaps - center_gap) / width) ** 2))
    theta = np.radians(theta0_deg) - np.concatenate(
        [[0.0], np.cumsum(speeds) * FRAME_DT_S]
    )
    return theta, speeds


def _unit_heading(theta: np.ndarray) -> np.ndarray:
    """Horizontal unit vectors (T, 3) for heading angles atan2(z, x)."""
    return np.stack([np.cos(theta), np.zeros_like(theta), np.sin(theta)], axis=1)


def _angle_deg_points(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angle between vectors via the arccos route (generator side)."""
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    cos = np.sum(a * b, axis=-1) / (na * nb)
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


def _solve_knee(hip: np.ndarray, heel: np.ndarray, knee_angle_deg: float,
                leg_ratio: float) -> np.ndarray:
    """Place a knee so the hip-knee-heel angle is exactly the target.

    Segment lengths are derived from the hip-heel span and the
    thigh/shank ratio so the triangle closes; the knee bulges forward.
    """
    span = hip - heel
    dist = np.linalg.norm(span)
    gamma = np.radians(knee_angle_deg)
    shank = dist / np.sqrt(leg_ratio**2 + 1.0 - 2.0 * leg_ratio * np.cos(gamma))
    thigh = leg_ratio * shank
    e = span / dist
    fwd = np.array([1.0, 0.0, 0.0])
    n = fwd - np.dot(fwd, e) * e
    n_norm = np.linalg.norm(n)
    if n_norm < 1e-9:
        n = np.array([0.0, 0.0, 1.0]) - e[2] * e
        n_norm = np.linalg.norm(n)
    n = n / n_norm
    cos_beta = (dist**2 + shank**2 - thigh**2) / (2.0 * dist * shank)
    beta = np.arccos(np.clip(cos_beta, -1.0, 1.0))
    return heel + shank * (np.cos(beta) * e + np.sin(beta) * n)


def _abduction_elbow(shoulder: np.ndarray, hip: np.ndarray, angle_deg: float,
                     slot_deg: float, upper_arm: float) -> np.ndarray:
    """Place the elbow at an exact angle from the shoulder->hip axis.

    The arm-slot angle rotates the elbow around that axis without
    changing the abduction angle.
    """
    a = hip - shoulder
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    fwd = np.zeros_like(a)
    fwd[..., 0] = 1.0
    n = np.cross(a, fwd)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    e1 = np.cross(n, a)
    ang = np.radians(angle_deg)
    slot = np.radians(slot_deg)
    direction = (
        np.cos(ang) * a
        + np.sin(ang) * (np.cos(slot) * e1 + np.sin(slot) * n)
    )
    return shoulder + upper_arm * direction


def _pchip_path(anchors: dict[int, np.ndarray], frames: np.ndarray) -> np.ndarray:
    """Monotone-cubic path through {frame: position} anchors."""
    keys = sorted(anchors)
    pts = np.stack([np.asarray(anchors[k], dtype=np.float64) for k in keys])
    out = np.empty((len(frames), pts.shape[1]))
    for c in range(pts.shape[1]):
        out[:, c] = PchipInterpolator(keys, pts[:, c])(frames)
    return out


def draw_style(rng: np.random.Generator, athlete_id: str) -> AthleteStyle:
    """Draw one athlete's proportions and targets uniformly in range."""
    t = {}
    for key, (lo, hi) in TARGET_RANGES.items():
        if key == "hip_shoulder_delay_frames":
            t[key] = int(rng.integers(lo, hi + 1))
        else:
            t[key] = float(rng.uniform(lo, hi))
    return AthleteStyle(
        athlete_id=athlete_id,
        throwing_side="right",
        pelvis_width=float(rng.uniform(280, 330)),
        shoulder_width=float(rng.uniform(360, 420)),
        torso_length=float(rng.uniform(460, 520)),
        upper_arm=float(rng.uniform(280, 330)),
        forearm=float(rng.uniform(250, 300)),
        head_height=float(rng.uniform(240, 280)),
        foot_length=float(rng.uniform(230, 270)),
        leg_ratio=float(rng.uniform(1.0, 1.1)),
        arm_slot_deg=float(rng.uniform(-35, 35)),
        targets=t,
    )


def _trial_params(style: AthleteStyle, rng: np.random.Generator) -> dict:
    """Athlete targets plus small per-trial perturbations."""
    t = style.targets
    delay = t["hip_shoulder_delay_frames"] + int(rng.integers(-1, 2))
    delay = int(np.clip(delay, 1, 8))
    return {
        "shoulder_path_mm": t["shoulder_path_mm"] * float(rng.normal(1.0, 0.04)),
        "shoulder_abduction_deg": t["shoulder_abduction_deg"] + float(rng.normal(0, 0.8)),
        "trunk_tilt_deg": t["trunk_tilt_deg"] + float(rng.normal(0, 0.8)),
        "lateral_tilt_deg": t["lateral_tilt_deg"] + float(rng.normal(0, 0.8)),
        "hip_rotation_speed_deg_s": t["hip_rotation_speed_deg_s"] + float(rng.normal(0, 8.0)),
        "hip_shoulder_delay_frames": delay,
        "knee_extension_deg": t["knee_extension_deg"] + float(rng.normal(0, 1.0)),
        "stride_length_mm": t["stride_length_mm"] + float(rng.normal(0, 10.0)),
        "arm_slot_deg": style.arm_slot_deg + float(rng.normal(0, 2.0)),
    }


def ball_velocity_mph(params: dict, rng: np.random.Generator) -> float:
    """Affine velocity model over the velocity-linked parameters."""
    v = VELOCITY_BASE_MPH
    for key, (center, coef) in VELOCITY_TERMS.items():
        v += coef * (params[key] - center)
    return float(v + rng.normal(0.0, VELOCITY_NOISE_MPH))


def _build_frames(style: AthleteStyle, params: dict) -> tuple[np.ndarray, dict]:
    """Construct the clean (pre-offset) frame array and its anchors."""
    T = NUM_FRAMES
    r = RELEASE_FRAME
    i = np.arange(T, dtype=np.float64)
    frames = np.zeros((T, NUM_JOINTS, 3))

    # Line headings: hips peak at a fixed gap, shoulders a controlled
    # number of gaps later.
    delay = params["hip_shoulder_delay_frames"]
    theta_hip, _ = _heading_series(
        150.0, params["hip_rotation_speed_deg_s"], _HIP_PEAK_GAP,
        _TOTAL_HIP_ROTATION_DEG,
    )
    theta_sho, _ = _heading_series(
        163.0, params["hip_rotation_speed_deg_s"] * 1.18,
        _HIP_PEAK_GAP + delay, _TOTAL_SHOULDER_ROTATION_DEG,
    )

    # Hip centre: bell-shaped forward drive, slight squat and glove-side
    # drift.  The drive width is the shoulder-path style knob.
    stride = params["stride_length_mm"]
    stride_dx = np.sqrt(stride**2 - (_STRIDE_LAND_Z - _PIVOT_HEEL0[2]) ** 2)
    land = _PIVOT_HEEL0 + np.array([stride_dx, 0.0, _STRIDE_LAND_Z - _PIVOT_HEEL0[2]])
    drive_width = 18.0 * params["shoulder_path_mm"] / 185.0
    gaps = np.arange(T - 1)
    vx = np.exp(-(((gaps - 55.0) / drive_width) ** 2))
    cum = np.concatenate([[0.0], np.cumsum(vx)])
    x0 = 80.0
    hip_x = x0 + (0.58 * stride_dx) * cum / cum[r]
    hip_y = 870.0 - 50.0 * _smooth((i - 20.0) / 40.0) - 10.0 * _smooth((i - 75.0) / 20.0)
    hip_z = -25.0 * _smooth((i - 40.0) / 40.0)
    hip_mid = np.stack([hip_x, hip_y, hip_z], axis=1)
    u_hip = _unit_heading(theta_hip)
    frames[:, JointId.HIP_L] = hip_mid - 0.5 * style.pelvis_width * u_hip
    frames[:, JointId.HIP_R] = hip_mid + 0.5 * style.pelvis_width * u_hip

    # Trunk tilt reaches its release value a few frames early and holds
    # through release before easing into follow-through.
    tilt = (
        86.0
        - (86.0 - params["trunk_tilt_deg"]) * _smooth((i - 42.0) / 38.0)
        - 3.0 * _smooth((i - 88.0) / 12.0)
    )
    tau = np.radians(tilt)
    sho_mid = hip_mid + style.torso_length * np.stack(
        [np.cos(tau), np.sin(tau), np.zeros(T)], axis=1
    )
    u_sho = _unit_heading(theta_sho)
    frames[:, JointId.SHOULDER_L] = sho_mid - 0.5 * style.shoulder_width * u_sho
    frames[:, JointId.SHOULDER_R] = sho_mid + 0.5 * style.shoulder_width * u_sho

    # Stride foot: airborne descent, planted from _PLANT_FRAME onward.
    p_land = _smooth((i - 12.0) / (_PLANT_FRAME - 12.0))
    s0 = np.array([150.0, 430.0, -60.0])
    heel_l = s0 + (land - s0) * p_land[:, None]
    arc = 140.0 * p_land * (1.0 - p_land) * 4.0 * (1.0 - p_land)
    heel_l[:, 1] += arc
    heel_l[p_land >= 1.0] = land
    frames[:, JointId.HEEL_L] = heel_l

    # Pivot foot: planted at the reference point, dragging after the
    # weight transfer.
    drag = _smooth((i - 62.0) / 30.0)
    heel_r = np.tile(_PIVOT_HEEL0, (T, 1))
    heel_r[:, 0] += 380.0 * drag
    heel_r[:, 1] += 110.0 * drag * (1.0 - 0.4 * drag)
    frames[:, JointId.HEEL_R] = heel_r

    # Toes follow their heels with slowly rotating foot directions.
    zeta_l = np.radians(55.0 - 61.0 * _smooth((i - 20.0) / 45.0))
    droop = 0.45 - 0.39 * p_land
    toe_dir_l = np.stack([np.cos(zeta_l), -droop, np.sin(zeta_l)], axis=1)
    toe_dir_l /= np.linalg.norm(toe_dir_l, axis=1, keepdims=True)
    frames[:, JointId.TOE_L] = heel_l + style.foot_length * toe_dir_l
    zeta_r = np.radians(70.0 - 40.0 * drag)
    toe_dir_r = np.stack([np.cos(zeta_r), np.full(T, -0.08), np.sin(zeta_r)], axis=1)
    toe_dir_r /= np.linalg.norm(toe_dir_r, axis=1, keepdims=True)
    frames[:, JointId.TOE_R] = heel_r + style.foot_length * toe_dir_r

    # Stride knee: flight heuristic early, exact triangle solve in a
    # window around release, linear blend between.
    knee_exact = np.stack(
        [
            _solve_knee(frames[k, JointId.HIP_L], frames[k, JointId.HEEL_L],
                        params["knee_extension_deg"], style.leg_ratio)
            for k in range(60, T)
        ]
    )
    thigh_est = np.linalg.norm(knee_exact[r - 60] - frames[r, JointId.HIP_L])
    flight_dir = np.array([0.8, -0.3, -0.25])
    flight_dir /= np.linalg.norm(flight_dir)
    target_dir = knee_exact[10] - frames[70, JointId.HIP_L]
    target_dir /= np.linalg.norm(target_dir)
    blend = _smooth((i[:, None] - 52.0) / 18.0)
    knee_dir = (1.0 - blend) * flight_dir + blend * target_dir
    knee_dir /= np.linalg.norm(knee_dir, axis=1, keepdims=True)
    knee_l = frames[:, JointId.HIP_L] + thigh_est * knee_dir
    w = _smooth((i[60:] - 60.0) / 10.0)[:, None]
    knee_l[60:] = (1.0 - w) * knee_l[60:] + w * knee_exact
    frames[:, JointId.KNEE_L] = knee_l

    # Pivot knee: midpoint heuristic with a forward bulge.
    span = frames[:, JointId.HIP_R] - frames[:, JointId.HEEL_R]
    dist = np.linalg.norm(span, axis=1, keepdims=True)
    e = span / dist
    n = np.array([1.0, 0.0, 0.0]) - e * e[:, 0:1]
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    frames[:, JointId.KNEE_R] = (
        0.5 * (frames[:, JointId.HIP_R] + frames[:, JointId.HEEL_R])
        + (0.16 * dist + 40.0) * n
    )

    # Throwing elbow: exact abduction placement near release, keyframed
    # arm action elsewhere.
    elbow_exact = _abduction_elbow(
        frames[:, JointId.SHOULDER_R], frames[:, JointId.HIP_R],
        params["shoulder_abduction_deg"], params["arm_slot_deg"], style.upper_arm,
    )
    elbow_anchor_dirs = {
        0: np.array([-0.05, -0.95, 0.25]),
        30: np.array([-0.45, -0.55, 0.65]),
        55: np.array([-0.55, 0.1, 0.8]),
        64: elbow_exact[64] - frames[64, JointId.SHOULDER_R],
    }
    for k in list(elbow_anchor_dirs):
        d = elbow_anchor_dirs[k]
        elbow_anchor_dirs[k] = frames[k, JointId.SHOULDER_R] + style.upper_arm * (
            d / np.linalg.norm(d)
        )
    elbow_key = _pchip_path(elbow_anchor_dirs, i)
    w_in = _smooth((i[:, None] - 58.0) / 6.0)
    elbow_r = (1.0 - w_in) * elbow_key + w_in * elbow_exact
    w_out = _smooth((i[:, None] - 88.0) / 10.0)
    follow = elbow_exact[88] + np.array([120.0, -160.0, -120.0])
    elbow_r = (1.0 - w_out) * elbow_r + w_out * follow
    frames[:, JointId.ELBOW_R] = elbow_r

    # Throwing wrist: direction sweep through the slot, fast near release.
    wrist_dirs = {
        0: np.array([-0.1, -0.97, 0.1]),
        45: np.array([-0.7, -0.35, 0.4]),
        70: np.array([-0.5, 0.55, 0.5]),
        79: np.array([0.05, 0.9, 0.3]),
        83: np.array([0.85, 0.45, 0.05]),
        89: np.array([0.9, -0.25, -0.15]),
        100: np.array([0.3, -0.8, -0.4]),
    }
    wrist_dir = _pchip_path({k: v / np.linalg.norm(v) for k, v in wrist_dirs.items()}, i)
    wrist_dir /= np.linalg.norm(wrist_dir, axis=1, keepdims=True)
    frames[:, JointId.WRIST_R] = elbow_r + style.forearm * wrist_dir

    # Glove arm: reach and tuck.
    glove_dirs = {
        0: np.array([0.15, -0.95, 0.1]),
        35: np.array([0.85, -0.1, -0.45]),
        62: np.array([0.55, -0.25, -0.65]),
        83: np.array([0.1, -0.6, -0.55]),
        100: np.array([-0.1, -0.85, -0.3]),
    }
    glove_dir = _pchip_path({k: v / np.linalg.norm(v) for k, v in glove_dirs.items()}, i)
    glove_dir /= np.linalg.norm(glove_dir, axis=1, keepdims=True)
    elbow_l = frames[:, JointId.SHOULDER_L] + style.upper_arm * glove_dir
    frames[:, JointId.ELBOW_L] = elbow_l
    hand_dirs = {
        0: np.array([0.1, -0.9, 0.2]),
        35: np.array([0.9, 0.1, -0.3]),
        62: np.array([0.2, -0.5, -0.8]),
        100: np.array([-0.3, -0.9, -0.2]),
    }
    hand_dir = _pchip_path({k: v / np.linalg.norm(v) for k, v in hand_dirs.items()}, i)
    hand_dir /= np.linalg.norm(hand_dir, axis=1, keepdims=True)
    frames[:, JointId.WRIST_L] = elbow_l + style.forearm * hand_dir

    # Head: rides above the shoulder midpoint; its frontal-plane offset
    # is solved so the release-frame lateral tilt is exact, reached
    # before release and held.
    head_y = sho_mid[:, 1] + style.head_height * 0.96
    head_x = sho_mid[:, 0] + 30.0 + 50.0 * _smooth((i - 40.0) / 40.0)
    z_target = land[2] - np.tan(np.radians(params["lateral_tilt_deg"])) * (
        head_y[r] - land[1]
    )
    head_z = sho_mid[:, 2] + (z_target - sho_mid[r, 2]) * _smooth((i - 52.0) / 28.0)
    frames[:, JointId.HEAD] = np.stack([head_x, head_y, head_z], axis=1)

    anchors = {
        "land": land,
        "hip_peak_gap": _HIP_PEAK_GAP,
        "shoulder_peak_gap": _HIP_PEAK_GAP + delay,
    }
    return frames, anchors


def _ground_truth(frames: np.ndarray, offsets: np.ndarray, params: dict,
                  anchors: dict) -> FeatureVector:
    """Analytic feature values of the constructed kinematics.

    Computed from the clean construction plus the known constant joint
    offsets; independent of the extractor's code path.
    """
    r = RELEASE_FRAME
    off = {j: offsets[j] for j in JointId}

    sho_l = frames[r - 10 : r + 1, JointId.SHOULDER_L]
    gt_path = float(np.sum(np.linalg.norm(np.diff(sho_l, axis=0), axis=1)))

    sho = frames[r - 10 : r, JointId.SHOULDER_R]
    a = frames[r - 10 : r, JointId.HIP_R] - sho
    b = (frames[r - 10 : r, JointId.ELBOW_R] + off[JointId.ELBOW_R]) - sho
    gt_abduction = float(np.mean(_angle_deg_points(a, b)))

    gt_tilt = params["trunk_tilt_deg"]

    head = frames[r, JointId.HEAD] + off[JointId.HEAD]
    heel = frames[r, JointId.HEEL_L] + off[JointId.HEEL_L]
    gt_lateral = float(np.degrees(np.arctan2(-(head[2] - heel[2]), head[1] - heel[1])))

    gt_hip_speed = params["hip_rotation_speed_deg_s"]
    gt_delay = (anchors["shoulder_peak_gap"] - anchors["hip_peak_gap"]) * FRAME_DT_MS

    knee = frames[r, JointId.KNEE_L] + off[JointId.KNEE_L]
    gt_knee = float(
        _angle_deg_points(frames[r, JointId.HIP_L] - knee, heel - knee)
    )

    pivot0 = frames[0, JointId.HEEL_R] + off[JointId.HEEL_R]
    gt_stride = float(np.linalg.norm(pivot0 - heel))

    return FeatureVector(
        shoulder_path_mm=gt_path,
        shoulder_abduction_deg=gt_abduction,
        trunk_tilt_deg=gt_tilt,
        lateral_tilt_deg=gt_lateral,
        hip_rotation_speed_deg_s=gt_hip_speed,
        hip_shoulder_delay_ms=float(gt_delay),
        knee_extension_deg=gt_knee,
        stride_length_mm=gt_stride,
    )


def synth_trial(style: AthleteStyle, trial_id: str,
                rng: np.random.Generator) -> SynthTrial:
    """Generate one trial: perturbed params, construction, offsets, truth."""
    params = _trial_params(style, rng)
    frames, anchors = _build_frames(style, params)
    offsets = np.zeros((NUM_JOINTS, 3))
    offsets[_JITTERED_JOINTS] = rng.normal(0.0, JITTER_MM, (len(_JITTERED_JOINTS), 3))
    velocity = ball_velocity_mph(params, rng)
    seq = MotionSequence(
        frames=frames + offsets[None, :, :],
        athlete_id=style.athlete_id,
        trial_id=trial_id,
        throwing_side=style.throwing_side,
        ball_velocity_mph=velocity,
    )
    return SynthTrial(sequence=seq, ground_truth=_ground_truth(frames, offsets, params, anchors))


def make_cohort(n_athletes: int = 20, n_trials: int = 5,
                master_seed: int = 0) -> SynthCohort:
    """Deterministic cohort: same seed and sizes give identical data."""
    if n_athletes < 1 or n_trials < 1:
        raise ValueError("n_athletes and n_trials must be positive")
    root = np.random.SeedSequence(master_seed)
    athlete_seeds = root.spawn(n_athletes)
    styles = []
    trials: dict[str, list[SynthTrial]] = {}
    for a, seed in enumerate(athlete_seeds):
        aid = f"A{a:03d}"
        style_rng = np.random.default_rng(seed)
        style = draw_style(style_rng, aid)
        styles.append(style)
        trial_seeds = seed.spawn(n_trials)
        trials[aid] = [
            synth_trial(style, f"{aid}_T{t:02d}", np.random.default_rng(ts))
            for t, ts in enumerate(trial_seeds)
        ]
    return SynthCohort(styles=styles, trials=trials, master_seed=master_seed)


def make_pose_fixture(
    stride_length: float = 1500.0,
    knee_angle: float = 160.0,
    trunk_tilt: float = 80.0,
    lateral_tilt: float = 10.0,
    shoulder_abduction: float = 90.0,
    hip_peak_speed: float = 0.0,
    hip_peak_gap: int = 55,
    delay_frames: int = 0,
    throwing_side: str = "right",
) -> MotionSequence:
    """A mostly static sequence whose features are forced by construction.

    With hip_peak_speed == 0 the pose is frozen, so the path and speed
    features are exactly zero and the geometric features equal the
    arguments.  A positive hip_peak_speed scripts hip and shoulder line
    rotations with exact peak speeds and peak-gap delay.  Left-handed
    fixtures are built right-handed and mirrored.
    """
    if not 0.0 < knee_angle <= 180.0:
        raise ValueError("knee_angle must be in (0, 180]")
    if not -90.0 < trunk_tilt <= 90.0:
        raise ValueError("trunk_tilt must be in (-90, 90]")
    if stride_length <= abs(_STRIDE_LAND_Z - _PIVOT_HEEL0[2]):
        raise ValueError("stride_length too short for the stance geometry")

    T = NUM_FRAMES
    r = RELEASE_FRAME
    frames = np.zeros((T, NUM_JOINTS, 3))
    pelvis_w, shoulder_w, torso, ua, fa = 300.0, 390.0, 480.0, 300.0, 270.0

    if hip_peak_speed > 0.0:
        theta_hip, _ = _heading_series(120.0, hip_peak_speed, hip_peak_gap, 60.0)
        theta_sho, _ = _heading_series(120.0, hip_peak_speed * 1.1,
                                       hip_peak_gap + delay_frames, 60.0)
    else:
        theta_hip = np.full(T, np.radians(90.0))
        theta_sho = np.full(T, np.radians(90.0))

    pivot0 = _PIVOT_HEEL0.copy()
    land = pivot0 + np.array([np.sqrt(stride_length**2 - (_STRIDE_LAND_Z - pivot0[2]) ** 2),
                              0.0, _STRIDE_LAND_Z - pivot0[2]])
    hip_mid = np.array([land[0] * 0.5, 870.0, 0.0])
    u_hip = _unit_heading(theta_hip)
    u_sho = _unit_heading(theta_sho)
    frames[:, JointId.HIP_L] = hip_mid - 0.5 * pelvis_w * u_hip
    frames[:, JointId.HIP_R] = hip_mid + 0.5 * pelvis_w * u_hip
    tau = np.radians(trunk_tilt)
    sho_mid = hip_mid + torso * np.array([np.cos(tau), np.sin(tau), 0.0])
    frames[:, JointId.SHOULDER_L] = sho_mid - 0.5 * shoulder_w * u_sho
    frames[:, JointId.SHOULDER_R] = sho_mid + 0.5 * shoulder_w * u_sho

    frames[:, JointId.HEEL_L] = land
    frames[:, JointId.HEEL_R] = pivot0
    frames[:, JointId.TOE_L] = land + np.array([250.0, -10.0, 0.0])
    frames[:, JointId.TOE_R] = pivot0 + np.array([80.0, -10.0, 240.0])

    head_y = sho_mid[1] + 255.0
    head_z = land[2] - np.tan(np.radians(lateral_tilt)) * (head_y - land[1])
    frames[:, JointId.HEAD] = np.array([sho_mid[0] + 30.0, head_y, head_z])

    for k in range(T):
        frames[k, JointId.KNEE_L] = _solve_knee(
            frames[k, JointId.HIP_L], land, knee_angle, 1.05
        )
        frames[k, JointId.KNEE_R] = 0.5 * (frames[k, JointId.HIP_R] + pivot0) + np.array(
            [120.0, 0.0, 20.0]
        )
        frames[k, JointId.ELBOW_R] = _abduction_elbow(
            frames[k, JointId.SHOULDER_R], frames[k, JointId.HIP_R],
            shoulder_abduction, 0.0, ua,
        )
    frames[:, JointId.WRIST_R] = frames[:, JointId.ELBOW_R] + np.array([fa, 0.0, 0.0])
    frames[:, JointId.ELBOW_L] = frames[:, JointId.SHOULDER_L] + ua * np.array(
        [0.3, -0.9, -0.2]
    ) / np.linalg.norm([0.3, -0.9, -0.2])
    frames[:, JointId.WRIST_L] = frames[:, JointId.ELBOW_L] + fa * np.array(
        [0.5, -0.85, 0.0]
    ) / np.linalg.norm([0.5, -0.85, 0.0])

    seq = MotionSequence(
        frames=frames,
        athlete_id="FIXTURE",
        trial_id="FIXTURE_T00",
        throwing_side="right",
        ball_velocity_mph=80.0,
    )
    if throwing_side == "left":
        mirrored = frames.copy()
        mirrored[:, :, 2] *= -1.0
        for p, q in MIRROR_PAIRS:
            mirrored[:, [p, q]] = mirrored[:, [q, p]]
        seq = MotionSequence(
            frames=mirrored,
            athlete_id="FIXTURE",
            trial_id="FIXTURE_T00",
            throwing_side="left",
            ball_velocity_mph=80.0,
        )
    return seq


def make_raw_capture(
    sample_rate_hz: float = 360.0,
    release_time_s: float = 1.1,
    duration_s: float = 1.4,
    seed: int = 0,
) -> tuple[RawCapture, int]:
    """A raw-rate capture with an analytically placed release.

    The throwing wrist's velocity has a Gaussian bump centred exactly at
    release_time_s, integrated in closed form; every other joint moves
    slowly.  Returns the capture and the ground-truth release index
    round(release_time_s * sample_rate_hz).
    """
    if release_time_s < 1.05 or duration_s - release_time_s < 0.25:
        raise ValueError("release must leave >=1.05 s before and >=0.25 s after")
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate_hz)) + 1
    t = np.arange(n) / sample_rate_hz
    base = make_pose_fixture().frames[0]  # static plausible pose
    frames = np.tile(base, (n, 1, 1))

    # Gentle low-frequency sway on every joint (well under the wrist peak).
    for j in range(NUM_JOINTS):
        phase = rng.uniform(0, 2 * np.pi, 3)
        amp = rng.uniform(20.0, 45.0, 3)
        freq = rng.uniform(0.4, 1.1, 3)
        frames[:, j] += amp * np.sin(2 * np.pi * freq * t[:, None] + phase)

    # Closed-form wrist track: integral of v(t) = v0 + vp * gauss(t - t_rel).
    v0, vp, tau_w = 400.0, 7000.0, 0.04
    x_w = v0 * t + vp * tau_w * np.sqrt(np.pi) / 2.0 * (
        erf((t - release_time_s) / tau_w) - erf(-release_time_s / tau_w)
    )
    frames[:, JointId.WRIST_R, 0] += x_w
    frames[:, JointId.WRIST_R, 1] += 150.0 * np.sin(2 * np.pi * 0.5 * t)

    cap = RawCapture(
        frames=frames,
        sample_rate_hz=sample_rate_hz,
        athlete_id="RAW000",
        trial_id="RAW000_T00",
        throwing_side="right",
        ball_velocity_mph=82.0,
    )
    return cap, int(round(release_time_s * sample_rate_hz))
