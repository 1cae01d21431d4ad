"""On-disk formats: motion trials, dataset manifests, feature tables.

A motion file is plain text: a format line, `key: value` header lines,
a `---` separator, then one row of 45 whitespace-separated coordinates
per frame (joint-major x y z in the canonical joint order).  Both raw
captures and normalized sequences use the same layout; a normalized
sequence is simply a 101-frame file whose sample rate is the normalized
grid rate.

A dataset manifest is JSON grouping trial files by athlete; paths are
stored relative to the manifest's directory.  Ground-truth feature
sidecars (one JSON per trial) carry the generator's analytic feature
values for oracle tests.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .features import FEATURE_KEYS, FeatureVector
from .motion import FRAME_DT_S, NUM_COORDS, NUM_FRAMES, MotionSequence, RawCapture

MOTION_FORMAT = "motionguide-motion v1"
MANIFEST_FORMAT = "motionguide-manifest v1"
FEATURES_FORMAT = "motionguide-features v1"

NORMALIZED_RATE_HZ = 1.0 / FRAME_DT_S


def write_motion(path: str | Path, motion: RawCapture | MotionSequence) -> None:
    """Write one trial to a motion file."""
    if isinstance(motion, MotionSequence):
        rate = NORMALIZED_RATE_HZ
    else:
        rate = motion.sample_rate_hz
    flat = motion.frames.reshape(motion.frames.shape[0], NUM_COORDS)
    lines = [
        MOTION_FORMAT,
        f"athlete_id: {motion.athlete_id}",
        f"trial_id: {motion.trial_id}",
        f"throwing_side: {motion.throwing_side}",
        f"sample_rate_hz: {float(rate)!r}",
        f"ball_velocity_mph: {float(motion.ball_velocity_mph)!r}",
        f"frames: {flat.shape[0]}",
        "---",
    ]
    # repr of builtin floats is the shortest round-trip form
    body = "\n".join(" ".join(repr(v) for v in row) for row in flat.tolist())
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")


def read_motion(path: str | Path) -> RawCapture:
    """Read a motion file as a raw capture."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip() != MOTION_FORMAT:
        raise ValueError(f"{path}: not a {MOTION_FORMAT} file")
    header: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(text[1:], start=1):
        if line.strip() == "---":
            body_start = i + 1
            break
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()
    if body_start is None:
        raise ValueError(f"{path}: missing '---' separator")
    required = ("athlete_id", "trial_id", "throwing_side", "sample_rate_hz",
                "ball_velocity_mph", "frames")
    missing = [k for k in required if k not in header]
    if missing:
        raise ValueError(f"{path}: missing header fields {missing}")
    n_frames = int(header["frames"])
    rows = text[body_start:]
    if len(rows) != n_frames:
        raise ValueError(f"{path}: header says {n_frames} frames, body has {len(rows)}")
    frames = np.array([[float(v) for v in row.split()] for row in rows])
    if frames.shape != (n_frames, NUM_COORDS):
        raise ValueError(f"{path}: body must be {n_frames}x{NUM_COORDS}, got {frames.shape}")
    return RawCapture(
        frames=frames.reshape(n_frames, -1, 3),
        sample_rate_hz=float(header["sample_rate_hz"]),
        athlete_id=header["athlete_id"],
        trial_id=header["trial_id"],
        throwing_side=header["throwing_side"],
        ball_velocity_mph=float(header["ball_velocity_mph"]),
    )


def read_sequence(path: str | Path) -> MotionSequence:
    """Read a motion file that must hold a normalized 101-frame sequence."""
    cap = read_motion(path)
    if cap.n_frames != NUM_FRAMES:
        raise ValueError(
            f"{path}: normalized sequence needs {NUM_FRAMES} frames, has {cap.n_frames}"
        )
    return MotionSequence(
        frames=cap.frames,
        athlete_id=cap.athlete_id,
        trial_id=cap.trial_id,
        throwing_side=cap.throwing_side,
        ball_velocity_mph=cap.ball_velocity_mph,
    )


def write_manifest(path: str | Path, trials_by_athlete: dict[str, list[str]]) -> None:
    """Write a dataset manifest; trial paths must be relative to it."""
    payload = {
        "format": MANIFEST_FORMAT,
        "athletes": {a: list(files) for a, files in sorted(trials_by_athlete.items())},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_manifest(path: str | Path) -> dict[str, list[Path]]:
    """Read a manifest, resolving trial paths against its directory."""
    path = Path(path)
    payload = json.loads(path.read_text())
    if payload.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{path}: not a {MANIFEST_FORMAT} file")
    root = path.parent
    return {
        athlete: [root / f for f in files]
        for athlete, files in payload["athletes"].items()
    }


def load_corpus(manifest_path: str | Path) -> dict[str, list[MotionSequence]]:
    """Load every normalized sequence referenced by a manifest."""
    return {
        athlete: [read_sequence(p) for p in paths]
        for athlete, paths in read_manifest(manifest_path).items()
    }


def write_feature_sidecar(path: str | Path, trial_id: str, features: FeatureVector) -> None:
    payload = {
        "format": FEATURES_FORMAT,
        "trial_id": trial_id,
        "features": features.to_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_feature_sidecar(path: str | Path) -> FeatureVector:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != FEATURES_FORMAT:
        raise ValueError(f"{path}: not a {FEATURES_FORMAT} file")
    return FeatureVector.from_dict(payload["features"])


def write_feature_csv(path: str | Path, rows: list[tuple[MotionSequence, FeatureVector]]) -> None:
    """Write per-trial features as CSV with identifying columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["athlete_id", "trial_id", "ball_velocity_mph", *FEATURE_KEYS])
        for seq, feats in rows:
            writer.writerow(
                [seq.athlete_id, seq.trial_id, repr(float(seq.ball_velocity_mph))]
                + [repr(v) for v in feats.as_array().tolist()]
            )


def read_feature_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = [dict(row) for row in csv.DictReader(fh)]
    numeric = {"ball_velocity_mph", *FEATURE_KEYS}
    for row in rows:
        for key in numeric & row.keys():
            row[key] = float(row[key])
    return rows
