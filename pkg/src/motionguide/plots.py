"""Figure rendering for reports.

Everything here writes files via the Agg backend so it works headless.
Stick figures use a fixed bone list over the 15-joint skeleton and are
drawn in two projections: side view (x-y, the throwing direction) and
front view (z-y, as seen from the target).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import TrainReport
from .motion import JointId, MotionSequence, NUM_FRAMES

BONES = [
    (JointId.HEAD, JointId.SHOULDER_L),
    (JointId.HEAD, JointId.SHOULDER_R),
    (JointId.SHOULDER_L, JointId.SHOULDER_R),
    (JointId.SHOULDER_L, JointId.ELBOW_L),
    (JointId.ELBOW_L, JointId.WRIST_L),
    (JointId.SHOULDER_R, JointId.ELBOW_R),
    (JointId.ELBOW_R, JointId.WRIST_R),
    (JointId.SHOULDER_L, JointId.HIP_L),
    (JointId.SHOULDER_R, JointId.HIP_R),
    (JointId.HIP_L, JointId.HIP_R),
    (JointId.HIP_L, JointId.KNEE_L),
    (JointId.KNEE_L, JointId.HEEL_L),
    (JointId.HEEL_L, JointId.TOE_L),
    (JointId.HIP_R, JointId.KNEE_R),
    (JointId.KNEE_R, JointId.HEEL_R),
    (JointId.HEEL_R, JointId.TOE_R),
]

DEFAULT_KEY_FRAMES = (0, 21, 42, 63, 83, 100)

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def _draw_pose(ax, pose: np.ndarray, horiz: int, vert: int, color: str) -> None:
    for a, b in BONES:
        ax.plot(
            [pose[a, horiz], pose[b, horiz]],
            [pose[a, vert], pose[b, vert]],
            color=color, linewidth=1.4, solid_capstyle="round",
        )
    ax.scatter(pose[:, horiz], pose[:, vert], s=8, color=color, zorder=3)


def render_stick_figure(
    sequence: MotionSequence,
    path: str | Path,
    frame_indices: tuple[int, ...] = DEFAULT_KEY_FRAMES,
    overlay: MotionSequence | None = None,
) -> Path:
    """Contact sheet of selected frames, side view over front view.

    With an overlay sequence (for example an optimized motion on top of
    the original) both are drawn on shared axes per frame.
    """
    for idx in frame_indices:
        if not 0 <= idx < NUM_FRAMES:
            raise ValueError(f"frame index {idx} out of range")
    n = len(frame_indices)
    fig, axes = plt.subplots(2, n, figsize=(2.2 * n, 5.4))
    axes = np.atleast_2d(axes)
    for col, idx in enumerate(frame_indices):
        for row, (horiz, vert, label) in enumerate(
            [(0, 1, "side"), (2, 1, "front")]
        ):
            ax = axes[row, col]
            _draw_pose(ax, sequence.frames[idx], horiz, vert, "tab:blue")
            if overlay is not None:
                _draw_pose(ax, overlay.frames[idx], horiz, vert, "tab:red")
            ax.set_aspect("equal")
            ax.set_xticks([])
            ax.set_yticks([])
            if row == 0:
                ax.set_title(f"frame {idx}", fontsize=9)
            if col == 0:
                ax.set_ylabel(label)
    fig.suptitle(f"{sequence.athlete_id} / {sequence.trial_id}", fontsize=10)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def latent_scatter(
    latents_by_athlete: dict[str, np.ndarray], path: str | Path
) -> Path:
    """Project per-trial latents to their top two principal axes."""
    athletes = sorted(latents_by_athlete)
    stacked = np.concatenate([latents_by_athlete[a] for a in athletes], axis=0)
    centered = stacked - stacked.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    proj = centered @ vt[:2].T
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    cmap = plt.get_cmap("tab20")
    start = 0
    for i, athlete in enumerate(athletes):
        count = len(latents_by_athlete[athlete])
        block = proj[start : start + count]
        start += count
        ax.scatter(
            block[:, 0], block[:, 1], s=22, color=cmap(i % 20), label=athlete
        )
    ax.set_xlabel("principal axis 1")
    ax.set_ylabel("principal axis 2")
    ax.set_title("trial latents by athlete")
    if len(athletes) <= 20:
        ax.legend(fontsize=6, ncol=2, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def plot_loss_curves(report: TrainReport, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    epochs = np.arange(1, report.epochs + 1)
    for name in ("total", "recon", "kl", "speed"):
        ax.plot(epochs, report.losses[name], label=name, linewidth=1.1)
    ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def plot_fitness_history(
    histories: dict[str, list], path: str | Path
) -> Path:
    """Best-so-far fitness traces, one line per athlete."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for athlete in sorted(histories):
        rows = histories[athlete]
        ax.plot(
            [r["iteration"] for r in rows],
            [r["best"] for r in rows],
            label=athlete, linewidth=1.0,
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("best candidate fitness")
    if len(histories) <= 20:
        ax.legend(fontsize=6, ncol=2, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path
