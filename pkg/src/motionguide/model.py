"""Transformer VAE over normalized motion sequences.

Frames are flattened to 45-dim tokens, projected to the model width,
tagged with sinusoidal positional encodings, and pushed through a
self-attention encoder stack; mean-pooling over time feeds two linear
heads for the posterior mean and log-variance (log-variance clamped to
a symmetric range for stability).  The decoder projects a latent back
to the model width, broadcasts it across all time slots, adds the same
positional encodings, runs a second self-attention stack, and maps each
slot back to 45 coordinates.

The training objective is

    total = recon + kl_weight * kl + speed_weight * speed

where recon is the element-wise MSE over frames, kl is the closed-form
divergence from the unit Gaussian summed over latent dims and averaged
over the batch, and speed is the MSE between per-frame joint speed
magnitudes (forward differences) of input and reconstruction.

The model trains and decodes standardized coordinates; callers
destandardize before measuring anything physical.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .motion import MotionSequence, NUM_FRAMES, NUM_JOINTS, Scaler

CHECKPOINT_FORMAT = "motionguide-checkpoint v1"
TRAINREPORT_FORMAT = "motionguide-trainreport v1"


@dataclass
class VAEConfig:
    frames: int = NUM_FRAMES
    joints: int = NUM_JOINTS
    model_dim: int = 256
    latent_dim: int = 256
    layers: int = 3
    heads: int = 8
    ff_dim: int = 256  # matching model_dim keeps full training practical on CPU
    logvar_clamp: float = 10.0
    lr: float = 1e-4
    batch_size: int = 64
    epochs: int = 2000
    kl_weight: float = 1e-3
    speed_weight: float = 1.0
    # nonzero by default: long default training on a small corpus
    # memorizes without it, and decoded blends between athletes lose
    # their smooth ordering
    dropout: float = 0.1
    seed: int = 0

    @property
    def input_dim(self) -> int:
        return self.joints * 3

    def validate(self) -> None:
        if self.model_dim % self.heads != 0:
            raise ValueError("model_dim must be divisible by heads")
        for name in ("frames", "joints", "model_dim", "latent_dim", "layers",
                     "heads", "ff_dim", "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")


@dataclass
class LatentDistribution:
    """Diagonal Gaussian posterior for a batch of sequences."""

    mu: torch.Tensor      # (B, latent_dim)
    logvar: torch.Tensor  # (B, latent_dim)

    def sample(self, generator: torch.Generator | None = None) -> torch.Tensor:
        eps = torch.randn(self.mu.shape, generator=generator, dtype=self.mu.dtype)
        return self.mu + torch.exp(0.5 * self.logvar) * eps

    def kl(self) -> torch.Tensor:
        """Mean over the batch of the summed per-dim KL to N(0, I)."""
        per_dim = 0.5 * (self.mu**2 + torch.exp(self.logvar) - 1.0 - self.logvar)
        return per_dim.sum(dim=1).mean()


def sinusoidal_encoding(frames: int, dim: int) -> torch.Tensor:
    """Standard fixed positional encoding table (frames, dim)."""
    position = torch.arange(frames, dtype=torch.float64).unsqueeze(1)
    div = torch.exp(
        torch.arange(0, dim, 2, dtype=torch.float64) * (-math.log(10000.0) / dim)
    )
    pe = torch.zeros(frames, dim, dtype=torch.float64)
    pe[:, 0::2] = torch.sin(position * div)
    pe[:, 1::2] = torch.cos(position * div[: pe[:, 1::2].shape[1]])
    return pe.float()


class MotionVAE(nn.Module):
    def __init__(self, config: VAEConfig):
        super().__init__()
        config.validate()
        self.config = config
        d = config.model_dim
        self.input_proj = nn.Linear(config.input_dim, d)
        self.register_buffer("pos_enc", sinusoidal_encoding(config.frames, d))
        enc_layer = nn.TransformerEncoderLayer(
            d_model=d, nhead=config.heads, dim_feedforward=config.ff_dim,
            dropout=config.dropout, batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(enc_layer, config.layers)
        self.mu_head = nn.Linear(d, config.latent_dim)
        self.logvar_head = nn.Linear(d, config.latent_dim)
        self.latent_proj = nn.Linear(config.latent_dim, d)
        dec_layer = nn.TransformerEncoderLayer(
            d_model=d, nhead=config.heads, dim_feedforward=config.ff_dim,
            dropout=config.dropout, batch_first=True,
        )
        self.decoder = nn.TransformerEncoder(dec_layer, config.layers)
        self.output_proj = nn.Linear(d, config.input_dim)

    def encode(self, x: torch.Tensor) -> LatentDistribution:
        """x: (B, frames, joints*3) standardized coordinates."""
        if x.ndim != 3 or x.shape[1:] != (self.config.frames, self.config.input_dim):
            raise ValueError(
                f"expected (B, {self.config.frames}, {self.config.input_dim}) "
                f"input, got {tuple(x.shape)}"
            )
        tokens = self.input_proj(x) + self.pos_enc
        pooled = self.encoder(tokens).mean(dim=1)
        c = self.config.logvar_clamp
        return LatentDistribution(
            mu=self.mu_head(pooled),
            logvar=torch.clamp(self.logvar_head(pooled), -c, c),
        )

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        """z: (B, latent_dim) -> (B, frames, joints*3)."""
        if z.ndim != 2 or z.shape[1] != self.config.latent_dim:
            raise ValueError(
                f"expected (B, {self.config.latent_dim}) latents, "
                f"got {tuple(z.shape)}"
            )
        slots = self.latent_proj(z).unsqueeze(1).expand(-1, self.config.frames, -1)
        h = self.decoder(slots + self.pos_enc)
        return self.output_proj(h)

    def forward(self, x: torch.Tensor, generator: torch.Generator | None = None):
        dist = self.encode(x)
        z = dist.sample(generator)
        return self.decode(z), dist


@dataclass
class LossTerms:
    recon: torch.Tensor
    kl: torch.Tensor
    speed: torch.Tensor
    total: torch.Tensor


def speed_profile(x: torch.Tensor, joints: int) -> torch.Tensor:
    """Per-frame joint speed magnitudes: (B, T, J*3) -> (B, T-1, J)."""
    b, t, _ = x.shape
    pts = x.reshape(b, t, joints, 3)
    return torch.linalg.vector_norm(pts[:, 1:] - pts[:, :-1], dim=3)


def loss_terms(x: torch.Tensor, recon: torch.Tensor, dist: LatentDistribution,
               config: VAEConfig) -> LossTerms:
    recon_term = torch.mean((recon - x) ** 2)
    kl_term = dist.kl()
    speed_term = torch.mean(
        (speed_profile(recon, config.joints) - speed_profile(x, config.joints)) ** 2
    )
    total = recon_term + config.kl_weight * kl_term + config.speed_weight * speed_term
    return LossTerms(recon=recon_term, kl=kl_term, speed=speed_term, total=total)


@dataclass
class TrainReport:
    epochs: int
    losses: dict = field(default_factory=dict)  # name -> list[float] per epoch
    final_rmse_mm: float | None = None
    wall_time_s: float = 0.0
    config: dict = field(default_factory=dict)

    def save(self, path: str | Path) -> None:
        payload = {"format": TRAINREPORT_FORMAT, **asdict(self)}
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TrainReport":
        payload = json.loads(Path(path).read_text())
        if payload.pop("format", None) != TRAINREPORT_FORMAT:
            raise ValueError(f"{path}: not a {TRAINREPORT_FORMAT} file")
        return cls(**payload)


def sequences_to_tensor(sequences: list[MotionSequence]) -> torch.Tensor:
    """Stack standardized sequences into a (N, T, J*3) float tensor."""
    return torch.tensor(
        np.stack([s.flat() for s in sequences]), dtype=torch.float32
    )


def build_model(config: VAEConfig) -> MotionVAE:
    """Construct a model with seed-determined initial weights."""
    torch.manual_seed(config.seed)
    return MotionVAE(config)


def train_model(
    sequences: list[MotionSequence],
    config: VAEConfig,
    scaler: Scaler | None = None,
    log_every: int = 0,
) -> tuple[MotionVAE, TrainReport]:
    """Train on standardized sequences; returns the model and its report.

    Deterministic for a fixed config seed and corpus: weight init,
    batch shuffling, and posterior sampling all derive from it.  Raises
    RuntimeError with a diagnostic if the loss goes non-finite.
    """
    if not sequences:
        raise ValueError("cannot train on an empty corpus")
    model = build_model(config)
    data = sequences_to_tensor(sequences)
    if data.shape[1] != config.frames or data.shape[2] != config.input_dim:
        raise ValueError("sequence shape does not match model config")
    sample_gen = torch.Generator().manual_seed(config.seed + 1)
    shuffle_gen = torch.Generator().manual_seed(config.seed + 2)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    n = data.shape[0]
    history: dict[str, list[float]] = {k: [] for k in ("recon", "kl", "speed", "total")}
    start = time.perf_counter()
    for epoch in range(config.epochs):
        order = torch.randperm(n, generator=shuffle_gen)
        sums = dict.fromkeys(history, 0.0)
        for lo in range(0, n, config.batch_size):
            batch = data[order[lo : lo + config.batch_size]]
            recon, dist = model(batch, generator=sample_gen)
            terms = loss_terms(batch, recon, dist, config)
            if not torch.isfinite(terms.total):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch} batch {lo // config.batch_size}: "
                    f"recon={terms.recon.item()} kl={terms.kl.item()} "
                    f"speed={terms.speed.item()}"
                )
            optimizer.zero_grad()
            terms.total.backward()
            optimizer.step()
            w = batch.shape[0] / n
            for key in history:
                sums[key] += getattr(terms, key).item() * w
        for key in history:
            history[key].append(sums[key])
        if log_every and (epoch + 1) % log_every == 0:
            print(
                f"epoch {epoch + 1}/{config.epochs} "
                f"total={history['total'][-1]:.5f} recon={history['recon'][-1]:.5f}"
            )
    model.eval()
    report = TrainReport(
        epochs=config.epochs,
        losses=history,
        wall_time_s=time.perf_counter() - start,
        config=asdict(config),
    )
    if scaler is not None:
        report.final_rmse_mm = reconstruction_rmse(model, sequences, scaler)
    return model, report


def encode_mean(model: MotionVAE, sequences: list[MotionSequence]) -> np.ndarray:
    """Posterior means (N, latent_dim); the canonical guidance latents."""
    model.eval()
    with torch.inference_mode():
        dist = model.encode(sequences_to_tensor(sequences))
    return dist.mu.numpy().astype(np.float64)


def decode_frames(model: MotionVAE, z: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Decode latents (B, latent_dim) to frames (B, T, joints, 3), standardized."""
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    model.eval()
    out = []
    with torch.inference_mode():
        for lo in range(0, z.shape[0], chunk):
            zt = torch.tensor(z[lo : lo + chunk], dtype=torch.float32)
            flat = model.decode(zt).numpy().astype(np.float64)
            out.append(flat.reshape(flat.shape[0], model.config.frames, model.config.joints, 3))
    return np.concatenate(out, axis=0)


def reconstruction_rmse(model: MotionVAE, sequences: list[MotionSequence],
                        scaler: Scaler) -> float:
    """RMSE in mm of per-frame per-joint position error, mean-latent path."""
    z = encode_mean(model, sequences)
    recon = decode_frames(model, z)
    err2 = []
    for seq, rec in zip(sequences, recon):
        diff = scaler.inverse(rec) - scaler.inverse(seq.frames)
        err2.append(np.sum(diff**2, axis=2))  # (T, J) squared distances
    return float(np.sqrt(np.mean(np.stack(err2))))


def save_checkpoint(path: str | Path, model: MotionVAE, scaler: Scaler) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": asdict(model.config),
            "state_dict": model.state_dict(),
            "scaler_mean": scaler.mean,
            "scaler_std": scaler.std,
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[MotionVAE, Scaler]:
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise RuntimeError(f"unreadable checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise RuntimeError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
    config = VAEConfig(**payload["config"])
    model = MotionVAE(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, Scaler(mean=payload["scaler_mean"], std=payload["scaler_std"])
