"""Latent-space guidance: interpolation, hypersphere shifts, and the
evolution-strategy search for a per-athlete improvement direction.

The search keeps a unit mean direction on the latent hypersphere.  Each
iteration draws Gaussian perturbations, mirrors them, renormalizes every
candidate to the sphere, scores candidates with a Nash-product fitness
over the normalized changes of the eight release features, and moves the
mean along the centered-rank-weighted candidate directions before
renormalizing.  Fitness for a candidate direction is averaged over all
of an athlete's trial latents, each shifted by the same radius along the
candidate and decoded.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .features import (
    DeltaNormalization,
    FEATURE_KEYS,
    extract_features_batch,
    feature_delta_batch,
)
from .model import MotionVAE, decode_frames
from .motion import RELEASE_FRAME, Scaler

RESULT_FORMAT = "motionguide-optimization v1"

DEFAULT_WEIGHTS = np.array([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])

# Fitness assigned to candidates whose decoded motions are non-finite;
# strictly below the smallest value the floored product can take.
FAILED_FITNESS = 0.0


@dataclass
class FitnessParams:
    """Nash-product fitness over normalized feature deltas.

    fitness = prod_i max(1 + alpha * w_i * delta_i, floor) ** (1/K)

    The negative weight on the shoulder-path feature rewards reducing
    it; all other features reward increases.
    """

    weights: np.ndarray = field(default_factory=lambda: DEFAULT_WEIGHTS.copy())
    alpha: float = 5.0
    floor: float = 1e-6
    norm: DeltaNormalization = field(default_factory=DeltaNormalization)

    def __post_init__(self):
        # any K is allowed; delta rows are checked against it at use
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1 or len(self.weights) == 0:
            raise ValueError("weights must be a non-empty 1-D vector")
        if self.alpha <= 0 or self.floor <= 0:
            raise ValueError("alpha and floor must be positive")


@dataclass
class ESConfig:
    perturbations: int = 128  # mirrored to 2x candidates
    sigma: float = 0.1
    lr: float = 0.5
    iterations: int = 20
    radius: float = 3.0
    seed: int = 0
    decode_chunk: int = 256

    def validate(self) -> None:
        if self.perturbations < 1 or self.iterations < 1:
            raise ValueError("perturbations and iterations must be positive")
        if self.sigma <= 0 or self.lr <= 0 or self.radius <= 0:
            raise ValueError("sigma, lr, radius must be positive")


@dataclass
class OptimizationResult:
    athlete_id: str
    direction: np.ndarray
    radius: float
    seed: int
    original_latents: np.ndarray    # (n_trials, latent_dim)
    original_features: np.ndarray   # (n_trials, 8)
    optimized_features: np.ndarray  # (n_trials, 8)
    fitness_history: list           # per iteration: {iteration, best, mean}
    final_fitness: float
    floored_candidates: int
    config: dict = field(default_factory=dict)

    def optimized_latents(self) -> np.ndarray:
        return self.original_latents + self.radius * self.direction

    def decode_motions(self, model: MotionVAE, scaler: Scaler) -> np.ndarray:
        """Decoded optimized trials in physical units, (n_trials, T, J, 3)."""
        return scaler.inverse(decode_frames(model, self.optimized_latents()))

    def save(self, path: str | Path) -> None:
        payload = {
            "format": RESULT_FORMAT,
            "athlete_id": self.athlete_id,
            "radius": self.radius,
            "seed": self.seed,
            "direction": self.direction.tolist(),
            "original_latents": self.original_latents.tolist(),
            "original_features": self.original_features.tolist(),
            "optimized_features": self.optimized_features.tolist(),
            "fitness_history": self.fitness_history,
            "final_fitness": self.final_fitness,
            "floored_candidates": self.floored_candidates,
            "config": self.config,
        }
        Path(path).write_text(json.dumps(payload) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "OptimizationResult":
        payload = json.loads(Path(path).read_text())
        if payload.get("format") != RESULT_FORMAT:
            raise ValueError(f"{path}: not a {RESULT_FORMAT} file")
        return cls(
            athlete_id=payload["athlete_id"],
            direction=np.array(payload["direction"]),
            radius=payload["radius"],
            seed=payload["seed"],
            original_latents=np.array(payload["original_latents"]),
            original_features=np.array(payload["original_features"]),
            optimized_features=np.array(payload["optimized_features"]),
            fitness_history=payload["fitness_history"],
            final_fitness=payload["final_fitness"],
            floored_candidates=payload["floored_candidates"],
            config=payload.get("config", {}),
        )


def interpolate(z_a: np.ndarray, z_b: np.ndarray, alpha: float) -> np.ndarray:
    """Linear blend (1 - alpha) * z_a + alpha * z_b with alpha in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    z_a = np.asarray(z_a, dtype=np.float64)
    z_b = np.asarray(z_b, dtype=np.float64)
    if z_a.shape != z_b.shape:
        raise ValueError("latent shapes differ")
    return (1.0 - alpha) * z_a + alpha * z_b


def interpolation_sweep(z_a: np.ndarray, z_b: np.ndarray,
                        steps: int = 11) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced blends from z_a to z_b; returns (alphas, latents)."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    alphas = np.linspace(0.0, 1.0, steps)
    latents = np.stack([interpolate(z_a, z_b, a) for a in alphas])
    return alphas, latents


def hypersphere_shift(z: np.ndarray, direction: np.ndarray,
                      radius: float = 3.0) -> np.ndarray:
    """Shift a latent by radius along a unit direction."""
    direction = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(direction)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"direction must be unit length, norm={norm}")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    return np.asarray(z, dtype=np.float64) + radius * direction


def nash_fitness(delta: np.ndarray, params: FitnessParams | None = None) -> float:
    """Geometric-mean Nash product over one normalized delta vector."""
    params = params or FitnessParams()
    return float(nash_fitness_batch(np.atleast_2d(delta), params)[0])


def nash_fitness_batch(deltas: np.ndarray,
                       params: FitnessParams | None = None) -> np.ndarray:
    """Nash fitness for (B, 8) delta rows; factors floored at params.floor."""
    params = params or FitnessParams()
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.shape[-1] != len(params.weights):
        raise ValueError(
            f"delta rows have {deltas.shape[-1]} entries, "
            f"weights have {len(params.weights)}"
        )
    factors = 1.0 + params.alpha * params.weights * deltas
    factors = np.maximum(factors, params.floor)
    return np.exp(np.mean(np.log(factors), axis=-1))


def count_floored(deltas: np.ndarray, params: FitnessParams) -> int:
    factors = 1.0 + params.alpha * params.weights * np.asarray(deltas)
    return int(np.sum(factors < params.floor))


def centered_ranks(values: np.ndarray) -> np.ndarray:
    """Rank transform to [-0.5, 0.5]; robust to fitness scale."""
    ranks = np.empty(len(values), dtype=np.float64)
    ranks[np.argsort(values, kind="stable")] = np.arange(len(values))
    return ranks / (len(values) - 1) - 0.5


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero-length direction")
    return v / n


def es_maximize(
    fitness_fn,
    dim: int,
    config: ESConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list]:
    """Core mirrored-sampling search for a unit direction.

    fitness_fn maps a (B, dim) array of unit candidates to (B,) scores.
    Returns the final mean direction and a per-iteration history of
    candidate best/mean fitness.
    """
    config.validate()
    m = _unit(rng.standard_normal(dim))
    n_total = 2 * config.perturbations
    history = []
    for it in range(config.iterations):
        eps = config.sigma * rng.standard_normal((config.perturbations, dim))
        cands = np.concatenate([m + eps, m - eps], axis=0)
        cands /= np.linalg.norm(cands, axis=1, keepdims=True)
        fits = np.asarray(fitness_fn(cands), dtype=np.float64)
        if fits.shape != (n_total,):
            raise ValueError("fitness_fn returned wrong shape")
        if not np.all(np.isfinite(fits)):
            raise ValueError("fitness_fn returned non-finite values")
        utils = centered_ranks(fits)
        step = config.lr * (utils @ (cands - m)) / (n_total * config.sigma)
        m = _unit(m + step)
        history.append(
            {
                "iteration": it,
                "best": float(fits.max()),
                "mean": float(fits.mean()),
            }
        )
    return m, history


def es_optimize(
    trial_latents: np.ndarray,
    model: MotionVAE,
    scaler: Scaler,
    athlete_id: str,
    fitness: FitnessParams | None = None,
    config: ESConfig | None = None,
    throwing_side: str = "right",
) -> OptimizationResult:
    """Find a unit latent direction improving an athlete's features.

    Candidate fitness is the mean over the athlete's trial latents of
    the Nash fitness of decoded-feature deltas at the configured shift
    radius.  Original features are measured on the decoded (not raw)
    trials so the search competes against the model's own rendering.
    """
    fitness = fitness or FitnessParams()
    config = config or ESConfig()
    config.validate()
    trial_latents = np.atleast_2d(np.asarray(trial_latents, dtype=np.float64))
    n_trials, dim = trial_latents.shape

    base_frames = scaler.inverse(decode_frames(model, trial_latents, config.decode_chunk))
    f_ori = extract_features_batch(base_frames, throwing_side, RELEASE_FRAME)
    if not np.all(np.isfinite(f_ori)):
        raise ValueError("decoded original trials produced non-finite features")

    floored = 0

    def fitness_fn(cands: np.ndarray) -> np.ndarray:
        nonlocal floored
        b = cands.shape[0]
        shifted = trial_latents[None, :, :] + config.radius * cands[:, None, :]
        frames = decode_frames(model, shifted.reshape(b * n_trials, dim),
                               config.decode_chunk)
        with np.errstate(invalid="ignore", divide="ignore"):
            frames = scaler.inverse(frames)
            feats = extract_features_batch(frames, throwing_side, RELEASE_FRAME)
            deltas = feature_delta_batch(np.tile(f_ori, (b, 1)), feats, fitness.norm)
            fits = nash_fitness_batch(deltas, fitness)
        bad = ~np.isfinite(feats).all(axis=1)
        fits = np.where(bad, FAILED_FITNESS, np.where(np.isfinite(fits), fits, FAILED_FITNESS))
        floored += count_floored(deltas[~bad], fitness)
        return fits.reshape(b, n_trials).mean(axis=1)

    rng = np.random.default_rng(config.seed)
    direction, history = es_maximize(fitness_fn, dim, config, rng)

    final_latents = trial_latents + config.radius * direction
    final_frames = scaler.inverse(decode_frames(model, final_latents, config.decode_chunk))
    f_opt = extract_features_batch(final_frames, throwing_side, RELEASE_FRAME)
    final_fit = float(
        nash_fitness_batch(feature_delta_batch(f_ori, f_opt, fitness.norm), fitness).mean()
    )
    return OptimizationResult(
        athlete_id=athlete_id,
        direction=direction,
        radius=config.radius,
        seed=config.seed,
        original_latents=trial_latents,
        original_features=f_ori,
        optimized_features=f_opt,
        fitness_history=history,
        final_fitness=final_fit,
        floored_candidates=floored,
        config=asdict(config),
    )
