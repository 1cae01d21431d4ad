"""Shared fixtures: small synthetic corpora and a tiny model config.

Long-running acceptance artifacts (full training, the 5-seed ES sweep)
are cached under .cache/ at the repo root so reruns are cheap; delete
that directory to force a rebuild.
"""

from pathlib import Path

import numpy as np
import pytest
import torch

from motionguide.model import VAEConfig, train_model
from motionguide.preprocess import fit_scaler, standardize
from motionguide.synth import make_cohort

torch.set_num_threads(1)

CACHE_DIR = Path(__file__).resolve().parents[1] / ".cache"


@pytest.fixture(scope="session")
def cache_dir() -> Path:
    CACHE_DIR.mkdir(exist_ok=True)
    return CACHE_DIR


@pytest.fixture(scope="session")
def small_cohort():
    """6 athletes x 3 trials; enough structure for pipeline tests."""
    return make_cohort(n_athletes=6, n_trials=3, master_seed=11)


@pytest.fixture(scope="session")
def small_corpus_std(small_cohort):
    """Standardized sequences plus their scaler."""
    seqs = small_cohort.all_sequences()
    scaler = fit_scaler(seqs)
    return [standardize(s, scaler) for s in seqs], scaler


@pytest.fixture(scope="session")
def desk_model(small_corpus_std):
    """A briefly trained small model for pipeline-level tests."""
    std, scaler = small_corpus_std
    cfg = VAEConfig(model_dim=32, latent_dim=16, layers=1, heads=2, ff_dim=32,
                    batch_size=4, epochs=60, lr=1e-3, dropout=0.0, seed=0)
    model, report = train_model(std, cfg, scaler=scaler)
    return model, scaler, report


@pytest.fixture
def tiny_config() -> VAEConfig:
    """A model small enough for shape and gradient tests."""
    return VAEConfig(
        frames=8, joints=4, model_dim=16, latent_dim=12, layers=1,
        heads=2, ff_dim=32, batch_size=4, epochs=3, dropout=0.0, seed=0,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240816)
