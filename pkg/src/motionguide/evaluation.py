"""Evaluation harness: DTW similarity, interpolation sweeps, statistics.

Motion similarity is the sum of classic dynamic-time-warping distances
over the 45 per-(joint, axis) series, normalized by frames x series.
The DP uses absolute-difference local cost, no warping window, and the
standard three-neighbour recurrence.

The statistics mirror the reporting protocol: two-sided paired t-tests
per feature, Holm-Bonferroni step-down adjustment across the eight
features, and paired Cohen's d with the sign convention of the fitness
weights (so a beneficial change is positive for every feature,
including the one whose raw difference is expected negative).
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats as sps

from .features import FEATURE_KEYS
from .guidance import (
    DEFAULT_WEIGHTS,
    ESConfig,
    FitnessParams,
    OptimizationResult,
    es_optimize,
    interpolation_sweep,
)
from .model import MotionVAE, decode_frames, encode_mean
from .motion import MotionSequence, NUM_COORDS, NUM_FRAMES, Scaler

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal dependency
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def _dtw_core(a: np.ndarray, b: np.ndarray) -> float:
    n = a.shape[0]
    m = b.shape[0]
    prev = np.empty(m + 1)
    cur = np.empty(m + 1)
    for j in range(m + 1):
        prev[j] = np.inf
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[0] = np.inf
        for j in range(1, m + 1):
            cost = abs(a[i - 1] - b[j - 1])
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = cost + best
        for j in range(m + 1):
            prev[j] = cur[j]
    return prev[m]


def dtw_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Unconstrained DTW distance between two 1-D series."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
        raise ValueError("dtw_distance expects non-empty 1-D series")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("dtw_distance expects finite series")
    return float(_dtw_core(a, b))


def s_motion(m1: MotionSequence, m2: MotionSequence) -> float:
    """Mean per-cell DTW distance across all 45 coordinate series."""
    f1 = m1.flat()
    f2 = m2.flat()
    total = 0.0
    for c in range(NUM_COORDS):
        total += _dtw_core(
            np.ascontiguousarray(f1[:, c]), np.ascontiguousarray(f2[:, c])
        )
    return total / (NUM_FRAMES * NUM_COORDS)


def representative_latents(
    corpus: dict[str, list[MotionSequence]], model: MotionVAE
) -> dict[str, np.ndarray]:
    """One latent per athlete: the fastest pitch, ties by trial id."""
    reps = {}
    for athlete in sorted(corpus):
        best = min(corpus[athlete], key=lambda s: (-s.ball_velocity_mph, s.trial_id))
        reps[athlete] = encode_mean(model, [best])[0]
    return reps


@dataclass
class DTWReport:
    steps: int
    rows: list = field(default_factory=list)       # per (pair, alpha)
    pair_flags: list = field(default_factory=list)  # per pair monotonicity

    def monotone_fraction(self) -> float:
        if not self.pair_flags:
            return 0.0
        ok = sum(1 for p in self.pair_flags if p["monotone_from"] and p["monotone_to"])
        return ok / len(self.pair_flags)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["athlete_a", "athlete_b", "alpha",
                             "dist_to_a", "dist_to_b"])
            for row in self.rows:
                writer.writerow([row["athlete_a"], row["athlete_b"],
                                 repr(row["alpha"]), repr(row["dist_to_a"]),
                                 repr(row["dist_to_b"])])


def transfer_sweep(
    rep_latents: dict[str, np.ndarray],
    model: MotionVAE,
    scaler: Scaler,
    steps: int = 11,
) -> DTWReport:
    """Decode latent blends for every athlete pair and score both ends.

    Distances are measured against the decoded endpoint motions, so the
    alpha = 0 and alpha = 1 rows are exactly zero on their own side.
    """
    report = DTWReport(steps=steps)
    slack = 1e-9
    for a, b in itertools.combinations(sorted(rep_latents), 2):
        alphas, latents = interpolation_sweep(rep_latents[a], rep_latents[b], steps)
        decoded = decode_frames(model, latents)
        decoded = scaler.inverse(decoded)
        seqs = [
            MotionSequence(
                frames=f, athlete_id=a, trial_id=f"{a}->{b}@{alpha:.2f}",
                throwing_side="right",
            )
            for f, alpha in zip(decoded, alphas)
        ]
        d_a = [s_motion(s, seqs[0]) for s in seqs]
        d_b = [s_motion(s, seqs[-1]) for s in seqs]
        for alpha, da, db in zip(alphas, d_a, d_b):
            report.rows.append(
                {"athlete_a": a, "athlete_b": b, "alpha": float(alpha),
                 "dist_to_a": da, "dist_to_b": db}
            )
        report.pair_flags.append(
            {
                "athlete_a": a,
                "athlete_b": b,
                "monotone_from": bool(
                    np.all(np.diff(d_a) >= -slack)
                ),
                "monotone_to": bool(np.all(np.diff(d_b) <= slack)),
            }
        )
    return report


@dataclass
class TTestResult:
    t: float
    p: float
    df: int


def paired_t_test(before: np.ndarray, after: np.ndarray) -> TTestResult:
    """Two-sided paired t-test on after - before."""
    before = np.asarray(before, dtype=np.float64)
    after = np.asarray(after, dtype=np.float64)
    if before.shape != after.shape or before.ndim != 1:
        raise ValueError("paired_t_test expects matching 1-D arrays")
    n = before.size
    if n < 2:
        raise ValueError("need at least two pairs")
    diff = after - before
    sd = diff.std(ddof=1)
    if sd == 0:
        raise ValueError("zero variance in differences")
    t = diff.mean() / (sd / np.sqrt(n))
    df = n - 1
    p = 2.0 * sps.t.sf(abs(t), df)
    return TTestResult(t=float(t), p=float(p), df=df)


def holm_bonferroni(
    p_values: np.ndarray, alpha_level: float = 0.05
) -> tuple[np.ndarray, np.ndarray]:
    """Step-down adjusted p-values plus stepwise reject flags.

    Adjusted values are monotone in the sorted raw values, never below
    them, and capped at 1.  Rejection is the standard step-down rule,
    equivalent to adjusted p < alpha_level.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("expected a non-empty 1-D array of p-values")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p[idx])
        adjusted[idx] = min(running, 1.0)
    return adjusted, adjusted < alpha_level


def cohens_d_paired(before: np.ndarray, after: np.ndarray) -> float:
    """Paired Cohen's d: mean difference over its sample SD."""
    before = np.asarray(before, dtype=np.float64)
    after = np.asarray(after, dtype=np.float64)
    if before.shape != after.shape or before.ndim != 1:
        raise ValueError("cohens_d_paired expects matching 1-D arrays")
    diff = after - before
    sd = diff.std(ddof=1)
    if sd == 0:
        raise ValueError("zero variance in differences")
    return float(diff.mean() / sd)


@dataclass
class StatsReport:
    """Per-feature paired comparison across athletes."""

    n: int
    mean_diff: np.ndarray
    t: np.ndarray
    p_raw: np.ndarray
    p_adjusted: np.ndarray
    cohens_d: np.ndarray  # sign-aligned with the fitness weights

    def total_effect(self) -> float:
        # features without a defined d contribute nothing
        return float(np.nansum(self.cohens_d))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "mean_difference", "adjusted_p", "cohens_d"])
            for i, key in enumerate(FEATURE_KEYS):
                writer.writerow(
                    [key, repr(float(self.mean_diff[i])),
                     repr(float(self.p_adjusted[i])),
                     repr(float(self.cohens_d[i]))]
                )


def build_stats_report(
    original: np.ndarray,
    optimized: np.ndarray,
    weights: np.ndarray = DEFAULT_WEIGHTS,
) -> StatsReport:
    """Paired per-feature stats over (n_athletes, 8) mean-feature rows.

    Mean differences are reported in natural units; Cohen's d is
    computed on weight-signed differences so positive d always means
    change in the rewarded direction.

    A feature whose differences have zero variance (the timing feature
    is frame-quantized, so small cohorts can tie exactly) has no valid
    t-test; it is reported with NaN t and p, excluded from the Holm
    correction, and d = 0 when nothing changed at all.
    """
    original = np.asarray(original, dtype=np.float64)
    optimized = np.asarray(optimized, dtype=np.float64)
    if original.shape != optimized.shape or original.shape[1] != len(FEATURE_KEYS):
        raise ValueError("expected matching (n, 8) arrays")
    k = len(FEATURE_KEYS)
    mean_diff = np.empty(k)
    t = np.full(k, np.nan)
    p_raw = np.full(k, np.nan)
    d = np.full(k, np.nan)
    for i in range(k):
        diffs = optimized[:, i] - original[:, i]
        mean_diff[i] = np.mean(diffs)
        if np.ptp(diffs) == 0.0:
            if diffs[0] == 0.0:
                d[i] = 0.0
            continue
        res = paired_t_test(original[:, i], optimized[:, i])
        t[i] = res.t
        p_raw[i] = res.p
        d[i] = cohens_d_paired(weights[i] * original[:, i], weights[i] * optimized[:, i])
    adjusted = np.full(k, np.nan)
    valid = np.isfinite(p_raw)
    if valid.any():
        adjusted[valid], _ = holm_bonferroni(p_raw[valid])
    return StatsReport(
        n=original.shape[0],
        mean_diff=mean_diff,
        t=t,
        p_raw=p_raw,
        p_adjusted=adjusted,
        cohens_d=d,
    )


def lower_third_athletes(corpus: dict[str, list[MotionSequence]]) -> list[str]:
    """Athlete ids in the slowest third by mean ball velocity."""
    means = {
        a: float(np.mean([s.ball_velocity_mph for s in seqs]))
        for a, seqs in corpus.items()
    }
    ordered = sorted(means, key=lambda a: (means[a], a))
    return ordered[: max(1, len(ordered) // 3)]


@dataclass
class RadiusReport:
    seeds: list
    radii: list
    totals: np.ndarray  # (n_seeds, n_radii) summed effect sizes

    def mean_by_radius(self) -> np.ndarray:
        return self.totals.mean(axis=0)

    def sd_by_radius(self) -> np.ndarray:
        return self.totals.std(axis=0, ddof=1)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["run"] + [f"radius_{r:g}" for r in self.radii])
            for s, row in zip(self.seeds, self.totals):
                writer.writerow([f"seed_{s}"] + [repr(v) for v in row.tolist()])
            writer.writerow(["mean"] + [repr(v) for v in self.mean_by_radius().tolist()])
            writer.writerow(["sd"] + [repr(v) for v in self.sd_by_radius().tolist()])


def athlete_mean_features(
    results: list[OptimizationResult],
) -> tuple[np.ndarray, np.ndarray]:
    """Per-athlete trial means -> (original, optimized) (n_athletes, 8)."""
    ori = np.stack([r.original_features.mean(axis=0) for r in results])
    opt = np.stack([r.optimized_features.mean(axis=0) for r in results])
    return ori, opt


def run_radius_sweep(
    per_seed: dict[int, tuple[MotionVAE, Scaler, dict[str, np.ndarray]]],
    radii: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0),
    fitness: FitnessParams | None = None,
    base_config: ESConfig | None = None,
) -> tuple[RadiusReport, dict]:
    """Optimize every athlete at every (seed, radius); sum effect sizes.

    per_seed maps a model seed to (model, scaler, athlete -> trial
    latents).  Returns the summary table and the raw results keyed by
    (seed, radius).
    """
    fitness = fitness or FitnessParams()
    base_config = base_config or ESConfig()
    seeds = sorted(per_seed)
    totals = np.empty((len(seeds), len(radii)))
    all_results: dict[tuple[int, float], list[OptimizationResult]] = {}
    for si, seed in enumerate(seeds):
        model, scaler, athlete_latents = per_seed[seed]
        for ri, radius in enumerate(radii):
            cfg = ESConfig(
                perturbations=base_config.perturbations,
                sigma=base_config.sigma,
                lr=base_config.lr,
                iterations=base_config.iterations,
                radius=radius,
                seed=seed,
                decode_chunk=base_config.decode_chunk,
            )
            results = [
                es_optimize(latents, model, scaler, athlete, fitness, cfg)
                for athlete, latents in sorted(athlete_latents.items())
            ]
            ori, opt = athlete_mean_features(results)
            totals[si, ri] = build_stats_report(ori, opt, fitness.weights).total_effect()
            all_results[(seed, radius)] = results
    return RadiusReport(seeds=seeds, radii=list(radii), totals=totals), all_results
