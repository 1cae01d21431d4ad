"""Command-line surface wiring the pipeline end to end.

Subcommands: synth, preprocess, train, interpolate, optimize, features,
dtw-sweep, report.  Every command resolves its options in precedence
order (command line > --config JSON > built-in defaults matching the
training and optimization protocol), writes the resolved configuration
next to its outputs, and is deterministic given that configuration.

Exit codes: 0 success, 1 validation error (bad arguments or inputs),
2 runtime or numerical failure.  The default output root is
./motionguide_out, overridable with the MOTIONGUIDE_OUT environment
variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .evaluation import (
    RadiusReport,
    athlete_mean_features,
    build_stats_report,
    lower_third_athletes,
    representative_latents,
    transfer_sweep,
)
from .features import FEATURE_KEYS, extract_features
from .guidance import (
    ESConfig,
    FitnessParams,
    OptimizationResult,
    es_optimize,
    interpolation_sweep,
)
from .io import (
    load_corpus,
    read_manifest,
    read_motion,
    write_feature_csv,
    write_feature_sidecar,
    write_manifest,
    write_motion,
)
from .model import (
    TrainReport,
    VAEConfig,
    decode_frames,
    encode_mean,
    load_checkpoint,
    save_checkpoint,
    train_model,
)
from .motion import MotionSequence
from .plots import (
    latent_scatter,
    plot_fitness_history,
    plot_loss_curves,
    render_stick_figure,
)
from .preprocess import (
    detect_release,
    fit_scaler,
    lowpass_filter,
    mirror_left_handed,
    segment_and_normalize,
    standardize,
)
from .synth import make_cohort

OUT_ENV = "MOTIONGUIDE_OUT"

_VAE_KEYS = ("model_dim", "latent_dim", "layers", "heads", "ff_dim",
             "lr", "batch_size", "epochs", "kl_weight", "speed_weight",
             "dropout", "seed")
_ES_KEYS = ("perturbations", "sigma", "lr", "iterations", "radius", "seed")

DEFAULTS: dict[str, dict] = {
    "synth": {"athletes": 20, "trials": 5, "seed": 0, "out": None},
    "preprocess": {"input": None, "cutoff": "auto", "residual_analysis": True,
                   "out": None},
    "train": {"input": None, "out": None, "log_every": 0,
              **{k: getattr(VAEConfig(), k) for k in _VAE_KEYS}},
    "interpolate": {"input": None, "checkpoint": None, "athlete_a": None,
                    "athlete_b": None, "steps": 11, "out": None},
    "optimize": {"input": None, "checkpoint": None, "athletes": "lower-third",
                 "fitness_alpha": 5.0, "weights": None, "out": None,
                 **{k: getattr(ESConfig(), k) for k in _ES_KEYS}},
    "features": {"input": None, "out": None},
    "dtw-sweep": {"input": None, "checkpoint": None, "steps": 11, "out": None},
    "report": {"input": None, "results": None, "checkpoint": None,
               "train_report": None, "out": None},
}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the validation code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="motionguide",
                     description="Motion guidance pipeline commands.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file of option defaults")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("synth", help="generate a synthetic pitching corpus")
    common(p)
    p.add_argument("--athletes", type=_positive_int, default=None)
    p.add_argument("--trials", type=_positive_int, default=None)

    p = sub.add_parser("preprocess", help="filter, segment, and normalize raw captures")
    common(p)
    p.add_argument("--input", help="manifest of raw capture files")
    p.add_argument("--cutoff", default=None,
                   help="low-pass cutoff in Hz, or 'auto' for residual analysis")
    p.add_argument("--no-residual-analysis", dest="residual_analysis",
                   action="store_const", const=False, default=None,
                   help="make 'auto' fall back to the fixed default cutoff")

    p = sub.add_parser("train", help="train the motion autoencoder")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")
    p.add_argument("--epochs", type=_positive_int, default=None)
    p.add_argument("--batch-size", type=_positive_int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--kl-weight", type=float, default=None)
    p.add_argument("--speed-weight", type=float, default=None)
    p.add_argument("--model-dim", type=_positive_int, default=None)
    p.add_argument("--latent-dim", type=_positive_int, default=None)
    p.add_argument("--layers", type=_positive_int, default=None)
    p.add_argument("--heads", type=_positive_int, default=None)
    p.add_argument("--ff-dim", type=_positive_int, default=None)
    p.add_argument("--dropout", type=float, default=None)
    p.add_argument("--log-every", type=int, default=None)

    p = sub.add_parser("interpolate", help="decode latent blends between two athletes")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")
    p.add_argument("--checkpoint", help="trained model checkpoint")
    p.add_argument("--athlete-a")
    p.add_argument("--athlete-b")
    p.add_argument("--steps", type=_positive_int, default=None)

    p = sub.add_parser("optimize", help="search latent directions that improve features")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")
    p.add_argument("--checkpoint", help="trained model checkpoint")
    p.add_argument("--athletes", default=None,
                   help="'lower-third' (default), 'all', or comma-separated ids")
    p.add_argument("--perturbations", type=_positive_int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--lr", type=float, default=None, help="ES update step size")
    p.add_argument("--iterations", type=_positive_int, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--fitness-alpha", type=float, default=None)
    p.add_argument("--weights", default=None,
                   help="eight comma-separated fitness weights")

    p = sub.add_parser("features", help="extract release-window features to CSV")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")

    p = sub.add_parser("dtw-sweep", help="DTW distances along all pairwise blends")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")
    p.add_argument("--checkpoint", help="trained model checkpoint")
    p.add_argument("--steps", type=_positive_int, default=None)

    p = sub.add_parser("report", help="aggregate results into tables and figures")
    common(p)
    p.add_argument("--input", help="manifest of normalized motions")
    p.add_argument("--results", nargs="+",
                   help="optimization result files or directories of them")
    p.add_argument("--checkpoint", help="checkpoint for decoded figures")
    p.add_argument("--train-report", help="training report JSON for loss curves")
    return parser


def _resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, --config file values, and explicit CLI options."""
    resolved = dict(DEFAULTS[command])
    if args.config:
        payload = json.loads(Path(args.config).read_text())
        unknown = sorted(set(payload) - set(resolved))
        if unknown:
            raise ValueError(f"unknown config keys for {command}: {unknown}")
        resolved.update(payload)
    for key in resolved:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    if resolved.get("out") is None:
        root = Path(os.environ.get(OUT_ENV, "motionguide_out"))
        resolved["out"] = str(root / command.replace("-", "_"))
    return resolved


def _require(opts: dict, *keys: str) -> None:
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise ValueError(
            "missing required option(s): " + ", ".join(f"--{k.replace('_', '-')}" for k in missing)
        )


def _prepare_out(opts: dict, command: str) -> Path:
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    payload = {"command": command}
    payload.update({k: v for k, v in sorted(opts.items())})
    (out / f"config_{command.replace('-', '_')}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    )
    return out


def _load_standardized(manifest: str, scaler) -> dict[str, list[MotionSequence]]:
    corpus = load_corpus(manifest)
    return {
        athlete: [standardize(s, scaler) for s in seqs]
        for athlete, seqs in corpus.items()
    }


def cmd_synth(opts: dict) -> None:
    out = _prepare_out(opts, "synth")
    cohort = make_cohort(opts["athletes"], opts["trials"], opts["seed"])
    motions = out / "motions"
    motions.mkdir(exist_ok=True)
    manifest: dict[str, list[str]] = {}
    rows = []
    for style in cohort.styles:
        athlete = style.athlete_id
        paths = []
        for trial in cohort.trials[athlete]:
            seq = trial.sequence
            write_motion(motions / f"{seq.trial_id}.motion", seq)
            write_feature_sidecar(
                motions / f"{seq.trial_id}.features.json",
                seq.trial_id, trial.ground_truth,
            )
            paths.append(f"motions/{seq.trial_id}.motion")
            rows.append((seq, trial.ground_truth))
        manifest[athlete] = paths
    write_manifest(out / "manifest.json", manifest)
    write_feature_csv(out / "ground_truth.csv", rows)
    print(f"wrote {len(rows)} trials for {len(manifest)} athletes under {out}")


def cmd_preprocess(opts: dict) -> None:
    _require(opts, "input")
    out = _prepare_out(opts, "preprocess")
    motions = out / "motions"
    motions.mkdir(exist_ok=True)
    manifest: dict[str, list[str]] = {}
    count = 0
    for athlete, paths in sorted(read_manifest(opts["input"]).items()):
        rel = []
        for path in paths:
            capture = mirror_left_handed(read_motion(path))
            capture = lowpass_filter(capture, opts["cutoff"],
                                     opts["residual_analysis"])
            seq = segment_and_normalize(capture, detect_release(capture))
            write_motion(motions / f"{seq.trial_id}.motion", seq)
            rel.append(f"motions/{seq.trial_id}.motion")
            count += 1
        manifest[athlete] = rel
    write_manifest(out / "manifest.json", manifest)
    print(f"preprocessed {count} captures under {out}")


def cmd_train(opts: dict) -> None:
    _require(opts, "input")
    out = _prepare_out(opts, "train")
    corpus = load_corpus(opts["input"])
    sequences = [s for athlete in sorted(corpus) for s in corpus[athlete]]
    scaler = fit_scaler(sequences)
    standardized = [standardize(s, scaler) for s in sequences]
    config = VAEConfig(**{k: opts[k] for k in _VAE_KEYS})
    config.validate()
    model, report = train_model(standardized, config, scaler=scaler,
                                log_every=opts["log_every"])
    save_checkpoint(out / "checkpoint.pt", model, scaler)
    report.save(out / "train_report.json")
    plot_loss_curves(report, out / "loss_curves.png")
    print(
        f"trained {config.epochs} epochs; reconstruction RMSE "
        f"{report.final_rmse_mm:.1f} mm; wrote {out / 'checkpoint.pt'}"
    )


def cmd_interpolate(opts: dict) -> None:
    _require(opts, "input", "checkpoint", "athlete_a", "athlete_b")
    out = _prepare_out(opts, "interpolate")
    model, scaler = load_checkpoint(opts["checkpoint"])
    corpus = _load_standardized(opts["input"], scaler)
    for athlete in (opts["athlete_a"], opts["athlete_b"]):
        if athlete not in corpus:
            raise ValueError(f"athlete {athlete!r} not in manifest")
    reps = representative_latents(
        {a: corpus[a] for a in (opts["athlete_a"], opts["athlete_b"])}, model
    )
    alphas, latents = interpolation_sweep(
        reps[opts["athlete_a"]], reps[opts["athlete_b"]], opts["steps"]
    )
    decoded = scaler.inverse(decode_frames(model, latents))
    for alpha, frames in zip(alphas, decoded):
        seq = MotionSequence(
            frames=frames,
            athlete_id=f"{opts['athlete_a']}+{opts['athlete_b']}",
            trial_id=f"blend_{alpha:.2f}",
        )
        write_motion(out / f"blend_{alpha:.2f}.motion", seq)
    print(f"wrote {len(alphas)} blended motions under {out}")


def _parse_weights(text: str | None) -> np.ndarray | None:
    if text is None:
        return None
    values = [float(v) for v in text.split(",")]
    if len(values) != len(FEATURE_KEYS):
        raise ValueError(f"expected {len(FEATURE_KEYS)} weights, got {len(values)}")
    return np.array(values)


def cmd_optimize(opts: dict) -> None:
    _require(opts, "input", "checkpoint")
    out = _prepare_out(opts, "optimize")
    model, scaler = load_checkpoint(opts["checkpoint"])
    raw_corpus = load_corpus(opts["input"])
    corpus = {
        athlete: [standardize(s, scaler) for s in seqs]
        for athlete, seqs in raw_corpus.items()
    }
    selector = opts["athletes"]
    if selector == "lower-third":
        chosen = lower_third_athletes(raw_corpus)
    elif selector == "all":
        chosen = sorted(corpus)
    else:
        chosen = [a.strip() for a in selector.split(",") if a.strip()]
        missing = [a for a in chosen if a not in corpus]
        if missing:
            raise ValueError(f"athletes not in manifest: {missing}")
    weights = _parse_weights(opts["weights"])
    fitness = (FitnessParams(weights=weights, alpha=opts["fitness_alpha"])
               if weights is not None
               else FitnessParams(alpha=opts["fitness_alpha"]))
    config = ESConfig(**{k: opts[k] for k in _ES_KEYS})
    config.validate()
    for athlete in chosen:
        latents = encode_mean(model, corpus[athlete])
        result = es_optimize(latents, model, scaler, athlete, fitness, config)
        result.save(out / f"{athlete}_r{config.radius:g}_s{config.seed}.json")
        print(
            f"{athlete}: fitness {result.final_fitness:.4f} "
            f"({result.floored_candidates} floored candidates)"
        )
    print(f"optimized {len(chosen)} athletes under {out}")


def cmd_features(opts: dict) -> None:
    _require(opts, "input")
    out = _prepare_out(opts, "features")
    corpus = load_corpus(opts["input"])
    rows = [
        (seq, extract_features(seq))
        for athlete in sorted(corpus)
        for seq in corpus[athlete]
    ]
    write_feature_csv(out / "features.csv", rows)
    print(f"extracted features for {len(rows)} trials -> {out / 'features.csv'}")


def cmd_dtw_sweep(opts: dict) -> None:
    _require(opts, "input", "checkpoint")
    out = _prepare_out(opts, "dtw_sweep")
    model, scaler = load_checkpoint(opts["checkpoint"])
    corpus = _load_standardized(opts["input"], scaler)
    reps = representative_latents(corpus, model)
    report = transfer_sweep(reps, model, scaler, steps=opts["steps"])
    report.to_csv(out / "dtw_sweep.csv")
    summary = {
        "athletes": len(reps),
        "pairs": len(report.pair_flags),
        "steps": report.steps,
        "monotone_fraction": report.monotone_fraction(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(
        f"{summary['pairs']} pairs x {summary['steps']} steps; "
        f"monotone fraction {summary['monotone_fraction']:.3f}"
    )


def _load_results(specs: list[str]) -> list[OptimizationResult]:
    files: list[Path] = []
    for spec in specs:
        path = Path(spec)
        if path.is_dir():
            files.extend(sorted(path.glob("*.json")))
        elif path.is_file():
            files.append(path)
        else:
            raise ValueError(f"results path does not exist: {path}")
    results = []
    for path in files:
        if path.name.startswith("config_"):
            continue
        results.append(OptimizationResult.load(path))
    if not results:
        raise ValueError("no optimization results found")
    return results


def _write_aggregate_table(
    path: Path, by_seed: dict[int, list[OptimizationResult]], weights
) -> dict[int, object]:
    """Table-1-shaped CSV: per-seed column triplets plus their means."""
    seeds = sorted(by_seed)
    reports = {}
    for seed in seeds:
        ori, opt = athlete_mean_features(by_seed[seed])
        reports[seed] = build_stats_report(ori, opt, weights)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["feature"]
        for seed in seeds:
            header += [f"mean_diff_s{seed}", f"adj_p_s{seed}", f"cohens_d_s{seed}"]
        header += ["mean_diff_mean", "adj_p_mean", "cohens_d_mean"]
        writer.writerow(header)
        for i, key in enumerate(FEATURE_KEYS):
            row = [key]
            for seed in seeds:
                rep = reports[seed]
                row += [repr(float(rep.mean_diff[i])),
                        repr(float(rep.p_adjusted[i])),
                        repr(float(rep.cohens_d[i]))]
            row += [
                repr(float(np.mean([reports[s].mean_diff[i] for s in seeds]))),
                repr(float(np.mean([reports[s].p_adjusted[i] for s in seeds]))),
                repr(float(np.mean([reports[s].cohens_d[i] for s in seeds]))),
            ]
            writer.writerow(row)
    return reports


def cmd_report(opts: dict) -> None:
    _require(opts, "results")
    out = _prepare_out(opts, "report")
    results = _load_results(list(opts["results"]))
    weights = FitnessParams().weights

    radii = sorted({r.radius for r in results})
    primary_radius = max(radii)
    primary = [r for r in results if r.radius == primary_radius]
    by_seed: dict[int, list[OptimizationResult]] = {}
    for res in primary:
        by_seed.setdefault(res.seed, []).append(res)
    reports = _write_aggregate_table(out / "stats_table.csv", by_seed, weights)
    for seed, rep in reports.items():
        rep.to_csv(out / f"stats_seed{seed}.csv")

    if len(radii) > 1:
        seeds = sorted({r.seed for r in results})
        totals = np.empty((len(seeds), len(radii)))
        complete = True
        for si, seed in enumerate(seeds):
            for ri, radius in enumerate(radii):
                group = [r for r in results if r.seed == seed and r.radius == radius]
                if not group:
                    complete = False
                    break
                ori, opt = athlete_mean_features(group)
                totals[si, ri] = build_stats_report(ori, opt, weights).total_effect()
            if not complete:
                break
        if complete:
            RadiusReport(seeds=seeds, radii=radii, totals=totals).to_csv(
                out / "radius_table.csv"
            )

    for seed, group in sorted(by_seed.items()):
        histories = {r.athlete_id: r.fitness_history for r in group}
        plot_fitness_history(histories, out / f"fitness_seed{seed}.png")

    if opts["train_report"]:
        plot_loss_curves(TrainReport.load(opts["train_report"]),
                         out / "loss_curves.png")

    if opts["checkpoint"]:
        model, scaler = load_checkpoint(opts["checkpoint"])
        match = [r for r in primary if r.seed == model.config.seed] or primary
        shown = match[0]
        original = scaler.inverse(
            decode_frames(model, shown.original_latents[:1])
        )[0]
        optimized = scaler.inverse(
            decode_frames(model, shown.optimized_latents()[:1])
        )[0]
        render_stick_figure(
            MotionSequence(frames=original, athlete_id=shown.athlete_id,
                           trial_id="original"),
            out / f"stick_{shown.athlete_id}.png",
            overlay=MotionSequence(frames=optimized,
                                   athlete_id=shown.athlete_id,
                                   trial_id="optimized"),
        )
        if opts["input"]:
            corpus = _load_standardized(opts["input"], scaler)
            latents = {a: encode_mean(model, seqs) for a, seqs in corpus.items()}
            latent_scatter(latents, out / "latent_scatter.png")

    if opts["input"]:
        corpus = load_corpus(opts["input"])
        rows = [
            (seq, extract_features(seq))
            for athlete in sorted(corpus)
            for seq in corpus[athlete]
        ]
        write_feature_csv(out / "features.csv", rows)
    print(f"report written under {out}")


_COMMANDS = {
    "synth": cmd_synth,
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "interpolate": cmd_interpolate,
    "optimize": cmd_optimize,
    "features": cmd_features,
    "dtw-sweep": cmd_dtw_sweep,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse signals usage errors (and --help)
        return int(exc.code or 0)
    try:
        opts = _resolve_options(args.command, args)
        _COMMANDS[args.command](opts)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - boundary for exit-code mapping
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
