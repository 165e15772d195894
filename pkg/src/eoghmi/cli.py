"""Command-line entry point tying the pipeline stages together.

Subcommands mirror the processing order: simulate (synthetic benchmark) →
preprocess → featurize → analyze / train / loso / cluster → serve.  Every
artifact a subcommand writes carries the effective configuration, so results
are reproducible from (inputs, config, seed) alone.  Exit codes: 0 success,
2 validation or usage error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, io, stats, synth
from .cluster.kmeans import kmeans
from .cluster.fcm import fuzzy_cmeans
from .cluster.metrics import asw_sweep
from .cluster.reduce import pca_reduce, tsvd_reduce
from .cluster.tsne import tsne_reduce
from .errors import DegenerateInputError, EogHmiError, InvalidParameterError
from .features import FEATURE_SCHEMA_VERSION, apply_normalization, fit_normalization
from .learn.dataset import load_dataset_csv, save_dataset_csv
from .learn.loso import loso_evaluate
from .learn.models import MODEL_FORMAT_VERSION, MODEL_KINDS, fit_model, load_model, save_model
from .pipeline import PipelineConfig, build_dataset, preprocess_trace
from .realtime.server import PROTOCOL_VERSION, ServeConfig
from .realtime.server import serve as run_server

MODEL_ALIASES = {
    "rf": "random_forest",
    "knn": "knn",
    "lda": "lda_shrinkage",
    "tree": "decision_tree",
}

_CONFIG_FLAGS = ("window_s", "hop_s", "mains_hz", "highpass_hz", "blink_threshold", "seed")


def _resolve_kind(name: str) -> str:
    kind = MODEL_ALIASES.get(name, name)
    if kind not in MODEL_KINDS:
        raise InvalidParameterError(
            f"unknown model {name!r}; choose from {sorted(MODEL_ALIASES)} or {list(MODEL_KINDS)}")
    return kind


def _effective_config(args) -> PipelineConfig:
    """flags > config file > defaults."""
    base: dict = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
        if not isinstance(base, dict):
            raise InvalidParameterError("config file must hold a JSON object")
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            base[name] = value
    if getattr(args, "skip_hpss", False):
        base["use_hpss"] = False
    if getattr(args, "skip_blink_correction", False):
        base["use_blink_correction"] = False
    return PipelineConfig.from_dict(base)


def _write_report(path, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _read_column(path, column: str | None) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidParameterError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    try:
        idx = 0 if column is None else header.index(column)
        return np.array([float(r[idx]) for r in body if r])
    except ValueError as exc:
        raise InvalidParameterError(f"{path}: {exc}") from exc


def _read_matrix(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        float(rows[0][0])
        start = 0
    except (ValueError, IndexError):
        start = 1  # header row
    return np.array([[float(v) for v in r] for r in rows[start:]])


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    out_dir = Path(args.out_dir)
    traces = synth.benchmark_recordings(n_sessions=args.sessions,
                                        duration_s=args.duration,
                                        seed=args.seed,
                                        contamination_hz=args.contamination_hz)
    for trace in traces:
        name = f"{trace.meta['session']}_{trace.meta['activity']}.csv"
        trace.meta["generator_seed"] = args.seed
        io.save_recording(trace, out_dir / name)
    print(f"wrote {len(traces)} recordings to {out_dir}")
    return 0


def cmd_preprocess(args) -> int:
    config = _effective_config(args)
    in_dir, out_dir = Path(args.in_dir), Path(args.out_dir)
    recordings = io.list_recordings(in_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not recordings:
        print(f"warning: no recordings found in {in_dir}", file=sys.stderr)
        return 0
    failures = 0
    for path in recordings:
        try:
            trace = io.load_recording(path)
            cleaned = preprocess_trace(trace, config)
            cleaned.meta["pipeline_config"] = config.to_dict()
            io.save_recording(cleaned, out_dir / path.name)
        except (EogHmiError, OSError, ValueError) as exc:
            failures += 1
            print(f"error: {path.name}: {exc}", file=sys.stderr)
    print(f"processed {len(recordings) - failures}/{len(recordings)} recordings")
    return 1 if failures else 0


def cmd_featurize(args) -> int:
    config = _effective_config(args)
    source = Path(args.input)
    paths = io.list_recordings(source) if source.is_dir() else [source]
    if not paths:
        raise InvalidParameterError(f"no recordings under {source}")
    traces = [io.load_recording(p) for p in paths]
    preprocess = not args.preprocessed
    dataset = build_dataset(traces, config, preprocess=preprocess)
    save_dataset_csv(dataset, args.out)
    _write_report(str(args.out) + ".json",
                  {"config": config.to_dict(), "rows": dataset.n_samples,
                   "sessions": dataset.sessions, "preprocessed_input": args.preprocessed})
    print(f"wrote {dataset.n_samples} rows x {dataset.X.shape[1]} features to {args.out}")
    return 0


def cmd_train(args) -> int:
    kind = _resolve_kind(args.model)
    dataset = load_dataset_csv(args.dataset)
    params = json.loads(args.params) if args.params else None
    model = fit_model(kind, dataset.X, dataset.y, params, seed=args.seed)
    save_model(model, args.out)
    print(f"trained {kind} on {dataset.n_samples} rows -> {args.out}")
    return 0


def cmd_loso(args) -> int:
    kind = _resolve_kind(args.model)
    dataset = load_dataset_csv(args.dataset)
    grid = json.loads(args.grid) if args.grid else None
    report = loso_evaluate(dataset, kind, grid, seed=args.seed,
                           select_features=not args.no_feature_selection)
    payload = report.to_dict()
    payload["config"] = {"model": kind, "seed": args.seed,
                         "select_features": not args.no_feature_selection}
    if args.out:
        _write_report(args.out, payload)
    print(f"LOSO {kind}: mean accuracy {report.mean_accuracy:.4f} "
          f"± {report.accuracy_std:.4f} over {len(dataset.sessions)} folds")
    return 0


def _parse_k_range(text: str) -> range:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise InvalidParameterError(f"--k-range must look like 2:10, got {text!r}") from exc
    if not 2 <= lo <= hi:
        raise InvalidParameterError("--k-range must satisfy 2 <= lo <= hi")
    return range(lo, hi + 1)


def cmd_cluster(args) -> int:
    dataset = load_dataset_csv(args.dataset)
    stats_norm = fit_normalization(dataset.X)
    Xn = apply_normalization(stats_norm, dataset.X)
    if args.method == "pca":
        emb = pca_reduce(Xn, dims=2)
    elif args.method == "tsvd":
        emb = tsvd_reduce(Xn, dims=2)
    else:
        emb = tsne_reduce(Xn, perplexity=args.perplexity, iters=args.iters, seed=args.seed)
    k_range = _parse_k_range(args.k_range)
    sweep = asw_sweep(emb.points, algo=args.algo, k_range=k_range, seed=args.seed)
    best_k = sweep["best_k"]
    fit = (kmeans if args.algo == "kmeans" else fuzzy_cmeans)(emb.points, best_k, seed=args.seed)
    payload = {
        "config": {"method": args.method, "algo": args.algo,
                   "k_range": [k_range.start, k_range.stop - 1], "seed": args.seed,
                   "perplexity": args.perplexity, "iters": args.iters},
        "embedding": {"method": emb.method, "params": emb.params},
        "best_k": best_k,
        "asw_per_k": {str(k): v for k, v in sweep["per_k"].items()},
        "labels": fit.hard_labels.tolist(),
    }
    if args.out:
        _write_report(args.out, payload)
    summary = ", ".join(f"k={k}: {v:.4f}" for k, v in sweep["per_k"].items())
    print(f"{args.method}+{args.algo}: best k = {best_k} ({summary})")
    return 0


def cmd_analyze(args) -> int:
    if args.what == "adf":
        seq = _read_column(args.input, args.column)
        report = stats.adf_test(seq, max_lag=args.max_lag)
        payload = {"test": "adf", "statistic": report.statistic,
                   "p_value": report.p_value, "detail": report.detail}
    elif args.what == "anova":
        data = _read_matrix(args.input)
        report = stats.rm_anova_gg(data)
        payload = {"test": "rm_anova_gg", "statistic": report.statistic,
                   "p_value": report.p_value, "detail": report.detail}
    elif args.what == "pearson":
        x = _read_column(args.input, args.x)
        y = _read_column(args.input, args.y)
        report = stats.pearson_test(x, y)
        payload = {"test": "pearson", "statistic": report.statistic,
                   "p_value": report.p_value, "detail": report.detail}
    elif args.what == "summary":
        seq = _read_column(args.input, args.column)
        payload = {"test": "summary", **stats.summary_stats(seq)}
    else:  # envelope: per-second log-envelope sequences, decimated, ADF on each
        trace = io.load_recording(args.input)
        seqs = stats.envelope_sequences(trace)
        payload = {"test": "envelope_adf"}
        for name, seq in (("avg", seqs.avg_seq), ("std", seqs.std_seq)):
            dec = stats.decimate_by_mean(seq, args.decimate)
            report = stats.adf_test(dec, max_lag=args.max_lag)
            payload[name] = {"statistic": report.statistic, "p_value": report.p_value,
                             "n_obs": int(dec.size)}
    if args.out:
        _write_report(args.out, payload)
    shown = {k: v for k, v in payload.items() if k != "detail"}
    print(json.dumps(shown, indent=2, sort_keys=True, default=str))
    return 0


def cmd_serve(args) -> int:
    config = ServeConfig(model_path=args.model, source=args.source, host=args.host,
                         port=args.port, peak_threshold=args.threshold,
                         seed=args.seed, speed=args.speed)
    load_model(args.model)  # fail fast before binding the port
    print(f"serving on ws://{config.host}:{config.port} (source: {config.source})")
    try:
        asyncio.run(run_server(config))
    except KeyboardInterrupt:
        print("stopped")
    return 0


# -- argument parsing --------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with pipeline configuration")
    p.add_argument("--window-s", dest="window_s", type=float)
    p.add_argument("--hop-s", dest="hop_s", type=float)
    p.add_argument("--mains-hz", dest="mains_hz", type=float)
    p.add_argument("--highpass-hz", dest="highpass_hz", type=float)
    p.add_argument("--blink-threshold", dest="blink_threshold", type=float)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--skip-hpss", action="store_true")
    p.add_argument("--skip-blink-correction", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eoghmi",
        description="Single-channel EOG activity recognition pipeline")
    parser.add_argument(
        "--version", action="version",
        version=(f"eoghmi {__version__} (features {FEATURE_SCHEMA_VERSION}, "
                 f"models {MODEL_FORMAT_VERSION}, protocol {PROTOCOL_VERSION})"))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate the synthetic benchmark recordings")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sessions", type=int, default=6)
    p.add_argument("--duration", type=float, default=40.0)
    p.add_argument("--contamination-hz", type=float, default=0.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="clean raw recordings")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("featurize", help="turn recordings into a feature dataset")
    p.add_argument("--input", required=True, help="recording file or directory")
    p.add_argument("--out", required=True, help="output dataset CSV")
    p.add_argument("--preprocessed", action="store_true",
                   help="input is already cleaned; skip the preprocessing chain")
    _add_config_flags(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="fit a classifier on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--params", help="JSON hyperparameters")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("loso", help="leave-one-session-out evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--grid", help="JSON list of hyperparameter dicts")
    p.add_argument("--no-feature-selection", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the evaluation report JSON here")
    p.set_defaults(func=cmd_loso)

    p = sub.add_parser("cluster", help="reduce to 2-D and sweep cluster counts")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=("pca", "tsvd", "tsne"), default="tsne")
    p.add_argument("--algo", choices=("kmeans", "fcm"), default="kmeans")
    p.add_argument("--k-range", default="2:10")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the sweep report JSON here")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("analyze", help="statistical analyses")
    p.add_argument("what", choices=("adf", "anova", "pearson", "summary", "envelope"))
    p.add_argument("--input", required=True)
    p.add_argument("--column", help="column name (adf/summary); first column if omitted")
    p.add_argument("--x", help="pearson: first column name")
    p.add_argument("--y", help="pearson: second column name")
    p.add_argument("--max-lag", type=int, default=None)
    p.add_argument("--decimate", type=int, default=5)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the realtime WebSocket service")
    p.add_argument("--model", required=True)
    p.add_argument("--source", default="synthetic",
                   help='"synthetic" or "replay:<recording>"')
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--threshold", type=float, default=4.0)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EogHmiError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
