"""Command-line entry point wiring the full experiment pipeline.

Subcommands:
    generate   render a dataset directory from a config
    train      train one experiment arm into a run directory
    evaluate   derive metrics (horizon MSE, alignment, reconstruction) for a run
    report     aggregate horizon metrics across runs into plots + CSV
    compare    print the four-row generative-decoder comparison table
    verify     interval-bound soundness/scaling demo on a partitioned run
    describe   explain a subcommand's schema and defaults

Exit codes: 0 success; 2 usage error (argparse); 3 config/schema violation;
4 missing or corrupt inputs (datasets, runs); 5 required runs absent for a
report; 1 any other failure. Errors print one line to stderr:
``error: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .data import io as data_io
from .engine import ExperimentConfig, config_from_json, runner
from .engine.config import ARMS
from .errors import (
    ConfigError,
    DatasetError,
    DatasetVersionError,
    MissingRunsError,
    ShapeError,
)

_EXIT_SCHEMA = 3
_EXIT_MISSING = 4
_EXIT_NO_RUNS = 5


def _parse_override(text):
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _load_config(args):
    path = Path(args.config)
    if not path.is_file():
        raise DatasetError(f"config file {path} not found")
    try:
        config = config_from_json(path.read_text())
    except (json.JSONDecodeError, TypeError, KeyError) as exc:
        raise ConfigError(f"config {path} does not parse: {exc}") from exc
    overrides = dict(_parse_override(o) for o in args.override or [])
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"unknown override fields: {unknown}")
    if "horizons" in overrides:
        overrides["horizons"] = tuple(overrides["horizons"])
    if overrides:
        config = config.with_overrides(**overrides)
    return config


def _echo_config(config):
    print(f"# effective config (hash {config.hash()})")
    print(config.to_json())


def _cmd_generate(args):
    config = _load_config(args)
    _echo_config(config)
    dataset = runner.build_dataset(config)
    out = Path(args.out)
    data_io.save(dataset, out)
    print(f"dataset dir: {out}")
    print(f"dataset hash: {data_io.dataset_hash(out)}")
    return 0


def _cmd_train(args):
    config = _load_config(args)
    _echo_config(config)
    dataset = None
    if args.data is not None:
        data_dir = Path(args.data)
        if not (data_dir / "manifest.jsonl").is_file():
            raise DatasetError(f"dataset path {data_dir} is missing or has no manifest")
        dataset = data_io.load(data_dir)
        if dataset.env_id != config.env_id:
            raise ConfigError(
                f"dataset env {dataset.env_id!r} != config env {config.env_id!r}")
    run_dir = runner.train_run(config, root=args.out_root, dataset=dataset)
    print(f"run dir: {run_dir}")
    return 0


def _require_run(path):
    run_dir = Path(path)
    if not (run_dir / "config.json").is_file():
        raise DatasetError(f"{run_dir} is not a run directory (no config.json)")
    return run_dir


def _cmd_evaluate(args):
    run_dir = _require_run(args.run)
    config = runner.load_config(run_dir)
    _echo_config(config)
    eval_dir = runner.evaluate_run(run_dir)
    print(f"eval dir: {eval_dir}")
    for p in sorted(eval_dir.iterdir()):
        print(f"  {p.name}")
    return 0


def _collect_run_dirs(paths):
    run_dirs = []
    for p in paths:
        p = Path(p)
        if (p / "config.json").is_file():
            run_dirs.append(p)
        elif p.is_dir():
            run_dirs.extend(c for c in sorted(p.iterdir())
                            if (c / "config.json").is_file())
        else:
            raise DatasetError(f"{p} is neither a run dir nor a directory of runs")
    return run_dirs


def _cmd_report(args):
    run_dirs = _collect_run_dirs(args.runs)
    grouped = {}
    for run_dir in run_dirs:
        horizon_path = run_dir / "eval" / "horizon.json"
        if not horizon_path.is_file():
            continue
        d = json.loads(horizon_path.read_text())
        rep = bench.HorizonReport(
            env_id=d["env_id"], variant=d["variant"],
            horizons=tuple(d["horizons"]), mean=tuple(d["mean"]),
            std=tuple(d["std"]), n_samples=d.get("n_samples", 0))
        grouped.setdefault((rep.env_id, rep.variant), []).append(rep)
    if not grouped:
        raise MissingRunsError(["any run with eval/horizon.json"])
    aggregated = [bench.aggregate_reports(reps) for reps in grouped.values()]
    written = bench.emit_plots(aggregated, args.out)
    for p in written:
        print(p)
    return 0


def _cmd_compare(args):
    run_dirs = _collect_run_dirs(args.runs)
    rows = bench.table1_report(run_dirs)
    print(bench.render_table(rows))
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "table1.json").write_text(
            json.dumps([r.as_dict() for r in rows], indent=1, sort_keys=True) + "\n")
        lines = ["variant,env_id,avg_mse,avg_ssim,model_size,ref_mse,ref_ssim,ref_size"]
        lines += [f"{r.variant},{r.env_id},{r.avg_mse!r},{r.avg_ssim!r},"
                  f"{r.model_size},{r.ref_mse!r},{r.ref_ssim!r},{r.ref_size}"
                  for r in rows]
        (out / "table1.csv").write_text("\n".join(lines) + "\n")
        print(f"wrote {out / 'table1.csv'}")
    return 0


def _cmd_verify(args):
    run_dir = _require_run(args.run)
    baseline = _require_run(args.baseline_run) if args.baseline_run else None
    report = runner.verify_run(run_dir, baseline_run=baseline,
                               n_boxes=args.boxes, radius=args.radius,
                               samples=args.samples)
    width = 58
    print("```")
    print(f"{'decoder':<12} {'params':>8} {'time (s)':>10} {'mean width':>12}")
    print("-" * width)
    for row in report["rows"]:
        print(f"{row['decoder']:<12} {row['params']:>8,} "
              f"{row['propagate_seconds']:>10.4f} {row['mean_output_width']:>12.5f}")
    print("-" * width)
    total = sum(report["mc_violations"].values())
    print(f"containment violations over {report['samples_per_box']} samples/box: {total}")
    print("```")
    return 0


_DESCRIPTIONS = {
    "generate": (
        "Renders a dataset directory (manifest.jsonl + PNG frames and masks)\n"
        "from an experiment config. Config fields used: env_id, policy,\n"
        "n_episodes, episode_len, data_seed, resolution. Identical configs\n"
        "produce byte-identical datasets (printed hash)."),
    "train": (
        "Trains one experiment arm. Arms:\n"
        "  baseline        monolithic encoder, fully supervised state block\n"
        "  p1_structured   two-branch encoder writing a structured latent space\n"
        "  p2_equivariant  structured + transform-equivariance penalty (eq_lambda)\n"
        "  p3_static       structured, labels on static dims only\n"
        "  p3_pseudo       static labels + finite-difference pseudo-velocities\n"
        "  p4_partitioned  per-segment generative decoders, composed by max\n"
        "  p4_baseline     single tiny autoencoder at matched training budget\n"
        "Writes runs/<env>_<arm>_s<seed>_<hash>/ with config, curves, weights."),
    "evaluate": (
        "Derives metrics for a completed run: closed-loop horizon MSE and an\n"
        "alignment audit for trend arms; reconstruction MSE/SSIM, model size,\n"
        "and out-of-mask energy for generative-decoder arms."),
    "report": (
        "Aggregates eval/horizon.json across runs (mean +/- std over seeds)\n"
        "and writes one log-scale MSE-vs-horizon plot per environment, each\n"
        "with a byte-stable CSV twin."),
    "compare": (
        "Prints the four-row generative-decoder table (variant x environment:\n"
        "average MSE, average SSIM, model size) next to the published\n"
        "reference values. Decoder runs use part-loss weight 0.2 by default\n"
        "(config field p4_lambda)."),
    "verify": (
        "Propagates interval bounds through each part decoder over small\n"
        "state boxes, Monte-Carlo checks containment, and reports per-decoder\n"
        "parameter counts, propagation time, and mean bound width."),
    "describe": "Prints this kind of help for a subcommand.",
}


def _cmd_describe(args):
    name = args.subcommand
    if name not in _DESCRIPTIONS:
        print(f"error: unknown subcommand {name!r}; "
              f"valid: {', '.join(sorted(_DESCRIPTIONS))}", file=sys.stderr)
        return 2
    print(f"{name}:")
    print(_DESCRIPTIONS[name])
    if name in ("generate", "train"):
        print("\nconfig schema (field = default):")
        for field in ExperimentConfig.__dataclass_fields__.values():
            default = field.default
            print(f"  {field.name} = {default!r}")
        print(f"\narms: {', '.join(ARMS)}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="physwm",
        description="Train and evaluate physically interpretable world models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="config override, repeatable; applied after parsing")

    p = sub.add_parser("generate", help="render a dataset directory")
    with_config(p)
    p.add_argument("--out", required=True, help="dataset output directory")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("train", help="train one experiment arm")
    with_config(p)
    p.add_argument("--data", help="existing dataset directory (else regenerated)")
    p.add_argument("--out-root", help="runs root (default $PHYSWM_OUT_ROOT or ./runs)")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("evaluate", help="derive metrics for a completed run")
    p.add_argument("--run", required=True, help="run directory")
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("report", help="aggregate horizon metrics into plots")
    p.add_argument("--runs", nargs="+", required=True,
                   help="run directories or directories of runs")
    p.add_argument("--out", required=True, help="plot/CSV output directory")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("compare", help="generative-decoder comparison table")
    p.add_argument("--runs", nargs="+", required=True,
                   help="run directories or directories of runs")
    p.add_argument("--out", help="also write table1.csv/.json here")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("verify", help="interval-bound demo on a partitioned run")
    p.add_argument("--run", required=True, help="p4_partitioned run directory")
    p.add_argument("--baseline-run", help="matching p4_baseline run for comparison")
    p.add_argument("--boxes", type=int, default=3)
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("describe", help="explain a subcommand")
    p.add_argument("subcommand")
    p.set_defaults(fn=_cmd_describe)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_SCHEMA
    except MissingRunsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NO_RUNS
    except (DatasetError, DatasetVersionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_MISSING
    except Exception as exc:                       # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
