"""Command-line interface.

Exit status is 0 on success, 2 for usage errors and 1 for data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .evaluation import (
    DEFAULT_K_VALUES,
    DEFAULT_M_VALUES,
    DEFAULT_N_VALUES,
    error_cdf,
    m_sweep,
    read_results_jsonl,
    results_jsonl,
    summary_table,
    treatment_grid,
    write_cdf_csv,
    write_results_csv,
)
from .geometry import Scenario, paper_scenario
from .io import DatasetBundle, read_dataset, read_raw_csv, write_dataset
from .locator import METHODS, MethodConfig, get_locator
from .propagation import GenerationSpec, LogNormalParams, generate_dataset
from .representations import (
    DEFAULT_POWED_BETA,
    DEFAULT_POWED_FLOOR,
    build_training_set,
    save_training_set_json,
)

SCHEMA_VERSION = 1


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {value}")
    return value


def _load_scenario(path) -> Scenario:
    return Scenario.load(path) if path else paper_scenario()


def _params(args) -> LogNormalParams:
    return LogNormalParams(args.ref_distance, args.rssi_at_ref, args.eta, args.sigma)


def _add_model_args(p):
    p.add_argument("--scenario", type=Path, help="scenario JSON (default: built-in 4x4 room with 8 APs)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--sigma", type=float, default=3.0, help="shadowing standard deviation in dB")
    p.add_argument("--eta", type=float, default=2.5, help="path-loss exponent")
    p.add_argument("--rssi-at-ref", type=float, default=-40.0, help="RSSI at the reference distance, dBm")
    p.add_argument("--ref-distance", type=float, default=1.0, help="reference distance in meters")
    p.add_argument("--instances-per-rp", type=_positive, default=10)


def _add_method_args(p, k_default=True):
    p.add_argument("--method", choices=METHODS, required=True)
    if k_default:
        p.add_argument("--k", type=_positive, default=1)
        p.add_argument("--n-aps", type=_positive, default=None)
    p.add_argument("--powed-floor", type=float, default=DEFAULT_POWED_FLOOR)
    p.add_argument("--powed-beta", type=float, default=DEFAULT_POWED_BETA)


def cmd_simulate(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = GenerationSpec(scenario, _params(args), args.m, args.instances_per_rp, args.seed, args.n_aps)
    samples = generate_dataset(spec)
    metadata = {
        "seed": spec.seed,
        "m": spec.m,
        "instances_per_rp": spec.instances_per_rp,
        "params": asdict(spec.params),
        "generator": spec.to_dict()["generator"],
    }
    out = write_dataset(DatasetBundle(scenario, samples, metadata), args.out)
    print(f"wrote {len(samples)} sample matrices to {out}", file=sys.stderr)
    return 0


def cmd_build_fingerprints(args) -> int:
    bundle = read_dataset(args.input)
    training = build_training_set(bundle.samples, bundle.scenario, args.representation, args.powed_floor, args.powed_beta)
    training.to_csv(args.out)
    doc = training.to_json()
    doc["seed"] = bundle.seed
    Path(args.out).with_suffix(".json").write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(training)} x {training.n_attributes} fingerprints to {args.out}", file=sys.stderr)
    return 0


def _config(args, n_available: int) -> MethodConfig:
    n_aps = args.n_aps if args.n_aps is not None else n_available
    return MethodConfig(args.method, args.k, n_aps, args.powed_floor, args.powed_beta)


def cmd_localize(args) -> int:
    bundle = read_dataset(args.train)
    config = _config(args, len(bundle.ap_ids))
    training = build_training_set(bundle.samples, bundle.scenario, config.base_representation)
    locator = get_locator(config, training)
    queries = read_raw_csv(args.query, ap_ids=None)
    estimates = []
    for sample, rp_id in queries:
        doc = locator.locate(sample).to_dict()
        doc["query_rp_id"] = rp_id
        estimates.append(doc)
    json.dump({"schema_version": SCHEMA_VERSION, "train_seed": bundle.seed, "estimates": estimates}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_evaluate(args) -> int:
    train = read_dataset(args.train)
    test = read_dataset(args.test)
    if train.scenario != test.scenario:
        raise ValueError("training and test datasets come from different scenarios")
    base = MethodConfig(args.method, 1, len(train.ap_ids), args.powed_floor, args.powed_beta)
    results = treatment_grid(train.samples, test.samples, train.scenario, args.method, args.n_values, args.k_values, base)
    text = results_jsonl(results, {"train_seed": train.seed, "test_seed": test.seed})
    if args.out:
        Path(args.out).write_text(text)
        if args.csv:
            write_results_csv(results, args.csv)
        print(summary_table(results))
    else:
        sys.stdout.write(text)
        print(summary_table(results), file=sys.stderr)
    return 0


def cmd_sweep_m(args) -> int:
    scenario = _load_scenario(args.scenario)
    config = _config(args, len(scenario.access_points))
    rows = m_sweep(scenario, _params(args), config, args.m_values, args.seed, args.instances_per_rp)
    lines = []
    for row in rows:
        doc = {"schema_version": SCHEMA_VERSION, "method": config.method, "k": config.k, "n_aps": config.n_aps, "seed": args.seed, **asdict(row)}
        lines.append(json.dumps(doc, sort_keys=True))
    text = "".join(line + "\n" for line in lines)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"{'m':>4} {'mean_error_m':>13} {'mean_time_s':>12}", file=sys.stderr)
    for row in rows:
        print(f"{row.m:>4} {row.mean_error_m:13.4f} {row.mean_time_s:12.6f}", file=sys.stderr)
    return 0


def cmd_export_cdf(args) -> int:
    results = read_results_jsonl(args.results)
    write_cdf_csv(error_cdf(r.mean_error_m for r in results), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quartileloc", description="Quartile-fingerprint kNN indoor localization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a simulated raw-readings dataset")
    _add_model_args(p)
    p.add_argument("--m", type=_positive, default=20, help="readings per AP per sample")
    p.add_argument("--n-aps", type=_positive, default=None, help="use only the first n APs")
    p.add_argument("--out", type=Path, required=True, help="output dataset directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("build-fingerprints", help="build a fingerprint CSV from a dataset directory")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--representation", choices=("quartile", "mean", "powed"), default="quartile")
    p.add_argument("--powed-floor", type=float, default=DEFAULT_POWED_FLOOR)
    p.add_argument("--powed-beta", type=float, default=DEFAULT_POWED_BETA)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_build_fingerprints)

    p = sub.add_parser("localize", help="estimate positions for query samples")
    p.add_argument("--train", type=Path, required=True, help="training dataset directory")
    _add_method_args(p)
    p.add_argument("--query", type=Path, required=True, help="raw-readings CSV of query samples")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("evaluate", help="run the (n, k) treatment grid")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    _add_method_args(p, k_default=False)
    p.add_argument("--n-values", type=_int_list, default=list(DEFAULT_N_VALUES))
    p.add_argument("--k-values", type=_int_list, default=list(DEFAULT_K_VALUES))
    p.add_argument("--out", type=Path, help="results JSONL (default: standard output)")
    p.add_argument("--csv", type=Path, help="also write results as CSV (requires --out)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-m", help="evaluate one configuration for several m")
    _add_model_args(p)
    _add_method_args(p)
    p.add_argument("--m-values", type=_int_list, default=list(DEFAULT_M_VALUES))
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_sweep_m)

    p = sub.add_parser("export-cdf", help="CDF of treatment mean errors as CSV")
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_export_cdf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "csv", None) and not args.out:
        parser.error("--csv requires --out")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
