"""Command-line entry points and CSV/JSONL persistence.

Subcommands: coeffs, oracle, simulate, sweep, fit, report.  Every run writes
its resolved configuration next to its outputs and appends one summary record
to runs.jsonl.  Exit codes: 0 success, 2 configuration error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import backend
from .analytic import net_error_intervals
from .config import ConfigError, ExperimentConfig, default_output_path, parse_config
from .model import SingularVolatility, equidistant_net
from .payoffs import chaos_coefficients
from .rates import fit_power_law, rate_sweep, smoothness_report
from .simulate import mc_l2_error

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

DEFAULT_THETA_GRID = tuple((k + 1) / 10 for k in range(9))


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float) or isinstance(v, np.floating):
        return f"{float(v):.17g}"
    return str(v)


def emit_csv(records, path, fieldnames=None) -> None:
    """Write homogeneous records as CSV: documented header, 17-significant-digit
    floats, '.' decimal separator, newline-terminated UTF-8."""
    records = list(records)
    if fieldnames is None:
        if not records:
            raise ValueError("fieldnames required when the record list is empty")
        fieldnames = list(records[0].keys())
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(fieldnames)
            for rec in records:
                writer.writerow([_format_value(rec[k]) for k in fieldnames])
    except OSError as exc:
        raise RuntimeError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path):
    """Read a CSV written by emit_csv; numeric fields are parsed back exactly."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [dict(r) for r in reader]
    except OSError as exc:
        raise RuntimeError(f"cannot read CSV from {path}: {exc}") from exc
    for row in rows:
        for k, v in row.items():
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    pass
    return rows


def _write_run_artifacts(config: ExperimentConfig, out_dir: Path, summary: dict) -> None:
    (out_dir / "resolved_config.json").write_text(config.to_json(), encoding="utf-8")
    with (out_dir / "runs.jsonl").open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(summary) + "\n")


def _build_config(args) -> ExperimentConfig:
    doc: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError([f"cannot read config file {args.config}: {exc}"])
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config file is not valid JSON: {exc}"])
        if not isinstance(doc, dict):
            raise ConfigError(["top-level document must be a JSON object"])
    for key in ("beta", "horizon", "n_paths", "seed", "theta", "truncation_order"):
        v = getattr(args, key, None)
        if v is not None:
            doc[key] = v
    if getattr(args, "n_values", None):
        doc["n_values"] = [int(s) for s in args.n_values.split(",")]
    if getattr(args, "payoff", None):
        payoff: dict = {"kind": args.payoff}
        if args.payoff in ("indicator", "call"):
            payoff["strike"] = args.strike if args.strike is not None else 0.0
        elif args.payoff == "pure_hermite":
            payoff["degree"] = args.degree if args.degree is not None else 2
        doc["payoff"] = payoff
    if getattr(args, "output", None):
        doc["output_path"] = args.output
    doc.setdefault("output_path", default_output_path())
    return parse_config(doc)


def _prepare(config: ExperimentConfig):
    model = SingularVolatility(beta=config.beta, horizon=config.horizon)
    coeffs = chaos_coefficients(config.payoff, config.truncation_order)
    out_dir = Path(config.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    return model, coeffs, out_dir


def _cmd_coeffs(config, args) -> dict:
    _, coeffs, out_dir = _prepare(config)
    rows = [{"n": n, "c_n": c} for n, c in enumerate(coeffs.coeffs)]
    emit_csv(rows, out_dir / "coeffs.csv")
    return {
        "outputs": ["coeffs.csv"],
        "l2_norm_sq": coeffs.l2_norm_sq_estimate,
        "parseval_residual": coeffs.parseval_residual,
    }


def _cmd_oracle(config, args) -> dict:
    model, coeffs, out_dir = _prepare(config)
    rows = []
    for n in config.n_values:
        net = equidistant_net(n, model.horizon)
        parts = net_error_intervals(coeffs, model, net)
        total = sum(p.total for p in parts)
        rows.append(
            {
                "n": n,
                "analytic_error": float(np.sqrt(total)),
                "truncation_residual": sum(p.truncation_residual for p in parts),
            }
        )
    emit_csv(rows, out_dir / "oracle.csv")
    return {"outputs": ["oracle.csv"], "n_values": list(config.n_values)}


def _cmd_simulate(config, args) -> dict:
    model, coeffs, out_dir = _prepare(config)
    n = args.n if args.n is not None else config.n_values[0]
    net = equidistant_net(n, model.horizon)
    est = mc_l2_error(coeffs, model, net, config.n_paths, config.seed, workers=args.workers)
    rows = [{"n": n, "mc_error": est.mean, "mc_std_error": est.std_error}]
    emit_csv(rows, out_dir / "simulate.csv")
    return {
        "outputs": ["simulate.csv"],
        "n": n,
        "mc_error": est.mean,
        "mc_std_error": est.std_error,
        "n_paths": config.n_paths,
    }


def _cmd_sweep(config, args) -> dict:
    model, coeffs, out_dir = _prepare(config)
    result = rate_sweep(
        coeffs,
        model,
        n_values=config.n_values,
        n_paths=config.n_paths,
        seed=config.seed,
        theta=config.theta,
        workers=args.workers,
    )
    rows = [
        {
            "n": n,
            "analytic_error": ae,
            "mc_error": me,
            "mc_std_error": se,
        }
        for n, ae, me, se in zip(
            result.n_values, result.analytic_errors, result.mc_errors, result.mc_std_errors
        )
    ]
    emit_csv(rows, out_dir / "sweep.csv")
    return {
        "outputs": ["sweep.csv"],
        "fitted_slope": result.fitted_slope,
        "fitted_intercept": result.fitted_intercept,
        "slope_ci": list(result.slope_ci),
        "theoretical_slope": result.theoretical_slope,
        "theta_used": result.theta_used,
        "config_digest": result.config_digest,
    }


def _cmd_fit(args) -> dict:
    rows = read_csv(args.input)
    if not rows:
        raise RuntimeError(f"no records in {args.input}")
    if "analytic_error" not in rows[0] or "n" not in rows[0]:
        raise RuntimeError("fit needs a CSV with 'n' and 'analytic_error' columns")
    fit = fit_power_law([r["n"] for r in rows], [r["analytic_error"] for r in rows])
    return {
        "outputs": [],
        "input": str(args.input),
        "fitted_slope": fit.slope,
        "fitted_intercept": fit.intercept,
        "slope_ci": list(fit.ci),
    }


def _cmd_report(config, args) -> dict:
    _, coeffs, out_dir = _prepare(config)
    report = smoothness_report(coeffs, DEFAULT_THETA_GRID)
    rows = [
        {"theta": t, "sum_criterion": s, "integral_criterion": i}
        for t, s, i in report.rows
    ]
    emit_csv(rows, out_dir / "report.csv")
    return {
        "outputs": ["report.csv"],
        "tail_index": None if report.tail_index != report.tail_index else report.tail_index,
        "super_polynomial": report.super_polynomial,
        "parseval_residual": report.parseval_residual,
    }


_COMMANDS = {
    "coeffs": _cmd_coeffs,
    "oracle": _cmd_oracle,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgerate",
        description="Discrete hedging error under a singular volatility: "
        "series oracle, Monte Carlo, and rate experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in [
        ("coeffs", "emit the chaos coefficients of the payoff"),
        ("oracle", "analytic per-net hedging errors"),
        ("simulate", "a single Monte Carlo run on one net"),
        ("sweep", "full rate experiment: analytic + MC errors and slope fit"),
        ("fit", "re-fit the slope from a stored sweep CSV"),
        ("report", "fractional-smoothness report for the payoff"),
    ]:
        p = sub.add_parser(name, help=descr)
        p.add_argument("--config", help="path to a JSON config document")
        p.add_argument("--output", help="output directory (overrides config and "
                       "the HEDGERATE_OUTPUT_DIR environment variable)")
        p.add_argument("--beta", type=float)
        p.add_argument("--horizon", type=float)
        p.add_argument("--payoff", choices=["indicator", "call", "pure_hermite"])
        p.add_argument("--strike", type=float)
        p.add_argument("--degree", type=int)
        p.add_argument("--truncation-order", dest="truncation_order", type=int)
        p.add_argument("--n-values", dest="n_values", help="comma-separated net sizes")
        p.add_argument("--n-paths", dest="n_paths", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--theta", type=float)
        p.add_argument("--workers", type=int, default=1)
        if name == "simulate":
            p.add_argument("--n", type=int, help="net size (default: first of n_values)")
        if name == "fit":
            p.add_argument("--input", required=True, help="sweep CSV to re-fit")
    return parser


def run_command(argv) -> int:
    """Run one subcommand; returns the process exit status."""
    parser = _make_parser()
    args = parser.parse_args(argv)

    if args.command == "fit":
        # re-analysis of stored outputs; needs no experiment configuration
        try:
            result = _cmd_fit(args)
        except Exception as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        summary = {"schema_version": 1, "command": "fit", **result}
        out_dir = Path(args.output or default_output_path())
        out_dir.mkdir(parents=True, exist_ok=True)
        with (out_dir / "runs.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(summary) + "\n")
        print(json.dumps(summary))
        return EXIT_OK

    try:
        config = _build_config(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    summary = {
        "schema_version": 1,
        "command": args.command,
        "backend": backend.active_backend(),
        **result,
    }
    out_dir = Path(config.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_run_artifacts(config, out_dir, summary)
    print(json.dumps(summary))
    return EXIT_OK


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
