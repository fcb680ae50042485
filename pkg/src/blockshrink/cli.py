"""Command-line front end: fit, rates, diagnose, basis.

All runs write a manifest (resolved configuration, seed, artifact version,
timestamps, and every emitted file) so any output can be reproduced from
the manifest alone.  Tabular outputs are CSV; structured reports are JSON.
Exit codes: 0 success / checks passed, 1 gated check failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .basis import make_basis, midpoint_grid, synthesize
from .design import density_from_spec, read_sample_csv
from .estimator import block_statistic, blockshrink, empirical_coefficients
from .harness import (
    ExperimentConfig,
    check_concentration,
    check_moment_bound,
    run_rate_experiment,
)

_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}
_EXTRA_KEYS = {"moment_level", "moment_index", "conc_level", "conc_block", "conc_mu"}


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration input."""


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON experiment config, filling defaults.

    Unknown keys and out-of-range parameters raise ConfigError naming the
    offending field.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS - _EXTRA_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs = {k: v for k, v in raw.items() if k in _CONFIG_KEYS}
    if "n_grid" in kwargs:
        kwargs["n_grid"] = tuple(int(n) for n in kwargs["n_grid"])
    if isinstance(kwargs.get("signal"), str):
        kwargs["signal"] = {"name": kwargs["signal"]}
    if isinstance(kwargs.get("density"), str):
        kwargs["density"] = {"kind": kwargs["density"]}
    config = ExperimentConfig(**kwargs)
    config.extras = {k: raw[k] for k in _EXTRA_KEYS if k in raw}
    try:
        config.validate()
        ball = config.ball_spec()
        if not ball.theorem_applicable:
            bound = (0 if ball.pi == float("inf") else 1 / ball.pi) + Fraction(1, 2)
            raise ValueError(
                f"ball smoothness s={ball.s} out of range: need s > 1/pi + 1/2 = {bound}"
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)
                    for v in row
                )
            )
            fh.write("\n")


class _Manifest:
    def __init__(self, subcommand: str, config: dict, master_seed, out_dir: Path):
        self.data = {
            "subcommand": subcommand,
            "config": config,
            "master_seed": master_seed,
            "artifact_version": __version__,
            "started_at": datetime.now(timezone.utc).isoformat(),
            "finished_at": None,
            "inputs": [],
            "outputs": [],
        }
        self.out_dir = out_dir

    def add_input(self, path) -> None:
        self.data["inputs"].append(str(path))

    def add_output(self, path) -> None:
        self.data["outputs"].append(str(path))

    def write(self) -> Path:
        self.data["finished_at"] = datetime.now(timezone.utc).isoformat()
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, default=str) + "\n")
        return path


def _cmd_basis(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    basis = make_basis(args.family, args.refine_depth)
    manifest = _Manifest(
        "basis",
        {"family": args.family, "refine_depth": args.refine_depth},
        None,
        out_dir,
    )
    path = out_dir / f"basis_{basis.family}.csv"
    xs = basis.table_grid()
    _write_csv(
        path, "x,phi,psi", zip(xs, map(float, basis.phi_table), map(float, basis.psi_table))
    )
    manifest.add_output(path)
    manifest.write()
    print(f"wrote {path} ({len(xs)} rows, support [0, {basis.support_length}])")
    return 0


def _cmd_fit(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sample = read_sample_csv(args.input)
    density = density_from_spec(args.density)
    basis = make_basis(args.basis, args.refine_depth)
    est = blockshrink(sample, density, basis, args.p, args.d)
    values = synthesize(basis, est.tree, args.grid)
    manifest = _Manifest(
        "fit",
        {
            "input": str(args.input),
            "density": args.density,
            "basis": args.basis,
            "p": args.p,
            "d": args.d,
            "grid": args.grid,
        },
        None,
        out_dir,
    )
    manifest.add_input(args.input)
    est_path = out_dir / "estimate.csv"
    _write_csv(est_path, "x,fhat", zip(midpoint_grid(args.grid), map(float, values)))
    manifest.add_output(est_path)
    cut = est.threshold / np.sqrt(sample.n)
    raw = empirical_coefficients(sample, density, basis, est.grid)
    rows = []
    for j in est.grid.levels():
        edges = est.grid.boundaries(j)
        for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
            stat = block_statistic(raw.detail(j)[lo:hi], args.p)
            rows.append((j, b, float(stat), float(cut), bool(est.kept_blocks(j)[b])))
    blocks_path = out_dir / "blocks.csv"
    _write_csv(blocks_path, "j,K,statistic,threshold,kept", rows)
    manifest.add_output(blocks_path)
    manifest.write()
    print(
        f"fit n={sample.n}: levels {est.grid.j_low}..{est.grid.j_high}, "
        f"block size {est.grid.block_size}; wrote {est_path} and {blocks_path}"
    )
    return 0


def _cmd_rates(args) -> int:
    config = parse_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = run_rate_experiment(config, threads=args.threads)
    manifest = _Manifest("rates", _config_dict(config), config.master_seed, out_dir)
    manifest.add_input(args.config)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    manifest.add_output(json_path)
    csv_path = out_dir / "risks.csv"
    _write_csv(
        csv_path,
        "n,mean_risk,stderr,theory_exponent",
        zip(
            report.n_grid,
            report.mean_risk,
            report.stderr,
            [report.theory_risk_exponent] * len(report.n_grid),
        ),
    )
    manifest.add_output(csv_path)
    manifest.write()
    print(f"signal {report.meta['signal']}, zone {report.zone}")
    for n, risk, err in zip(report.n_grid, report.mean_risk, report.stderr):
        print(f"  n={n:>7d}  mean risk {risk:.6g} +- {err:.2g}")
    print(
        f"slope {report.slope:.4f} (se {report.slope_stderr:.4f}) vs theory "
        f"{report.theory_risk_exponent:.4f} -> {'PASS' if report.passed else 'FAIL'}"
    )
    if report.comparison:
        print("descriptive block vs term-by-term comparison (not gated):")
        print("  n        block        hard         soft")
        for row in report.comparison:
            print(
                f"  {row['n']:<8d} {row['block']:<12.6g} {row['hard']:<12.6g} "
                f"{row['soft']:<12.6g}"
            )
    return 0 if report.passed else 1


def _cmd_diagnose(args) -> int:
    config = parse_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    extras = getattr(config, "extras", {})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    j = int(extras.get("moment_level", 3))
    k = int(extras.get("moment_index", 2))
    cj = int(extras.get("conc_level", 3))
    cb = int(extras.get("conc_block", 0))
    mu = float(extras.get("conc_mu", 2.0 * config.d))
    moment = check_moment_bound(config, j, k)
    conc = check_concentration(config, cj, cb, mu)
    manifest = _Manifest("diagnose", _config_dict(config), config.master_seed, out_dir)
    manifest.add_input(args.config)
    json_path = out_dir / "diagnostics.json"
    json_path.write_text(
        json.dumps({"moment": moment.to_dict(), "concentration": conc.to_dict()}, indent=2)
        + "\n"
    )
    manifest.add_output(json_path)
    csv_path = out_dir / "concentration.csv"
    _write_csv(
        csv_path,
        "n,frequency,wilson_upper,envelope,median_stat",
        zip(conc.n_grid, conc.frequency, conc.wilson_upper, conc.envelope, conc.median_stat),
    )
    manifest.add_output(csv_path)
    manifest.write()
    print(
        f"moment decay at (j={j}, k={k}): slope {moment.slope:.4f} vs {moment.theory_exponent} "
        f"-> {'PASS' if moment.passed else 'FAIL'}"
    )
    print(
        f"block deviation tail at (j={cj}, K={cb}, mu={mu:g}): "
        f"max freq {max(conc.frequency):.3g} vs envelope "
        f"{min(conc.envelope):.3g} -> {'PASS' if conc.passed else 'FAIL'}"
    )
    return 0 if (moment.passed and conc.passed) else 1


def _config_dict(config: ExperimentConfig) -> dict:
    out = {f.name: getattr(config, f.name) for f in fields(ExperimentConfig)}
    out["n_grid"] = list(out["n_grid"])
    out.update(getattr(config, "extras", {}))
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockshrink",
        description="Block-thresholded wavelet regression and its rate diagnostics",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for outputs")

    q = sub.add_parser("basis", parents=[common], help="dump wavelet tables as CSV")
    q.add_argument("--family", default="haar")
    q.add_argument("--refine-depth", type=int, default=12, dest="refine_depth")
    q.set_defaults(func=_cmd_basis)

    q = sub.add_parser("fit", parents=[common], help="denoise one sample CSV")
    q.add_argument("--input", required=True, help="sample CSV with header x,y")
    q.add_argument("--density", default="uniform", help="uniform | linear-tilt:<slope> | piecewise:<breaks>:<values>")
    q.add_argument("--basis", default="haar")
    q.add_argument("--refine-depth", type=int, default=12, dest="refine_depth")
    q.add_argument("--p", type=float, default=2.0)
    q.add_argument("--d", type=float, default=4.0)
    q.add_argument("--grid", type=int, default=1 << 14, help="output grid size")
    q.set_defaults(func=_cmd_fit)

    for name, fn, help_text in (
        ("rates", _cmd_rates, "risk-decay slope experiment"),
        ("diagnose", _cmd_diagnose, "coefficient moment/concentration checks"),
    ):
        q = sub.add_parser(name, parents=[common], help=help_text)
        q.add_argument("--config", required=True)
        q.add_argument("--seed", type=int, default=None, help="override master seed")
        q.add_argument("--threads", type=int, default=1)
        q.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
