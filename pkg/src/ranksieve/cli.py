"""Command-line interface.

Subcommands:

* ``simulate``  - run a Monte Carlo sweep from a JSON config and write the
  MSE table plus per-cell curve CSVs.
* ``estimate``  - fit the rank estimator and the series least-squares
  comparison on a CSV dataset and write both curves on a grid.
* ``aggregate`` - combine curve CSVs pointwise (mean or median).
* ``summary``   - print a six-number summary per selected column.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
failure.  All numeric output is printed with 6 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import sys

import numpy as np

from .dataio import DatasetSchema, load_csv, summary_stats
from .errors import DataError, NumericalError
from .optimize import (
    DiscreteW,
    FullRank,
    OptimizerConfig,
    Pairwise,
    Weighted,
    evaluate_on_grid,
    maximize_rank_criterion,
    series_ols,
)
from .rankcrit import KernelSpec
from .simulate import MCConfig, run_monte_carlo, write_summary_csvs
from .sieve import sieve_spec_from_json

FMT = "%.6g"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Unusable configuration file or option combination."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _build_grid(obj: dict) -> np.ndarray:
    """Evaluation grid from a JSON description.

    Supported forms:
      {"points": [[...], ...]}                              explicit points
      {"linspace": {"coord": j, "start": a, "stop": b, "num": m,
                    "base": [...]}}                          vary one coordinate
      {"product": {"axes": [{"coord":, "start":, "stop":, "num":}, ...],
                   "base": [...]}}                           row-major product grid
    """
    if "points" in obj:
        pts = np.asarray(obj["points"], dtype=float)
        return np.atleast_2d(pts)
    if "linspace" in obj:
        spec = obj["linspace"]
        base = np.asarray(spec["base"], dtype=float)
        vals = np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        pts = np.tile(base, (vals.size, 1))
        pts[:, int(spec["coord"])] = vals
        return pts
    if "product" in obj:
        spec = obj["product"]
        base = np.asarray(spec["base"], dtype=float)
        axes = spec["axes"]
        grids = [np.linspace(float(a["start"]), float(a["stop"]), int(a["num"])) for a in axes]
        mesh = np.meshgrid(*grids, indexing="ij")
        pts = np.tile(base, (mesh[0].size, 1))
        for axis, m in zip(axes, mesh):
            pts[:, int(axis["coord"])] = m.ravel()
        return pts
    raise ConfigError("grid file must contain 'points', 'linspace' or 'product'")


def _write_curve_csv(path: str, grid: np.ndarray, columns: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"z_{j}" for j in range(grid.shape[1])] + list(columns)
        writer.writerow(header)
        for i in range(grid.shape[0]):
            row = [FMT % v for v in grid[i]] + [FMT % col[i] for col in columns.values()]
            writer.writerow(row)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    obj = _load_json(args.config)
    if args.seed is not None:
        obj["master_seed"] = args.seed
    if args.replications is not None:
        obj["replications"] = args.replications
    try:
        cfg = MCConfig.from_dict(obj)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc
    summary = run_monte_carlo(cfg)
    paths = write_summary_csvs(summary, args.out_dir, fmt=FMT)
    for cell in summary.cells:
        print(
            f"cell {cell.tag}: mse_rank={FMT % cell.mse_rank} "
            f"mse_ols={FMT % cell.mse_ols} ks_reject_rate={FMT % cell.ks_reject_rate} "
            f"failed={cell.n_failed}/{cell.replications}"
        )
    if summary.failures:
        print(f"{len(summary.failures)} replication(s) failed; see summary above")
    print(f"wrote {len(paths)} file(s) to {args.out_dir} in {summary.seconds:.1f}s")
    return EXIT_OK


def _make_variant(args, sample):
    if args.variant == "full":
        return FullRank()
    if args.variant == "discrete-w":
        if args.w0 is None:
            raise ConfigError("--w0 is required for variant 'discrete-w'")
        return DiscreteW(np.asarray(args.w0, dtype=float))
    if args.bandwidth is None:
        raise ConfigError(f"--bandwidth is required for variant {args.variant!r}")
    kernel = KernelSpec(args.kernel, np.asarray(args.bandwidth, dtype=float))
    if args.variant == "weighted":
        if args.w0 is None:
            raise ConfigError("--w0 is required for variant 'weighted'")
        return Weighted(np.asarray(args.w0, dtype=float), kernel)
    return Pairwise(kernel)


def _cmd_estimate(args) -> int:
    schema = DatasetSchema.from_dict(_load_json(args.schema))
    sample, report = load_csv(args.data, schema)
    print(
        f"loaded {report.rows_kept} rows from {args.data} "
        f"({report.rows_dropped} dropped of {report.rows_read})"
    )
    spec = sieve_spec_from_json(_load_json(args.spec), z=sample.z)
    variant = _make_variant(args, sample)
    grid = _build_grid(_load_json(args.grid))
    if grid.shape[1] != sample.d_z:
        raise ConfigError(
            f"grid dimension {grid.shape[1]} does not match regressor dimension {sample.d_z}"
        )
    opt = OptimizerConfig(rng_seed=args.seed)
    fit = maximize_rank_criterion(sample, spec, variant, opt)
    ols = series_ols(sample, spec)
    _write_curve_csv(
        args.out,
        grid,
        {"rank": evaluate_on_grid(fit, grid), "ols": evaluate_on_grid(ols, grid)},
    )
    flag = " (degenerate fit)" if fit.degenerate else ""
    print(f"rank criterion value: {FMT % fit.criterion_value}{flag}")
    print(f"wrote {grid.shape[0]} grid rows to {args.out}")
    return EXIT_OK


def _cmd_aggregate(args) -> int:
    paths = sorted(glob.glob(args.curves))
    if not paths:
        raise DataError(f"no files match {args.curves!r}")
    grid_ref = None
    curves = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or args.column not in reader.fieldnames:
                raise DataError(f"{path}: column {args.column!r} not found")
            zcols = [c for c in reader.fieldnames if c.startswith("z_")]
            rows = list(reader)
        if not rows:
            raise DataError(f"{path}: empty curve file")
        grid = np.array([[float(r[c]) for c in zcols] for r in rows])
        if grid_ref is None:
            grid_ref = grid
        elif grid.shape != grid_ref.shape or not np.array_equal(grid, grid_ref):
            raise DataError(f"{path}: grid differs from {paths[0]}")
        curves.append(np.array([float(r[args.column]) for r in rows]))
    stack = np.vstack(curves)
    agg = np.mean(stack, axis=0) if args.method == "ls" else np.median(stack, axis=0)
    _write_curve_csv(args.out, grid_ref, {args.method: agg})
    print(f"aggregated {len(paths)} curve file(s) into {args.out}")
    return EXIT_OK


def _cmd_summary(args) -> int:
    schema = DatasetSchema.from_dict(_load_json(args.schema))
    sample, report = load_csv(args.data, schema)
    print(
        f"loaded {report.rows_kept} rows from {args.data} "
        f"({report.rows_dropped} dropped of {report.rows_read})"
    )
    header = ["column", "min", "q1", "median", "mean", "q3", "max"]
    print("  ".join(f"{h:>10}" for h in header))
    columns = [(schema.y_column, sample.y)]
    columns += [(name, sample.z[:, j]) for j, name in enumerate(schema.z_columns)]
    if sample.w is not None:
        columns += [(name, sample.w[:, j]) for j, name in enumerate(schema.w_columns)]
    for name, values in columns:
        stats = summary_stats(values)
        cells = [name] + [FMT % v for v in stats]
        print("  ".join(f"{c:>10}" for c in cells))
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="ranksieve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True, help="MC config JSON file")
    p.add_argument("--out-dir", required=True, help="output directory for CSV files")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--replications", type=int, default=None, help="override replication count")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="fit the rank and series estimators on a CSV dataset")
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--schema", required=True, help="dataset schema JSON")
    p.add_argument("--spec", required=True, help="sieve spec JSON (template or bound)")
    p.add_argument(
        "--variant",
        choices=["full", "discrete-w", "weighted", "pairwise"],
        default="full",
    )
    p.add_argument("--w0", type=float, nargs="+", default=None, help="control point")
    p.add_argument("--bandwidth", type=float, nargs="+", default=None, help="kernel bandwidths")
    p.add_argument(
        "--kernel", choices=["uniform", "gaussian", "epanechnikov"], default="uniform"
    )
    p.add_argument("--grid", required=True, help="grid JSON file")
    p.add_argument("--out", required=True, help="output curve CSV")
    p.add_argument("--seed", type=int, default=0, help="optimizer seed")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("aggregate", help="combine curve CSVs pointwise")
    p.add_argument("--curves", required=True, help="glob pattern of curve CSV files")
    p.add_argument("--method", choices=["ls", "lad"], required=True)
    p.add_argument("--column", default="rank", help="curve column to aggregate")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("summary", help="six-number summary per selected column")
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--schema", required=True, help="dataset schema JSON")
    p.set_defaults(func=_cmd_summary)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
