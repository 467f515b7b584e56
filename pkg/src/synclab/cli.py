"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 numerical or convergence failure.
"""

from __future__ import annotations

import argparse
import io
import sys
import warnings

import numpy as np

from synclab import __version__
from synclab.advantage import CSV_FIELDS, statistical_thresholds
from synclab.errors import (
    BudgetError,
    ConditioningError,
    ConvergenceError,
    DegenerateEstimatorError,
    DomainError,
    InvalidParameterError,
    UsageError,
)
from synclab.estimators import dense_top_eigenpair, lanczos_top_eigenpair, overlap_score, top_eigenpair
from synclab.experiments import RUNNERS
from synclab.interpolation import interpolation_path
from synclab.model import ModelParams, PhaseSignal, sample_null, sample_planted
from synclab.obsio import read_observation, write_observation
from synclab.plot import emit_plot
from synclab.records import records_to_csv, write_rows
from synclab.sweep import SweepConfig, run_sweep
from synclab.toy import (
    advantage_via_basis,
    advantage_via_linear_solve,
    build_toy_problem,
    gram_basis,
    hidden_sample_advantage,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _model_flags(p: argparse.ArgumentParser, n=True, lam=True) -> None:
    if n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, default=1)
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    write_rows(rows, fields, buf)
    return buf.getvalue()


def cmd_simulate(a) -> None:
    params = ModelParams(a.n, a.L, a.lam, a.seed)
    if a.null:
        obs, x = sample_null(params, a.trial), None
    else:
        x, obs = sample_planted(params, a.trial)
        if not a.with_phases:
            x = None
    write_observation(a.out, obs, x)


def cmd_pca(a) -> None:
    if a.input:
        obs, x = read_observation(a.input)
        if not 1 <= a.channel <= obs.params.L:
            raise UsageError(f"channel must be in [1, {obs.params.L}]")
        m = obs.channels[a.channel - 1]
        solver = {"dense": dense_top_eigenpair, "lanczos": lanczos_top_eigenpair, "power": top_eigenpair}[a.solver]
        pair = solver(m)
        row = {"n": obs.params.n, "channel": a.channel, "top_eig": pair.value,
               "top_eig_over_sqrt_n": pair.value / np.sqrt(obs.params.n), "seed": obs.params.seed,
               "tool_version": __version__}
        if x is not None:
            X = np.outer(pair.vector, pair.vector.conj())
            row["overlap"] = overlap_score(X, _lifted(x, a.channel))
        _emit(_csv([row], list(row)), a.out)
        return
    if a.n is None or a.lam is None:
        raise UsageError("pca needs either --in FILE or --n and --lambda")
    recs = RUNNERS["pca"]({"n": a.n, "L": a.L, "lambda": a.lam, "seed": a.seed, "trials": a.trials,
                           "channel": a.channel, "solver": "lanczos" if a.solver == "lanczos" else "dense"})
    _emit(records_to_csv(recs), a.out)


def _lifted(x: PhaseSignal, channel: int) -> PhaseSignal:
    return PhaseSignal.from_angles(channel * x.phases) if channel > 1 else x


def cmd_advantage(a) -> None:
    p = {"n": a.n, "L": a.L, "lambda": a.lam, "seed": a.seed, "D": a.D, "method": a.method,
         "samples": a.samples, "estimator": a.estimator, "mode": a.mode, "points": a.points}
    rec = RUNNERS["advantage"](p)[0]
    row = {"method": rec.extra["method"], "n": a.n, "L": a.L, "lambda": a.lam, "D": a.D,
           "samples": rec.params["trials"], "adv_squared": rec.metrics["adv_squared"],
           "stderr": rec.metrics["stderr"], "seed": a.seed, "tool_version": __version__}
    _emit(_csv([row], list(CSV_FIELDS) + ["seed", "tool_version"]), a.out)


def cmd_interpolate(a) -> None:
    params = ModelParams(a.n, a.L, a.lam, a.seed)
    try:
        ts = [int(t) for t in a.t_grid.split(",")]
    except ValueError:
        raise UsageError(f"--t-grid must be comma-separated integers, got {a.t_grid!r}") from None
    pts = interpolation_path(params, a.D, ts, a.samples, method=a.method)
    rows = [{"t": p.t, "f_t": p.f_t, "stderr": p.stderr, "n": a.n, "L": a.L, "lambda": a.lam, "D": a.D,
             "samples": a.samples, "method": a.method, "seed": a.seed, "tool_version": __version__} for p in pts]
    _emit(_csv(rows, list(rows[0])), a.out)


def cmd_toy(a) -> None:
    toy = build_toy_problem(a.kind, a.lam, a.D, a.extra_coords)
    row = {"kind": a.kind, "lambda": a.lam, "D": a.D,
           "adv_squared_basis": advantage_via_basis(toy, gram_basis(toy)),
           "adv_squared_solve": advantage_via_linear_solve(toy)}
    if a.M:
        res = hidden_sample_advantage(toy, a.M, a.D, a.budget)
        row.update({"M": a.M, "composed": res.composed, "predicted": res.predicted, "bound": res.bound})
    row.update({"seed": 0, "tool_version": __version__})
    _emit(_csv([row], list(row)), a.out)


def cmd_reduction(a) -> None:
    p = {"n": a.n, "L": a.L, "lambda": a.lam, "seed": a.seed, "kappa": a.kappa, "c": a.c,
         "trials": a.trials, "estimator": a.estimator, "pool_channels": a.pool, "M": a.M}
    runner = RUNNERS["roc"] if a.kind == "roc" else RUNNERS["hidden_sample"]
    if a.kind == "hidden" and not a.M:
        raise UsageError("reduction hidden needs --M")
    _emit(records_to_csv(runner(p)), a.out)


def cmd_thresholds(a) -> None:
    th = statistical_thresholds(a.L)
    row = {"L": th.L, "lower": th.lower, "upper": th.upper,
           "lower_source": "cited" if th.lower_cited else "formula", "tool_version": __version__}
    _emit(_csv([row], list(row)), a.out)


def cmd_sweep(a) -> None:
    path = run_sweep(SweepConfig.from_toml(a.config))
    print(path)


def cmd_plot(a) -> None:
    emit_plot(a.csv, a.out, a.x, a.y, a.series, a.log_y, a.err)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synclab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"synclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="draw one observation and write it as JSON")
    _model_flags(p)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--null", action="store_true")
    p.add_argument("--with-phases", action="store_true", help="store the planted phases too")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pca", help="top-eigenvector estimator on a file or a fresh batch of trials")
    p.add_argument("--in", dest="input")
    p.add_argument("--n", type=int)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--channel", type=int, default=1)
    p.add_argument("--solver", choices=["dense", "lanczos", "power"], default="dense")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("advantage", help="squared low-degree advantage")
    p.add_argument("method", choices=["mc", "two-replica", "quadrature", "surrogate"])
    _model_flags(p)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--estimator", choices=["mean", "median_of_means"], default="mean")
    p.add_argument("--mode", choices=["truncated", "full"], default="truncated")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_advantage)

    p = sub.add_parser("interpolate", help="interpolation path F_t")
    _model_flags(p)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--t-grid", required=True, help="comma-separated t values")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--method", choices=["importance", "plain"], default="importance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("toy", help="exact advantage on a small toy problem")
    p.add_argument("--kind", choices=["angular_n2_L1", "gaussian_mean_shift"], required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--M", type=int, default=0, help="also compose M hidden samples")
    p.add_argument("--budget", choices=["total", "per_block"], default="total")
    p.add_argument("--extra-coords", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("reduction", help="split-and-verify test experiments")
    p.add_argument("kind", choices=["roc", "hidden"])
    _model_flags(p)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--estimator", choices=["oracle_signal", "pca_channel1"], default="oracle_signal")
    p.add_argument("--pool", action="store_true", help="pool the statistic over all channels")
    p.add_argument("--M", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduction)

    p = sub.add_parser("thresholds", help="information-theoretic thresholds for L frequencies")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("sweep", help="run a TOML-configured parameter sweep")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="render CSV columns as an SVG line plot")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--series")
    p.add_argument("--err", help="error-bar column (default: a stderr column if present)")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            args.func(args)
    except (UsageError, InvalidParameterError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ConditioningError, DegenerateEstimatorError, DomainError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
