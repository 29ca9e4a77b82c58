"""Command-line experiment runner.

Example::

    onebit-csit --sweep T=32,48,64,96,128 --out fig_T.csv
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass

from .config import ConfigurationError, ScenarioConfig
from .evaluation import ALGORITHMS, SWEEPABLE, ExperimentReport, run_experiment

CSV_HEADER = ["sweep_param", "sweep_value", "algorithm", "mean_snr_loss_db", "trials",
              "invalid_count", "seed"]

_INT_PARAMS = {"T", "c", "K", "N", "s", "trials"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunSpec:
    config: ScenarioConfig
    sweep_param: str
    sweep_values: tuple
    out: str | None = None
    verbose: bool = False
    algorithms: tuple = ALGORITHMS
    jobs: int = 1


def _parse_sweep(text: str):
    if "=" not in text:
        raise UsageError(f"malformed sweep {text!r}; expected PARAM=v1,v2,...")
    name, _, raw = text.partition("=")
    name = name.strip().replace("-", "_")
    if name not in SWEEPABLE:
        raise UsageError(f"cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")
    cast = int if name in _INT_PARAMS else float
    try:
        values = tuple(cast(v) for v in raw.split(","))
    except ValueError:
        raise UsageError(f"malformed sweep values {raw!r} for {name}") from None
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"sweep values must be strictly increasing, got {values}")
    return name, values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    d = ScenarioConfig()
    p = _Parser(prog="onebit-csit", description="One-bit feedback CSIT estimation experiments.")
    p.add_argument("--M", type=int, default=d.M, help="BTS antennas")
    p.add_argument("--N", type=int, default=d.N, help="antennas per user")
    p.add_argument("--K", type=int, default=d.K, help="users")
    p.add_argument("--T", type=int, default=d.T, help="pilot symbols")
    p.add_argument("--s", type=int, default=d.s, help="individual sparsity bound")
    p.add_argument("--c", type=int, default=d.c, help="joint sparsity bound")
    p.add_argument("--snr-db", type=float, default=d.snr_db)
    p.add_argument("--mu", type=float, default=d.mu, help="gradient step size")
    p.add_argument("--max-iter", type=int, default=d.max_iter)
    p.add_argument("--trials", type=int, default=d.trials)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--sweep", default=None, metavar="PARAM=v1,v2,...",
                   help=f"sweep one of {', '.join(SWEEPABLE)}")
    p.add_argument("--algos", default=",".join(ALGORITHMS),
                   help=f"comma-separated subset of {', '.join(ALGORITHMS)}")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def parse_args(argv=None) -> RunSpec:
    ns = build_parser().parse_args(argv)
    try:
        cfg = ScenarioConfig(M=ns.M, N=ns.N, K=ns.K, T=ns.T, s=ns.s, c=ns.c, snr_db=ns.snr_db,
                             mu=ns.mu, max_iter=ns.max_iter, trials=ns.trials, seed=ns.seed)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from None

    if ns.sweep is None:
        param, values = "T", (cfg.T,)
        try:
            cfg.check_feasible()
        except ConfigurationError as exc:
            raise UsageError(str(exc)) from None
    else:
        param, values = _parse_sweep(ns.sweep)

    algos = tuple(a.strip() for a in ns.algos.split(",") if a.strip())
    if not algos:
        raise UsageError("--algos must name at least one algorithm")
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise UsageError(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHMS)}")
    if ns.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return RunSpec(cfg, param, values, ns.out, ns.verbose, algos, ns.jobs)


def _fmt_value(v) -> str:
    if isinstance(v, float) and not v.is_integer():
        return f"{v:.6f}"
    return str(int(v)) if isinstance(v, float) else str(v)


def _fmt_mean(x: float) -> str:
    return f"{x:.6f}" if math.isfinite(x) else "nan"


def report_rows(report: ExperimentReport):
    for k, v in enumerate(report.values):
        for a in report.algorithms:
            yield [report.param, _fmt_value(v), a, _fmt_mean(report.means[a][k]),
                   str(report.trials[k]), str(report.invalid_counts[a][k]), str(report.seed)]


def format_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(report_rows(report))
    return buf.getvalue()


def emit_csv(report: ExperimentReport, path) -> None:
    text = format_csv(report)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    try:
        spec = parse_args(argv)
    except UsageError as exc:
        print(f"onebit-csit: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if spec.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    report = run_experiment(spec.config, spec.sweep_param, list(spec.sweep_values),
                            spec.algorithms, jobs=spec.jobs)
    try:
        emit_csv(report, spec.out)
    except OSError as exc:
        print(f"onebit-csit: error: cannot write {spec.out}: {exc}", file=sys.stderr)
        return 1
    return 0 if report.valid() else 1


if __name__ == "__main__":
    sys.exit(main())
