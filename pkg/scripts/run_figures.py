"""Reproduce the four sweeps at the reference operating point and write one CSV per sweep.

Usage: python scripts/run_figures.py [--out-dir results] [--trials 100] [--jobs 1]
"""
import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

from onebit_csit.cli import format_csv
from onebit_csit.config import ScenarioConfig
from onebit_csit.evaluation import run_experiment

SWEEPS = {
    "T": [32, 48, 64, 96, 128],
    "c": [0, 2, 4, 6],
    "K": [2, 4, 6, 8, 10],
    "N": [1, 2, 4],
}

log = logging.getLogger("run_figures")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--only", choices=sorted(SWEEPS), action="append")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = replace(ScenarioConfig(), trials=args.trials, seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for param in args.only or SWEEPS:
        start = time.perf_counter()
        rep = run_experiment(cfg, param, SWEEPS[param], jobs=args.jobs)
        path = args.out_dir / f"sweep_{param}.csv"
        path.write_text(format_csv(rep))
        log.info("%s sweep done in %.1f s -> %s", param, time.perf_counter() - start, path)
        for algo in rep.algorithms:
            log.info("  %-13s %s", algo, " ".join(f"{m:6.3f}" for m in rep.means[algo]))


if __name__ == "__main__":
    main()
