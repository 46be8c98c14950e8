#!/usr/bin/env python3
"""Reproduce the headline experiments and write their CSV/JSON artifacts.

Four runs, all driven through the public sweep harness:

  sweep_delta.csv   DD success rate vs m when every item joins at most
                    ``--delta`` pools (n = 10_000, k = 100)
  sweep_gamma.csv   DD success rate vs m when every pool holds at most
                    ``--gamma`` items (n = 10_000, theta = 0.6)
  cdf_delta.csv     distribution of adaptive test counts under the
                    per-item budget
  cdf_gamma.csv     distribution of adaptive test counts under the
                    pool-size budget

Each CSV gets a thresholds_*.json sidecar holding the predicted
transition points for its exact parameters, so a plotting layer can
draw vertical markers without recomputing anything.  Every artifact is
a pure function of --seed; rerunning with the same arguments
reproduces identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from pooltest.design import nearest_config_m
from pooltest.experiment import (
    SweepConfig,
    SweepSetting,
    run_adaptive_cdf,
    run_nonadaptive_sweep,
    write_csv,
)
from pooltest.thresholds import m_dd_delta, m_dd_gamma, threshold_set


def grid_around(center: float, fractions: tuple[float, ...]) -> tuple[int, ...]:
    """Integer m grid at the given multiples of a predicted transition."""
    values = sorted({max(1, round(center * f)) for f in fractions})
    return tuple(values)


def run_one(config: SweepConfig, out: Path, threads: int) -> None:
    start = time.perf_counter()
    adaptive = config.setting in (SweepSetting.DELTA_ADAPTIVE,
                                  SweepSetting.GAMMA_ADAPTIVE)
    if adaptive:
        records = run_adaptive_cdf(config, threads=threads)
    else:
        records = run_nonadaptive_sweep(config, threads=threads)
    write_csv(records, str(out), adaptive=adaptive)
    elapsed = time.perf_counter() - start
    print(f"wrote {out} ({len(records)} rows, {elapsed:.1f}s)")


def write_sidecar(path: Path, n: int, k: int, *, delta: int | None = None,
                  gamma: int | None = None) -> None:
    ts = threshold_set(n, k, delta=delta, gamma=gamma)
    path.write_text(json.dumps(ts.__dict__) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"),
                        help="directory for CSV and JSON artifacts (default results/)")
    parser.add_argument("--trials", type=int, default=300,
                        help="Monte Carlo trials per grid point (default 300)")
    parser.add_argument("--threads", type=int, default=4,
                        help="worker threads; results do not depend on this")
    parser.add_argument("--seed", type=int, default=20260815,
                        help="master seed for every run (default 20260815)")
    parser.add_argument("--delta", type=int, default=4,
                        help="per-item pool budget for the delta runs (default 4)")
    parser.add_argument("--gamma", type=int, default=10,
                        help="pool-size budget for the gamma sweep (default 10)")
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    n, k = 10_000, 100
    fractions = (0.4, 0.6, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0)

    delta_sweep = SweepConfig(
        setting=SweepSetting.DELTA_NONADAPTIVE, n=n, k=k,
        constraint=args.delta, trials=args.trials, master_seed=args.seed,
        m_grid=grid_around(m_dd_delta(n, k, args.delta), fractions))
    run_one(delta_sweep, args.outdir / "sweep_delta.csv", args.threads)
    write_sidecar(args.outdir / "thresholds_delta.json", n, k, delta=args.delta)

    # pre-snap to feasible pool counts so the grid has no duplicate rows
    theta = 0.6
    k_dense = round(n ** theta)
    raw = grid_around(m_dd_gamma(n, k_dense, args.gamma), fractions)
    snapped = tuple(sorted({nearest_config_m(n, args.gamma, m) for m in raw}))
    gamma_sweep = SweepConfig(
        setting=SweepSetting.GAMMA_NONADAPTIVE, n=n, theta=theta,
        constraint=args.gamma, trials=args.trials, master_seed=args.seed,
        m_grid=snapped)
    run_one(gamma_sweep, args.outdir / "sweep_gamma.csv", args.threads)
    write_sidecar(args.outdir / "thresholds_gamma.json", n, k_dense,
                  gamma=args.gamma)

    delta_cdf = SweepConfig(
        setting=SweepSetting.DELTA_ADAPTIVE, n=n, k=k,
        constraint=args.delta, trials=args.trials, master_seed=args.seed)
    run_one(delta_cdf, args.outdir / "cdf_delta.csv", args.threads)
    write_sidecar(args.outdir / "thresholds_cdf_delta.json", n, k,
                  delta=args.delta)

    gamma_cdf = SweepConfig(
        setting=SweepSetting.GAMMA_ADAPTIVE, n=n, k=k,
        constraint=args.gamma, trials=args.trials, master_seed=args.seed)
    run_one(gamma_cdf, args.outdir / "cdf_gamma.csv", args.threads)
    write_sidecar(args.outdir / "thresholds_cdf_gamma.json", n, k,
                  gamma=args.gamma)

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
