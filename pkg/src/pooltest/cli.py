"""Command-line front end.

Exit codes: 0 on success, 2 for parameter problems (with an actionable
message), 1 for internal integrity failures. Every command that consumes
randomness echoes its seed in the output line; the default seed is 0 and
``--seed random`` draws a fresh one from the OS.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

import numpy as np

from . import __version__
from .adaptive import TestOracle, adaptive_delta, adaptive_gamma
from .decode import Algorithm, comp, dd
from .design import DesignKind, build_delta_regular, build_gamma_auto, build_gamma_config, \
    build_gamma_matching, design_stats
from .errors import IntegrityError, ParameterError
from .experiment import format_csv, read_config, run_adaptive_cdf, run_nonadaptive_sweep, \
    write_csv, SweepSetting
from .model import compute_outcomes, draw_uniform_k_sparse, load_instance
from .thresholds import threshold_set

SCHEMA_VERSION = 1


def _parse_seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        seed = int(text)
    except ValueError:
        raise ParameterError(f"seed must be an integer or 'random' (got {text!r})") from None
    if seed < 0:
        raise ParameterError(f"seed must be non-negative (got {seed})")
    return seed


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", default="0",
                        help="integer seed, or 'random' for a fresh one (default 0)")


def _emit(payload: dict) -> None:
    print(json.dumps(payload))


def _build_design(kind: str, n: int, m: int, delta: int | None, gamma: int | None,
                  theta: float | None, rng: np.random.Generator):
    if kind == "delta":
        if delta is None:
            raise ParameterError("--delta is required for kind delta")
        return build_delta_regular(n, m, delta, rng)
    if gamma is None:
        raise ParameterError(f"--gamma is required for kind {kind}")
    if kind == "gamma-config":
        return build_gamma_config(n, m, gamma, rng)
    if kind == "gamma-matching":
        return build_gamma_matching(n, m, gamma, rng)
    if theta is None:
        raise ParameterError("--theta is required for kind gamma-auto")
    return build_gamma_auto(n, m, gamma, theta, rng)


def _cmd_design_stats(args: argparse.Namespace) -> int:
    seed = _parse_seed(args.seed)
    rng = np.random.default_rng(seed)
    design = _build_design(args.kind, args.n, args.m, args.delta, args.gamma,
                           args.theta, rng)
    stats = design_stats(design)
    payload = {
        "kind": design.kind.value, "n": design.n, "m": design.m, "seed": seed,
        "min_test_degree": stats.min_test_degree,
        "max_test_degree": stats.max_test_degree,
        "mean_test_degree": stats.mean_test_degree,
        "multi_edge_count": stats.multi_edge_count,
        "distinct_members_per_test": list(stats.distinct_members_per_test),
    }
    if args.delta is not None:
        payload["delta"] = args.delta
    if args.gamma is not None:
        payload["gamma"] = args.gamma
    _emit(payload)
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    design, sigma, meta = load_instance(args.instance)
    outcomes = compute_outcomes(design, sigma)
    decoder = dd if args.algo == Algorithm.DD.value else comp
    result = decoder(design, outcomes)
    _emit({
        "algorithm": result.algorithm.value,
        "declared_infected": sorted(result.declared_infected),
        "success": result.declared_infected == sigma.infected_set(),
        **meta,
    })
    return 0


def _cmd_adaptive(args: argparse.Namespace) -> int:
    seed = _parse_seed(args.seed)
    rng = np.random.default_rng(seed)
    sigma = draw_uniform_k_sparse(args.n, args.k, rng)
    if args.mode == "delta":
        if args.delta is None:
            raise ParameterError("--delta is required for mode delta")
        oracle = TestOracle(sigma, max_tests_per_item=args.delta)
        report = adaptive_delta(args.n, args.k, args.delta, oracle)
        constraint = args.delta
    else:
        if args.gamma is None:
            raise ParameterError("--gamma is required for mode gamma")
        oracle = TestOracle(sigma, max_query_size=args.gamma)
        report = adaptive_gamma(args.n, args.gamma, oracle, rng=rng)
        constraint = args.gamma
    if report.declared_infected != sigma.infected_set():
        raise IntegrityError(f"adaptive run failed exact recovery (seed={seed})")
    _emit({
        "mode": args.mode, "n": args.n, "k": args.k, "constraint": constraint,
        "seed": seed,
        "declared_infected": sorted(report.declared_infected),
        "tests_used": report.tests_used,
        "max_tests_per_item": report.max_tests_per_item,
        "max_test_size": report.max_test_size,
    })
    return 0


def _grid_values(expr: str) -> tuple[str, list]:
    try:
        axis, _, rest = expr.partition("=")
        parts = rest.split(":")
        if axis in ("delta", "gamma"):
            start, stop = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) > 2 else 1
            values = list(range(start, stop + 1, step))
        elif axis == "theta":
            start, stop = float(parts[0]), float(parts[1])
            step = float(parts[2]) if len(parts) > 2 else 0.1
            count = int(round((stop - start) / step)) + 1
            values = [start + i * step for i in range(count) if start + i * step <= stop + 1e-12]
        else:
            raise ValueError(axis)
    except (ValueError, IndexError):
        raise ParameterError(
            f"--grid expects axis=start:stop[:step] with axis in delta|gamma|theta "
            f"(got {expr!r})") from None
    if not values:
        raise ParameterError(f"--grid produced no values (got {expr!r})")
    return axis, values


def _cmd_thresholds(args: argparse.Namespace) -> int:
    if args.grid is None:
        ts = threshold_set(args.n, args.k, delta=args.delta, gamma=args.gamma,
                           theta=args.theta)
        _emit(ts.__dict__.copy())
        return 0
    axis, values = _grid_values(args.grid)
    rows = []
    for value in values:
        kwargs = {"delta": args.delta, "gamma": args.gamma, "theta": args.theta}
        kwargs[axis] = value
        rows.append(threshold_set(args.n, args.k, **kwargs))
    columns = list(rows[0].__dict__)
    lines = [",".join(columns)]
    lines += [",".join("" if v is None else repr(v) if isinstance(v, float) else str(v)
                       for v in row.__dict__.values()) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = read_config(args.config)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("POOLTEST_THREADS", "1"))
    if config.setting in (SweepSetting.DELTA_NONADAPTIVE, SweepSetting.GAMMA_NONADAPTIVE):
        records = run_nonadaptive_sweep(config, threads=threads)
        adaptive = False
    else:
        records = run_adaptive_cdf(config, threads=threads)
        adaptive = True
    if args.out:
        write_csv(records, args.out, adaptive=adaptive, include_timing=args.timing)
    else:
        sys.stdout.write(format_csv(records, adaptive=adaptive, include_timing=args.timing))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pooltest",
        description="Sparsity-constrained group testing designs, decoders, and experiments.")
    parser.add_argument("--version", action="version",
                        version=f"pooltest {__version__} (schema {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-stats", help="build a design and print its degree stats")
    p.add_argument("--kind", required=True,
                   choices=["delta", "gamma-config", "gamma-matching", "gamma-auto"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=int)
    p.add_argument("--gamma", type=int)
    p.add_argument("--theta", type=float)
    _add_seed(p)
    p.set_defaults(func=_cmd_design_stats)

    p = sub.add_parser("decode", help="decode a dumped instance")
    p.add_argument("--algo", required=True, choices=["comp", "dd"])
    p.add_argument("--instance", required=True, help="path to a key=value instance dump")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("adaptive", help="run one adaptive session")
    p.add_argument("--mode", required=True, choices=["delta", "gamma"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int)
    p.add_argument("--gamma", type=int)
    _add_seed(p)
    p.set_defaults(func=_cmd_adaptive)

    p = sub.add_parser("thresholds", help="print landmark test counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int)
    p.add_argument("--gamma", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--grid", help="axis=start:stop[:step] for a CSV table "
                                  "(axis: delta, gamma, or theta)")
    p.add_argument("--out", help="write the grid CSV here instead of stdout")
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("sweep", help="run a sweep described by a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: POOLTEST_THREADS or 1)")
    p.add_argument("--timing", action="store_true",
                   help="record real wall-clock times (breaks byte reproducibility)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
