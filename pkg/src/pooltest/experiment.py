"""Seeded phase-transition experiments.

Non-adaptive sweeps redraw (design, infection vector) independently per
trial over a grid of test counts and report exact-recovery rates;
adaptive runs collect the distribution of tests used as a CDF. Every
trial derives its generator purely from (master_seed, m, trial_index),
so results are identical no matter how trials are scheduled across
worker threads.

CSV rows carry the timing column as 0 by default: the determinism
contract promises byte-identical files for repeated runs of one config,
which real wall-clock measurements would break. Opt into real timings
with ``include_timing=True`` where reproducibility does not matter.
"""

from __future__ import annotations

import csv
import enum
import io
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .adaptive import TestOracle, adaptive_delta, adaptive_gamma
from .decode import comp, dd
from .design import build_delta_regular, build_gamma_auto, nearest_config_m, \
    nearest_matching_m
from .errors import IntegrityError, ParameterError
from .model import compute_outcomes, draw_uniform_k_sparse
from .thresholds import theta_of

NONADAPTIVE_COLUMNS = ("setting", "n", "theta", "k", "constraint", "m", "trials",
                       "successes", "success_rate", "wall_ms", "master_seed")
ADAPTIVE_COLUMNS = ("setting", "n", "theta", "k", "constraint", "tests_used", "count",
                    "cumulative_fraction", "master_seed")

_MAX_SEED = 2 ** 64 - 1


class SweepSetting(enum.Enum):
    DELTA_NONADAPTIVE = "DeltaNonAdaptive"
    GAMMA_NONADAPTIVE = "GammaNonAdaptive"
    DELTA_ADAPTIVE = "DeltaAdaptive"
    GAMMA_ADAPTIVE = "GammaAdaptive"


class DecoderName(enum.Enum):
    DD = "dd"
    COMP = "comp"


_NONADAPTIVE = (SweepSetting.DELTA_NONADAPTIVE, SweepSetting.GAMMA_NONADAPTIVE)


@dataclass(frozen=True)
class SweepConfig:
    """One experiment: a setting, a population, a budget, and seeds.

    Exactly one of ``k`` and ``theta`` may be omitted; a missing k is
    round(n ** theta) and a missing theta is ln k / ln n.
    """

    setting: SweepSetting
    n: int
    constraint: int
    trials: int
    master_seed: int
    k: int | None = None
    theta: float | None = None
    m_grid: tuple[int, ...] | None = None
    decoder: DecoderName = DecoderName.DD

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"n must be >= 1 (got {self.n})")
        if self.constraint < 1:
            raise ParameterError(f"constraint must be >= 1 (got {self.constraint})")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1 (got {self.trials})")
        if not 0 <= self.master_seed <= _MAX_SEED:
            raise ParameterError(f"master_seed must be a 64-bit unsigned integer "
                                 f"(got {self.master_seed})")
        if self.k is None and self.theta is None:
            raise ParameterError("one of k and theta is required")
        if self.k is not None and not 0 <= self.k <= self.n:
            raise ParameterError(f"need 0 <= k <= n (got n={self.n}, k={self.k})")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise ParameterError(f"theta must lie in (0, 1) (got {self.theta})")
        if self.setting in _NONADAPTIVE:
            if not self.m_grid:
                raise ParameterError(f"{self.setting.value} requires a non-empty m_grid")
            if any(b <= a for a, b in zip(self.m_grid, self.m_grid[1:])):
                raise ParameterError(f"m_grid must be strictly increasing (got {self.m_grid})")
            if self.m_grid[0] < 1:
                raise ParameterError(f"m_grid entries must be >= 1 (got {self.m_grid})")
        elif self.m_grid:
            raise ParameterError(f"{self.setting.value} takes no m_grid")

    def resolved_k(self) -> int:
        return self.k if self.k is not None else int(round(self.n ** self.theta))

    def resolved_theta(self) -> float:
        if self.theta is not None:
            return self.theta
        return theta_of(self.n, self.k) if self.k >= 1 else 0.0


@dataclass(frozen=True)
class SweepRecord:
    setting: SweepSetting
    n: int
    theta: float
    k: int
    constraint: int
    m: int
    trials: int
    successes: int
    success_rate: float
    wall_ms: int
    master_seed: int


@dataclass(frozen=True)
class CdfRecord:
    setting: SweepSetting
    n: int
    theta: float
    k: int
    constraint: int
    tests_used: int
    count: int
    cumulative_fraction: float
    master_seed: int


def trial_rng(master_seed: int, m: int, trial_index: int) -> np.random.Generator:
    """The per-trial generator; a pure function of its three arguments."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(m, trial_index))
    return np.random.default_rng(seq)


def _snap_m(config: SweepConfig, m: int) -> int | None:
    """Snap a requested test count to one the design builder accepts."""
    if config.setting is SweepSetting.DELTA_NONADAPTIVE:
        return m
    if config.resolved_theta() >= 0.5:
        return nearest_config_m(config.n, config.constraint, m)
    return nearest_matching_m(config.n, config.constraint, m)


def _run_one_trial(config: SweepConfig, m: int, trial_index: int) -> bool:
    rng = trial_rng(config.master_seed, m, trial_index)
    if config.setting is SweepSetting.DELTA_NONADAPTIVE:
        design = build_delta_regular(config.n, m, config.constraint, rng)
    else:
        design = build_gamma_auto(config.n, m, config.constraint,
                                  config.resolved_theta(), rng)
    sigma = draw_uniform_k_sparse(config.n, config.resolved_k(), rng)
    decoder = dd if config.decoder is DecoderName.DD else comp
    result = decoder(design, compute_outcomes(design, sigma))
    return result.declared_infected == sigma.infected_set()


def _chunks(total: int, workers: int) -> list[range]:
    bounds = np.linspace(0, total, workers + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]


def run_nonadaptive_sweep(config: SweepConfig, threads: int = 1) -> list[SweepRecord]:
    """Exact-recovery rate per grid point. Rows for grid points with no
    feasible snapped test count carry trials=0 and success_rate=nan."""
    if config.setting not in _NONADAPTIVE:
        raise ParameterError(f"{config.setting.value} is not a non-adaptive setting")
    if threads < 1:
        raise ParameterError(f"threads must be >= 1 (got {threads})")
    records = []
    for requested_m in config.m_grid:
        started = time.perf_counter()
        m = _snap_m(config, requested_m)
        if m is None:
            records.append(_record(config, requested_m, 0, 0, started))
            continue

        def count_chunk(trials: range, m: int = m) -> int:
            return sum(_run_one_trial(config, m, t) for t in trials)

        if threads == 1:
            successes = count_chunk(range(config.trials))
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                successes = sum(pool.map(count_chunk, _chunks(config.trials, threads)))
        records.append(_record(config, m, config.trials, successes, started))
    return records


def _record(config: SweepConfig, m: int, trials: int, successes: int,
            started: float) -> SweepRecord:
    return SweepRecord(
        setting=config.setting,
        n=config.n,
        theta=config.resolved_theta(),
        k=config.resolved_k(),
        constraint=config.constraint,
        m=m,
        trials=trials,
        successes=successes,
        success_rate=successes / trials if trials else float("nan"),
        wall_ms=int((time.perf_counter() - started) * 1000),
        master_seed=config.master_seed,
    )


def _run_one_adaptive_trial(config: SweepConfig, trial_index: int) -> int:
    rng = trial_rng(config.master_seed, 0, trial_index)
    sigma = draw_uniform_k_sparse(config.n, config.resolved_k(), rng)
    if config.setting is SweepSetting.DELTA_ADAPTIVE:
        oracle = TestOracle(sigma, max_tests_per_item=config.constraint)
        report = adaptive_delta(config.n, max(1, config.resolved_k()),
                                config.constraint, oracle)
    else:
        oracle = TestOracle(sigma, max_query_size=config.constraint)
        report = adaptive_gamma(config.n, config.constraint, oracle, rng=rng)
    if report.declared_infected != sigma.infected_set():
        raise IntegrityError(
            f"adaptive run failed exact recovery; reproduce with "
            f"master_seed={config.master_seed}, trial={trial_index}")
    return report.tests_used

def run_adaptive_cdf(config: SweepConfig, threads: int = 1) -> list[CdfRecord]:
    """Distribution of tests used over seeded trials, as an ascending CDF.

    Every trial must recover the infection vector exactly; a failure
    aborts with the reproducing (master_seed, trial) pair.
    """
    if config.setting in _NONADAPTIVE:
        raise ParameterError(f"{config.setting.value} is not an adaptive setting")
    if threads < 1:
        raise ParameterError(f"threads must be >= 1 (got {threads})")

    def count_chunk(trials: range) -> Counter:
        return Counter(_run_one_adaptive_trial(config, t) for t in trials)

    if threads == 1:
        histogram = count_chunk(range(config.trials))
    else:
        histogram = Counter()
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for partial in pool.map(count_chunk, _chunks(config.trials, threads)):
                histogram.update(partial)

    records = []
    running = 0
    for tests_used in sorted(histogram):
        running += histogram[tests_used]
        records.append(CdfRecord(
            setting=config.setting,
            n=config.n,
            theta=config.resolved_theta(),
            k=config.resolved_k(),
            constraint=config.constraint,
            tests_used=tests_used,
            count=histogram[tests_used],
            cumulative_fraction=running / config.trials,
            master_seed=config.master_seed,
        ))
    return records


def format_csv(records: Iterable[SweepRecord | CdfRecord], *, adaptive: bool = False,
               include_timing: bool = False) -> str:
    """Render records under the fixed schema; an empty list yields the
    header only (the non-adaptive header unless ``adaptive`` is set)."""
    records = list(records)
    if records:
        adaptive = isinstance(records[0], CdfRecord)
    columns = ADAPTIVE_COLUMNS if adaptive else NONADAPTIVE_COLUMNS
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow(_format_row(record, include_timing))
    return buffer.getvalue()


def write_csv(records: Iterable[SweepRecord | CdfRecord], path: str, *,
              adaptive: bool = False, include_timing: bool = False) -> None:
    """Write records under the fixed schema; see ``format_csv``."""
    text = format_csv(records, adaptive=adaptive, include_timing=include_timing)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _format_row(record: SweepRecord | CdfRecord, include_timing: bool) -> list[str]:
    if isinstance(record, SweepRecord):
        return [record.setting.value, str(record.n), repr(record.theta), str(record.k),
                str(record.constraint), str(record.m), str(record.trials),
                str(record.successes), repr(record.success_rate),
                str(record.wall_ms if include_timing else 0), str(record.master_seed)]
    return [record.setting.value, str(record.n), repr(record.theta), str(record.k),
            str(record.constraint), str(record.tests_used), str(record.count),
            repr(record.cumulative_fraction), str(record.master_seed)]


_CONFIG_KEYS = {"setting", "n", "k", "theta", "delta", "gamma", "constraint",
                "m_grid", "trials", "master_seed", "decoder"}


def read_config(path: str) -> SweepConfig:
    """Parse a flat key=value config file; # starts a comment line."""
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            raw[key] = value.strip()

    def need(key: str) -> str:
        if key not in raw:
            raise ParameterError(f"{path}: missing required key {key!r}")
        return raw[key]

    try:
        setting = SweepSetting(need("setting"))
    except ValueError:
        choices = ", ".join(s.value for s in SweepSetting)
        raise ParameterError(
            f"{path}: unknown setting {raw['setting']!r} (choose from {choices})") from None

    constraint_key = "delta" if "Delta" in setting.value else "gamma"
    if "constraint" in raw and constraint_key in raw:
        raise ParameterError(f"{path}: give either constraint or {constraint_key}, not both")
    constraint = raw.get("constraint", raw.get(constraint_key))
    if constraint is None:
        raise ParameterError(f"{path}: missing required key {constraint_key!r}")

    try:
        m_grid = None
        if "m_grid" in raw:
            m_grid = tuple(int(v) for v in raw["m_grid"].split(",") if v.strip())
        decoder = DecoderName(raw.get("decoder", "dd").lower())
        return SweepConfig(
            setting=setting,
            n=int(need("n")),
            constraint=int(constraint),
            trials=int(need("trials")),
            master_seed=int(need("master_seed")),
            k=int(raw["k"]) if "k" in raw else None,
            theta=float(raw["theta"]) if "theta" in raw else None,
            m_grid=m_grid,
            decoder=decoder,
        )
    except ValueError as exc:
        raise ParameterError(f"{path}: {exc}") from None
