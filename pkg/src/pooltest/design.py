"""Randomized pooling designs as bipartite multigraphs.

Three constructions cover the two testing constraints. The
tests-per-item regular design has every item join a fixed number of
tests drawn uniformly with replacement. The test-size regular design is
a configuration model in which every test holds exactly ``gamma`` items.
The matching design caps tests at ``gamma`` items while keeping item
degrees in {1, 2}: a set-aside block of items is injectively matched one
per test on top of a (gamma - 1)-regular core. Multi-edges are kept
everywhere and degrees count multiplicity.

Builders are pure functions of their parameters and the supplied
generator, so they are safe to call concurrently with independent rng
instances.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError


class DesignKind(enum.Enum):
    """Which randomized construction produced a design."""

    DELTA_REGULAR = "delta"
    GAMMA_CONFIG = "gamma-config"
    GAMMA_MATCHING = "gamma-matching"


@dataclass(frozen=True, eq=False)
class PoolingDesign:
    """Bipartite multigraph on ``n`` items and ``m`` tests.

    The flat edge list is canonical; both adjacency views are derived
    from it on demand and cached, so the two views always describe the
    same edge multiset.
    """

    n: int
    m: int
    kind: DesignKind
    edge_items: np.ndarray
    edge_tests: np.ndarray

    def __post_init__(self) -> None:
        self.edge_items.setflags(write=False)
        self.edge_tests.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.edge_items.size)

    @cached_property
    def item_degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_items, minlength=self.n)
        deg.setflags(write=False)
        return deg

    @cached_property
    def test_degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_tests, minlength=self.m)
        deg.setflags(write=False)
        return deg

    @cached_property
    def tests_of_item(self) -> list[np.ndarray]:
        """Per-item test indices with multiplicity, sorted within each item."""
        return _adjacency(self.edge_items, self.edge_tests, self.n)

    @cached_property
    def items_of_test(self) -> list[np.ndarray]:
        """Per-test item indices with multiplicity, sorted within each test."""
        return _adjacency(self.edge_tests, self.edge_items, self.m)

    @cached_property
    def distinct_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Deduplicated incidence as parallel (test, item) index arrays."""
        if self.edge_items.size == 0:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        key = self.edge_tests.astype(np.int64) * self.n + self.edge_items
        uniq = np.unique(key)
        tests = uniq // self.n
        items = uniq % self.n
        tests.setflags(write=False)
        items.setflags(write=False)
        return tests, items


def _adjacency(keys: np.ndarray, values: np.ndarray, nbins: int) -> list[np.ndarray]:
    order = np.lexsort((values, keys))
    sorted_keys = keys[order]
    sorted_vals = values[order]
    counts = np.bincount(sorted_keys, minlength=nbins) if keys.size else np.zeros(nbins, dtype=np.int64)
    groups = np.split(sorted_vals, np.cumsum(counts[:-1])) if nbins else []
    for g in groups:
        g.setflags(write=False)
    return groups


@dataclass(frozen=True)
class DesignStats:
    """Degree summary of a design; degrees count multiplicity."""

    min_test_degree: int
    max_test_degree: int
    mean_test_degree: float
    distinct_members_per_test: tuple[int, ...]
    multi_edge_count: int


def design_stats(design: PoolingDesign) -> DesignStats:
    deg = design.test_degrees
    dt, _ = design.distinct_pairs
    distinct = np.bincount(dt, minlength=design.m) if dt.size else np.zeros(design.m, dtype=np.int64)
    total = int(deg.sum())
    return DesignStats(
        min_test_degree=int(deg.min()),
        max_test_degree=int(deg.max()),
        mean_test_degree=total / design.m,
        distinct_members_per_test=tuple(int(c) for c in distinct),
        multi_edge_count=total - int(distinct.sum()),
    )


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


def build_delta_regular(n: int, m: int, delta: int, rng: np.random.Generator) -> PoolingDesign:
    """Each of the ``n`` items picks ``delta`` tests uniformly with replacement."""
    _require(n >= 1 and m >= 1 and delta >= 1,
             f"n, m, delta must all be >= 1 (got n={n}, m={m}, delta={delta})")
    picks = rng.integers(0, m, size=(n, delta))
    edge_items = np.repeat(np.arange(n, dtype=np.int64), delta)
    edge_tests = picks.reshape(-1).astype(np.int64)
    return PoolingDesign(n, m, DesignKind.DELTA_REGULAR, edge_items, edge_tests)


def config_m_step(n: int, gamma: int) -> int:
    """Spacing between consecutive test counts valid for the configuration model."""
    return n // math.gcd(gamma, n)


def nearest_config_m(n: int, gamma: int, m: int) -> int:
    """Closest valid test count for the configuration model; ties prefer more tests."""
    step = config_m_step(n, gamma)
    lo = (m // step) * step
    hi = lo + step
    if lo < step:
        return hi
    return hi if (hi - m) <= (m - lo) else lo


def build_gamma_config(n: int, m: int, gamma: int, rng: np.random.Generator) -> PoolingDesign:
    """Configuration model: every test holds gamma items, every item sits in m*gamma/n tests.

    Clone lists for both sides are joined by a uniform perfect matching
    (one side is permuted, which is a Fisher-Yates shuffle of the clone
    slots) and parallel clones are merged into multi-edges.
    """
    _require(n >= 1 and m >= 1 and gamma >= 1,
             f"n, m, gamma must all be >= 1 (got n={n}, m={m}, gamma={gamma})")
    if (m * gamma) % n != 0:
        step = config_m_step(n, gamma)
        below = (m // step) * step
        above = below + step
        hint = f"m={above}" if below < step else f"m={below} or m={above}"
        raise ParameterError(
            f"m*gamma must be divisible by n for the test-size regular design "
            f"(n={n}, m={m}, gamma={gamma}); nearest valid choices: {hint}")
    delta = (m * gamma) // n
    item_clones = np.repeat(np.arange(n, dtype=np.int64), delta)
    test_clones = np.repeat(np.arange(m, dtype=np.int64), gamma)
    matched = test_clones[rng.permutation(test_clones.size)]
    return PoolingDesign(n, m, DesignKind.GAMMA_CONFIG, item_clones, matched)


def matching_m_range(n: int, gamma: int) -> tuple[int, int]:
    """Inclusive feasibility interval of test counts for the matching design.

    The set-aside count n - m*(gamma-1)/2 must land in [0, m]; the
    interval may still exclude values of the wrong parity when gamma is
    even.
    """
    lo = -(-2 * n // (gamma + 1))
    hi = (2 * n) // (gamma - 1)
    return lo, hi


def _matching_parity_bounds(n: int, gamma: int) -> tuple[int, int, int]:
    lo, hi = matching_m_range(n, gamma)
    step = 2 if gamma % 2 == 0 else 1
    start = lo if (step == 1 or lo % 2 == 0) else lo + 1
    end = hi if (step == 1 or hi % 2 == 0) else hi - 1
    return start, end, step


def nearest_matching_m(n: int, gamma: int, m: int) -> int | None:
    """Closest feasible test count for the matching design, or None if none exists."""
    start, end, step = _matching_parity_bounds(n, gamma)
    if start > end:
        return None
    c = min(max(m, start), end)
    if step == 2 and c % 2 == 1:
        c = c + 1 if c + 1 <= end else c - 1
    return c


def build_gamma_matching(n: int, m: int, gamma: int, rng: np.random.Generator) -> PoolingDesign:
    """Matching design: test sizes at most gamma, item degrees in {1, 2}.

    A uniformly chosen block of n - m*(gamma-1)/2 items is set aside
    with degree 1 and matched injectively to distinct tests (a random
    test permutation truncated to the block size); the rest form a
    configuration-model core where items have degree 2 and tests degree
    gamma - 1.
    """
    _require(n >= 1 and m >= 1, f"n and m must be >= 1 (got n={n}, m={m})")
    _require(gamma >= 2, f"gamma must be >= 2 for the matching design (got gamma={gamma})")
    start, end, _ = _matching_parity_bounds(n, gamma)
    feasible = (start <= m <= end) and (m * (gamma - 1)) % 2 == 0
    if not feasible:
        parity = " with m*(gamma-1) even" if gamma % 2 == 0 else ""
        detail = f"feasible m range is [{start}, {end}]{parity}" if start <= end \
            else "no feasible m exists"
        raise ParameterError(
            f"infeasible matching design (n={n}, m={m}, gamma={gamma}); {detail}")
    set_aside_count = n - (m * (gamma - 1)) // 2
    set_aside = rng.choice(n, size=set_aside_count, replace=False).astype(np.int64)
    core_items = np.setdiff1d(np.arange(n, dtype=np.int64), set_aside, assume_unique=False)
    item_clones = np.repeat(core_items, 2)
    test_clones = np.repeat(np.arange(m, dtype=np.int64), gamma - 1)
    matched_core = test_clones[rng.permutation(test_clones.size)]
    matched_tests = rng.permutation(m)[:set_aside_count].astype(np.int64)
    edge_items = np.concatenate([item_clones, set_aside])
    edge_tests = np.concatenate([matched_core, matched_tests])
    return PoolingDesign(n, m, DesignKind.GAMMA_MATCHING, edge_items, edge_tests)


def build_gamma_auto(n: int, m: int, gamma: int, theta: float,
                     rng: np.random.Generator) -> PoolingDesign:
    """Dispatch on the sparsity exponent: configuration model for theta >= 1/2,
    matching design below."""
    _require(0.0 < theta < 1.0, f"theta must lie in (0, 1) (got theta={theta})")
    if theta >= 0.5:
        return build_gamma_config(n, m, gamma, rng)
    return build_gamma_matching(n, m, gamma, rng)
