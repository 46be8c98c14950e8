"""Adaptive zero-error testing under the two budget constraints.

Both schemes talk to a ``TestOracle`` that answers pooled queries
against a hidden truth, counts every test, and can hard-enforce the
budgets: the staged splitting scheme never tests an item more than
``delta`` times, and the group-scan scheme never pools more than
``gamma`` items. A fresh oracle per run is expected; reports read the
oracle's counters at completion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetError, IntegrityError, ParameterError
from .model import InfectionVector


class TestOracle:
    """Single-threaded mutable query session against a fixed ground truth.

    Queries are index arrays with distinct members (callers pool each
    item at most once per test). When a budget limit is configured, a
    violating query raises BudgetError before it is answered.
    """

    __test__ = False  # "Test" prefix is domain vocabulary, not a pytest suite

    def __init__(self, truth: InfectionVector, *, max_tests_per_item: int | None = None,
                 max_query_size: int | None = None, keep_log: bool = False) -> None:
        self.truth = truth
        self.max_tests_per_item = max_tests_per_item
        self.max_query_size = max_query_size
        self.tests_performed = 0
        self.per_item_test_count = np.zeros(truth.n, dtype=np.int64)
        self.max_query_size_seen = 0
        self.query_log: list[tuple[tuple[int, ...], bool]] | None = [] if keep_log else None
        self._status = truth.status

    def query(self, items: np.ndarray) -> bool:
        """Test one pool; True iff it contains an infected item."""
        items = np.asarray(items)
        size = int(items.size)
        if self.max_query_size is not None and size > self.max_query_size:
            raise BudgetError(
                f"query of {size} items exceeds the size cap {self.max_query_size}")
        if self.max_tests_per_item is not None:
            if size and int(self.per_item_test_count[items].max()) >= self.max_tests_per_item:
                raise BudgetError(
                    f"an item would exceed its budget of {self.max_tests_per_item} tests")
        self.tests_performed += 1
        self.per_item_test_count[items] += 1
        self.max_query_size_seen = max(self.max_query_size_seen, size)
        answer = bool(self._status[items].any()) if size else False
        if self.query_log is not None:
            self.query_log.append((tuple(sorted(int(x) for x in items)), answer))
        return answer

    def query_groups(self, members: np.ndarray, starts: np.ndarray) -> np.ndarray:
        """Test a batch of disjoint non-empty pools in one call.

        ``members`` concatenates the pools; ``starts`` holds each pool's
        offset. Semantically identical to issuing the pools one by one
        through ``query``, only faster.
        """
        members = np.asarray(members)
        starts = np.asarray(starts, dtype=np.int64)
        if starts.size == 0:
            return np.zeros(0, dtype=bool)
        sizes = np.diff(np.append(starts, members.size))
        if sizes.min() <= 0:
            raise ParameterError("query_groups requires non-empty, ordered groups")
        if self.max_query_size is not None and int(sizes.max()) > self.max_query_size:
            raise BudgetError(
                f"query of {int(sizes.max())} items exceeds the size cap {self.max_query_size}")
        if self.max_tests_per_item is not None:
            if int(self.per_item_test_count[members].max()) >= self.max_tests_per_item:
                raise BudgetError(
                    f"an item would exceed its budget of {self.max_tests_per_item} tests")
        self.tests_performed += int(starts.size)
        self.per_item_test_count[members] += 1
        self.max_query_size_seen = max(self.max_query_size_seen, int(sizes.max()))
        answers = np.logical_or.reduceat(self._status[members], starts)
        if self.query_log is not None:
            bounds = np.append(starts, members.size)
            for g in range(starts.size):
                pool = members[bounds[g]:bounds[g + 1]]
                self.query_log.append(
                    (tuple(sorted(int(x) for x in pool)), bool(answers[g])))
        return answers

    def replay_log(self) -> bool:
        """True iff every logged answer still matches the truth."""
        if self.query_log is None:
            raise ParameterError("oracle was created without keep_log=True")
        return all(
            answer == (bool(self._status[list(pool)].any()) if pool else False)
            for pool, answer in self.query_log)


@dataclass(frozen=True)
class AdaptiveReport:
    declared_infected: frozenset[int]
    tests_used: int
    max_tests_per_item: int
    max_test_size: int


def _report(oracle: TestOracle, declared: frozenset[int]) -> AdaptiveReport:
    per_item = int(oracle.per_item_test_count.max()) if oracle.per_item_test_count.size else 0
    return AdaptiveReport(
        declared_infected=declared,
        tests_used=oracle.tests_performed,
        max_tests_per_item=per_item,
        max_test_size=oracle.max_query_size_seen,
    )


def _batch(groups: list[np.ndarray], oracle: TestOracle) -> np.ndarray:
    if not groups:
        return np.zeros(0, dtype=bool)
    members = np.concatenate(groups)
    sizes = np.array([g.size for g in groups], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(sizes[:-1])])
    return oracle.query_groups(members, starts)


def adaptive_delta(n: int, k: int, delta: int, oracle: TestOracle) -> AdaptiveReport:
    """Staged splitting with at most ``delta`` tests per item, zero error.

    Stage 0 pools the items into balanced groups of roughly
    (n/k)**((delta-1)/delta); each later stage splits every surviving
    group into at most ceil(group_target**(1/(delta-1))) balanced parts
    and keeps the positives. After delta - 1 splits the survivors are
    singletons and are declared infected. ``k`` may be an upper bound on
    the true count; recovery stays exact.
    """
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n (got n={n}, k={k})")
    if delta < 2:
        raise ParameterError(f"delta must be >= 2 (got delta={delta})")
    if oracle.truth.n != n:
        raise ParameterError(f"oracle truth has {oracle.truth.n} items, expected {n}")

    group_target = max(1, round((n / k) ** ((delta - 1) / delta)))
    split_fanout = math.ceil(group_target ** (1.0 / (delta - 1)))
    stage0_groups = -(-n // group_target)

    groups = np.array_split(np.arange(n, dtype=np.int64), stage0_groups)
    answers = _batch(groups, oracle)
    survivors = [g for g, positive in zip(groups, answers) if positive]

    for _ in range(delta - 1):
        parts: list[np.ndarray] = []
        for group in survivors:
            parts.extend(np.array_split(group, min(group.size, split_fanout)))
        if not parts:
            break
        answers = _batch(parts, oracle)
        survivors = [g for g, positive in zip(parts, answers) if positive]

    if any(g.size != 1 for g in survivors):
        raise IntegrityError("staged splitting finished with a non-singleton group")
    declared = frozenset(int(g[0]) for g in survivors)
    return _report(oracle, declared)


def binary_splitting(group: Sequence[int] | np.ndarray, oracle: TestOracle) -> int:
    """Isolate one infected item from a group known to contain one.

    Repeatedly tests the lower-index half (sizes round down) of the
    current candidates, keeping the tested half on a positive answer and
    the complement otherwise; at most ceil(log2(len(group))) tests. An
    empty group means the caller's premise was contradicted, which only
    an inconsistent oracle can produce.
    """
    current = np.asarray(group, dtype=np.int64)
    if current.size == 0:
        raise IntegrityError(
            "binary splitting on an empty group: oracle answers are inconsistent")
    while current.size > 1:
        half = current[: current.size // 2]
        if oracle.query(half):
            current = half
        else:
            current = current[current.size // 2:]
    return int(current[0])


def adaptive_gamma(n: int, gamma: int, oracle: TestOracle,
                   rng: np.random.Generator | None = None) -> AdaptiveReport:
    """Group scan with pools of at most ``gamma`` items, zero error.

    Items are split into groups of ``gamma`` (the final group may be
    short and is tested as-is), randomly when a generator is supplied.
    While a group tests positive, one infected member is isolated by
    halving and removed; a group that empties is not retested.
    """
    if n < 1 or gamma < 1:
        raise ParameterError(f"need n >= 1 and gamma >= 1 (got n={n}, gamma={gamma})")
    if oracle.truth.n != n:
        raise ParameterError(f"oracle truth has {oracle.truth.n} items, expected {n}")

    order = rng.permutation(n).astype(np.int64) if rng is not None \
        else np.arange(n, dtype=np.int64)
    groups = [order[i:i + gamma] for i in range(0, n, gamma)]
    first_answers = _batch(groups, oracle)

    declared: list[int] = []
    for group, positive in zip(groups, first_answers):
        remaining = group
        while positive:
            found = binary_splitting(remaining, oracle)
            declared.append(found)
            remaining = remaining[remaining != found]
            if remaining.size == 0:
                break
            positive = oracle.query(remaining)
    return _report(oracle, frozenset(declared))
