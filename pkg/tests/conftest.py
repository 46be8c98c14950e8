"""Shared fixtures and random-instance samplers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from pooltest.design import (
    DesignKind,
    PoolingDesign,
    build_delta_regular,
    build_gamma_config,
    build_gamma_matching,
    nearest_config_m,
    nearest_matching_m,
)
from pooltest.model import draw_uniform_k_sparse


def random_design(rng: np.random.Generator, max_n: int = 50) -> PoolingDesign:
    """Draw a design of a random kind with small random parameters.

    Covers all three construction families.  Parameters are rejected and
    redrawn when the family's feasibility constraints cannot be met, so the
    function always returns.
    """
    while True:
        kind = int(rng.integers(0, 3))
        if kind == 0:
            n = int(rng.integers(1, max_n + 1))
            m = int(rng.integers(1, 2 * n + 2))
            delta = int(rng.integers(1, 5))
            return build_delta_regular(n, m, delta, rng)
        if kind == 1:
            n = int(rng.integers(2, max_n + 1))
            gamma = int(rng.integers(2, 9))
            m = nearest_config_m(n, gamma, int(rng.integers(1, 2 * n + 2)))
            # reject parameter draws whose snapped m implies a huge per-item degree
            if m * gamma // n > 6 * gamma:
                continue
            return build_gamma_config(n, m, gamma, rng)
        n = int(rng.integers(3, max_n + 1))
        gamma = int(rng.integers(2, 9))
        m = nearest_matching_m(n, gamma, int(rng.integers(1, n + 1)))
        if m is None:
            continue
        return build_gamma_matching(n, m, gamma, rng)


def make_design(n: int, tests: list[list[int]]) -> PoolingDesign:
    """Build a design directly from explicit per-test member lists.

    Entries may repeat to create multi-edges; empty lists create empty
    tests. The kind tag is irrelevant for outcome and decoding logic.
    """
    edge_items = [x for members in tests for x in members]
    edge_tests = [a for a, members in enumerate(tests) for _ in members]
    return PoolingDesign(
        n=n,
        m=len(tests),
        kind=DesignKind.DELTA_REGULAR,
        edge_items=np.asarray(edge_items, dtype=np.int64),
        edge_tests=np.asarray(edge_tests, dtype=np.int64),
    )


def infection(status: list[int]):
    """Infection vector from a 0/1 list."""
    from pooltest.model import InfectionVector

    return InfectionVector.from_status(np.asarray(status, dtype=bool))


def random_instance(
    rng: np.random.Generator, max_n: int = 50, max_k: int | None = None
):
    """Draw a (design, infection vector) pair with k <= max_k infected."""
    design = random_design(rng, max_n)
    cap = design.n if max_k is None else min(max_k, design.n)
    k = int(rng.integers(0, cap + 1))
    sigma = draw_uniform_k_sparse(design.n, k, rng)
    return design, sigma


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
