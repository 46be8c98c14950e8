"""Tests for the elimination decoders and the exhaustive small-instance oracles."""

import itertools
import math

import numpy as np
import pytest

from pooltest.decode import (
    Algorithm,
    brute_force_optimal_success,
    comp,
    count_consistent,
    dd,
    dd_success_predicate,
    empirical_success_rate,
)
from pooltest.errors import CapacityError, ParameterError
from pooltest.model import classify, compute_outcomes, draw_uniform_k_sparse

from conftest import infection, make_design, random_instance


def outcome_pattern_count(design, k):
    """Number of distinct outcome vectors over all k-sparse truths.

    Independent identity for the optimal decoder's success probability:
    the per-truth success chances 1/Z sum to exactly 1 within each group
    of truths sharing an outcome pattern.
    """
    patterns = set()
    for combo in itertools.combinations(range(design.n), k):
        status = [0] * design.n
        for x in combo:
            status[x] = 1
        out = compute_outcomes(design, infection(status))
        patterns.add(tuple(out.results.tolist()))
    return len(patterns)


# ---------------------------------------------------------------------------
# plain elimination decoder


def test_comp_all_negative_declares_nothing():
    design = make_design(4, [[0, 1], [2, 3]])
    out = compute_outcomes(design, infection([0, 0, 0, 0]))
    assert comp(design, out).declared_infected == frozenset()


def test_comp_keeps_everyone_not_cleared():
    design = make_design(4, [[0, 1], [2, 3]])
    out = compute_outcomes(design, infection([1, 0, 0, 0]))
    result = comp(design, out)
    assert result.declared_infected == {0, 1}
    assert result.algorithm is Algorithm.COMP


def test_comp_ignores_untested_items():
    design = make_design(3, [[0, 1]])
    out = compute_outcomes(design, infection([1, 0, 0]))
    assert comp(design, out).declared_infected == {0, 1}


def test_comp_never_misses_an_infection():
    rng = np.random.default_rng(8)
    for _ in range(300):
        design, sigma = random_instance(rng, max_n=40)
        out = compute_outcomes(design, sigma)
        declared = comp(design, out).declared_infected
        tested_infected = sigma.infected_set() & {
            int(x) for x in np.flatnonzero(design.item_degrees)
        }
        assert tested_infected <= declared


# ---------------------------------------------------------------------------
# definite-defectives decoder


def test_dd_declares_sole_survivor():
    design = make_design(3, [[0, 1], [1, 2], [0]])
    out = compute_outcomes(design, infection([1, 0, 0]))
    result = dd(design, out)
    assert result.declared_infected == {0}
    assert result.algorithm is Algorithm.DD


def test_dd_gives_up_without_a_witness_test():
    design = make_design(4, [[0, 1], [2, 3]])
    out = compute_outcomes(design, infection([1, 0, 0, 0]))
    assert dd(design, out).declared_infected == frozenset()


def test_dd_all_negative_declares_nothing():
    design = make_design(4, [[0, 1], [2, 3]])
    out = compute_outcomes(design, infection([0, 0, 0, 0]))
    assert dd(design, out).declared_infected == frozenset()


def test_dd_multi_edge_counts_as_one_member():
    # after the negative test clears item 1, item 0 is the only distinct
    # member left in the positive test despite its double edge
    design = make_design(2, [[0, 0, 1], [1]])
    out = compute_outcomes(design, infection([1, 0]))
    assert dd(design, out).declared_infected == {0}


def test_dd_success_predicate_cases():
    witnessed = make_design(3, [[0, 1], [1, 2], [0]])
    sigma = infection([1, 0, 0])
    got = classify(witnessed, sigma, compute_outcomes(witnessed, sigma))
    assert dd_success_predicate(got)

    disguised = make_design(4, [[0, 1], [2, 3]])
    sigma = infection([1, 0, 0, 0])
    got = classify(disguised, sigma, compute_outcomes(disguised, sigma))
    assert not dd_success_predicate(got)

    nobody = infection([0, 0, 0, 0])
    got = classify(disguised, nobody, compute_outcomes(disguised, nobody))
    assert dd_success_predicate(got)


# ---------------------------------------------------------------------------
# exhaustive counting oracles


def test_count_consistent_hand_cases():
    design = make_design(4, [[0, 1], [2, 3]])
    out = compute_outcomes(design, infection([1, 0, 0, 0]))
    assert count_consistent(design, out, 1) == 2

    untested = make_design(6, [])
    out = compute_outcomes(untested, infection([0] * 6))
    assert count_consistent(untested, out, 2) == math.comb(6, 2)


def test_count_consistent_truth_always_counts():
    rng = np.random.default_rng(17)
    for _ in range(200):
        design, sigma = random_instance(rng, max_n=12, max_k=3)
        out = compute_outcomes(design, sigma)
        assert count_consistent(design, out, sigma.k) >= 1


def test_enumeration_guards():
    big = make_design(31, [[0]])
    out = compute_outcomes(big, infection([0] * 31))
    with pytest.raises(CapacityError):
        count_consistent(big, out, 1)

    wide = make_design(30, [[0]])
    out = compute_outcomes(wide, infection([0] * 30))
    with pytest.raises(CapacityError):
        count_consistent(wide, out, 15)
    with pytest.raises(CapacityError):
        brute_force_optimal_success(wide, 15)

    with pytest.raises(ParameterError):
        count_consistent(wide, out, 31)


def test_brute_force_success_hand_cases():
    singletons = make_design(3, [[0], [1], [2]])
    assert brute_force_optimal_success(singletons, 1) == 1.0

    paired = make_design(4, [[0, 1], [2, 3]])
    assert brute_force_optimal_success(paired, 1) == 0.5

    blind = make_design(4, [])
    assert brute_force_optimal_success(blind, 1) == 0.25


def test_brute_force_success_equals_pattern_count_ratio():
    rng = np.random.default_rng(23)
    for _ in range(60):
        design, sigma = random_instance(rng, max_n=10, max_k=3)
        k = sigma.k
        expected = outcome_pattern_count(design, k) / math.comb(design.n, k)
        assert brute_force_optimal_success(design, k) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# corpus invariants


def test_decoders_sandwich_truth_on_large_corpus():
    rng = np.random.default_rng(1000)
    for _ in range(100_000):
        design, sigma = random_instance(rng, max_n=200)
        out = compute_outcomes(design, sigma)
        truth = sigma.infected_set()
        lo = dd(design, out).declared_infected
        hi = comp(design, out).declared_infected
        tested = {int(x) for x in np.flatnonzero(design.item_degrees)}
        assert lo <= truth
        assert truth & tested <= hi


def test_dd_exactness_matches_type_criterion():
    rng = np.random.default_rng(424242)
    for _ in range(10_000):
        design, sigma = random_instance(rng, max_n=50)
        out = compute_outcomes(design, sigma)
        exact = dd(design, out).declared_infected == sigma.infected_set()
        got = classify(design, sigma, out)
        assert exact == dd_success_predicate(got)


def test_consistent_count_dominates_type_product():
    rng = np.random.default_rng(5150)
    for _ in range(300):
        design, sigma = random_instance(rng, max_n=14, max_k=4)
        out = compute_outcomes(design, sigma)
        got = classify(design, sigma, out)
        bound = max(1, len(got.v1_plus) * len(got.v0_plus))
        assert count_consistent(design, out, sigma.k) >= bound


def test_optimal_success_dominates_both_decoders():
    rng = np.random.default_rng(61)
    trials = 10_000
    for design, k in [
        (make_design(8, [[0, 1, 2], [3, 4], [5, 6, 7], [0, 3, 5], [1, 4, 6]]), 2),
        (make_design(10, [[0, 1], [2, 3], [4, 5], [6, 7], [8, 9], [0, 2, 4]]), 1),
    ]:
        best = brute_force_optimal_success(design, k)
        for decoder in (dd, comp):
            rate = empirical_success_rate(design, k, decoder, trials, rng)
            se = math.sqrt(max(rate * (1 - rate), 1e-9) / trials)
            assert best >= rate - 3 * se


def test_empirical_rate_validates_trials():
    design = make_design(2, [[0], [1]])
    with pytest.raises(ParameterError):
        empirical_success_rate(design, 1, dd, 0, np.random.default_rng(0))
    assert empirical_success_rate(design, 1, dd, 50, np.random.default_rng(0)) == 1.0
