"""Decoders for noiseless pooled outcomes.

The plain-elimination decoder clears everyone who appears in a negative
test and declares the remaining tested individuals infected, so it can
only err with false positives. The definite-defectives decoder keeps
only individuals that are the sole surviving distinct member of some
positive test, so it can only err with false negatives. Exhaustive
small-instance routines count how many equally sparse vectors explain
the outcomes and evaluate the exact success probability of the optimal
decoder; they serve as oracles for the randomized experiments.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .design import PoolingDesign
from .errors import CapacityError, ParameterError
from .model import Classification, OutcomeVector, compute_outcomes, draw_uniform_k_sparse

_ENUMERATION_MAX_N = 30
_ENUMERATION_MAX_SUBSETS = 10_000_000


class Algorithm(enum.Enum):
    COMP = "comp"
    DD = "dd"
    BRUTE_FORCE_OPTIMAL = "brute-force-optimal"


@dataclass(frozen=True)
class DecodeResult:
    declared_infected: frozenset[int]
    algorithm: Algorithm


def _check_lengths(design: PoolingDesign, outcomes: OutcomeVector) -> None:
    if outcomes.m != design.m:
        raise ParameterError(
            f"outcome vector length {outcomes.m} does not match design m={design.m}")


def comp(design: PoolingDesign, outcomes: OutcomeVector) -> DecodeResult:
    """Declare infected every tested individual that no negative test clears.

    Untested individuals are declared uninfected.
    """
    _check_lengths(design, outcomes)
    results = outcomes.results
    tested = np.zeros(design.n, dtype=bool)
    tested[design.edge_items] = True
    in_negative = np.zeros(design.n, dtype=bool)
    in_negative[design.edge_items[~results[design.edge_tests]]] = True
    declared = tested & ~in_negative
    return DecodeResult(
        declared_infected=frozenset(int(x) for x in np.flatnonzero(declared)),
        algorithm=Algorithm.COMP,
    )


def dd(design: PoolingDesign, outcomes: OutcomeVector) -> DecodeResult:
    """Two passes: clear everyone in a negative test, then declare each
    individual that remains the sole distinct member of some positive test.

    Sole membership is judged on distinct members, so an individual
    occurring several times in an otherwise-cleared positive test is
    still declared. Everyone else, including untested individuals, is
    declared uninfected.
    """
    _check_lengths(design, outcomes)
    results = outcomes.results
    dt, di = design.distinct_pairs
    in_negative = np.zeros(design.n, dtype=bool)
    in_negative[di[~results[dt]]] = True
    surviving = ~in_negative[di] & results[dt]
    survivors_per_test = np.bincount(dt[surviving], minlength=design.m)
    sole = surviving & (survivors_per_test[dt] == 1)
    return DecodeResult(
        declared_infected=frozenset(int(x) for x in di[sole]),
        algorithm=Algorithm.DD,
    )


def dd_success_predicate(classification: Classification) -> bool:
    """Exact recovery by the definite-defectives decoder happens iff every
    infected individual is provably infected. Vacuously true when k = 0."""
    return classification.v1_minus_minus == classification.infected()


def _item_masks(design: PoolingDesign) -> list[int]:
    masks = [0] * design.n
    dt, di = design.distinct_pairs
    for t, i in zip(dt.tolist(), di.tolist()):
        masks[i] |= 1 << t
    return masks


def _guard_enumeration(n: int, k: int) -> None:
    if not 0 <= k <= n:
        raise ParameterError(f"need 0 <= k <= n (got n={n}, k={k})")
    if n > _ENUMERATION_MAX_N:
        raise CapacityError(
            f"exact enumeration is limited to n <= {_ENUMERATION_MAX_N} (got n={n})")
    if math.comb(n, k) > _ENUMERATION_MAX_SUBSETS:
        raise CapacityError(
            f"exact enumeration is limited to C(n, k) <= {_ENUMERATION_MAX_SUBSETS} "
            f"(got C({n}, {k}) = {math.comb(n, k)})")


def _count_consistent_mask(masks: list[int], pos_mask: int, full_mask: int, k: int) -> int:
    # an item touching any negative test is immediately ruled out
    neg_mask = full_mask ^ pos_mask
    candidates = [mask for mask in masks if mask & neg_mask == 0]
    if len(candidates) < k:
        return 0
    count = 0
    for combo in itertools.combinations(candidates, k):
        acc = 0
        for mask in combo:
            acc |= mask
        if acc == pos_mask:
            count += 1
    return count


def count_consistent(design: PoolingDesign, outcomes: OutcomeVector, k: int) -> int:
    """Exact number of k-sparse infection vectors producing these outcomes.

    Enumerates k-subsets in lexicographic order, pruning every branch
    that touches a negative test.
    """
    _check_lengths(design, outcomes)
    _guard_enumeration(design.n, k)
    pos_mask = 0
    for t in np.flatnonzero(outcomes.results).tolist():
        pos_mask |= 1 << t
    full_mask = (1 << design.m) - 1
    return _count_consistent_mask(_item_masks(design), pos_mask, full_mask, k)


def brute_force_optimal_success(design: PoolingDesign, k: int) -> float:
    """Exact success probability of the optimal decoder under a uniform
    k-sparse prior: the mean over all true vectors of one over the number
    of equally sparse vectors consistent with the observed outcomes.

    Double enumeration; intended for small oracle instances only.
    """
    _guard_enumeration(design.n, k)
    masks = _item_masks(design)
    full_mask = (1 << design.m) - 1
    total = 0.0
    for sigma in itertools.combinations(range(design.n), k):
        pos_mask = 0
        for x in sigma:
            pos_mask |= masks[x]
        explanations = _count_consistent_mask(masks, pos_mask, full_mask, k)
        total += 1.0 / explanations
    return total / math.comb(design.n, k)


def empirical_success_rate(design: PoolingDesign, k: int, decoder, trials: int,
                           rng: np.random.Generator) -> float:
    """Monte Carlo exact-recovery rate of a decoder on one fixed design."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1 (got {trials})")
    successes = 0
    for _ in range(trials):
        sigma = draw_uniform_k_sparse(design.n, k, rng)
        result = decoder(design, compute_outcomes(design, sigma))
        successes += result.declared_infected == sigma.infected_set()
    return successes / trials
