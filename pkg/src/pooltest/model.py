"""Infection vectors, pooled outcomes, and the four-way individual classification.

A test is positive iff at least one distinct member is infected; empty
tests are negative. The classification splits individuals by what the
outcomes alone can reveal about them: uninfected individuals are either
exposed by some negative test or disguised (every test positive), and
infected individuals are either provably infected (some test where every
other distinct member is exposed as uninfected), disguised (every test
contains a second distinct infected member), or neither. An item that
occurs several times in one test never hides itself: the "other members"
of a test are its distinct members minus that item.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import DesignKind, PoolingDesign, build_delta_regular, build_gamma_auto, \
    build_gamma_config, build_gamma_matching
from .errors import IntegrityError, ParameterError


@dataclass(frozen=True, eq=False)
class InfectionVector:
    """Boolean infection status per item with the count of ones cached."""

    status: np.ndarray
    k: int

    def __post_init__(self) -> None:
        self.status.setflags(write=False)

    @staticmethod
    def from_status(status: np.ndarray) -> "InfectionVector":
        status = np.asarray(status, dtype=bool)
        return InfectionVector(status=status, k=int(status.sum()))

    @property
    def n(self) -> int:
        return int(self.status.size)

    def infected_set(self) -> frozenset[int]:
        return frozenset(int(x) for x in np.flatnonzero(self.status))


@dataclass(frozen=True, eq=False)
class OutcomeVector:
    """Boolean result per test."""

    results: np.ndarray

    def __post_init__(self) -> None:
        self.results.setflags(write=False)

    @property
    def m(self) -> int:
        return int(self.results.size)


@dataclass(frozen=True)
class Classification:
    """The four individual types, plus infected items matching neither
    the provable nor the disguised pattern.

    Untested individuals satisfy the all-tests conditions vacuously and
    land in ``v0_plus`` or ``v1_plus``; ``untested_count`` reports how
    many there were.
    """

    v0_minus: frozenset[int]
    v0_plus: frozenset[int]
    v1_minus_minus: frozenset[int]
    v1_plus: frozenset[int]
    v1_other: frozenset[int]
    untested_count: int

    def infected(self) -> frozenset[int]:
        return self.v1_minus_minus | self.v1_plus | self.v1_other


def draw_uniform_k_sparse(n: int, k: int, rng: np.random.Generator) -> InfectionVector:
    """Uniform draw over all k-subsets of the n items."""
    if not 0 <= k <= n:
        raise ParameterError(f"need 0 <= k <= n (got n={n}, k={k})")
    status = np.zeros(n, dtype=bool)
    if k:
        status[rng.choice(n, size=k, replace=False)] = True
    return InfectionVector(status=status, k=k)


def bernoulli_star_p(n: int, k: int) -> float:
    """Per-item infection probability (k - sqrt(k) * ln n) / n."""
    if n < 1 or k < 0:
        raise ParameterError(f"need n >= 1 and k >= 0 (got n={n}, k={k})")
    return (k - math.sqrt(k) * math.log(n)) / n


def draw_bernoulli_star(n: int, k: int, rng: np.random.Generator) -> InfectionVector:
    """I.i.d. infection draw at the deflated rate; k is recomputed from the draw."""
    p = bernoulli_star_p(n, k)
    if not 0.0 < p < 1.0:
        raise ParameterError(
            f"deflated infection probability {p!r} is outside (0, 1) for n={n}, k={k}")
    return InfectionVector.from_status(rng.random(n) < p)


def compute_outcomes(design: PoolingDesign, sigma: InfectionVector) -> OutcomeVector:
    """OR each test over its distinct members; empty tests are negative."""
    if sigma.n != design.n:
        raise ParameterError(
            f"infection vector length {sigma.n} does not match design n={design.n}")
    hits = design.edge_tests[sigma.status[design.edge_items]] if design.edge_count \
        else np.empty(0, dtype=np.int64)
    results = np.bincount(hits, minlength=design.m) > 0
    return OutcomeVector(results=results)


def classify(design: PoolingDesign, sigma: InfectionVector,
             outcomes: OutcomeVector) -> Classification:
    """Assign every individual to its type using the literal definitions.

    The triple must be consistent: recomputing outcomes from (design,
    sigma) has to reproduce ``outcomes`` exactly, else IntegrityError.
    """
    if outcomes.m != design.m:
        raise ParameterError(
            f"outcome vector length {outcomes.m} does not match design m={design.m}")
    if not np.array_equal(compute_outcomes(design, sigma).results, outcomes.results):
        raise IntegrityError("outcomes are inconsistent with the design and infection vector")

    n, m = design.n, design.m
    status = sigma.status
    results = outcomes.results
    dt, di = design.distinct_pairs

    tested = np.zeros(n, dtype=bool)
    tested[di] = True
    in_negative = np.zeros(n, dtype=bool)
    in_negative[di[~results[dt]]] = True

    v0_minus = ~status & in_negative
    v0_plus = ~status & ~in_negative

    # per-test distinct counts: infected members, and members not exposed by a negative test
    infected_members = np.bincount(dt[status[di]], minlength=m)
    unexposed_members = np.bincount(dt[~v0_minus[di]], minlength=m)

    provable = np.zeros(n, dtype=bool)
    witness = status[di] & (unexposed_members[dt] == 1)
    provable[di[witness]] = True

    min_infected_seen = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(min_infected_seen, di, infected_members[dt])
    v1_plus = status & (min_infected_seen >= 2)

    v1_other = status & ~provable & ~v1_plus

    def to_set(mask: np.ndarray) -> frozenset[int]:
        return frozenset(int(x) for x in np.flatnonzero(mask))

    return Classification(
        v0_minus=to_set(v0_minus),
        v0_plus=to_set(v0_plus),
        v1_minus_minus=to_set(provable),
        v1_plus=to_set(v1_plus),
        v1_other=to_set(v1_other),
        untested_count=int((~tested).sum()),
    )


# ── instance debug dumps ────────────────────────────────────────────────
#
# A failing case is reproduced from parameters plus one seed: the design
# builder and the uniform infection draw consume a fresh generator in
# that order. The format is line-oriented key=value text.

_DUMP_KEYS = ("kind", "n", "m", "k", "seed", "delta", "gamma", "theta")


def save_instance(path: str, *, kind: str, n: int, m: int, k: int, seed: int,
                  delta: int | None = None, gamma: int | None = None,
                  theta: float | None = None) -> None:
    values = {"kind": kind, "n": n, "m": m, "k": k, "seed": seed,
              "delta": delta, "gamma": gamma, "theta": theta}
    lines = [f"{key}={values[key]}" for key in _DUMP_KEYS if values[key] is not None]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path: str) -> tuple[PoolingDesign, InfectionVector, dict]:
    """Rebuild the (design, infection vector) pair recorded in a debug dump."""
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"malformed dump line {line!r} in {path}")
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
    try:
        kind = raw["kind"]
        n, m, k, seed = (int(raw[key]) for key in ("n", "m", "k", "seed"))
    except KeyError as missing:
        raise ParameterError(f"dump {path} is missing required key {missing}") from None
    except ValueError as bad:
        raise ParameterError(f"dump {path} has a non-integer value: {bad}") from None
    rng = np.random.default_rng(seed)
    if kind == DesignKind.DELTA_REGULAR.value:
        design = build_delta_regular(n, m, int(raw["delta"]), rng)
    elif kind == DesignKind.GAMMA_CONFIG.value:
        design = build_gamma_config(n, m, int(raw["gamma"]), rng)
    elif kind == DesignKind.GAMMA_MATCHING.value:
        design = build_gamma_matching(n, m, int(raw["gamma"]), rng)
    elif kind == "gamma-auto":
        design = build_gamma_auto(n, m, int(raw["gamma"]), float(raw["theta"]), rng)
    else:
        raise ParameterError(f"unknown design kind {kind!r} in {path}")
    sigma = draw_uniform_k_sparse(n, k, rng)
    meta = {"kind": kind, "n": n, "m": m, "k": k, "seed": seed}
    for key in ("delta", "gamma", "theta"):
        if key in raw:
            meta[key] = float(raw[key]) if key == "theta" else int(raw[key])
    return design, sigma, meta
