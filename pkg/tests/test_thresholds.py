"""Tests for the closed-form test-count landmarks and the counting bound."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pooltest.errors import ParameterError
from pooltest.thresholds import (
    delta_dd,
    m_ada_delta,
    m_ada_gamma,
    m_dd_delta,
    m_dd_gamma,
    m_inf_delta,
    m_inf_gamma,
    matching_bound_gamma,
    sparsity_ratio_floor,
    success_upper_bound,
    theta_of,
    threshold_set,
)


def rational_upper_bound(n, k, m, delta):
    """Exact integer-arithmetic evaluation of the counting bound."""
    cutoff = min(delta * k, m)
    numerator = sum(math.comb(m, i) for i in range(cutoff + 1))
    return min(Fraction(1), Fraction(numerator, math.comb(n, k)))


# ---------------------------------------------------------------------------
# sparsity exponent helpers


def test_theta_of_values_and_domain():
    assert theta_of(100, 10) == pytest.approx(0.5)
    assert theta_of(100, 3) == pytest.approx(0.23856062735983122, rel=1e-15)
    with pytest.raises(ParameterError):
        theta_of(1, 1)
    with pytest.raises(ParameterError):
        theta_of(100, 0)


def test_sparsity_ratio_floor_snaps_boundaries():
    # theta = r/(1+r) puts the ratio exactly at integer r; floating-point
    # round-off must not drop the floor to r-1
    for r in (1, 2, 3, 7):
        assert sparsity_ratio_floor(r / (1 + r)) == r
    assert sparsity_ratio_floor(0.4) == 0
    assert sparsity_ratio_floor(0.749999) == 2
    with pytest.raises(ParameterError):
        sparsity_ratio_floor(0.0)
    with pytest.raises(ParameterError):
        sparsity_ratio_floor(1.0)


def test_delta_dd_values():
    assert delta_dd(0.75) == 4
    assert delta_dd(0.5) == 2
    assert delta_dd(0.3) == 2
    assert delta_dd(2 / 3) == 3


# ---------------------------------------------------------------------------
# tests-per-item landmarks


def test_dd_transition_reference_point():
    # 4 * 1000 * (10**6 / 10**3) ** (1/4) evaluated by hand
    expected = 4000.0 * 1000.0 ** 0.25
    got = m_dd_delta(10**6, 10**3, 4)
    assert got == pytest.approx(expected, rel=1e-15)
    assert abs(got - 22493.66) <= 0.01


def test_dd_transition_sparse_regime():
    # theta = 0.25: the spread term dominates the dense term
    assert m_dd_delta(10**8, 100, 3) == pytest.approx(30_000.0, rel=1e-12)
    dense_only = 3 * 100 * 100 ** (1 / 3)
    assert m_dd_delta(10**8, 100, 3) > dense_only


def test_floor_matches_transition_at_central_exponent():
    # at theta = 1/2 the two max-terms agree exactly
    spread = 4 * 10**3 * (10**6 / 10**3) ** 0.25
    dense = 4 * 10**3 * (10**3) ** 0.25
    assert spread == pytest.approx(dense, rel=1e-12)
    assert m_inf_delta(10**6, 10**3, 4) == pytest.approx(m_dd_delta(10**6, 10**3, 4),
                                                         rel=1e-12)


def test_floor_clips_at_population_size():
    # theta = 0.75, delta = 2: the dense term exceeds n, so the floor is n
    assert m_inf_delta(10**4, 10**3, 2) == 10**4.0


def test_floor_to_transition_ratio_is_e_in_sparse_regime():
    ratio = m_dd_delta(10**8, 100, 3) / m_inf_delta(10**8, 100, 3)
    assert ratio == pytest.approx(math.e, rel=1e-12)


def test_floor_never_exceeds_transition():
    import numpy as np

    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(2, 10**6))
        k = int(rng.integers(1, n))
        delta = int(rng.integers(1, 8))
        assert m_inf_delta(n, k, delta) <= m_dd_delta(n, k, delta) + 1e-9


def test_adaptive_delta_landmark():
    assert m_ada_delta(10**6, 10**3, 4) == pytest.approx(4000.0 * 1000.0 ** 0.25,
                                                         rel=1e-15)
    assert m_ada_delta(100, 100, 5) == 500.0
    assert m_ada_delta(10**4, 1, 2) == pytest.approx(2 * 10**2.0)


def test_delta_landmarks_validate_domain():
    for fn in (m_inf_delta, m_dd_delta):
        with pytest.raises(ParameterError):
            fn(10, 10, 2)
        with pytest.raises(ParameterError):
            fn(10, 0, 2)
        with pytest.raises(ParameterError):
            fn(10, 3, 0)
    with pytest.raises(ParameterError):
        m_ada_delta(10, 11, 2)


# ---------------------------------------------------------------------------
# test-size landmarks


def test_size_constrained_floor_by_regime():
    assert m_inf_gamma(1200, 5, 3, theta=0.6) == pytest.approx(2 * 1200 / 3)
    assert m_inf_gamma(1200, 5, 3, theta=0.75) == pytest.approx(4 * 1200 / 3)
    # sparse regime: the matching bound takes over
    assert m_inf_gamma(1200, 5, 3, theta=0.4) == pytest.approx(600.0)


def test_size_constrained_transition_and_matching_bound():
    assert m_dd_gamma(1200, 5, 3, theta=0.4) == pytest.approx(800.0)
    assert matching_bound_gamma(1200, 3) == pytest.approx(600.0)
    assert m_dd_gamma(1200, 5, 3, theta=0.6) == pytest.approx(800.0)
    assert m_dd_gamma(1200, 5, 3, theta=0.75) == pytest.approx(1600.0)


def test_adaptive_gamma_landmark():
    assert m_ada_gamma(10**4, 100, 16) == 1025.0
    assert m_ada_gamma(100, 5, 1) == 100.0
    assert m_ada_gamma(100, 0, 4) == 25.0
    with pytest.raises(ParameterError):
        m_ada_gamma(100, -1, 4)
    with pytest.raises(ParameterError):
        m_ada_gamma(100, 5, 0)


def test_threshold_set_bundles_requested_budgets():
    both = threshold_set(10**4, 100, delta=4, gamma=16)
    assert both.theta == pytest.approx(0.5)
    assert both.m_dd_delta == pytest.approx(m_dd_delta(10**4, 100, 4))
    assert both.m_ada_gamma == 1025.0
    assert both.delta_dd == 2

    delta_only = threshold_set(10**4, 100, delta=4)
    assert delta_only.m_inf_gamma is None
    assert delta_only.matching_bound_gamma is None
    gamma_only = threshold_set(10**4, 100, gamma=16)
    assert gamma_only.m_dd_delta is None


# ---------------------------------------------------------------------------
# counting bound


def test_counting_bound_hand_values():
    assert success_upper_bound(4, 1, 2, 2) == 1.0
    assert success_upper_bound(4, 1, 2, 1) == pytest.approx(0.75, rel=1e-12)
    assert success_upper_bound(9, 0, 5, 3) == 1.0


def test_counting_bound_domain():
    with pytest.raises(ParameterError):
        success_upper_bound(4, 5, 2, 1)
    with pytest.raises(ParameterError):
        success_upper_bound(4, 1, -1, 1)


def test_counting_bound_matches_exact_rationals():
    for n in range(1, 61, 7):
        for m in range(0, 61, 7):
            for k in {kk for kk in (0, 1, 2, 5, n // 2, n) if kk <= n}:
                for delta in (1, 2, 3):
                    want = float(rational_upper_bound(n, k, m, delta))
                    got = success_upper_bound(n, k, m, delta)
                    assert got == pytest.approx(want, rel=1e-10, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=80),
    k_frac=st.floats(min_value=0.0, max_value=1.0),
    m=st.integers(min_value=0, max_value=80),
    delta=st.integers(min_value=0, max_value=6),
)
def test_counting_bound_monotonicity(n, k_frac, m, delta):
    k = round(k_frac * n)
    base = success_upper_bound(n, k, m, delta)
    assert success_upper_bound(n, k, m + 1, delta) >= base - 1e-12
    assert success_upper_bound(n, k, m, delta + 1) >= base - 1e-12
    assert success_upper_bound(n + 1, k, m, delta) <= base + 1e-12
