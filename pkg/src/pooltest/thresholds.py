"""Closed-form test-count thresholds and the counting upper bound.

For the tests-per-item budget ``delta`` the three landmarks are the
information-theoretic floor, the definite-defectives phase transition,
and the adaptive bound; the test-size budget ``gamma`` has matching
counterparts plus the sparse-regime matching-design bound 2n/(gamma+1).
Power expressions are evaluated through (n/k)**(1/delta) rather than
through the sparsity exponent, which keeps them exact when k is given
directly. Floors of theta/(1-theta) snap to the nearest integer within
1e-9 so boundary exponents are not lost to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

_SNAP_TOL = 1e-9


def theta_of(n: int, k: int) -> float:
    """Sparsity exponent ln k / ln n."""
    if n < 2 or k < 1:
        raise ParameterError(f"need n >= 2 and k >= 1 (got n={n}, k={k})")
    return math.log(k) / math.log(n)


def _floor_snapped(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) < _SNAP_TOL:
        return int(nearest)
    return math.floor(x)


def sparsity_ratio_floor(theta: float) -> int:
    """floor(theta / (1 - theta)) with the 1e-9 snap."""
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"theta must lie in (0, 1) (got theta={theta})")
    return _floor_snapped(theta / (1.0 - theta))


def delta_dd(theta: float) -> int:
    """Smallest tests-per-item budget at which the two-pass decoder is optimal."""
    return max(2, 1 + sparsity_ratio_floor(theta))


def _check_nk(n: int, k: int, *, allow_equal: bool) -> None:
    top = n if allow_equal else n - 1
    if not 1 <= k <= top:
        bound = "n" if allow_equal else "n - 1"
        raise ParameterError(f"need 1 <= k <= {bound} (got n={n}, k={k})")


def m_inf_delta(n: int, k: int, delta: int) -> float:
    """Information-theoretic floor for delta tests per item, clipped at n."""
    _check_nk(n, k, allow_equal=False)
    if delta < 1:
        raise ParameterError(f"delta must be >= 1 (got {delta})")
    spread = delta * k * (n / k) ** (1.0 / delta)
    dense = delta * k * k ** (1.0 / delta)
    return min(max(spread / math.e, dense), float(n))


def m_dd_delta(n: int, k: int, delta: int) -> float:
    """Exact-recovery phase transition of the two-pass decoder, delta tests per item."""
    _check_nk(n, k, allow_equal=False)
    if delta < 1:
        raise ParameterError(f"delta must be >= 1 (got {delta})")
    spread = delta * k * (n / k) ** (1.0 / delta)
    dense = delta * k * k ** (1.0 / delta)
    return max(spread, dense)


def m_ada_delta(n: int, k: int, delta: int) -> float:
    """Adaptive bound with delta tests per item."""
    _check_nk(n, k, allow_equal=True)
    if delta < 1:
        raise ParameterError(f"delta must be >= 1 (got {delta})")
    return delta * k * (n / k) ** (1.0 / delta)


def _resolve_theta(n: int, k: int, theta: float | None) -> float:
    return theta_of(n, k) if theta is None else theta


def matching_bound_gamma(n: int, gamma: int) -> float:
    """Test count at which the matching design succeeds in the sparse regime."""
    if n < 1 or gamma < 1:
        raise ParameterError(f"need n >= 1 and gamma >= 1 (got n={n}, gamma={gamma})")
    return 2.0 * n / (gamma + 1)


def m_inf_gamma(n: int, k: int, gamma: int, theta: float | None = None) -> float:
    """Universal floor for tests of size at most gamma."""
    if gamma < 1:
        raise ParameterError(f"gamma must be >= 1 (got {gamma})")
    th = _resolve_theta(n, k, theta)
    return max((1 + sparsity_ratio_floor(th)) * n / gamma, matching_bound_gamma(n, gamma))


def m_dd_gamma(n: int, k: int, gamma: int, theta: float | None = None) -> float:
    """Two-pass decoder transition on the test-size regular design.

    In the sparse regime theta < 1/2 the matching design needs only
    2n/(gamma+1); that value is reported separately by
    ``matching_bound_gamma``.
    """
    if gamma < 1:
        raise ParameterError(f"gamma must be >= 1 (got {gamma})")
    th = _resolve_theta(n, k, theta)
    return delta_dd(th) * n / gamma


def m_ada_gamma(n: int, k: int, gamma: int) -> float:
    """Adaptive bound with tests of size at most gamma."""
    if n < 1 or gamma < 1 or k < 0:
        raise ParameterError(f"need n >= 1, gamma >= 1, k >= 0 "
                             f"(got n={n}, k={k}, gamma={gamma})")
    return n / gamma + k * math.log2(gamma)


def _log_comb(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def success_upper_bound(n: int, k: int, m: int, delta: int) -> float:
    """Counting bound on any decoder's success probability when every item
    joins at most delta tests: sum_{i<=delta*k} C(m, i) / C(n, k), capped at 1.

    Evaluated in log space so large instances stay finite.
    """
    if n < 0 or m < 0 or delta < 0 or not 0 <= k <= n:
        raise ParameterError(
            f"need n >= k >= 0, m >= 0, delta >= 0 (got n={n}, k={k}, m={m}, delta={delta})")
    cutoff = min(delta * k, m)
    if cutoff >= m:
        log_numerator = m * math.log(2.0)
    else:
        logs = [_log_comb(m, i) for i in range(cutoff + 1)]
        peak = max(logs)
        log_numerator = peak + math.log(sum(math.exp(v - peak) for v in logs))
    return min(1.0, math.exp(log_numerator - _log_comb(n, k)))


@dataclass(frozen=True)
class ThresholdSet:
    """All landmark test counts for one (n, k) pair; fields for a budget
    that was not requested are None."""

    n: int
    k: int
    theta: float
    delta: int | None
    gamma: int | None
    m_inf_delta: float | None
    m_dd_delta: float | None
    m_ada_delta: float | None
    m_inf_gamma: float | None
    m_dd_gamma: float | None
    m_ada_gamma: float | None
    matching_bound_gamma: float | None
    delta_dd: int


def threshold_set(n: int, k: int, delta: int | None = None, gamma: int | None = None,
                  theta: float | None = None) -> ThresholdSet:
    th = _resolve_theta(n, k, theta)
    return ThresholdSet(
        n=n,
        k=k,
        theta=th,
        delta=delta,
        gamma=gamma,
        m_inf_delta=m_inf_delta(n, k, delta) if delta is not None else None,
        m_dd_delta=m_dd_delta(n, k, delta) if delta is not None else None,
        m_ada_delta=m_ada_delta(n, k, delta) if delta is not None else None,
        m_inf_gamma=m_inf_gamma(n, k, gamma, th) if gamma is not None else None,
        m_dd_gamma=m_dd_gamma(n, k, gamma, th) if gamma is not None else None,
        m_ada_gamma=m_ada_gamma(n, k, gamma) if gamma is not None else None,
        matching_bound_gamma=matching_bound_gamma(n, gamma) if gamma is not None else None,
        delta_dd=delta_dd(th),
    )
