"""Exception taxonomy shared across the library.

The CLI maps these onto exit codes: parameter problems (including
capacity guards) exit 2, internal integrity violations exit 1.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """Caller-supplied parameters are invalid or infeasible."""


class CapacityError(ParameterError):
    """An exact-enumeration routine was asked for more work than its guard allows."""


class IntegrityError(RuntimeError):
    """Internal consistency violated: inconsistent outcomes, oracle, or state."""


class BudgetError(IntegrityError):
    """An adaptive algorithm exceeded a testing budget the oracle enforces."""
