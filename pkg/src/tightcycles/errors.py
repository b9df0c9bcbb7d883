"""Shared exception types."""


class BudgetError(Exception):
    """An exact or exhaustive routine was asked to exceed its stated budget."""
