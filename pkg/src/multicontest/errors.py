"""Exception hierarchy shared by every module."""


class ContestError(ValueError):
    """Base class for all errors raised by multicontest."""


class DomainError(ContestError):
    """An argument lies outside the domain of the operation."""


class StructuralError(ContestError):
    """A prize rule has the wrong shape (length does not match n + 1)."""


class InfeasibleRuleError(ContestError):
    """A prize rule violates non-negativity, monotonicity or budget balance."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"infeasible prize rule: {lines}")


class DegenerateRuleError(ContestError):
    """The effective prize spread is zero where a positive value is required."""


class EnumerationBudgetError(ContestError):
    """A brute-force enumeration would exceed its rule budget."""


class MonotonicityError(AssertionError):
    """A comparative-statics sweep produced a decreasing threshold."""
