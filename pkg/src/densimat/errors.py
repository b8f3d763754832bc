class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class ResolutionError(ContractViolation):
    """A profile width is too small for the grid spacing."""


class NumericalDivergence(RuntimeError):
    """A time integration blew up (field norm above the abort threshold)."""


class ConfigError(ValueError):
    """A scenario configuration failed validation."""
