class SymcoreError(Exception):
    pass


class DomainAssumptionError(SymcoreError):
    """Non-integer power of a base whose positivity is not registered."""


class NotInClassError(SymcoreError):
    """Result would leave the rational-exponential class (e.g. 1/(exp(x)+1))."""


class ResourceLimitError(SymcoreError):
    """Expansion exceeded the configured term cap."""


class EvaluationError(SymcoreError):
    pass
