"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its tolerance."""
