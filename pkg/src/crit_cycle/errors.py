class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class IntegrityError(RuntimeError):
    """A numerical invariant was violated during integration."""


class CapacityError(ValueError):
    """Requested size exceeds a documented implementation ceiling."""
