"""Shared exception types."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class DomainError(ValidationError):
    """Evaluation requested outside the domain of a closed-form solution.

    Carries ``blow_up_time`` when the domain boundary is a blow-up time.
    """

    def __init__(self, message, blow_up_time=None):
        super().__init__(message)
        self.blow_up_time = blow_up_time


class IntegrationError(RuntimeError):
    """Time integration hit a non-finite state.  Carries the last valid node."""

    def __init__(self, message, last_node=None):
        super().__init__(message)
        self.last_node = last_node
