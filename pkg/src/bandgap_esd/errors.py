"""Exception types shared across the package."""


class InvalidParameters(ValueError):
    """Raised when an operation that requires valid inputs receives invalid ones."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DomainError(ValueError):
    """A closed-form expression has no real value for the given inputs."""


class StiffnessError(RuntimeError):
    """Adaptive step size fell below the allowed floor."""

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params
