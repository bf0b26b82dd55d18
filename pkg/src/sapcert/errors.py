"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative factorization exhausts its sweep budget."""
