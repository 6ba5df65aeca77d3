class ChronolineError(ValueError):
    """Raised when an input violates a documented precondition or invariant.

    The CLI maps this to exit code 4; plain I/O failures stay OSError (exit 3).
    """
