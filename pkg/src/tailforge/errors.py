"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid input data, or parameters outside an operation's domain."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget without converging.

    The best iterate found so far is attached as ``best`` when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
