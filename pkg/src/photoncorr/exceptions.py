"""Exception types raised by the solvers."""


class PhotonCorrError(Exception):
    """Base class for errors raised by this package."""


class IntegrationError(PhotonCorrError):
    """Numerical integration produced non-finite or unphysical values."""

    def __init__(self, operation: str, message: str):
        self.operation = operation
        super().__init__(f"{operation}: {message}")


class ConvergenceError(PhotonCorrError):
    """A quantity that should have settled did not settle on the grid."""

    def __init__(self, operation: str, message: str):
        self.operation = operation
        super().__init__(f"{operation}: {message}")
