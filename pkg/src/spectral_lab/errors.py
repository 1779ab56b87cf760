"""Exception hierarchy shared by every module."""


class SpectralLabError(Exception):
    """Base class. ``module`` names the subsystem that raised."""

    module = "spectral_lab"

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module


class DomainError(SpectralLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class EmptySpectrumError(DomainError):
    pass


class CutoffError(SpectralLabError):
    """A materialized spectrum does not reach far enough for the request.

    ``required`` carries the cutoff that would have been sufficient.
    """

    def __init__(self, message, required=None, module=None):
        super().__init__(message, module=module)
        self.required = required


class NumericRangeError(SpectralLabError, OverflowError):
    pass


class BudgetError(SpectralLabError, MemoryError):
    pass


class ConvergenceError(SpectralLabError, ArithmeticError):
    """Extrapolation or series did not converge; ``table`` holds diagnostics."""

    def __init__(self, message, table=None, module=None):
        super().__init__(message, module=module)
        self.table = table


class DescriptorError(SpectralLabError, ValueError):
    """Unparsable operator descriptor."""
