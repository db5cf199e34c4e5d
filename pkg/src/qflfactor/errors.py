"""Exception hierarchy shared across the pipeline."""


class FactoringError(Exception):
    """Base class for every error raised by qflfactor."""


class EvenInput(FactoringError, ValueError):
    pass


class TooSmall(FactoringError, ValueError):
    pass


class InconsistentColumn(FactoringError):
    pass


class Unsatisfiable(FactoringError):
    """The clause system has no solution (usually: wrong bit-length candidate)."""


class TooLarge(FactoringError):
    pass


class UnknownQubit(FactoringError, IndexError):
    pass


class ParseError(FactoringError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ShapeMismatch(FactoringError, ValueError):
    pass


class TooManyVariables(FactoringError):
    pass


class QubitReuse(FactoringError, ValueError):
    pass


class CapacityExceeded(FactoringError):
    pass


class ZeroProbability(FactoringError):
    pass


class NoValidFactors(FactoringError):
    pass


class NotConverged(FactoringError):
    """Raised by the variational optimizer; carries the best state reached."""

    def __init__(self, message, angles=None, readout=None, history=None):
        super().__init__(message)
        self.angles = angles
        self.readout = readout
        self.history = history
