"""
Exception hierarchy for the matrix completion toolkit
"""

from typing import Optional


class MatrixCompletionError(Exception):
    """Base class for every error raised by this package"""


class NumericalError(MatrixCompletionError):
    """A computation produced or received values it cannot work with"""


class NonFiniteMatrixError(NumericalError, ValueError):
    """Matrix contains NaN or Inf entries"""


class NonSmoothPointError(NumericalError, ValueError):
    """TL1 gradient requested where singular values repeat or vanish"""


class DivergenceError(NumericalError):
    """ADMM iterate stopped being finite"""

    def __init__(self, iteration: int, message: Optional[str] = None):
        self.iteration = iteration
        super().__init__(message or f"Solver diverged at iteration {iteration}")


class InvalidScenarioError(MatrixCompletionError, ValueError):
    """Scenario parameters cannot produce a sampling design"""


class DegenerateSignalError(MatrixCompletionError, ValueError):
    """Noise level is undefined because the observed signal is identically zero"""


class DatasetError(MatrixCompletionError):
    """Base class for rating dataset problems"""


class DatasetParseError(DatasetError, ValueError):
    """Malformed line or row in a dataset file"""

    def __init__(self, path, line_number: int, reason: str):
        self.path = str(path)
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{self.path}: line {line_number}: {reason}")


class DatasetValidationError(DatasetError, ValueError):
    """Parsed values violate the dataset contract"""


class MatrixFileError(MatrixCompletionError, ValueError):
    """Matrix or observation file does not match its declared header"""
