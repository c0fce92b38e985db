"""
Error Types and CLI Exit Codes
"""
from typing import Optional


class CollageError(Exception):
    """Base class for all toolkit errors."""
    exit_code: int = 1


class UsageError(CollageError):
    """Invalid flag combination or command usage."""
    exit_code = 2


class ConfigError(CollageError):
    """Invalid model, training or run configuration."""
    exit_code = 2


class DimensionError(CollageError, ValueError):
    """Tensor shapes do not agree."""
    exit_code = 2


class DomainError(CollageError, ValueError):
    """Argument outside the domain of an operation (empty tensor, tiny image...)."""
    exit_code = 2


class ContractError(CollageError):
    """A caller broke an API precondition (e.g. backward from a non-scalar)."""
    exit_code = 2


class InputError(CollageError, ValueError):
    """Coordinates outside the declared domain of a model."""
    exit_code = 2


class DatasetIOError(CollageError, OSError):
    """Unreadable or unsupported dataset file."""
    exit_code = 3


class FormatError(CollageError):
    """Corrupt, truncated or foreign binary file."""
    exit_code = 5

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class DivergenceError(CollageError, ArithmeticError):
    """Training produced a non-finite loss."""
    exit_code = 4

    def __init__(self, iteration: int, loss: float):
        self.iteration = iteration
        self.loss = loss
        super().__init__(f"Loss became non-finite ({loss}) at iteration {iteration}")


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the process exit code."""
    if isinstance(error, CollageError):
        return error.exit_code
    if isinstance(error, OSError):
        return 3
    return 1
