"""
Base Stage Class and Common Functionality
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Generic, Optional, TypeVar
import logging

from config.settings import Settings
from ..errors import CollageError, exit_code_for

T = TypeVar('T')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class StageStatus(Enum):
    """Stage execution status."""
    SUCCESS = "success"
    FAILED = "failed"


@dataclass
class StageResult(Generic[T]):
    """Outcome of one pipeline stage: its data, or the exception that stopped it."""
    success: bool
    data: Optional[T] = None
    error: Optional[str] = None
    status: StageStatus = StageStatus.SUCCESS
    metadata: Dict[str, Any] = field(default_factory=dict)
    exception: Optional[BaseException] = None

    def __post_init__(self):
        if not self.success:
            self.status = StageStatus.FAILED

    @property
    def exit_code(self) -> int:
        if self.success:
            return 0
        return exit_code_for(self.exception) if self.exception is not None else 1


def stage_logger(name: str, level: str) -> logging.Logger:
    """A non-propagating logger with one stream handler."""
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.WARNING))
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.propagate = False
    return logger


class BaseStage(ABC):
    """Abstract base class for the fit pipeline stages.

    Stages never raise: library errors are caught and returned as a failed
    ``StageResult`` so the workflow can route to its final step.
    """

    def __init__(self, settings: Settings):
        self.settings = settings
        self.logger = stage_logger(self.__class__.__name__, settings.log_level)

    @abstractmethod
    def process(self, *args, **kwargs) -> StageResult:
        """Run the stage."""

    def _handle_error(self, error: Exception, context: str = "") -> StageResult:
        error_msg = f"{context}: {error}" if context else str(error)
        if isinstance(error, CollageError):
            self.logger.error(error_msg)
        else:
            # Not one of ours: keep the traceback
            self.logger.exception(error_msg)
        return StageResult(success=False, error=error_msg, exception=error)

    def _log_success(self, message: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        self.logger.info(message)
        if metadata and self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(f"Stage metadata: {metadata}")
