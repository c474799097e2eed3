"""
Error handling for the consensus game simulator
Domain exceptions plus structured error reporting for the command line
"""
import logging
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError


logger = logging.getLogger(__name__)


class ErrorType(str, Enum):
    """Types of errors that can occur"""
    # Configuration errors
    INVALID_CONFIG = "invalid_config"
    INVALID_GRAPH = "invalid_graph"
    INVALID_WEIGHTS = "invalid_weights"
    INVALID_ACTION = "invalid_action"

    # Solver errors
    ENUMERATION_GUARD = "enumeration_guard"
    ENERGY_OVERDRAFT = "energy_overdraft"
    CLASSIFIER_DOMAIN = "classifier_domain"
    UNCLASSIFIED_STEP = "unclassified_step"

    # System errors
    IO_ERROR = "io_error"
    INTERNAL = "internal"


class FieldError(BaseModel):
    """A single configuration problem located by a dotted field path"""
    path: str
    message: str


class ConsensusGameError(Exception):
    """Base class for every error raised by the simulator"""
    error_type = ErrorType.INTERNAL


class ConfigValidationError(ConsensusGameError):
    """Raised when a scenario or sweep configuration is invalid"""
    error_type = ErrorType.INVALID_CONFIG

    def __init__(self, errors: List[FieldError]):
        self.errors = list(errors)
        summary = "; ".join(f"{e.path}: {e.message}" for e in self.errors)
        super().__init__(f"Invalid configuration: {summary}")


class GraphError(ConsensusGameError):
    """Raised for malformed graphs or graphs lacking a required property"""
    error_type = ErrorType.INVALID_GRAPH


class WeightError(ConsensusGameError):
    """Raised when consensus weights are missing or violate the row-sum condition"""
    error_type = ErrorType.INVALID_WEIGHTS


class InvalidActionError(ConsensusGameError):
    """Raised when an action triple breaks the attack/recovery set rules"""
    error_type = ErrorType.INVALID_ACTION


class EnergyOverdraftError(ConsensusGameError):
    """Raised when a charge exceeds the energy available to a player"""
    error_type = ErrorType.ENERGY_OVERDRAFT


class EnumerationGuardError(ConsensusGameError):
    """Raised when an exhaustive enumeration would exceed its configured size"""
    error_type = ErrorType.ENUMERATION_GUARD


class ClassifierDomainError(ConsensusGameError):
    """Raised when the one-step equilibrium classifier is used outside h=1, a=0"""
    error_type = ErrorType.CLASSIFIER_DOMAIN


class UnclassifiedStepError(ConsensusGameError):
    """Raised when recovery appears to lower the group index"""
    error_type = ErrorType.UNCLASSIFIED_STEP


class ErrorDetail(BaseModel):
    """Structured error report printed by the command line"""
    error: str
    detail: Optional[str] = None
    error_type: ErrorType = ErrorType.INTERNAL
    exit_code: int = 1
    fields: List[FieldError] = []

    class Config:
        use_enum_values = True
        json_schema_extra = {
            "example": {
                "error": "Invalid configuration",
                "detail": "attacker: beta_strong must exceed beta_normal",
                "error_type": "invalid_config",
                "exit_code": 2,
                "fields": [{"path": "attacker", "message": "beta_strong must exceed beta_normal"}]
            }
        }


class ErrorHandler:
    """Central error conversion and reporting"""

    EXIT_OK = 0
    EXIT_FAILURE = 1
    EXIT_INVALID_CONFIG = 2
    EXIT_SOLVER_GUARD = 3
    EXIT_IO_ERROR = 4

    # Errors caused by what the user supplied
    CONFIG_ERRORS = {
        ErrorType.INVALID_CONFIG,
        ErrorType.INVALID_GRAPH,
        ErrorType.INVALID_WEIGHTS,
        ErrorType.INVALID_ACTION,
        ErrorType.CLASSIFIER_DOMAIN,
    }

    @staticmethod
    def format_location(loc: tuple) -> str:
        """
        Render a pydantic error location as a dotted path

        Args:
            loc: Location tuple, e.g. ("graph", "edges", 2, 0)

        Returns:
            Path string such as "graph.edges[2][0]"
        """
        path = ""
        for part in loc:
            if isinstance(part, int):
                path += f"[{part}]"
            else:
                path = f"{path}.{part}" if path else str(part)
        return path or "<root>"

    @staticmethod
    def from_validation_error(
        exc: ValidationError,
        prefix: str = ""
    ) -> ConfigValidationError:
        """
        Convert a pydantic ValidationError into a ConfigValidationError

        Args:
            exc: Error raised by model validation
            prefix: Optional path prefix for nested documents

        Returns:
            ConfigValidationError carrying one FieldError per problem
        """
        errors = []
        for item in exc.errors():
            path = ErrorHandler.format_location(tuple(item.get("loc", ())))
            if prefix:
                path = prefix if path == "<root>" else f"{prefix}.{path}"
            message = str(item.get("msg", "invalid value"))
            # pydantic prefixes ValueError messages
            if message.startswith("Value error, "):
                message = message[len("Value error, "):]
            errors.append(FieldError(path=path, message=message))
        return ConfigValidationError(errors)

    @staticmethod
    def exit_code_for(error_type: ErrorType) -> int:
        """
        Map an error type to a process exit code

        Args:
            error_type: Type of error

        Returns:
            Exit code for the command line
        """
        if error_type in ErrorHandler.CONFIG_ERRORS:
            return ErrorHandler.EXIT_INVALID_CONFIG
        if error_type == ErrorType.ENUMERATION_GUARD:
            return ErrorHandler.EXIT_SOLVER_GUARD
        if error_type == ErrorType.IO_ERROR:
            return ErrorHandler.EXIT_IO_ERROR
        return ErrorHandler.EXIT_FAILURE

    @staticmethod
    def handle_exception(exc: BaseException) -> ErrorDetail:
        """
        Convert any exception into an ErrorDetail

        Args:
            exc: Exception raised while running a command

        Returns:
            ErrorDetail with message, type and exit code
        """
        if isinstance(exc, ValidationError):
            exc = ErrorHandler.from_validation_error(exc)

        if isinstance(exc, ConfigValidationError):
            return ErrorDetail(
                error="Invalid configuration",
                detail=str(exc),
                error_type=exc.error_type,
                exit_code=ErrorHandler.EXIT_INVALID_CONFIG,
                fields=exc.errors
            )

        if isinstance(exc, ConsensusGameError):
            titles = {
                ErrorType.INVALID_GRAPH: "Invalid graph",
                ErrorType.INVALID_WEIGHTS: "Invalid consensus weights",
                ErrorType.INVALID_ACTION: "Invalid action",
                ErrorType.ENUMERATION_GUARD: "Enumeration limit exceeded",
                ErrorType.ENERGY_OVERDRAFT: "Energy overdraft",
                ErrorType.CLASSIFIER_DOMAIN: "Classifier outside its validity domain",
                ErrorType.UNCLASSIFIED_STEP: "Unclassified step",
            }
            return ErrorDetail(
                error=titles.get(exc.error_type, "Simulation error"),
                detail=str(exc),
                error_type=exc.error_type,
                exit_code=ErrorHandler.exit_code_for(exc.error_type)
            )

        if isinstance(exc, OSError):
            return ErrorDetail(
                error="I/O error",
                detail=str(exc),
                error_type=ErrorType.IO_ERROR,
                exit_code=ErrorHandler.EXIT_IO_ERROR
            )

        logger.error(f"Unexpected error: {exc!r}", exc_info=exc)
        return ErrorDetail(
            error="Internal error",
            detail=str(exc),
            error_type=ErrorType.INTERNAL,
            exit_code=ErrorHandler.EXIT_FAILURE
        )

    @staticmethod
    def log_error(
        command: str,
        detail: ErrorDetail,
        context: Optional[Dict[str, Any]] = None
    ):
        """
        Log an error with its context

        Args:
            command: Command that failed
            detail: Structured error
            context: Additional context information
        """
        log_data = {
            "command": command,
            "error_type": detail.error_type,
            "error": detail.error,
            "detail": detail.detail,
        }
        if context:
            log_data.update(context)

        logger.error(f"Command failed: {log_data}")

    @staticmethod
    def aggregate_sweep_errors(errors: List[Dict[str, Any]]) -> Dict[str, Any]:
        """
        Aggregate errors from failed sweep points

        Args:
            errors: List of error dictionaries with an "error" key

        Returns:
            Summary of errors
        """
        if not errors:
            return {"total_errors": 0, "unique_errors": [], "most_common_error": None}

        error_counts: Dict[str, int] = {}
        for error in errors:
            error_msg = error.get("error", "unknown")
            error_counts[error_msg] = error_counts.get(error_msg, 0) + 1

        most_common = max(error_counts.items(), key=lambda x: x[1])

        return {
            "total_errors": len(errors),
            "unique_errors": list(error_counts.keys()),
            "most_common_error": most_common[0],
            "error_counts": error_counts
        }
