"""
Exception hierarchy for the affective-polarization toolkit.

Every error carries a stable machine-readable ``category`` and the process
exit code the CLI uses when the error escapes a command.
"""

from typing import Optional


class PolarizationError(Exception):
    """Base class for all toolkit errors."""

    category = "internal"
    exit_code = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        payload = {"error": self.category, "message": self.message}
        payload.update({k: v for k, v in self.context.items() if v is not None})
        return payload


class ConfigError(PolarizationError):
    """Invalid run configuration: unknown keys, bad values, missing inputs."""

    category = "config"
    exit_code = 3


class ParameterError(ConfigError, ValueError):
    """Model parameters outside their admissible range."""

    category = "parameter"


class UnknownSuiteError(ConfigError):
    category = "unknown_suite"


class GraphFormatError(PolarizationError):
    """
    A graph, panel or observation file failed to parse.

    Args:
        message: What went wrong
        path: File being read
        line: 1-based line number (header is line 1)
        column: Offending column name
    """

    category = "input_format"
    exit_code = 4

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[str] = None):
        location = []
        if path is not None:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column '{column}'")
        full = f"{message} ({', '.join(location)})" if location else message
        super().__init__(full, path=str(path) if path is not None else None,
                         line=line, column=column)
        self.path = path
        self.line = line
        self.column = column


class MissingNodeError(GraphFormatError, KeyError):
    """A referenced node id has no party or stance assignment."""

    category = "missing_node"

    def __init__(self, node_id, message: Optional[str] = None, **kwargs):
        super().__init__(message or f"node {node_id!r} is not defined", **kwargs)
        self.node_id = node_id

    def __str__(self):
        return self.message


class EstimationError(PolarizationError):
    category = "estimation"
    exit_code = 5


class InsufficientObservationsError(EstimationError):
    category = "insufficient_observations"


class SingularDesignError(EstimationError):
    category = "singular_design"


class SeparationError(EstimationError):
    category = "separation"


class NotConvergedError(EstimationError):
    category = "not_converged"
