"""Custom exceptions for entwit"""

from typing import Any, Optional


class EntwitError(Exception):
    def __init__(self, message: str, detail: Optional[Any] = None):
        self.message = message
        self.detail = detail
        super().__init__(message)


class GraphError(EntwitError):
    """Raised on bad vertex indices, self-loops or invalid builder parameters"""
    pass


class ColoringError(EntwitError):
    """Raised when a coloring is improper or none exists within the allowed class count"""
    pass


class PartitionError(EntwitError):
    """Raised on malformed partitions or block counts out of range"""
    pass


class GateExceededError(EntwitError):
    """Raised when an enumeration or dense-simulation size gate would be exceeded"""

    def __init__(self, message: str, limit: int, requested: int):
        self.limit = limit
        self.requested = requested
        super().__init__(message, detail={"limit": limit, "requested": requested})


class WitnessError(EntwitError):
    """Raised when a witness cannot be built soundly for the given input"""
    pass


class EstimateError(EntwitError):
    """Raised on projector estimates that do not match the witness they feed"""
    pass


class ConfigError(EntwitError):
    """Raised on invalid command-line or environment configuration"""
    pass


class BoundUnavailableError(EntwitError):
    """Raised when no closed-form partition bound applies to the requested family and m"""
    pass


class StateError(EntwitError):
    """Raised on mismatched qubit counts or malformed dense states"""
    pass
