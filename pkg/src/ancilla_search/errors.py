"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for every error raised by ancilla_search."""


class CapacityError(SimulationError):
    """Requested register is larger than the configured qubit cap."""


class DomainError(SimulationError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(SimulationError, ValueError):
    """A structural object (block, round, layout) failed validation."""


class ParseError(SimulationError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
