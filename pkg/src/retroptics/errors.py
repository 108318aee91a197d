"""Exception hierarchy shared by all modules."""


class RetropticsError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(RetropticsError, ValueError):
    pass


class DegenerateStateError(RetropticsError, ValueError):
    """Raised when a state with zero norm has to be normalized."""


class BasisMismatchError(RetropticsError, ValueError):
    pass


class InvalidElementError(RetropticsError, ValueError):
    """Raised for a beam-splitter matrix that is not unitary.

    ``deviation`` carries ``max|M^dagger M - I|``.
    """

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class ImpossibleObservationError(RetropticsError):
    """The detection record has zero probability under the given state."""


class ResourceError(RetropticsError):
    pass


class ScenarioError(RetropticsError, ValueError):
    """Scenario file problem, optionally located by line number or key."""

    def __init__(self, message, line=None, key=None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key '{key}'")
        text = f"{', '.join(location)}: {message}" if location else message
        super().__init__(text)
        self.line = line
        self.key = key
