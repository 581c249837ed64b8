"""Exception hierarchy shared by every module in the package."""


class ApolloniusError(Exception):
    """Base class for all package errors."""


class DegenerateGeometry(ApolloniusError, ValueError):
    """Raised when points coincide or a construction has no well-defined answer."""


class InvalidSpeeds(ApolloniusError, ValueError):
    """Raised when the pursuer is not strictly faster than the evader."""


class InvalidTimestep(ApolloniusError, ValueError):
    pass


class UnknownId(ApolloniusError, KeyError):
    pass


class EmptyEvaderSet(ApolloniusError, ValueError):
    pass


class IterationLimitExceeded(ApolloniusError, RuntimeError):
    """The allocation loop failed to settle within its iteration cap.

    The offending snapshot is attached as ``snapshot`` for offline analysis.
    """

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class InvalidSpec(ApolloniusError, ValueError):
    pass


class InvalidScenario(ApolloniusError, ValueError):
    pass


class SimulationComplete(ApolloniusError, RuntimeError):
    """``step`` was called after every evader had already been captured."""


class MaxTimeExceeded(ApolloniusError, RuntimeError):
    """The simulation clock reached ``max_time`` with evaders still free.

    ``trace`` holds whatever was recorded up to that point.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NoCapture(ApolloniusError, RuntimeError):
    pass


class ValidationFailure(ApolloniusError, AssertionError):
    """An oracle found a counterexample.

    ``counterexample`` is a dict describing the offending heading or timestep.
    """

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
