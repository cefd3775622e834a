"""
Typed errors raised by the reach-avoid solver and simulator.

Every error derives from ReachAvoidError so callers (the CLI in particular)
can map whole families onto exit codes.
"""


class ReachAvoidError(Exception):
    """Base class for all domain errors."""


class InvalidScenarioError(ReachAvoidError):
    def __init__(self, errors):
        self.errors = list(errors) if not isinstance(errors, str) else [errors]
        super().__init__("; ".join(self.errors))


class ScenarioFileError(ReachAvoidError):
    """A scenario document could not be parsed.

    `details` is either a string with line/column context or the list of
    pydantic error dicts naming the offending fields.
    """

    def __init__(self, message, details=None):
        self.details = details if details is not None else message
        super().__init__(message)


class UnsupportedRegimeError(ReachAvoidError):
    """Speed ratio above one: no Apollonius locus or value function exists."""


class DegenerateGeometryError(ReachAvoidError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class RegionMismatchError(ReachAvoidError):
    """A region-specific quantity was requested in the other region."""


class SingularGradientError(ReachAvoidError):
    def __init__(self, message, value):
        self.value = value
        super().__init__(message)


class SingularControlError(ReachAvoidError):
    pass


class TooLargeError(ReachAvoidError):
    pass


class IntegrationDivergedError(ReachAvoidError):
    pass


class NoTerminationError(ReachAvoidError):
    pass


class InadmissibleControlError(ReachAvoidError):
    pass
