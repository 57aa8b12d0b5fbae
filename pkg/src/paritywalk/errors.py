"""Exception types shared across the package."""


class ParityWalkError(Exception):
    """Base class for package errors."""


class InvalidArgumentError(ParityWalkError, ValueError):
    """An argument violates an operation's precondition."""


class CapabilityError(ParityWalkError):
    """The request is valid but exceeds a hard resource or size bound."""


class ParseError(ParityWalkError, ValueError):
    """A file or spec string is malformed; the message names the offending field."""


class IntegrationError(ParityWalkError):
    """The propagator lost accuracy (norm drift over budget)."""


class TreeConstructionError(ParityWalkError):
    """The methodical non-overlapping tree construction could not complete."""
