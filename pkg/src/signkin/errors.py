"""Exception hierarchy shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ToolkitError):
    """A malformed input file. Carries the offending line number when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"line {line}: "
        super().__init__(loc + message)


class MalformedHeaderError(ParseError):
    pass


class NonMonotoneTimestampError(ParseError):
    pass


class UnknownJointError(ParseError):
    pass


class MixedDimensionError(ParseError):
    pass


class AnnotationRowError(ParseError):
    pass


class IncompleteMappingError(ToolkitError):
    pass


class ArgumentError(ToolkitError):
    pass


class EmptyTrajectoryError(ToolkitError):
    """A metric was requested on an empty trajectory."""


class IntervalNotCoveredError(ToolkitError):
    pass


class MissingJointsError(ToolkitError):
    """No member joint of the requested group appears in the interval."""


class GapRatioExceededError(ToolkitError):
    """Every member joint exceeded the allowed gap fraction."""


class DegenerateInputError(ToolkitError):
    """Statistic undefined for the given input (zero variance, coincident means, ...)."""


class InsufficientDataError(ToolkitError):
    pass


class NormalizationError(ToolkitError):
    """Vector cannot be L2-normalized (zero mean)."""


class EmptyCorpusError(ToolkitError):
    pass
