"""Adapter error types."""


class ExtractionError(Exception):
    """Base class for extraction failures."""


class UnreadableVideoError(ExtractionError):
    """The video file could not be opened."""


class NoFramesError(ExtractionError):
    """The video opened but yielded zero decodable frames."""


class EstimatorError(ExtractionError):
    """The pose estimator could not be initialized or is unavailable."""
