"""pose_extract: video-to-keypoint adapter.

Runs a holistic pose estimator over a video file and writes the canonical
keypoint file format (46 upper-body/hand joints, 2D, image coordinates).
"""

from .errors import (
    EstimatorError,
    ExtractionError,
    NoFramesError,
    UnreadableVideoError,
)
from .extract import ExtractionJob, ExtractionResult, extract_keypoints
from .mapping import LANDMARK_TO_JOINT

__all__ = [
    "ExtractionJob",
    "ExtractionResult",
    "extract_keypoints",
    "LANDMARK_TO_JOINT",
    "ExtractionError",
    "UnreadableVideoError",
    "NoFramesError",
    "EstimatorError",
]

__version__ = "0.1.0"
