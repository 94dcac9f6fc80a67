"""Pose-estimator backends.

An estimator is any object with ``process(frame_bgr) -> dict`` mapping raw
landmark keys (``pose_<i>``, ``left_hand_<i>``, ``right_hand_<i>``) to
``(x, y, confidence)`` tuples in normalized image coordinates, returning
an empty dict when no person is detected, plus a ``close()`` method.

``MediaPipeEstimator`` wraps the holistic solution when the ``mediapipe``
package is importable; environments without it can pass any conforming
object to ``extract_keypoints`` (the tests use a deterministic stub).
"""

from __future__ import annotations

from .errors import EstimatorError


class MediaPipeEstimator:
    """Holistic body+hands landmarks via the mediapipe package."""

    def __init__(self, detection_confidence: float = 0.5, tracking_confidence: float = 0.5):
        try:
            import mediapipe as mp
        except ImportError as exc:
            raise EstimatorError(
                "the mediapipe package is not installed; install the "
                "'mediapipe' extra or supply a custom estimator"
            ) from exc
        try:
            self._holistic = mp.solutions.holistic.Holistic(
                min_detection_confidence=detection_confidence,
                min_tracking_confidence=tracking_confidence,
            )
        except Exception as exc:  # solver init can fail on unsupported hosts
            raise EstimatorError(f"holistic model initialization failed: {exc}") from exc
        self._cv2 = __import__("cv2")

    def process(self, frame_bgr) -> dict:
        rgb = self._cv2.cvtColor(frame_bgr, self._cv2.COLOR_BGR2RGB)
        results = self._holistic.process(rgb)
        out: dict[str, tuple[float, float, float]] = {}
        if results.pose_landmarks is not None:
            for i, lm in enumerate(results.pose_landmarks.landmark):
                out[f"pose_{i}"] = (lm.x, lm.y, lm.visibility)
        for attr, prefix in (
            ("left_hand_landmarks", "left_hand"),
            ("right_hand_landmarks", "right_hand"),
        ):
            landmarks = getattr(results, attr)
            if landmarks is None:
                continue  # undetected hand: no rows for that hand's joints
            for i, lm in enumerate(landmarks.landmark):
                # hand landmarks carry no per-point score; report full confidence
                out[f"{prefix}_{i}"] = (lm.x, lm.y, 1.0)
        return out

    def close(self):
        self._holistic.close()


def default_estimator(detection_confidence: float, tracking_confidence: float):
    return MediaPipeEstimator(detection_confidence, tracking_confidence)
