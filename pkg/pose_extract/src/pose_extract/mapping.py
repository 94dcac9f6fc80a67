"""Landmark-index-to-canonical-joint mapping.

Raw keys name holistic-estimator landmarks: ``pose_<i>`` for body
landmarks and ``left_hand_<i>`` / ``right_hand_<i>`` for the 21-point
hand models. Only the 46 upper-limb landmarks below are exported; all
other landmarks (face, lower body, wrist duplicates) are dropped at
write time so downstream consumers see a single closed joint set.
"""

_RIGHT_HAND = {
    9: "Middle1", 10: "Middle2", 11: "Middle3", 12: "Middle4",
    13: "Ring", 14: "Ring1", 15: "Ring2", 16: "Ring4",
    17: "Pinky", 18: "Pinky1", 19: "Pinky2", 20: "Pinky4",
    5: "Index", 6: "Index1", 7: "Index2", 8: "Index4",
    1: "Thumb1", 2: "Thumb2", 3: "Thumb3", 4: "Thumb4",
}

LANDMARK_TO_JOINT: dict[str, str] = {
    "pose_12": "RightArm",
    "pose_14": "RightForeArm",
    "pose_16": "RightHand",
    "pose_11": "LeftArm",
    "pose_13": "LeftForeArm",
    "pose_15": "LeftHand",
}
for _idx, _suffix in _RIGHT_HAND.items():
    LANDMARK_TO_JOINT[f"right_hand_{_idx}"] = f"RightHand{_suffix}"
    LANDMARK_TO_JOINT[f"left_hand_{_idx}"] = f"LeftHand{_suffix}"

assert len(LANDMARK_TO_JOINT) == 46

CANONICAL_JOINTS = frozenset(LANDMARK_TO_JOINT.values())
