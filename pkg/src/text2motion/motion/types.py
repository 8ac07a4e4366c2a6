"""Core motion data containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MMM21 = "mmm21"
SMPLH = "smplh"

SKELETON_DIM = 64
SMPL_DIM = 135


@dataclass
class MotionSequence:
    """Joint positions over time: [frames, joints, 3] meters, Z up."""

    joints: np.ndarray
    fps: float
    joint_set: str = MMM21

    def __post_init__(self):
        self.joints = np.asarray(self.joints, dtype=np.float64)
        if self.joints.ndim != 3 or self.joints.shape[2] != 3:
            raise ValueError(f"joints must be [F, J, 3], got shape {self.joints.shape}")
        if self.joints.shape[0] < 1:
            raise ValueError("motion needs at least one frame")
        if self.joint_set == MMM21 and self.joints.shape[1] != 21:
            raise ValueError(f"{MMM21} motion must have 21 joints, got {self.joints.shape[1]}")
        if not np.isfinite(self.joints).all():
            raise ValueError("motion contains non-finite coordinates")
        if self.fps <= 0:
            raise ValueError("fps must be positive")

    @property
    def num_frames(self):
        return self.joints.shape[0]

    @property
    def num_joints(self):
        return self.joints.shape[1]

    def copy(self):
        return MotionSequence(self.joints.copy(), self.fps, self.joint_set)


@dataclass
class FeatureSequence:
    """Model-facing feature matrix [frames, p]; p=64 skeleton, p=135 SMPL."""

    features: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be [F, p], got shape {self.features.shape}")
        if self.features.shape[1] not in (SKELETON_DIM, SMPL_DIM):
            raise ValueError(
                f"feature dim must be {SKELETON_DIM} or {SMPL_DIM}, got {self.features.shape[1]}"
            )
        if not np.isfinite(self.features).all():
            raise ValueError("features contain non-finite values")

    @property
    def num_frames(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    def copy(self):
        return FeatureSequence(self.features.copy(), self.standardized)
