"""135-dim feature codec for SMPL pose sequences.

Per frame the features are:
  [0:126]    21 parent-relative body rotations in 6D form
  [126:132]  global root rotation in 6D form
  [132:134]  root X/Y velocity in the global frame (later-frame difference
             scaled by fps; first frame duplicates the second)
  [134]      absolute root height

Before encoding, the sequence is canonicalized: everything is rotated about
Z so the first frame's global-rotation yaw is zero, and translated so the
first root position projects to the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .rotations import is_rotation, rot_z, rotation_from_6d, rotation_to_6d, yaw
from .types import SMPL_DIM, FeatureSequence

NUM_BODY_JOINTS = 21


@dataclass
class SmplPoseSequence:
    """Parent-relative body rotations, global rotation and root translation."""

    body_rots: np.ndarray  # [F, 21, 3, 3]
    global_rot: np.ndarray  # [F, 3, 3]
    root_trans: np.ndarray  # [F, 3] meters

    def __post_init__(self):
        self.body_rots = np.asarray(self.body_rots, dtype=np.float64)
        self.global_rot = np.asarray(self.global_rot, dtype=np.float64)
        self.root_trans = np.asarray(self.root_trans, dtype=np.float64)
        n = self.num_frames
        if self.body_rots.shape != (n, NUM_BODY_JOINTS, 3, 3):
            raise ValueError(f"body_rots must be [F, {NUM_BODY_JOINTS}, 3, 3]")
        if self.global_rot.shape != (n, 3, 3):
            raise ValueError("global_rot must be [F, 3, 3]")
        if self.root_trans.shape != (n, 3):
            raise ValueError("root_trans must be [F, 3]")
        if not (is_rotation(self.body_rots) and is_rotation(self.global_rot)):
            raise ValueError("pose contains matrices that are not proper rotations")
        if not np.isfinite(self.root_trans).all():
            raise ValueError("root translation contains non-finite values")

    @property
    def num_frames(self):
        return self.body_rots.shape[0]


def canonicalize_smpl(pose: SmplPoseSequence) -> SmplPoseSequence:
    """Zero the first frame's yaw and move its root above the origin."""
    psi0 = yaw(pose.global_rot[0])
    rot = rot_z(-psi0)
    global_rot = rot[None] @ pose.global_rot
    anchor = pose.root_trans[0] * np.array([1.0, 1.0, 0.0])
    root = (pose.root_trans - anchor) @ rot.T
    return SmplPoseSequence(pose.body_rots.copy(), global_rot, root)


class SmplFeatureCodec(TransformerMixin, BaseEstimator):
    """Bidirectional SMPL pose <-> feature transform."""

    feature_dim = SMPL_DIM

    def __init__(self, fps=12.5):
        self.fps = fps

    def fit(self, X=None, y=None):
        return self

    def transform(self, pose: SmplPoseSequence) -> FeatureSequence:
        if pose.num_frames < 2:
            raise ValueError("need at least 2 frames to compute velocities")
        pose = canonicalize_smpl(pose)
        n = pose.num_frames

        body6d = rotation_to_6d(pose.body_rots).reshape(n, NUM_BODY_JOINTS * 6)
        glob6d = rotation_to_6d(pose.global_rot)

        disp = (pose.root_trans[1:, :2] - pose.root_trans[:-1, :2]) * self.fps
        vel = np.empty((n, 2))
        vel[1:] = disp
        vel[0] = disp[0]

        features = np.concatenate([body6d, glob6d, vel, pose.root_trans[:, 2:3]], axis=1)
        return FeatureSequence(features, standardized=False)

    def inverse_transform(self, feats: FeatureSequence) -> SmplPoseSequence:
        if feats.dim != SMPL_DIM:
            raise ValueError(f"expected {SMPL_DIM}-dim features, got {feats.dim}")
        if feats.standardized:
            raise ValueError("features must be destandardized before decoding")

        f = feats.features
        n = feats.num_frames
        body = rotation_from_6d(f[:, :126].reshape(n, NUM_BODY_JOINTS, 6))
        glob = rotation_from_6d(f[:, 126:132])

        root = np.zeros((n, 3))
        if n > 1:
            root[1:, :2] = np.cumsum(f[1:, 132:134] / self.fps, axis=0)
        root[:, 2] = f[:, 134]
        return SmplPoseSequence(body, glob, root)
