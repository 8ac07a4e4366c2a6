"""64-dim feature codec for 21-joint skeleton motion.

Per frame the features are:
  [0:60]   the 20 non-root joints in the body's local frame
  [60]     change of the heading angle since the previous frame (first = 0)
  [61:63]  root X/Y velocity expressed in the current local frame
  [63]     absolute root height

Velocities are frame differences scaled by fps and stored at the later
frame; the first frame duplicates the second so every frame has a value.
Decoding integrates headings from 0 and the root from the origin, so
decode(encode(m)) reproduces the canonicalized input.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .frames import frame_rotations, heading_angles, wrap_angle
from .rotations import rot_z
from .types import MMM21, SKELETON_DIM, FeatureSequence, MotionSequence


class SkeletonFeatureCodec(TransformerMixin, BaseEstimator):
    """Bidirectional motion <-> feature transform for MMM-21 skeletons."""

    feature_dim = SKELETON_DIM

    def __init__(self, fps=12.5):
        self.fps = fps

    def fit(self, X=None, y=None):
        return self

    def transform(self, motion: MotionSequence) -> FeatureSequence:
        if motion.joint_set != MMM21:
            raise ValueError(f"skeleton codec expects {MMM21} motion, got {motion.joint_set}")
        if motion.num_frames < 2:
            raise ValueError("need at least 2 frames to compute velocities")
        if abs(motion.fps - self.fps) > 1e-9:
            raise ValueError(f"motion is at {motion.fps} Hz, codec expects {self.fps} Hz")

        joints = motion.joints
        theta = heading_angles(joints)
        rot = rot_z(theta)
        root = joints[:, 0, :]
        origin = root * np.array([1.0, 1.0, 0.0])

        local = np.einsum("fjk,fkl->fjl", joints[:, 1:, :] - origin[:, None, :], rot)

        deltas = np.zeros(motion.num_frames)
        deltas[1:] = wrap_angle(theta[1:] - theta[:-1])

        disp = (root[1:] - root[:-1]) * self.fps
        vel_local = np.einsum("fk,fkl->fl", disp, rot[1:])[:, :2]
        vel = np.empty((motion.num_frames, 2))
        vel[1:] = vel_local
        vel[0] = vel_local[0]

        features = np.concatenate(
            [local.reshape(motion.num_frames, 60), deltas[:, None], vel, root[:, 2:3]], axis=1
        )
        return FeatureSequence(features, standardized=False)

    def inverse_transform(self, feats: FeatureSequence) -> MotionSequence:
        if feats.dim != SKELETON_DIM:
            raise ValueError(f"expected {SKELETON_DIM}-dim features, got {feats.dim}")
        if feats.standardized:
            raise ValueError("features must be destandardized before decoding")

        f = feats.features
        n = feats.num_frames
        local = f[:, :60].reshape(n, 20, 3)
        # First heading is 0 by convention; frame 0's delta channel is padding.
        theta = np.concatenate([[0.0], np.cumsum(f[1:, 60])])
        rot = rot_z(theta)

        vel_global = np.einsum("fk,fkl->fl", np.pad(f[1:, 61:63], ((0, 0), (0, 1))), np.swapaxes(rot[1:], 1, 2))
        root_xy = np.zeros((n, 2))
        if n > 1:
            root_xy[1:] = np.cumsum(vel_global[:, :2] / self.fps, axis=0)

        root = np.concatenate([root_xy, f[:, 63:64]], axis=1)
        origin = root * np.array([1.0, 1.0, 0.0])
        joints = np.empty((n, 21, 3))
        joints[:, 0, :] = root
        joints[:, 1:, :] = np.einsum("fjk,fkl->fjl", local, np.swapaxes(rot, 1, 2)) + origin[:, None, :]
        return MotionSequence(joints, self.fps, MMM21)
