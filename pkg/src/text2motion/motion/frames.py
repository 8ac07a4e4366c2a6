"""Body-local coordinate frames and heading canonicalization.

The local frame of a pose has its origin at the root joint projected to the
ground. Its X axis comes from crossing global up with the average of the
left-right hip and shoulder vectors, Z stays global up, and Y completes the
right-handed triad. A body standing in the canonical direction (facing +X,
hips and shoulders spanning -Y to +Y with the left side at -Y) has a local
frame equal to the global one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import joints as J
from .rotations import rot_z
from .types import MMM21, MotionSequence

UP = np.array([0.0, 0.0, 1.0])
_DEGENERATE = 1e-8


@dataclass
class LocalFrame:
    origin: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray
    z_axis: np.ndarray

    @property
    def rotation(self):
        """Columns are the frame axes; maps local coordinates to global."""
        return np.stack([self.x_axis, self.y_axis, self.z_axis], axis=-1)


def _across(pose):
    hips = pose[..., J.LEFT_HIP, :] - pose[..., J.RIGHT_HIP, :]
    shoulders = pose[..., J.LEFT_SHOULDER, :] - pose[..., J.RIGHT_SHOULDER, :]
    return 0.5 * (hips + shoulders)


def compute_local_frame(pose):
    """Local frame of one [21, 3] pose; raises on a degenerate body."""
    pose = np.asarray(pose, dtype=np.float64)
    across = _across(pose)
    x_axis = np.cross(UP, across)
    norm = np.linalg.norm(x_axis)
    if norm < _DEGENERATE:
        raise ValueError("degenerate pose: hips/shoulders are collinear with the up axis")
    x_axis = x_axis / norm
    y_axis = np.cross(UP, x_axis)
    origin = pose[J.ROOT] * np.array([1.0, 1.0, 0.0])
    return LocalFrame(origin=origin, x_axis=x_axis, y_axis=y_axis, z_axis=UP.copy())


def heading_angles(joints):
    """Per-frame heading of [F, 21, 3] joints: angle of the local X axis in the XY plane."""
    across = _across(joints)
    x_axis = np.cross(UP[None, :], across)
    norms = np.linalg.norm(x_axis, axis=-1)
    if np.any(norms < _DEGENERATE):
        raise ValueError("degenerate pose: hips/shoulders are collinear with the up axis")
    return np.arctan2(x_axis[:, 1], x_axis[:, 0])


def frame_rotations(joints):
    """Per-frame local-frame rotation matrices [F, 3, 3] (Z rotations)."""
    return rot_z(heading_angles(joints))


def canonicalize(motion):
    """Rotate about Z so the first frame faces +X; move its ground point to the origin.

    Idempotent, and invariant under any prior global Z-rotation/XY-translation
    of the input.
    """
    if motion.joint_set != MMM21:
        raise ValueError("canonicalization expects an MMM-21 motion")
    frame0 = compute_local_frame(motion.joints[0])
    theta0 = np.arctan2(frame0.x_axis[1], frame0.x_axis[0])
    rot = rot_z(-theta0)
    joints = (motion.joints - frame0.origin) @ rot.T
    return MotionSequence(joints, motion.fps, motion.joint_set)


def wrap_angle(angle):
    """Wrap to (-pi, pi]."""
    return np.arctan2(np.sin(angle), np.cos(angle))
