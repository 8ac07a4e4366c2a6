"""Frame-rate conversion for motion sequences."""

from __future__ import annotations

import numpy as np

from .types import MotionSequence


def resample(motion: MotionSequence, target_fps: float) -> MotionSequence:
    """Change a motion's frame rate.

    Downsampling keeps every k-th frame and requires an integer stride
    (100 -> 12.5 Hz is stride 8). Upsampling linearly interpolates every
    coordinate, passing exactly through the original samples.
    """
    if target_fps <= 0:
        raise ValueError("target fps must be positive")
    if abs(target_fps - motion.fps) < 1e-9:
        return motion.copy()

    if target_fps < motion.fps:
        stride = motion.fps / target_fps
        if abs(stride - round(stride)) > 1e-9:
            raise ValueError(
                f"downsampling {motion.fps} -> {target_fps} Hz needs an integer stride, got {stride:.4f}"
            )
        return MotionSequence(motion.joints[:: int(round(stride))].copy(), target_fps, motion.joint_set)

    n = motion.num_frames
    duration = (n - 1) / motion.fps
    n_out = int(np.floor(duration * target_fps + 1e-9)) + 1
    t_src = np.arange(n) / motion.fps
    t_out = np.arange(n_out) / target_fps
    flat = motion.joints.reshape(n, -1)
    out = np.empty((n_out, flat.shape[1]))
    for c in range(flat.shape[1]):
        out[:, c] = np.interp(t_out, t_src, flat[:, c])
    return MotionSequence(out.reshape(n_out, motion.num_joints, 3), target_fps, motion.joint_set)
